//! Planar piecewise smooth vector fields and the Filippov classification of
//! switching-manifold points: crossing, sliding, escaping regions, tangential
//! singularities and fold visibility.

use crate::expr::{Expr, ExprError};
use crate::geom::Point;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

/// Step used by the central finite-difference fallback.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("point is not on the switching manifold (|f| = {0:e})")]
    NotOnSwitchingManifold(f64),
    #[error("neither field is tangent to the switching manifold at this point")]
    NotATangency,
    #[error("degenerate tangency: second Lie derivative also vanishes")]
    DegenerateTangency,
    #[error("sliding field undefined: Yf - Xf vanishes")]
    UndefinedSliding,
    #[error("expression error: {0}")]
    Expr(#[from] ExprError),
    #[error("invalid field document: {0}")]
    Json(#[from] serde_json::Error),
}

/// Which half-plane a smooth component governs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HalfPlane {
    /// Active on `f >= 0` (conventionally `X`).
    Upper,
    /// Active on `f <= 0` (conventionally `Y`).
    Lower,
}

type VecFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;
type JacFn = Arc<dyn Fn(Point) -> [[f64; 2]; 2] + Send + Sync>;
type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// One smooth planar vector field with an optional closed-form Jacobian.
#[derive(Clone)]
pub struct SmoothField2D {
    pub label: HalfPlane,
    eval: VecFn,
    jacobian: Option<JacFn>,
}

impl std::fmt::Debug for SmoothField2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothField2D")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

impl SmoothField2D {
    pub fn from_fn(
        label: HalfPlane,
        eval: impl Fn(Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        SmoothField2D {
            label,
            eval: Arc::new(eval),
            jacobian: None,
        }
    }

    pub fn with_jacobian(
        mut self,
        jac: impl Fn(Point) -> [[f64; 2]; 2] + Send + Sync + 'static,
    ) -> Self {
        self.jacobian = Some(Arc::new(jac));
        self
    }

    pub fn from_exprs(label: HalfPlane, fx: &str, fy: &str) -> Result<Self, FieldError> {
        let fx = Expr::parse(fx)?;
        let fy = Expr::parse(fy)?;
        Ok(SmoothField2D {
            label,
            eval: Arc::new(move |p| Point::new(fx.eval(p), fy.eval(p))),
            jacobian: None,
        })
    }

    pub fn eval(&self, p: Point) -> Point {
        (self.eval)(p)
    }

    /// Jacobian matrix, closed-form when available and central differences
    /// otherwise.
    pub fn jacobian(&self, p: Point) -> [[f64; 2]; 2] {
        if let Some(j) = &self.jacobian {
            return j(p);
        }
        let h = FD_STEP;
        let dx = (self.eval(Point::new(p.x + h, p.y)) - self.eval(Point::new(p.x - h, p.y)))
            * (0.5 / h);
        let dy = (self.eval(Point::new(p.x, p.y + h)) - self.eval(Point::new(p.x, p.y - h)))
            * (0.5 / h);
        [[dx.x, dy.x], [dx.y, dy.y]]
    }
}

/// A scalar function whose zero level set is the switching manifold.
#[derive(Clone)]
pub struct SwitchingFunction {
    value: ScalarFn,
    gradient: ScalarGrad,
    hessian: Option<JacFn>,
}

#[derive(Clone)]
enum ScalarGrad {
    Closed(VecFn),
    FiniteDifference,
}

impl std::fmt::Debug for SwitchingFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SwitchingFunction")
    }
}

impl SwitchingFunction {
    /// `f(x, y) = y`; the switching manifold is the horizontal axis.
    pub fn vertical() -> Self {
        SwitchingFunction {
            value: Arc::new(|p| p.y),
            gradient: ScalarGrad::Closed(Arc::new(|_| Point::new(0.0, 1.0))),
            hessian: Some(Arc::new(|_| [[0.0, 0.0], [0.0, 0.0]])),
        }
    }

    pub fn from_expr(src: &str) -> Result<Self, FieldError> {
        let e = Expr::parse(src)?;
        Ok(SwitchingFunction {
            value: Arc::new(move |p| e.eval(p)),
            gradient: ScalarGrad::FiniteDifference,
            hessian: None,
        })
    }

    pub fn value(&self, p: Point) -> f64 {
        (self.value)(p)
    }

    pub fn gradient(&self, p: Point) -> Point {
        match &self.gradient {
            ScalarGrad::Closed(g) => g(p),
            ScalarGrad::FiniteDifference => {
                let h = FD_STEP;
                Point::new(
                    (self.value(Point::new(p.x + h, p.y)) - self.value(Point::new(p.x - h, p.y)))
                        / (2.0 * h),
                    (self.value(Point::new(p.x, p.y + h)) - self.value(Point::new(p.x, p.y - h)))
                        / (2.0 * h),
                )
            }
        }
    }

    fn hessian(&self, p: Point) -> [[f64; 2]; 2] {
        if let Some(h) = &self.hessian {
            return h(p);
        }
        let s = FD_STEP;
        let gx = self.gradient(Point::new(p.x + s, p.y));
        let gx2 = self.gradient(Point::new(p.x - s, p.y));
        let gy = self.gradient(Point::new(p.x, p.y + s));
        let gy2 = self.gradient(Point::new(p.x, p.y - s));
        [
            [(gx.x - gx2.x) / (2.0 * s), (gy.x - gy2.x) / (2.0 * s)],
            [(gx.y - gx2.y) / (2.0 * s), (gy.y - gy2.y) / (2.0 * s)],
        ]
    }
}

/// The pair `(X, Y)` glued along the zero set of the switching function.
#[derive(Debug, Clone)]
pub struct PiecewiseField {
    pub upper: SmoothField2D,
    pub lower: SmoothField2D,
    pub switching: SwitchingFunction,
}

impl PiecewiseField {
    pub fn new(upper: SmoothField2D, lower: SmoothField2D, switching: SwitchingFunction) -> Self {
        PiecewiseField {
            upper,
            lower,
            switching,
        }
    }

    pub fn side(&self, which: HalfPlane) -> &SmoothField2D {
        match which {
            HalfPlane::Upper => &self.upper,
            HalfPlane::Lower => &self.lower,
        }
    }

    /// `Z(q)`: the governing smooth field off the switching manifold.
    pub fn eval(&self, p: Point) -> Point {
        if self.switching.value(p) >= 0.0 {
            self.upper.eval(p)
        } else {
            self.lower.eval(p)
        }
    }
}

/// Classification of an on-manifold point by the signs of `Xf`, `Yf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionClass {
    CrossingPos,
    CrossingNeg,
    Sliding,
    Escaping,
    TangencyRegular,
    TangencySingular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Visibility {
    Visible,
    Invisible,
}

/// Pairing of per-field visibilities at a two-fold, upper field first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoFoldKind {
    VisibleVisible,
    InvisibleVisible,
    VisibleInvisible,
    InvisibleInvisible,
}

/// Fold data at a tangential singularity.
///
/// `upper`/`lower` hold the visibility of each field that is tangent there;
/// `two_fold` is populated when both are.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldClass {
    pub upper: Option<Visibility>,
    pub lower: Option<Visibility>,
    pub two_fold: Option<TwoFoldKind>,
}

/// Classification tolerances, in the units of the field under study.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    pub on_sigma: f64,
    pub tangency: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            on_sigma: 1e-9,
            tangency: 1e-9,
        }
    }
}

/// First or second Lie derivative of `f` along `field` at `p`.
///
/// Order 1 is `<grad f, F>`; order 2 differentiates the order-1 value along
/// the field again, using closed-form Jacobians when the field carries them.
pub fn lie_derivative(
    field: &SmoothField2D,
    f: &SwitchingFunction,
    p: Point,
    order: u8,
) -> f64 {
    match order {
        1 => f.gradient(p).dot(field.eval(p)),
        2 => {
            // grad(Xf) = H_f F + J_F^T grad f
            let v = field.eval(p);
            let hess = f.hessian(p);
            let jac = field.jacobian(p);
            let g = f.gradient(p);
            let grad_lie = Point::new(
                hess[0][0] * v.x + hess[0][1] * v.y + jac[0][0] * g.x + jac[1][0] * g.y,
                hess[1][0] * v.x + hess[1][1] * v.y + jac[0][1] * g.x + jac[1][1] * g.y,
            );
            grad_lie.dot(v)
        }
        _ => panic!("Lie derivative order must be 1 or 2"),
    }
}

fn visibility(side: HalfPlane, second_lie: f64) -> Visibility {
    // "Visible" means the tangent orbit stays in the field's own half-plane:
    // X^2 f > 0 for the upper field, Y^2 f < 0 for the lower one.
    let visible = match side {
        HalfPlane::Upper => second_lie > 0.0,
        HalfPlane::Lower => second_lie < 0.0,
    };
    if visible {
        Visibility::Visible
    } else {
        Visibility::Invisible
    }
}

/// Assigns the on-manifold point `p` to exactly one region of the Filippov
/// sign table.
pub fn classify_point(
    z: &PiecewiseField,
    p: Point,
    tol: &Tolerances,
) -> Result<RegionClass, FieldError> {
    let f_val = z.switching.value(p).abs();
    if f_val > tol.on_sigma {
        return Err(FieldError::NotOnSwitchingManifold(f_val));
    }
    let xf = lie_derivative(&z.upper, &z.switching, p, 1);
    let yf = lie_derivative(&z.lower, &z.switching, p, 1);
    let x_tangent = xf.abs() <= tol.tangency;
    let y_tangent = yf.abs() <= tol.tangency;
    if x_tangent || y_tangent {
        let x_invisible = x_tangent
            && visibility(
                HalfPlane::Upper,
                lie_derivative(&z.upper, &z.switching, p, 2),
            ) == Visibility::Invisible;
        let y_invisible = y_tangent
            && visibility(
                HalfPlane::Lower,
                lie_derivative(&z.lower, &z.switching, p, 2),
            ) == Visibility::Invisible;
        return Ok(if x_invisible && y_invisible {
            RegionClass::TangencySingular
        } else {
            RegionClass::TangencyRegular
        });
    }
    Ok(match (xf > 0.0, yf > 0.0) {
        (true, true) => RegionClass::CrossingPos,
        (false, false) => RegionClass::CrossingNeg,
        (false, true) => RegionClass::Sliding,
        (true, false) => RegionClass::Escaping,
    })
}

/// Visibility data of a tangency point, with the two-fold pairing when both
/// fields are tangent.
pub fn classify_fold(
    z: &PiecewiseField,
    p: Point,
    tol: &Tolerances,
) -> Result<FoldClass, FieldError> {
    let f_val = z.switching.value(p).abs();
    if f_val > tol.on_sigma {
        return Err(FieldError::NotOnSwitchingManifold(f_val));
    }
    let xf = lie_derivative(&z.upper, &z.switching, p, 1);
    let yf = lie_derivative(&z.lower, &z.switching, p, 1);
    let x_tangent = xf.abs() <= tol.tangency;
    let y_tangent = yf.abs() <= tol.tangency;
    if !x_tangent && !y_tangent {
        return Err(FieldError::NotATangency);
    }
    let mut upper = None;
    let mut lower = None;
    if x_tangent {
        let l2 = lie_derivative(&z.upper, &z.switching, p, 2);
        if l2.abs() <= tol.tangency {
            return Err(FieldError::DegenerateTangency);
        }
        upper = Some(visibility(HalfPlane::Upper, l2));
    }
    if y_tangent {
        let l2 = lie_derivative(&z.lower, &z.switching, p, 2);
        if l2.abs() <= tol.tangency {
            return Err(FieldError::DegenerateTangency);
        }
        lower = Some(visibility(HalfPlane::Lower, l2));
    }
    let two_fold = match (upper, lower) {
        (Some(u), Some(l)) => Some(match (u, l) {
            (Visibility::Visible, Visibility::Visible) => TwoFoldKind::VisibleVisible,
            (Visibility::Invisible, Visibility::Visible) => TwoFoldKind::InvisibleVisible,
            (Visibility::Visible, Visibility::Invisible) => TwoFoldKind::VisibleInvisible,
            (Visibility::Invisible, Visibility::Invisible) => TwoFoldKind::InvisibleInvisible,
        }),
        _ => None,
    };
    Ok(FoldClass {
        upper,
        lower,
        two_fold,
    })
}

/// Filippov's convex-combination field `(Yf X - Xf Y) / (Yf - Xf)`, tangent
/// to the switching manifold on sliding and escaping segments.
pub fn sliding_field(z: &PiecewiseField, p: Point) -> Result<Point, FieldError> {
    let xf = lie_derivative(&z.upper, &z.switching, p, 1);
    let yf = lie_derivative(&z.lower, &z.switching, p, 1);
    let denom = yf - xf;
    if denom.abs() < 1e-12 {
        return Err(FieldError::UndefinedSliding);
    }
    let x = z.upper.eval(p);
    let y = z.lower.eval(p);
    Ok((x * yf - y * xf) * (1.0 / denom))
}

#[derive(Deserialize)]
struct ComponentsDoc {
    fx: String,
    fy: String,
}

#[derive(Deserialize)]
struct FieldDoc {
    upper: ComponentsDoc,
    lower: ComponentsDoc,
    switching: String,
}

/// Loads a piecewise field from the JSON document
/// `{"upper": {"fx": ..., "fy": ...}, "lower": {...}, "switching": ...}`.
pub fn piecewise_from_json(doc: &str) -> Result<PiecewiseField, FieldError> {
    let doc: FieldDoc = serde_json::from_str(doc)?;
    let upper = SmoothField2D::from_exprs(HalfPlane::Upper, &doc.upper.fx, &doc.upper.fy)?;
    let lower = SmoothField2D::from_exprs(HalfPlane::Lower, &doc.lower.fx, &doc.lower.fy)?;
    let switching = if doc.switching.trim() == "y" {
        SwitchingFunction::vertical()
    } else {
        SwitchingFunction::from_expr(&doc.switching)?
    };
    Ok(PiecewiseField::new(upper, lower, switching))
}
