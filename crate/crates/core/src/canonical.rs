//! The concrete field families under study: the finite chain fields, their
//! trigonometric infinite-chain analogue, and the bean field with its
//! transversal section.

use crate::field::{HalfPlane, PiecewiseField, SmoothField2D, SwitchingFunction};
use crate::geom::Point;
use crate::poly::Pk;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::str::FromStr;

/// Which family a canonical field belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    FiniteK(u32),
    Infinite,
    Bean,
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FamilyKind::FiniteK(k) => write!(f, "k{k}"),
            FamilyKind::Infinite => write!(f, "inf"),
            FamilyKind::Bean => write!(f, "bean"),
        }
    }
}

impl FromStr for FamilyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bean" => Ok(FamilyKind::Bean),
            "inf" | "infinite" => Ok(FamilyKind::Infinite),
            _ => {
                let digits = s.strip_prefix('k').unwrap_or(s);
                let k: u32 = digits
                    .parse()
                    .map_err(|_| format!("unknown family kind {s:?}"))?;
                if k < 2 {
                    return Err("finite families need k >= 2".into());
                }
                Ok(FamilyKind::FiniteK(k))
            }
        }
    }
}

/// The "height" profile of the infinite family: integral of the upper field's
/// second component, so the invariant curves are its graphs.
pub fn p_inf(x: f64, derivative_order: u8) -> f64 {
    match derivative_order {
        0 => (1.0 - (2.0 * PI * x).cos()) / PI,
        1 => 2.0 * (2.0 * PI * x).sin(),
        2 => 4.0 * PI * (2.0 * PI * x).cos(),
        _ => panic!("derivative order must be 0, 1 or 2"),
    }
}

/// Upper boundary of the bean region.
pub fn bean_upper(x: f64) -> f64 {
    1.0 - x * x
}

/// Lower boundary of the bean region, the lower field's integral curve
/// through `(\pm 1, 0)`.
pub fn bean_lower(x: f64) -> f64 {
    let x2 = x * x;
    0.5 * x2 * x2 - 0.5 * x2
}

/// Abscissa of the right invisible tangency of the bean's lower field.
pub const BEAN_TANGENCY: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A canonical family together with its glued field.
#[derive(Debug, Clone)]
pub struct CanonicalFamily {
    pub kind: FamilyKind,
    pub field: PiecewiseField,
    pk: Option<Pk>,
}

/// Builds the canonical field of the requested kind.
pub fn make_canonical(kind: FamilyKind) -> CanonicalFamily {
    let field = match kind {
        FamilyKind::FiniteK(k) => {
            let up = Pk::new(k);
            let low = Pk::new(k);
            let jac_up = Pk::new(k);
            let jac_low = Pk::new(k);
            let upper = SmoothField2D::from_fn(HalfPlane::Upper, move |p| {
                Point::new(1.0, up.d1(p.x))
            })
            .with_jacobian(move |p| [[0.0, 0.0], [jac_up.d2(p.x), 0.0]]);
            let lower = SmoothField2D::from_fn(HalfPlane::Lower, move |p| {
                Point::new(-1.0, low.d1(p.x))
            })
            .with_jacobian(move |p| [[0.0, 0.0], [jac_low.d2(p.x), 0.0]]);
            PiecewiseField::new(upper, lower, SwitchingFunction::vertical())
        }
        FamilyKind::Infinite => {
            let upper =
                SmoothField2D::from_fn(HalfPlane::Upper, |p| Point::new(1.0, p_inf(p.x, 1)))
                    .with_jacobian(|p| [[0.0, 0.0], [p_inf(p.x, 2), 0.0]]);
            let lower =
                SmoothField2D::from_fn(HalfPlane::Lower, |p| Point::new(-1.0, p_inf(p.x, 1)))
                    .with_jacobian(|p| [[0.0, 0.0], [p_inf(p.x, 2), 0.0]]);
            PiecewiseField::new(upper, lower, SwitchingFunction::vertical())
        }
        FamilyKind::Bean => {
            let upper = SmoothField2D::from_fn(HalfPlane::Upper, |p| Point::new(1.0, -2.0 * p.x))
                .with_jacobian(|_| [[0.0, 0.0], [-2.0, 0.0]]);
            let lower = SmoothField2D::from_fn(HalfPlane::Lower, |p| {
                Point::new(-2.0, -4.0 * p.x * p.x * p.x + 2.0 * p.x)
            })
            .with_jacobian(|p| [[0.0, 0.0], [-12.0 * p.x * p.x + 2.0, 0.0]]);
            PiecewiseField::new(upper, lower, SwitchingFunction::vertical())
        }
    };
    let pk = match kind {
        FamilyKind::FiniteK(k) => Some(Pk::new(k)),
        _ => None,
    };
    CanonicalFamily { kind, field, pk }
}

impl CanonicalFamily {
    pub fn pk(&self) -> Option<&Pk> {
        self.pk.as_ref()
    }
}

/// Root-and-fold abscissas of a chain family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldLattice {
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub folds: Vec<f64>,
}

/// Fold abscissas for finite `k` or (windowed) for the infinite family.
///
/// `window` bounds the materialized abscissas of the infinite lattice.
pub fn fold_lattice(kind: FamilyKind, window: u32) -> FoldLattice {
    match kind {
        FamilyKind::FiniteK(k) => {
            let p = Pk::new(k);
            FoldLattice {
                r0: Some(p.r0()),
                r1: Some(p.r1()),
                folds: p.fold_abscissas().to_vec(),
            }
        }
        FamilyKind::Infinite => FoldLattice {
            r0: None,
            r1: None,
            folds: (-(window as i64)..=window as i64).map(|j| j as f64).collect(),
        },
        FamilyKind::Bean => panic!("the bean field has no fold lattice"),
    }
}

/// The invariant set of a family: a pair of mirror curves for the chain
/// families, a filled region for the bean.
#[derive(Debug, Clone)]
pub struct InvariantSet {
    pub kind: FamilyKind,
    pk: Option<Pk>,
    /// Closed abscissa range, `None` for the unbounded infinite family.
    pub domain: Option<(f64, f64)>,
}

pub fn invariant_set(family: &CanonicalFamily) -> InvariantSet {
    let domain = match family.kind {
        FamilyKind::FiniteK(k) => {
            let p = Pk::new(k);
            Some((p.r0(), p.r1()))
        }
        FamilyKind::Infinite => None,
        FamilyKind::Bean => Some((-1.0, 1.0)),
    };
    InvariantSet {
        kind: family.kind,
        pk: family.pk.clone(),
        domain,
    }
}

impl InvariantSet {
    /// Height of the upper curve (boundary, for the bean) at `x`.
    pub fn upper(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::FiniteK(_) => self.pk.as_ref().unwrap().value(x),
            FamilyKind::Infinite => p_inf(x, 0),
            FamilyKind::Bean => bean_upper(x),
        }
    }

    pub fn lower(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::FiniteK(_) => -self.pk.as_ref().unwrap().value(x),
            FamilyKind::Infinite => -p_inf(x, 0),
            FamilyKind::Bean => bean_lower(x),
        }
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        if let Some((lo, hi)) = self.domain {
            if p.x < lo - tol || p.x > hi + tol {
                return false;
            }
        }
        match self.kind {
            FamilyKind::Bean => p.y >= bean_lower(p.x) - tol && p.y <= bean_upper(p.x) + tol,
            _ => {
                (p.y - self.upper(p.x)).abs() <= tol || (p.y - self.lower(p.x)).abs() <= tol
            }
        }
    }

    /// Diameter bound of the set (for the infinite family, of one period
    /// cell, which is what the per-arc metric needs).
    pub fn diameter(&self) -> f64 {
        match self.kind {
            FamilyKind::FiniteK(_) => {
                let (lo, hi) = self.domain.unwrap();
                let mut ymax: f64 = 0.0;
                for i in 0..=512 {
                    let x = lo + (hi - lo) * i as f64 / 512.0;
                    ymax = ymax.max(self.upper(x).abs());
                }
                ((hi - lo).powi(2) + (2.0 * ymax).powi(2)).sqrt()
            }
            FamilyKind::Infinite => 2.0 * 5.0f64.sqrt(),
            FamilyKind::Bean => {
                // spans [-1,1] x [-1/8, 1]
                (4.0f64 + (1.0 + 0.125f64).powi(2)).sqrt()
            }
        }
    }
}

/// Which of the mirror curves a compartment lies on. `Both` marks the two
/// end loops of a finite family, which run through a crossing point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveSide {
    Upper,
    Lower,
    Both,
}

/// One arc of the compartment partition, open at fold endpoints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Compartment {
    pub index: i64,
    pub side: CurveSide,
    pub x_lo: f64,
    pub x_hi: f64,
    /// Fold where a traversal of this arc begins.
    pub start_fold: f64,
    /// Fold where it ends, one time unit later.
    pub end_fold: f64,
}

/// Indexed arcs of the invariant set, enumerated top to bottom and left to
/// right.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompartmentPartition {
    pub kind: FamilyKind,
    pub arcs: Vec<Compartment>,
}

/// Compartments of a chain family. For the infinite family only indices with
/// cells inside `[-window, window]` are materialized; the bean field has no
/// compartments and yields an empty list.
pub fn compartments(family: &CanonicalFamily, window: u32) -> CompartmentPartition {
    let mut arcs = Vec::new();
    match family.kind {
        FamilyKind::FiniteK(k) => {
            let p = Pk::new(k);
            let folds = p.fold_abscissas();
            let last = folds[folds.len() - 1];
            arcs.push(Compartment {
                index: 0,
                side: CurveSide::Both,
                x_lo: p.r0(),
                x_hi: folds[0],
                start_fold: folds[0],
                end_fold: folds[0],
            });
            for j in 1..=(k as i64 - 2) {
                let pj = folds[(j - 1) as usize];
                let pj1 = folds[j as usize];
                arcs.push(Compartment {
                    index: 2 * j - 1,
                    side: CurveSide::Upper,
                    x_lo: pj,
                    x_hi: pj1,
                    start_fold: pj,
                    end_fold: pj1,
                });
                arcs.push(Compartment {
                    index: 2 * j,
                    side: CurveSide::Lower,
                    x_lo: pj,
                    x_hi: pj1,
                    start_fold: pj1,
                    end_fold: pj,
                });
            }
            if k >= 3 {
                arcs.push(Compartment {
                    index: 2 * k as i64 - 3,
                    side: CurveSide::Both,
                    x_lo: last,
                    x_hi: p.r1(),
                    start_fold: last,
                    end_fold: last,
                });
            } else {
                // k = 2: the right loop is I_1
                arcs.push(Compartment {
                    index: 1,
                    side: CurveSide::Both,
                    x_lo: last,
                    x_hi: p.r1(),
                    start_fold: last,
                    end_fold: last,
                });
            }
            arcs.sort_by_key(|c| c.index);
        }
        FamilyKind::Infinite => {
            let w = window as i64;
            for j in -w..w {
                arcs.push(Compartment {
                    index: 2 * j,
                    side: CurveSide::Upper,
                    x_lo: j as f64,
                    x_hi: (j + 1) as f64,
                    start_fold: j as f64,
                    end_fold: (j + 1) as f64,
                });
                arcs.push(Compartment {
                    index: 2 * j + 1,
                    side: CurveSide::Lower,
                    x_lo: j as f64,
                    x_hi: (j + 1) as f64,
                    start_fold: (j + 1) as f64,
                    end_fold: j as f64,
                });
            }
            arcs.sort_by_key(|c| c.index);
        }
        FamilyKind::Bean => {}
    }
    CompartmentPartition {
        kind: family.kind,
        arcs,
    }
}

impl CompartmentPartition {
    pub fn by_index(&self, index: i64) -> Option<&Compartment> {
        self.arcs.iter().find(|c| c.index == index)
    }

    /// Index of the compartment containing `p`, or `None` at fold points and
    /// off the partition.
    pub fn compartment_of(&self, p: Point, tol: f64) -> Option<i64> {
        match self.kind {
            FamilyKind::Bean => None,
            FamilyKind::FiniteK(_) | FamilyKind::Infinite => {
                // fold points belong to no compartment
                let near_fold = p.y.abs() <= tol
                    && self
                        .arcs
                        .iter()
                        .any(|c| (p.x - c.start_fold).abs() <= tol);
                if near_fold {
                    return None;
                }
                for c in &self.arcs {
                    if p.x < c.x_lo - tol || p.x > c.x_hi + tol {
                        continue;
                    }
                    match c.side {
                        CurveSide::Both => return Some(c.index),
                        CurveSide::Upper if p.y > tol => return Some(c.index),
                        CurveSide::Lower if p.y < -tol => return Some(c.index),
                        _ => continue,
                    }
                }
                None
            }
        }
    }

    /// Geometric point reached half a time unit into a traversal of
    /// compartment `index`.
    pub fn midpoint(&self, family: &CanonicalFamily, index: i64) -> Option<Point> {
        let c = self.by_index(index)?;
        let set = invariant_set(family);
        Some(match c.side {
            CurveSide::Both => {
                // half-way through a loop is its crossing point
                if (c.x_lo - c.start_fold).abs() > (c.x_hi - c.start_fold).abs() {
                    Point::new(c.x_lo, 0.0)
                } else {
                    Point::new(c.x_hi, 0.0)
                }
            }
            CurveSide::Upper => {
                let x = 0.5 * (c.x_lo + c.x_hi);
                Point::new(x, set.upper(x))
            }
            CurveSide::Lower => {
                let x = 0.5 * (c.x_lo + c.x_hi);
                Point::new(x, set.lower(x))
            }
        })
    }
}

/// Compartment entered when leaving the fold at abscissa `fold` by the upper
/// field, for the given family.
pub fn x_successor(kind: FamilyKind, fold_number: i64) -> i64 {
    match kind {
        // fold numbering is 1-based: p_1 .. p_{k-1}
        FamilyKind::FiniteK(_) => 2 * fold_number - 1,
        FamilyKind::Infinite => 2 * fold_number,
        FamilyKind::Bean => panic!("bean compartments are not indexed"),
    }
}

/// Compartment entered when leaving the same fold by the lower field.
pub fn y_successor(kind: FamilyKind, fold_number: i64) -> i64 {
    match kind {
        FamilyKind::FiniteK(_) => 2 * fold_number - 2,
        FamilyKind::Infinite => 2 * fold_number - 1,
        FamilyKind::Bean => panic!("bean compartments are not indexed"),
    }
}

/// Sliding-motion speed of the bean field on its switching manifold,
/// `Z^T = (g(x), 0)` with `g < 0` on both the sliding and escaping segments.
pub fn bean_sliding_speed(x: f64) -> f64 {
    -(1.0 + 2.0 * x * x) / (2.0 * (1.0 - x * x))
}

/// Antiderivative of `-1/g` for the bean's sliding motion; strictly
/// increasing, so `T(x(t)) = T(x(0)) - t` along a slide.
pub fn bean_slide_antiderivative(x: f64) -> f64 {
    let s = std::f64::consts::SQRT_2;
    3.0 / s * (s * x).atan() - x
}

/// Position after sliding for `dt >= 0` starting from `x0`, solved by
/// bisection on the monotone antiderivative.
pub fn bean_slide_position(x0: f64, dt: f64) -> f64 {
    let target = bean_slide_antiderivative(x0) - dt;
    let mut lo = -BEAN_TANGENCY - 1e-12;
    let mut hi = x0;
    if bean_slide_antiderivative(lo) >= target {
        return lo.max(-BEAN_TANGENCY);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if bean_slide_antiderivative(mid) > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The bean field's transversal section `{0} x (0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct Section;

impl Section {
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p.x.abs() <= tol && p.y > tol && p.y <= 1.0 + tol
    }

    /// Projection on the y-coordinate.
    pub fn project(&self, p: Point) -> f64 {
        p.y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_parsing() {
        assert_eq!("k3".parse::<FamilyKind>().unwrap(), FamilyKind::FiniteK(3));
        assert_eq!("bean".parse::<FamilyKind>().unwrap(), FamilyKind::Bean);
        assert_eq!("inf".parse::<FamilyKind>().unwrap(), FamilyKind::Infinite);
        assert!("k1".parse::<FamilyKind>().is_err());
        assert!("zork".parse::<FamilyKind>().is_err());
    }

    #[test]
    fn k3_has_four_arcs() {
        let fam = make_canonical(FamilyKind::FiniteK(3));
        let parts = compartments(&fam, 0);
        assert_eq!(parts.arcs.len(), 4);
        assert_eq!(parts.by_index(0).unwrap().side, CurveSide::Both);
        assert_eq!(parts.by_index(1).unwrap().side, CurveSide::Upper);
        assert_eq!(parts.by_index(2).unwrap().side, CurveSide::Lower);
        assert_eq!(parts.by_index(3).unwrap().side, CurveSide::Both);
        assert_eq!(parts.by_index(1).unwrap().start_fold, -0.5);
        assert_eq!(parts.by_index(1).unwrap().end_fold, 0.5);
    }

    #[test]
    fn k2_has_two_loops() {
        let fam = make_canonical(FamilyKind::FiniteK(2));
        let parts = compartments(&fam, 0);
        assert_eq!(parts.arcs.len(), 2);
        assert_eq!(parts.by_index(0).unwrap().side, CurveSide::Both);
        assert_eq!(parts.by_index(1).unwrap().side, CurveSide::Both);
    }

    #[test]
    fn fold_lattice_values() {
        let l = fold_lattice(FamilyKind::FiniteK(3), 0);
        assert_eq!(l.r0, Some(-1.0));
        assert_eq!(l.r1, Some(1.0));
        assert_eq!(l.folds, vec![-0.5, 0.5]);
        let l2 = fold_lattice(FamilyKind::FiniteK(2), 0);
        assert_eq!(l2.folds, vec![0.0]);
        let li = fold_lattice(FamilyKind::Infinite, 3);
        assert_eq!(li.folds, vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn bean_boundaries_pass_through_corners() {
        assert_eq!(bean_upper(1.0), 0.0);
        assert_eq!(bean_upper(-1.0), 0.0);
        assert_eq!(bean_lower(1.0), 0.0);
        assert_eq!(bean_lower(0.0), 0.0);
        assert!(bean_lower(0.5) < 0.0);
    }

    #[test]
    fn compartment_lookup_respects_sides() {
        let fam = make_canonical(FamilyKind::FiniteK(3));
        let parts = compartments(&fam, 0);
        let set = invariant_set(&fam);
        let x = 0.0;
        assert_eq!(
            parts.compartment_of(Point::new(x, set.upper(x)), 1e-9),
            Some(1)
        );
        assert_eq!(
            parts.compartment_of(Point::new(x, set.lower(x)), 1e-9),
            Some(2)
        );
        // crossing point belongs to the left loop
        assert_eq!(parts.compartment_of(Point::new(-1.0, 0.0), 1e-9), Some(0));
        // fold points belong to no compartment
        assert_eq!(parts.compartment_of(Point::new(-0.5, 0.0), 1e-9), None);
    }

    #[test]
    fn infinite_compartments_by_parity() {
        let fam = make_canonical(FamilyKind::Infinite);
        let parts = compartments(&fam, 4);
        let set = invariant_set(&fam);
        assert_eq!(
            parts.compartment_of(Point::new(1.5, set.upper(1.5)), 1e-9),
            Some(2)
        );
        assert_eq!(
            parts.compartment_of(Point::new(1.5, set.lower(1.5)), 1e-9),
            Some(3)
        );
        assert_eq!(
            parts.compartment_of(Point::new(-0.5, set.upper(-0.5)), 1e-9),
            Some(-2)
        );
    }
}
