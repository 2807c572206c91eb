//! Topological equivalence of chain-shaped fields relative to the switching
//! manifold: extracting the combinatorial skeleton (folds, crossings, and
//! the oriented arcs joining them) from a sampled invariant set, matching
//! skeletons across two fields, and building the piecewise arc-length
//! homeomorphism between matched arcs.

use crate::field::{
    classify_fold, classify_point, FieldError, FoldClass, PiecewiseField, RegionClass,
    SmoothField2D, SwitchingFunction, Tolerances,
};
use crate::geom::Point;
use crate::orbit::{ArcLengthMap, CheckResult, OrbitError};
use crate::traj::{integrate_until_x, TrajError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EquivError {
    #[error("skeletons do not match: {reason}")]
    SkeletonMismatch { reason: String },
    #[error("skeleton extraction failed: {reason}")]
    ExtractionFailed { reason: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Traj(#[from] TrajError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

/// A sampled invariant set of a chain-shaped field: mirror curve samples
/// ordered by increasing abscissa.
#[derive(Debug, Clone)]
pub struct InvariantSample {
    pub upper: Vec<Point>,
    pub lower: Vec<Point>,
}

/// Samples the mirror curves `y = profile(x)`, `y = -profile(x)`.
pub fn sample_profile(profile: impl Fn(f64) -> f64, x_lo: f64, x_hi: f64, n: usize) -> InvariantSample {
    let n = n.max(2);
    let xs: Vec<f64> = (0..=n)
        .map(|i| x_lo + (x_hi - x_lo) * i as f64 / n as f64)
        .collect();
    InvariantSample {
        upper: xs.iter().map(|&x| Point::new(x, profile(x))).collect(),
        lower: xs.iter().map(|&x| Point::new(x, -profile(x))).collect(),
    }
}

/// Builds the chain-shaped piecewise field `X = (1, phi(x))`,
/// `Y = (-1, phi(x))` glued along `y = 0`.
pub fn chain_field_from_profile(
    phi: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
) -> PiecewiseField {
    let phi2 = phi.clone();
    let upper = SmoothField2D::from_fn(crate::field::HalfPlane::Upper, move |p| {
        Point::new(1.0, phi(p.x))
    });
    let lower = SmoothField2D::from_fn(crate::field::HalfPlane::Lower, move |p| {
        Point::new(-1.0, phi2(p.x))
    });
    PiecewiseField::new(upper, lower, SwitchingFunction::vertical())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Fold,
    Crossing,
}

/// A switching-manifold node of the skeleton.
#[derive(Debug, Clone)]
pub struct SkeletonNode {
    pub x: f64,
    pub kind: NodeKind,
    /// Visibility data at folds.
    pub fold: Option<FoldClass>,
    /// Region class at crossings.
    pub region: Option<RegionClass>,
}

/// A directed arc of the invariant set between two nodes.
#[derive(Debug, Clone)]
pub struct SkeletonArc {
    pub from: usize,
    pub to: usize,
    pub governing: crate::field::HalfPlane,
    pub points: Vec<Point>,
}

/// The combinatorial skeleton of a chain-shaped field restricted to its
/// sampled invariant set.
#[derive(Debug, Clone)]
pub struct Skeleton {
    pub nodes: Vec<SkeletonNode>,
    pub arcs: Vec<SkeletonArc>,
}

impl Skeleton {
    pub fn fold_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Fold).count()
    }

    pub fn crossing_count(&self) -> usize {
        self.nodes.len() - self.fold_count()
    }
}

fn bisect_zero(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = g(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Extracts the node set and oriented arcs of a chain-shaped field from its
/// sampled invariant set.
///
/// Fold abscissas are zeros of the tangency function `Xf(x, 0)` lying on the
/// curve; crossings are transversal zeros of the sampled upper curve; each
/// arc is re-integrated between its node abscissas.
pub fn extract_skeleton(
    field: &PiecewiseField,
    sample: &InvariantSample,
    tol: &Tolerances,
) -> Result<Skeleton, EquivError> {
    if sample.upper.len() < 8 {
        return Err(EquivError::ExtractionFailed {
            reason: "need at least 8 curve samples".into(),
        });
    }
    let x_lo = sample.upper.first().unwrap().x;
    let x_hi = sample.upper.last().unwrap().x;
    let curve_tol = 1e-6 * (1.0 + x_hi - x_lo);
    let tangency = |x: f64| {
        crate::field::lie_derivative(&field.upper, &field.switching, Point::new(x, 0.0), 1)
    };
    let curve_at = |x: f64| -> f64 {
        // linear interpolation of the sampled upper curve
        let pts = &sample.upper;
        let i = pts.partition_point(|p| p.x < x).clamp(1, pts.len() - 1);
        let (a, b) = (pts[i - 1], pts[i]);
        let w = if b.x > a.x { (x - a.x) / (b.x - a.x) } else { 0.0 };
        a.y + (b.y - a.y) * w
    };
    let mut xs: Vec<(f64, NodeKind)> = Vec::new();
    // folds: sign changes of the tangency function on the curve
    let grid = 4 * sample.upper.len();
    let mut prev = tangency(x_lo);
    for i in 1..=grid {
        let x = x_lo + (x_hi - x_lo) * i as f64 / grid as f64;
        let cur = tangency(x);
        if prev == 0.0 || prev * cur < 0.0 {
            let x_prev = x_lo + (x_hi - x_lo) * (i - 1) as f64 / grid as f64;
            let xz = if prev == 0.0 {
                x_prev
            } else {
                bisect_zero(&tangency, x_prev, x)
            };
            if curve_at(xz).abs() <= curve_tol {
                xs.push((xz, NodeKind::Fold));
            }
        }
        prev = cur;
    }
    // crossings: transversal zeros of the sampled curve
    for w in sample.upper.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.y == 0.0 || a.y * b.y < 0.0 {
            let xz = if a.y == 0.0 {
                a.x
            } else {
                a.x - a.y * (b.x - a.x) / (b.y - a.y)
            };
            if tangency(xz).abs() > tol.tangency * 10.0 {
                xs.push((xz, NodeKind::Crossing));
            }
        }
    }
    // an exactly-zero last sample (right end crossing)
    let last = sample.upper.last().unwrap();
    if last.y == 0.0 && tangency(last.x).abs() > tol.tangency * 10.0 {
        xs.push((last.x, NodeKind::Crossing));
    }
    xs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    xs.dedup_by(|p, q| (p.0 - q.0).abs() < 1e-7);
    if xs.len() < 2 {
        return Err(EquivError::ExtractionFailed {
            reason: format!("found only {} nodes", xs.len()),
        });
    }
    let mut nodes = Vec::new();
    for &(x, kind) in &xs {
        let p = Point::new(x, 0.0);
        let (fold, region) = match kind {
            NodeKind::Fold => (Some(classify_fold(field, p, tol)?), None),
            NodeKind::Crossing => (None, Some(classify_point(field, p, tol)?)),
        };
        nodes.push(SkeletonNode {
            x,
            kind,
            fold,
            region,
        });
    }
    // arcs between consecutive nodes on both curves, oriented by the field
    let mut arcs = Vec::new();
    let step = (x_hi - x_lo) / (200.0 * nodes.len() as f64).max(2000.0);
    for i in 0..nodes.len() - 1 {
        let (xl, xr) = (nodes[i].x, nodes[i + 1].x);
        for side in [crate::field::HalfPlane::Upper, crate::field::HalfPlane::Lower] {
            let f = field.side(side);
            let dir = f.eval(Point::new(0.5 * (xl + xr), 0.0)).x;
            let (from, to, x_start, x_stop) = if dir >= 0.0 {
                (i, i + 1, xl, xr)
            } else {
                (i + 1, i, xr, xl)
            };
            let arc = integrate_until_x(
                f,
                Point::new(x_start, 0.0),
                0.0,
                x_stop,
                1e6,
                step,
            )?;
            arcs.push(SkeletonArc {
                from,
                to,
                governing: side,
                points: arc.sample(256),
            });
        }
    }
    Ok(Skeleton { nodes, arcs })
}

/// Outcome of the equivalence check: the matched skeleton summary and the
/// per-arc homeomorphism checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub fold_count: usize,
    pub crossing_count: usize,
    pub arc_count: usize,
    pub checks: Vec<CheckResult>,
}

fn node_signature(n: &SkeletonNode) -> String {
    match n.kind {
        NodeKind::Fold => format!("fold:{:?}", n.fold.and_then(|f| f.two_fold)),
        NodeKind::Crossing => format!("crossing:{:?}", n.region),
    }
}

/// Decides topological equivalence relative to the switching manifold by
/// matching skeletons node-for-node (in abscissa order) and arc-for-arc,
/// then verifying the arc-length homeomorphism respects endpoints and
/// orientation.
pub fn sigma_equivalence_check(
    z1: &PiecewiseField,
    s1: &InvariantSample,
    z2: &PiecewiseField,
    s2: &InvariantSample,
    tol: &Tolerances,
) -> Result<EquivalenceReport, EquivError> {
    let sk1 = extract_skeleton(z1, s1, tol)?;
    let sk2 = extract_skeleton(z2, s2, tol)?;
    if sk1.nodes.len() != sk2.nodes.len() {
        return Err(EquivError::SkeletonMismatch {
            reason: format!(
                "node counts differ: {} vs {}",
                sk1.nodes.len(),
                sk2.nodes.len()
            ),
        });
    }
    for (a, b) in sk1.nodes.iter().zip(sk2.nodes.iter()) {
        if node_signature(a) != node_signature(b) {
            return Err(EquivError::SkeletonMismatch {
                reason: format!(
                    "node at x = {} is {} but its partner at x = {} is {}",
                    a.x,
                    node_signature(a),
                    b.x,
                    node_signature(b)
                ),
            });
        }
    }
    if sk1.arcs.len() != sk2.arcs.len() {
        return Err(EquivError::SkeletonMismatch {
            reason: format!("arc counts differ: {} vs {}", sk1.arcs.len(), sk2.arcs.len()),
        });
    }
    let mut checks = Vec::new();
    for a1 in &sk1.arcs {
        let a2 = sk2
            .arcs
            .iter()
            .find(|a| a.from == a1.from && a.governing == a1.governing)
            .ok_or_else(|| EquivError::SkeletonMismatch {
                reason: format!(
                    "no partner arc leaving node {} under the {:?} field",
                    a1.from, a1.governing
                ),
            })?;
        if a1.to != a2.to {
            return Err(EquivError::SkeletonMismatch {
                reason: format!(
                    "arc from node {} ends at {} in one field and {} in the other",
                    a1.from, a1.to, a2.to
                ),
            });
        }
        let map = ArcLengthMap::new(&a1.points, &a2.points)?;
        let start_img = map.image_of_vertex(0);
        let end_img = map.image_of_vertex(a1.points.len() - 1);
        let want_start = Point::new(sk2.nodes[a2.from].x, 0.0);
        let want_end = Point::new(sk2.nodes[a2.to].x, 0.0);
        let dev = start_img.dist(want_start).max(end_img.dist(want_end));
        checks.push(CheckResult {
            name: format!(
                "arc {} -> {} ({:?}): endpoints map to partner nodes",
                a1.from, a1.to, a1.governing
            ),
            pass: dev < 1e-5,
            details: format!("endpoint deviation {dev:.2e}"),
        });
    }
    let equivalent = checks.iter().all(|c| c.pass);
    Ok(EquivalenceReport {
        equivalent,
        fold_count: sk1.fold_count(),
        crossing_count: sk1.crossing_count(),
        arc_count: sk1.arcs.len(),
        checks,
    })
}
