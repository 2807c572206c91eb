//! Trajectories of the canonical fields: closed-form arcs, the branching
//! continuation rules at switching-manifold junctions, symbolic synthesis and
//! itineraries for the chain families, and a generic event-locating
//! integrator for user-supplied fields.

use crate::canonical::{
    bean_slide_antiderivative, bean_slide_position, compartments, invariant_set, CanonicalFamily,
    CompartmentPartition, CurveSide, FamilyKind, BEAN_TANGENCY,
};
use crate::field::{classify_point, FieldError, RegionClass, SmoothField2D, SwitchingFunction, Tolerances};
use crate::geom::Point;
use crate::poly::Pk;
use crate::symbolic::{Alphabet, SymbolWindow};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Positional slack when comparing abscissas against fold lattices.
const X_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum TrajError {
    #[error("event location failed to bracket the switching-manifold hit")]
    EventLocationFailure,
    #[error("word is inadmissible at index {index}")]
    InadmissibleWord { index: i64 },
    #[error("trajectory leaves the invariant set; no itinerary symbol applies")]
    OffInvariantSet,
    #[error("requested window exceeds the trajectory's time span")]
    OutsideTimeSpan,
    #[error("sliding motion is undefined for this family or point")]
    UndefinedSliding,
    #[error("starting point is not on an integral curve of the requested field")]
    OffIntegralCurve,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Which convention governs a trajectory arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Governing {
    Upper,
    Lower,
    Sliding,
}

impl std::fmt::Display for Governing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Governing::Upper => f.write_str("upper"),
            Governing::Lower => f.write_str("lower"),
            Governing::Sliding => f.write_str("sliding"),
        }
    }
}

impl std::str::FromStr for Governing {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "upper" => Ok(Governing::Upper),
            "lower" => Ok(Governing::Lower),
            "sliding" => Ok(Governing::Sliding),
            other => Err(format!("unknown governing tag {other:?}")),
        }
    }
}

/// Closed-form invariant curve of a chain family.
#[derive(Debug, Clone)]
pub enum ChainCurve {
    Poly(Pk),
    Trig,
}

impl ChainCurve {
    pub fn from_kind(kind: FamilyKind) -> ChainCurve {
        match kind {
            FamilyKind::FiniteK(k) => ChainCurve::Poly(Pk::new(k)),
            FamilyKind::Infinite => ChainCurve::Trig,
            FamilyKind::Bean => panic!("the bean field has no chain curve"),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            ChainCurve::Poly(p) => p.value(x),
            ChainCurve::Trig => crate::canonical::p_inf(x, 0),
        }
    }

    /// Smallest zero of the curve strictly to the right of `x`.
    fn next_root_right(&self, x: f64) -> Option<f64> {
        match self {
            ChainCurve::Poly(p) => {
                let mut roots = vec![p.r0()];
                roots.extend_from_slice(p.fold_abscissas());
                roots.push(p.r1());
                roots.into_iter().find(|&r| r > x + X_EPS)
            }
            ChainCurve::Trig => Some((x + X_EPS).floor() + 1.0),
        }
    }

    /// Largest zero strictly to the left of `x`.
    fn next_root_left(&self, x: f64) -> Option<f64> {
        match self {
            ChainCurve::Poly(p) => {
                let mut roots = vec![p.r0()];
                roots.extend_from_slice(p.fold_abscissas());
                roots.push(p.r1());
                roots.into_iter().rev().find(|&r| r < x - X_EPS)
            }
            ChainCurve::Trig => Some((x - X_EPS).ceil() - 1.0),
        }
    }
}

/// Geometry of one arc; closed-form kinds carry enough data to evaluate the
/// arc exactly at any time.
#[derive(Debug, Clone)]
pub enum ArcGeom {
    /// `x(t) = x0 + (t - t0)`, `y = P(x) + c`.
    ChainUpper { curve: ChainCurve, x0: f64, c: f64 },
    /// `x(t) = x0 - (t - t0)`, `y = -P(x) + c`.
    ChainLower { curve: ChainCurve, x0: f64, c: f64 },
    /// Upper bean field: `x(t) = x0 + (t - t0)`, `y = c - x^2`.
    BeanParabola { c: f64, x0: f64 },
    /// Lower bean field: `x(t) = x0 - 2 (t - t0)`, `y = (x^4 - x^2)/2 + c`.
    BeanQuartic { c: f64, x0: f64 },
    /// Bean sliding motion along the switching manifold, leftwards from `x0`.
    BeanSlide { x0: f64 },
    /// Numerically integrated polyline, samples tagged with their times.
    Polyline { points: Vec<(f64, Point)> },
}

/// One maximal smooth piece of a trajectory.
#[derive(Debug, Clone)]
pub struct Arc {
    pub governing: Governing,
    pub t0: f64,
    pub t1: f64,
    pub geom: ArcGeom,
}

impl Arc {
    /// Position at time `t`, clamped into `[t0, t1]`.
    pub fn at(&self, t: f64) -> Point {
        let t = t.clamp(self.t0, self.t1);
        let dt = t - self.t0;
        match &self.geom {
            ArcGeom::ChainUpper { curve, x0, c } => {
                let x = x0 + dt;
                Point::new(x, curve.value(x) + c)
            }
            ArcGeom::ChainLower { curve, x0, c } => {
                let x = x0 - dt;
                Point::new(x, -curve.value(x) + c)
            }
            ArcGeom::BeanParabola { c, x0 } => {
                let x = x0 + dt;
                Point::new(x, c - x * x)
            }
            ArcGeom::BeanQuartic { c, x0 } => {
                let x = x0 - 2.0 * dt;
                let x2 = x * x;
                Point::new(x, 0.5 * (x2 * x2 - x2) + c)
            }
            ArcGeom::BeanSlide { x0 } => Point::new(bean_slide_position(*x0, dt), 0.0),
            ArcGeom::Polyline { points } => {
                match points.binary_search_by(|(s, _)| s.partial_cmp(&t).unwrap()) {
                    Ok(i) => points[i].1,
                    Err(0) => points[0].1,
                    Err(i) if i >= points.len() => points[points.len() - 1].1,
                    Err(i) => {
                        let (ta, a) = points[i - 1];
                        let (tb, b) = points[i];
                        let w = if tb > ta { (t - ta) / (tb - ta) } else { 0.0 };
                        a + (b - a) * w
                    }
                }
            }
        }
    }

    pub fn start(&self) -> Point {
        self.at(self.t0)
    }

    pub fn end(&self) -> Point {
        self.at(self.t1)
    }

    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }

    /// `n + 1` points sampled uniformly in time over the arc.
    pub fn sample(&self, n: usize) -> Vec<Point> {
        let n = n.max(1);
        (0..=n)
            .map(|i| self.at(self.t0 + self.duration() * i as f64 / n as f64))
            .collect()
    }

    fn shifted(&self, dt: f64) -> Arc {
        let mut a = self.clone();
        a.t0 += dt;
        a.t1 += dt;
        if let ArcGeom::Polyline { points } = &mut a.geom {
            for (t, _) in points.iter_mut() {
                *t += dt;
            }
        }
        a
    }
}

/// A branch decision taken at a junction on the switching manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchChoice {
    pub time: f64,
    pub x: f64,
    pub chosen: Governing,
}

/// A global trajectory as a contiguous, time-ordered arc sequence.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub arcs: Vec<Arc>,
    pub branch_log: Vec<BranchChoice>,
}

impl Trajectory {
    pub fn t_start(&self) -> f64 {
        self.arcs.first().map_or(0.0, |a| a.t0)
    }

    pub fn t_end(&self) -> f64 {
        self.arcs.last().map_or(0.0, |a| a.t1)
    }

    /// Position at `t`, clamped into the covered span.
    pub fn at(&self, t: f64) -> Point {
        assert!(!self.arcs.is_empty(), "empty trajectory");
        let i = self
            .arcs
            .partition_point(|a| a.t1 < t - 1e-12)
            .min(self.arcs.len() - 1);
        self.arcs[i].at(t)
    }

    /// The time-translated trajectory `t -> gamma(t + dt)`.
    pub fn shift_time(&self, dt: f64) -> Trajectory {
        Trajectory {
            arcs: self.arcs.iter().map(|a| a.shifted(-dt)).collect(),
            branch_log: self
                .branch_log
                .iter()
                .map(|b| BranchChoice {
                    time: b.time - dt,
                    ..*b
                })
                .collect(),
        }
    }

    /// Uniform time samples of `gamma([ta, tb])`.
    pub fn segment_samples(&self, ta: f64, tb: f64, n: usize) -> Vec<Point> {
        let n = n.max(1);
        (0..=n)
            .map(|i| self.at(ta + (tb - ta) * i as f64 / n as f64))
            .collect()
    }
}

/// The time-one shift `gamma'(t) = gamma(t + 1)`.
pub fn time_one(gamma: &Trajectory) -> Trajectory {
    gamma.shift_time(1.0)
}

/// Closed-form integrator and branch explorer for one canonical family.
#[derive(Debug, Clone)]
pub struct Engine {
    pub family: CanonicalFamily,
    pub tol: Tolerances,
}

impl Engine {
    pub fn new(kind: FamilyKind) -> Engine {
        Engine {
            family: crate::canonical::make_canonical(kind),
            tol: Tolerances::default(),
        }
    }

    fn chain_curve(&self) -> ChainCurve {
        ChainCurve::from_kind(self.family.kind)
    }

    /// Integrates from `p` at time `t0` under `governing` until the first
    /// switching-manifold junction or until `dt` elapses, whichever is first.
    ///
    /// `p` must lie on an integral curve of the invariant set (junctions and
    /// the curves themselves); arbitrary off-set points go through
    /// [`integrate_generic`].
    pub fn integrate_local(
        &self,
        governing: Governing,
        p: Point,
        t0: f64,
        dt: f64,
    ) -> Result<Arc, TrajError> {
        assert!(dt >= 0.0, "dt must be nonnegative");
        match (self.family.kind, governing) {
            (FamilyKind::Bean, Governing::Upper) => {
                let c = p.y + p.x * p.x;
                if c < -self.tol.on_sigma {
                    return Err(TrajError::OffIntegralCurve);
                }
                let xr = c.max(0.0).sqrt();
                if p.x > xr + X_EPS {
                    return Err(TrajError::OffIntegralCurve);
                }
                let t_hit = t0 + (xr - p.x);
                Ok(Arc {
                    governing,
                    t0,
                    t1: t_hit.min(t0 + dt),
                    geom: ArcGeom::BeanParabola { c, x0: p.x },
                })
            }
            (FamilyKind::Bean, Governing::Lower) => {
                let x2 = p.x * p.x;
                let c = p.y - 0.5 * (x2 * x2 - x2);
                // roots of (x^4 - x^2)/2 + c: x^2 = (1 +- sqrt(1 - 8c)) / 2
                let disc = 1.0 - 8.0 * c;
                let mut candidates = Vec::new();
                if disc >= 0.0 {
                    for s in [1.0, -1.0] {
                        let sq = 0.5 * (1.0 + s * disc.sqrt());
                        if sq >= 0.0 {
                            candidates.push(sq.sqrt());
                            candidates.push(-sq.sqrt());
                        }
                    }
                }
                let xl = candidates
                    .into_iter()
                    .filter(|&r| r < p.x - X_EPS)
                    .fold(f64::NEG_INFINITY, f64::max);
                if !xl.is_finite() {
                    return Err(TrajError::OffIntegralCurve);
                }
                let t_hit = t0 + (p.x - xl) / 2.0;
                Ok(Arc {
                    governing,
                    t0,
                    t1: t_hit.min(t0 + dt),
                    geom: ArcGeom::BeanQuartic { c, x0: p.x },
                })
            }
            (FamilyKind::Bean, Governing::Sliding) => {
                if p.y.abs() > self.tol.on_sigma {
                    return Err(TrajError::UndefinedSliding);
                }
                if p.x <= -BEAN_TANGENCY + X_EPS || p.x > BEAN_TANGENCY + X_EPS {
                    return Err(TrajError::UndefinedSliding);
                }
                // the slide runs leftward: to the fold at 0 from the sliding
                // segment, to the left tangency from the escaping one
                let terminal = if p.x > X_EPS { 0.0 } else { -BEAN_TANGENCY };
                let span = bean_slide_antiderivative(p.x) - bean_slide_antiderivative(terminal);
                Ok(Arc {
                    governing,
                    t0,
                    t1: t0 + span.max(0.0).min(dt),
                    geom: ArcGeom::BeanSlide { x0: p.x },
                })
            }
            (_, Governing::Sliding) => Err(TrajError::UndefinedSliding),
            (_, Governing::Upper) => {
                let curve = self.chain_curve();
                let c = p.y - curve.value(p.x);
                if c.abs() > 1e-7 {
                    return Err(TrajError::OffIntegralCurve);
                }
                let t1 = match curve.next_root_right(p.x) {
                    Some(xr) if c.abs() <= self.tol.on_sigma => (t0 + (xr - p.x)).min(t0 + dt),
                    _ => t0 + dt,
                };
                Ok(Arc {
                    governing,
                    t0,
                    t1,
                    geom: ArcGeom::ChainUpper { curve, x0: p.x, c },
                })
            }
            (_, Governing::Lower) => {
                let curve = self.chain_curve();
                let c = p.y + curve.value(p.x);
                if c.abs() > 1e-7 {
                    return Err(TrajError::OffIntegralCurve);
                }
                let t1 = match curve.next_root_left(p.x) {
                    Some(xl) if c.abs() <= self.tol.on_sigma => (t0 + (p.x - xl)).min(t0 + dt),
                    _ => t0 + dt,
                };
                Ok(Arc {
                    governing,
                    t0,
                    t1,
                    geom: ArcGeom::ChainLower { curve, x0: p.x, c },
                })
            }
        }
    }

    /// Forward continuations at the on-manifold point `p`, in the fixed order
    /// upper, lower, sliding. An empty list marks a stationary point
    /// (singular tangency).
    pub fn continue_at(&self, p: Point) -> Result<Vec<Governing>, TrajError> {
        let class = classify_point(&self.family.field, p, &self.tol)?;
        let candidates: &[Governing] = match class {
            RegionClass::CrossingPos => &[Governing::Upper],
            RegionClass::CrossingNeg => &[Governing::Lower],
            RegionClass::Sliding => &[Governing::Sliding],
            RegionClass::TangencySingular => &[],
            RegionClass::Escaping | RegionClass::TangencyRegular => {
                &[Governing::Upper, Governing::Lower, Governing::Sliding]
            }
        };
        let mut out = Vec::new();
        for &g in candidates {
            if self.probe_valid(g, p) {
                out.push(g);
            }
        }
        Ok(out)
    }

    /// Checks that a short arc under `g` exists, leaves `p`, and stays in the
    /// half-plane (or region class) the convention demands.
    fn probe_valid(&self, g: Governing, p: Point) -> bool {
        let probe = 1e-3;
        let arc = match self.integrate_local(g, p, 0.0, probe) {
            Ok(a) => a,
            Err(_) => return false,
        };
        if arc.duration() <= 1e-12 {
            return false;
        }
        let mid = arc.at(arc.t0 + 0.5 * arc.duration());
        let end = arc.end();
        match g {
            Governing::Upper => mid.y >= -self.tol.on_sigma && end.y >= -self.tol.on_sigma,
            Governing::Lower => mid.y <= self.tol.on_sigma && end.y <= self.tol.on_sigma,
            Governing::Sliding => matches!(
                classify_point(&self.family.field, mid, &self.tol),
                Ok(RegionClass::Sliding) | Ok(RegionClass::Escaping)
            ),
        }
    }

    /// Explores every forward branch from `p0` up to `horizon` time units,
    /// visiting continuations in the fixed upper/lower/sliding order.
    ///
    /// Sliding arcs are explored as full slides, exiting only at the end of
    /// their segment; the continuum of intermediate exits on escaping
    /// segments is covered by the bean synthesis API instead.
    pub fn enumerate_branches(&self, p0: Point, horizon: f64, max_branches: usize) -> BranchTree {
        let mut tree = BranchTree {
            root: p0,
            horizon,
            junctions: Vec::new(),
            leaves: Vec::new(),
            truncated: false,
            depth: 0,
        };
        let max_arcs = (horizon * 4.0) as usize + 16;
        // depth-first, stack of partial branches
        let mut stack = vec![(Vec::<Arc>::new(), Vec::<BranchChoice>::new(), 0.0, p0, 0usize)];
        while let Some((arcs, log, t, p, depth)) = stack.pop() {
            if tree.leaves.len() >= max_branches {
                tree.truncated = true;
                break;
            }
            if t >= horizon - 1e-12 || arcs.len() >= max_arcs {
                tree.depth = tree.depth.max(depth);
                tree.leaves.push(Trajectory {
                    arcs,
                    branch_log: log,
                });
                continue;
            }
            let conts = if self.family.field.switching.value(p).abs() <= self.tol.on_sigma {
                match self.continue_at(p) {
                    Ok(c) => c,
                    Err(_) => Vec::new(),
                }
            } else if self.family.field.switching.value(p) > 0.0 {
                vec![Governing::Upper]
            } else {
                vec![Governing::Lower]
            };
            if conts.is_empty() {
                // stationary (or stuck) point: the branch ends here
                tree.depth = tree.depth.max(depth);
                tree.leaves.push(Trajectory {
                    arcs,
                    branch_log: log,
                });
                continue;
            }
            if conts.len() > 1 {
                tree.junctions.push(Junction {
                    time: t,
                    point: p,
                    choices: conts.clone(),
                });
            }
            // push in reverse so the fixed order is explored first
            for &g in conts.iter().rev() {
                let arc = match self.integrate_local(g, p, t, horizon - t) {
                    Ok(a) => a,
                    Err(_) => continue,
                };
                if arc.duration() <= 1e-12 {
                    continue;
                }
                let mut arcs2 = arcs.clone();
                let mut log2 = log.clone();
                if conts.len() > 1 {
                    log2.push(BranchChoice {
                        time: t,
                        x: p.x,
                        chosen: g,
                    });
                }
                let q = arc.end();
                let t2 = arc.t1;
                arcs2.push(arc);
                let d2 = if conts.len() > 1 { depth + 1 } else { depth };
                stack.push((arcs2, log2, t2, q, d2));
            }
        }
        tree
    }

    /// Builds the closed-form trajectory whose itinerary is `word`, one
    /// compartment traversal per unit time, anchored so that compartment
    /// `word.offset` starts at `t = word.offset`.
    pub fn trajectory_from_symbols(&self, word: &SymbolWindow) -> Result<Trajectory, TrajError> {
        let parts = self.partition_for(word);
        let expected = match self.family.kind {
            FamilyKind::FiniteK(k) => Alphabet::Finite(2 * k as usize - 2),
            FamilyKind::Infinite => Alphabet::Integers,
            FamilyKind::Bean => panic!("bean trajectories are synthesized from real windows"),
        };
        if word.alphabet != expected {
            return Err(TrajError::InadmissibleWord { index: word.offset });
        }
        // validate symbols and adjacency
        for (i, &s) in word.symbols.iter().enumerate() {
            let j = word.offset + i as i64;
            let c = parts
                .by_index(s)
                .ok_or(TrajError::InadmissibleWord { index: j })?;
            if let Some(&next) = word.symbols.get(i + 1) {
                let n = parts
                    .by_index(next)
                    .ok_or(TrajError::InadmissibleWord { index: j + 1 })?;
                if (c.end_fold - n.start_fold).abs() > X_EPS {
                    return Err(TrajError::InadmissibleWord { index: j });
                }
            }
        }
        let curve = self.chain_curve();
        let mut arcs = Vec::new();
        for (i, &s) in word.symbols.iter().enumerate() {
            let t = (word.offset + i as i64) as f64;
            let c = parts.by_index(s).unwrap();
            match c.side {
                CurveSide::Upper => arcs.push(Arc {
                    governing: Governing::Upper,
                    t0: t,
                    t1: t + 1.0,
                    geom: ArcGeom::ChainUpper {
                        curve: curve.clone(),
                        x0: c.x_lo,
                        c: 0.0,
                    },
                }),
                CurveSide::Lower => arcs.push(Arc {
                    governing: Governing::Lower,
                    t0: t,
                    t1: t + 1.0,
                    geom: ArcGeom::ChainLower {
                        curve: curve.clone(),
                        x0: c.x_hi,
                        c: 0.0,
                    },
                }),
                CurveSide::Both => {
                    if (c.start_fold - c.x_hi).abs() <= X_EPS {
                        // left loop: down to the crossing, back up
                        arcs.push(Arc {
                            governing: Governing::Lower,
                            t0: t,
                            t1: t + 0.5,
                            geom: ArcGeom::ChainLower {
                                curve: curve.clone(),
                                x0: c.x_hi,
                                c: 0.0,
                            },
                        });
                        arcs.push(Arc {
                            governing: Governing::Upper,
                            t0: t + 0.5,
                            t1: t + 1.0,
                            geom: ArcGeom::ChainUpper {
                                curve: curve.clone(),
                                x0: c.x_lo,
                                c: 0.0,
                            },
                        });
                    } else {
                        // right loop
                        arcs.push(Arc {
                            governing: Governing::Upper,
                            t0: t,
                            t1: t + 0.5,
                            geom: ArcGeom::ChainUpper {
                                curve: curve.clone(),
                                x0: c.x_lo,
                                c: 0.0,
                            },
                        });
                        arcs.push(Arc {
                            governing: Governing::Lower,
                            t0: t + 0.5,
                            t1: t + 1.0,
                            geom: ArcGeom::ChainLower {
                                curve: curve.clone(),
                                x0: c.x_hi,
                                c: 0.0,
                            },
                        });
                    }
                }
            }
        }
        Ok(Trajectory {
            arcs,
            branch_log: Vec::new(),
        })
    }

    /// The itinerary of `gamma` over integer indices `jlo ..= jhi`: symbol
    /// `j` is the compartment occupied at time `j`, falling back to `j + 1/2`
    /// when time `j` lands exactly on a fold.
    pub fn itinerary(
        &self,
        gamma: &Trajectory,
        jlo: i64,
        jhi: i64,
    ) -> Result<SymbolWindow, TrajError> {
        assert!(jlo <= jhi);
        if (jlo as f64) < gamma.t_start() - 1e-9 || (jhi as f64 + 0.5) > gamma.t_end() + 1e-9 {
            return Err(TrajError::OutsideTimeSpan);
        }
        let span = gamma
            .arcs
            .iter()
            .flat_map(|a| [a.start().x.abs(), a.end().x.abs()])
            .fold(0.0, f64::max);
        let window = span as u32 + 2;
        let parts = compartments(&self.family, window);
        let alphabet = match self.family.kind {
            FamilyKind::FiniteK(k) => Alphabet::Finite(2 * k as usize - 2),
            FamilyKind::Infinite => Alphabet::Integers,
            FamilyKind::Bean => return Err(TrajError::OffInvariantSet),
        };
        let set = invariant_set(&self.family);
        let mut symbols = Vec::new();
        for j in jlo..=jhi {
            let p = gamma.at(j as f64);
            if !set.contains(p, 1e-6) {
                return Err(TrajError::OffInvariantSet);
            }
            let s = parts
                .compartment_of(p, self.tol.on_sigma)
                .or_else(|| parts.compartment_of(gamma.at(j as f64 + 0.5), self.tol.on_sigma))
                .ok_or(TrajError::OffInvariantSet)?;
            symbols.push(s);
        }
        Ok(SymbolWindow {
            alphabet,
            offset: jlo,
            symbols,
        })
    }

    fn partition_for(&self, word: &SymbolWindow) -> CompartmentPartition {
        let window = match self.family.kind {
            FamilyKind::Infinite => {
                let m = word.symbols.iter().map(|s| s.abs()).max().unwrap_or(0);
                (m / 2) as u32 + 3
            }
            _ => 0,
        };
        compartments(&self.family, window)
    }
}

/// A junction where more than one forward continuation exists.
#[derive(Debug, Clone)]
pub struct Junction {
    pub time: f64,
    pub point: Point,
    pub choices: Vec<Governing>,
}

/// All forward branches from a starting point up to a time horizon.
#[derive(Debug, Clone)]
pub struct BranchTree {
    pub root: Point,
    pub horizon: f64,
    pub junctions: Vec<Junction>,
    pub leaves: Vec<Trajectory>,
    /// Set when the branch budget cut exploration short.
    pub truncated: bool,
    /// Maximum number of junctions along any explored branch.
    pub depth: usize,
}

fn rk4_step(field: &SmoothField2D, q: Point, h: f64) -> Point {
    let k1 = field.eval(q);
    let k2 = field.eval(q + k1 * (h / 2.0));
    let k3 = field.eval(q + k2 * (h / 2.0));
    let k4 = field.eval(q + k3 * h);
    q + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0)
}

fn governing_of(field: &SmoothField2D) -> Governing {
    match field.label {
        crate::field::HalfPlane::Upper => Governing::Upper,
        crate::field::HalfPlane::Lower => Governing::Lower,
    }
}

/// Fixed-step RK4 with event location against the switching function.
///
/// The arc ends after `dt`, or on the manifold: transversal hits are
/// bisected down to `|f| <= 1e-12`, tangential (grazing) hits are located as
/// a local minimum of `|f|` and accepted when the minimum is below `1e-9`.
pub fn integrate_generic(
    field: &SmoothField2D,
    switching: &SwitchingFunction,
    p: Point,
    t0: f64,
    dt: f64,
    step: f64,
) -> Result<Arc, TrajError> {
    assert!(step > 0.0 && dt >= 0.0);
    let governing = governing_of(field);
    let mut points = vec![(t0, p)];
    let mut t = t0;
    let mut q = p;
    // the event arms once the trajectory has left the manifold
    let mut armed_sign = 0.0f64;
    let f0 = switching.value(p);
    if f0.abs() > 1e-9 {
        armed_sign = f0.signum();
    }
    // distance-to-manifold history for graze detection
    let mut u_prev = f64::INFINITY;
    let mut u_pp = f64::INFINITY;
    let mut h_prev = step;
    while t < t0 + dt - 1e-15 {
        let h = step.min(t0 + dt - t);
        let q2 = rk4_step(field, q, h);
        let f2 = switching.value(q2);
        if armed_sign == 0.0 {
            if f2.abs() > 1e-9 {
                armed_sign = f2.signum();
            }
        } else if f2 * armed_sign <= 0.0 {
            // transversal crossing: bisect the sub-step length from q
            let mut lo = 0.0f64;
            let mut hi = h;
            let mut hit = q2;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let qm = rk4_step(field, q, mid);
                let fm = switching.value(qm);
                if fm.abs() <= 1e-12 {
                    hit = qm;
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm * armed_sign > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                    hit = qm;
                }
            }
            if switching.value(hit).abs() > 1e-10 {
                return Err(TrajError::EventLocationFailure);
            }
            let t_hit = t + 0.5 * (lo + hi);
            points.push((t_hit, hit));
            return Ok(Arc {
                governing,
                t0,
                t1: t_hit,
                geom: ArcGeom::Polyline { points },
            });
        } else {
            let u2 = f2 * armed_sign;
            if u_prev < u_pp && u_prev < u2 && u_prev < 1e-3 {
                // the distance dipped two steps ago: ternary-search the
                // minimum over the last two steps for a grazing hit
                let base = points[points.len() - 2];
                let span = h_prev + h;
                let g = |s: f64| switching.value(rk4_step(field, base.1, s)).abs();
                let mut lo = 0.0f64;
                let mut hi = span;
                for _ in 0..100 {
                    let m1 = lo + (hi - lo) / 3.0;
                    let m2 = hi - (hi - lo) / 3.0;
                    if g(m1) < g(m2) {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                let s_min = 0.5 * (lo + hi);
                if g(s_min) <= 1e-9 {
                    let hit = rk4_step(field, base.1, s_min);
                    let t_hit = base.0 + s_min;
                    points.pop();
                    points.push((t_hit, hit));
                    return Ok(Arc {
                        governing,
                        t0,
                        t1: t_hit,
                        geom: ArcGeom::Polyline { points },
                    });
                }
            }
            u_pp = u_prev;
            u_prev = u2;
        }
        h_prev = h;
        t += h;
        q = q2;
        points.push((t, q));
    }
    Ok(Arc {
        governing,
        t0,
        t1: t,
        geom: ArcGeom::Polyline { points },
    })
}

/// RK4 integration stopped at the vertical line `x = x_stop` (bisected to
/// `|x - x_stop| <= 1e-12`); used when the abscissa of the next junction is
/// known in advance, which sidesteps grazing-detection entirely.
pub fn integrate_until_x(
    field: &SmoothField2D,
    p: Point,
    t0: f64,
    x_stop: f64,
    max_dt: f64,
    step: f64,
) -> Result<Arc, TrajError> {
    assert!(step > 0.0 && max_dt >= 0.0);
    let governing = governing_of(field);
    let dir = (x_stop - p.x).signum();
    let mut points = vec![(t0, p)];
    let mut t = t0;
    let mut q = p;
    while t < t0 + max_dt - 1e-15 {
        let h = step.min(t0 + max_dt - t);
        let q2 = rk4_step(field, q, h);
        if (q2.x - x_stop) * dir >= 0.0 {
            let mut lo = 0.0f64;
            let mut hi = h;
            let mut hit = q2;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let qm = rk4_step(field, q, mid);
                if (qm.x - x_stop).abs() <= 1e-12 {
                    hit = qm;
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (qm.x - x_stop) * dir < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                    hit = qm;
                }
            }
            let t_hit = t + 0.5 * (lo + hi);
            points.push((t_hit, hit));
            return Ok(Arc {
                governing,
                t0,
                t1: t_hit,
                geom: ArcGeom::Polyline { points },
            });
        }
        t += h;
        q = q2;
        points.push((t, q));
    }
    Err(TrajError::EventLocationFailure)
}

/// Writes a trajectory as `t,x,y,governing` rows, `samples_per_arc` interior
/// samples per arc.
pub fn write_csv(
    gamma: &Trajectory,
    samples_per_arc: usize,
    w: &mut impl std::io::Write,
) -> std::io::Result<()> {
    writeln!(w, "t,x,y,governing")?;
    for arc in &gamma.arcs {
        let n = samples_per_arc.max(1);
        for i in 0..=n {
            let t = arc.t0 + arc.duration() * i as f64 / n as f64;
            let p = arc.at(t);
            writeln!(w, "{:.12},{:.12},{:.12},{}", t, p.x, p.y, arc.governing)?;
        }
    }
    Ok(())
}

/// Reads a `t,x,y,governing` document back into a polyline trajectory,
/// splitting arcs where the governing tag changes.
pub fn read_csv(doc: &str) -> Result<Trajectory, String> {
    let mut arcs: Vec<Arc> = Vec::new();
    let mut current: Vec<(f64, Point)> = Vec::new();
    let mut current_gov: Option<Governing> = None;
    let flush = |pts: &mut Vec<(f64, Point)>, gov: Option<Governing>, arcs: &mut Vec<Arc>| {
        if let (Some(g), true) = (gov, pts.len() >= 2) {
            arcs.push(Arc {
                governing: g,
                t0: pts[0].0,
                t1: pts[pts.len() - 1].0,
                geom: ArcGeom::Polyline {
                    points: std::mem::take(pts),
                },
            });
        } else {
            pts.clear();
        }
    };
    for (lineno, line) in doc.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("t,") {
            continue;
        }
        let mut it = line.split(',');
        let parse = |s: Option<&str>| -> Result<f64, String> {
            s.ok_or_else(|| format!("line {}: missing column", lineno + 1))?
                .trim()
                .parse()
                .map_err(|e| format!("line {}: {}", lineno + 1, e))
        };
        let t = parse(it.next())?;
        let x = parse(it.next())?;
        let y = parse(it.next())?;
        let gov: Governing = it
            .next()
            .ok_or_else(|| format!("line {}: missing governing column", lineno + 1))?
            .trim()
            .parse()?;
        if current_gov != Some(gov) {
            let prev = current.last().copied();
            flush(&mut current, current_gov, &mut arcs);
            if let Some(p) = prev {
                current.push(p);
            }
            current_gov = Some(gov);
        }
        current.push((t, Point::new(x, y)));
    }
    flush(&mut current, current_gov, &mut arcs);
    if arcs.is_empty() {
        return Err("no trajectory rows".into());
    }
    Ok(Trajectory {
        arcs,
        branch_log: Vec::new(),
    })
}
