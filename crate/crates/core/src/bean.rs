//! The bean field's transversal-section dynamics: synthesizing a trajectory
//! from a window of section values, reading the beats back off a trajectory,
//! and the first-return shift.
//!
//! Every trajectory in the bean's invariant region crosses the section
//! `{0} x (0, 1]` in an increasing sequence of beats; the value sequence is a
//! complete invariant, and any window of values in `(0, 1]` is realizable.

use crate::canonical::{bean_slide_antiderivative, FamilyKind, BEAN_TANGENCY};
use crate::geom::Point;
use crate::symbolic::{growth_tail, MetricBound};
use crate::traj::{Arc, ArcGeom, Engine, Governing, Trajectory};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Branch tolerance for the section values `1/2` and `1`.
const V_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum BeanError {
    #[error("section value {value} at index {index} is outside (0, 1]")]
    ValueOutOfRange { index: i64, value: f64 },
    #[error("a bean window needs at least two section values")]
    WindowTooShort,
    #[error("the trajectory never returns to the section")]
    SectionNotReached,
}

/// A finite window of section values `s_j` in `(0, 1]`, indexed like a
/// symbol window: value `j` sits at position `j - offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealWindow {
    pub offset: i64,
    pub values: Vec<f64>,
}

impl RealWindow {
    pub fn new(offset: i64, values: Vec<f64>) -> Result<Self, BeanError> {
        for (i, &v) in values.iter().enumerate() {
            if !(v > 0.0 && v <= 1.0) {
                return Err(BeanError::ValueOutOfRange {
                    index: offset + i as i64,
                    value: v,
                });
            }
        }
        Ok(RealWindow { offset, values })
    }

    pub fn range(&self) -> Option<(i64, i64)> {
        if self.values.is_empty() {
            None
        } else {
            Some((self.offset, self.offset + self.values.len() as i64 - 1))
        }
    }

    pub fn get(&self, j: i64) -> Option<f64> {
        if j < self.offset {
            return None;
        }
        self.values.get((j - self.offset) as usize).copied()
    }

    /// `(sigma^steps w)_j = w_{j + steps}`.
    pub fn shift(&self, steps: i64) -> RealWindow {
        RealWindow {
            offset: self.offset - steps,
            values: self.values.clone(),
        }
    }
}

/// Closed-form duration of the loop taking beat value `beta` to `beta_next`.
pub fn loop_duration(beta: f64, beta_next: f64) -> f64 {
    let t = bean_slide_antiderivative;
    // descent from (0, beta) back to the origin
    let mut d = beta.sqrt();
    let x_land = if beta > 0.5 + V_EPS {
        d += (beta.sqrt() - (1.0 - beta).sqrt()) / 2.0;
        (1.0 - beta).sqrt()
    } else {
        beta.sqrt()
    };
    if x_land > V_EPS {
        d += t(x_land);
    }
    // exit from the origin to the next beat
    let b = beta_next;
    if b >= 1.0 - V_EPS {
        d += 0.5 + 1.0;
    } else if (b - 0.5).abs() <= V_EPS {
        d += t(BEAN_TANGENCY) + BEAN_TANGENCY;
    } else if b > 0.5 {
        let sigma = (1.0 - b).sqrt();
        d += t(sigma) + (b.sqrt() - sigma) / 2.0 + b.sqrt();
    } else {
        let sigma = b.sqrt();
        d += t(sigma) + sigma;
    }
    d
}

fn slide_arc(t0: f64, x0: f64, x1: f64) -> Arc {
    let dt = bean_slide_antiderivative(x0) - bean_slide_antiderivative(x1);
    Arc {
        governing: Governing::Sliding,
        t0,
        t1: t0 + dt,
        geom: ArcGeom::BeanSlide { x0 },
    }
}

/// Builds the unique bean trajectory whose beat values realize `window`,
/// anchored so that beat 0 (or the window's first beat, when index 0 is
/// outside it) happens at time 0.
pub fn synthesize(window: &RealWindow) -> Result<Trajectory, BeanError> {
    let checked = RealWindow::new(window.offset, window.values.clone())?;
    let Some((lo, hi)) = checked.range() else {
        return Err(BeanError::WindowTooShort);
    };
    if hi == lo {
        return Err(BeanError::WindowTooShort);
    }
    let engine = Engine::new(FamilyKind::Bean);
    let big = 1e9;
    let mut arcs: Vec<Arc> = Vec::new();
    let mut log = Vec::new();
    let mut t = 0.0;
    // descent half of the first loop, starting on the section
    let first = checked.get(lo).unwrap();
    let a = engine
        .integrate_local(Governing::Upper, Point::new(0.0, first), t, big)
        .expect("descent parabola");
    t = a.t1;
    arcs.push(a);
    for j in lo..hi {
        let beta = checked.get(j).unwrap();
        let b = checked.get(j + 1).unwrap();
        // land on the manifold and reach the two-fold at the origin
        if beta > 0.5 + V_EPS && beta < 1.0 - V_EPS {
            let a = engine
                .integrate_local(Governing::Lower, arcs.last().unwrap().end(), t, big)
                .expect("landing quartic");
            t = a.t1;
            arcs.push(a);
        } else if beta >= 1.0 - V_EPS {
            // the quartic through (1, 0) runs all the way to the origin
            let a = engine
                .integrate_local(Governing::Lower, Point::new(1.0, 0.0), t, big)
                .expect("boundary quartic");
            t = a.t1;
            arcs.push(a);
        }
        let x_land = arcs.last().unwrap().end().x;
        if x_land > 1e-12 {
            let a = slide_arc(t, x_land, 0.0);
            t = a.t1;
            arcs.push(a);
        }
        // exit branch at the two-fold, selecting the next beat value
        if b >= 1.0 - V_EPS {
            log.push(crate::traj::BranchChoice {
                time: t,
                x: 0.0,
                chosen: Governing::Lower,
            });
            let a = engine
                .integrate_local(Governing::Lower, Point::new(0.0, 0.0), t, big)
                .expect("outer quartic");
            t = a.t1;
            arcs.push(a);
        } else {
            log.push(crate::traj::BranchChoice {
                time: t,
                x: 0.0,
                chosen: Governing::Sliding,
            });
            let sigma = if (b - 0.5).abs() <= V_EPS {
                BEAN_TANGENCY
            } else if b > 0.5 {
                (1.0 - b).sqrt()
            } else {
                b.sqrt()
            };
            let a = slide_arc(t, 0.0, -sigma);
            t = a.t1;
            arcs.push(a);
            if b > 0.5 + V_EPS {
                let a = engine
                    .integrate_local(Governing::Lower, Point::new(-sigma, 0.0), t, big)
                    .expect("exit quartic");
                t = a.t1;
                arcs.push(a);
            }
        }
        // the full parabola through the next beat
        let start = arcs.last().unwrap().end();
        let a = engine
            .integrate_local(Governing::Upper, start, t, big)
            .expect("beat parabola");
        t = a.t1;
        arcs.push(a);
    }
    let mut gamma = Trajectory {
        arcs,
        branch_log: log,
    };
    // re-anchor so beat index 0 (when in the window) happens at time 0
    if lo < 0 && hi >= 0 {
        let beats = beat_times(&gamma);
        let anchor = beats[(-lo) as usize];
        gamma = gamma.shift_time(anchor);
    }
    Ok(gamma)
}

/// Times at which the trajectory crosses the section, ascending.
pub fn beat_times(gamma: &Trajectory) -> Vec<f64> {
    let mut times = Vec::new();
    for arc in &gamma.arcs {
        match &arc.geom {
            ArcGeom::BeanParabola { c, x0 } if *c > 1e-12 => {
                let t_hit = arc.t0 - x0;
                if t_hit >= arc.t0 - 1e-9 && t_hit <= arc.t1 + 1e-9 {
                    times.push(t_hit);
                }
            }
            ArcGeom::Polyline { points } => {
                for pair in points.windows(2) {
                    let (ta, a) = pair[0];
                    let (tb, b) = pair[1];
                    if a.x <= 0.0 && b.x > 0.0 && a.y > 1e-9 {
                        let w = -a.x / (b.x - a.x);
                        times.push(ta + (tb - ta) * w);
                    }
                }
            }
            _ => {}
        }
    }
    times.sort_by(|p, q| p.partial_cmp(q).unwrap());
    times.dedup_by(|p, q| (*p - *q).abs() < 1e-9);
    times
}

/// Beat values as a window, anchored so that beat 0 is the latest section
/// hit at time `<= 0` (the first hit, when all of them are later).
pub fn beat_itinerary(gamma: &Trajectory) -> Result<RealWindow, BeanError> {
    let times = beat_times(gamma);
    if times.is_empty() {
        return Err(BeanError::SectionNotReached);
    }
    let offset = match times.iter().rposition(|&t| t <= 1e-9) {
        Some(i) => -(i as i64),
        None => 1,
    };
    let values = times.iter().map(|&t| gamma.at(t).y).collect();
    RealWindow::new(offset, values)
}

/// Time of the first section hit after `t = 0`.
pub fn return_time(gamma: &Trajectory) -> Result<f64, BeanError> {
    beat_times(gamma)
        .into_iter()
        .find(|&t| t > 1e-9)
        .ok_or(BeanError::SectionNotReached)
}

/// The first-return shift: `gamma'(t) = gamma(t + eta)` with `eta` the first
/// positive beat time, so the beat window of the result is the shifted one.
pub fn return_map(gamma: &Trajectory) -> Result<Trajectory, BeanError> {
    Ok(gamma.shift_time(return_time(gamma)?))
}

/// The beat metric `d(s, s') = sum_j |s_j - s'_j| / 2^{|j|}` on windows,
/// with per-value differences bounded by 1 outside the overlap.
pub fn metric_d_real(a: &RealWindow, b: &RealWindow) -> MetricBound {
    let common = match (a.range(), b.range()) {
        (Some((alo, ahi)), Some((blo, bhi))) => {
            let lo = alo.max(blo);
            let hi = ahi.min(bhi);
            (lo <= hi).then_some((lo, hi))
        }
        _ => None,
    };
    let Some((lo, hi)) = common else {
        return MetricBound {
            value: 0.0,
            tail: 3.0,
        };
    };
    let mut value = 0.0;
    for j in lo..=hi {
        value += (a.get(j).unwrap() - b.get(j).unwrap()).abs()
            * 2f64.powi(-(j.unsigned_abs().min(1060) as i32));
    }
    MetricBound {
        value,
        tail: growth_tail(hi + 1, 1.0, 0.0) + growth_tail(1 - lo, 1.0, 0.0),
    }
}

/// A uniformly random beat window with values in `(0, 1]`, deterministic in
/// `seed`.
pub fn random_real_window(len: usize, offset: i64, seed: u64) -> RealWindow {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RealWindow {
        offset,
        values: (0..len).map(|_| 1.0 - rng.gen::<f64>()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outer_loop_period_is_three() {
        let w = RealWindow::new(0, vec![1.0, 1.0, 1.0]).unwrap();
        assert!((loop_duration(1.0, 1.0) - 3.0).abs() < 1e-12);
        let gamma = synthesize(&w).unwrap();
        let beats = beat_times(&gamma);
        assert_eq!(beats.len(), 3);
        assert!(beats[0].abs() < 1e-9);
        assert!((beats[1] - 3.0).abs() < 1e-9);
        assert!((beats[2] - 6.0).abs() < 1e-9);
        assert!((return_time(&gamma).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn beats_round_trip_through_synthesis() {
        for seed in 0..12 {
            let w = random_real_window(6, -2, seed);
            let gamma = synthesize(&w).unwrap();
            let back = beat_itinerary(&gamma).unwrap();
            assert_eq!(back.offset, w.offset);
            assert_eq!(back.values.len(), w.values.len());
            for (a, b) in back.values.iter().zip(w.values.iter()) {
                assert!((a - b).abs() < 1e-9, "beat {a} vs {b}");
            }
        }
    }

    #[test]
    fn special_values_round_trip() {
        // both branch boundaries in one window
        let w = RealWindow::new(0, vec![0.5, 1.0, 0.25, 0.75, 0.5]).unwrap();
        let gamma = synthesize(&w).unwrap();
        let back = beat_itinerary(&gamma).unwrap();
        for (a, b) in back.values.iter().zip(w.values.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn loops_take_their_closed_form_time() {
        for seed in 0..6 {
            let w = random_real_window(4, 0, 100 + seed);
            let gamma = synthesize(&w).unwrap();
            let beats = beat_times(&gamma);
            for i in 0..3 {
                let want = loop_duration(w.values[i], w.values[i + 1]);
                assert!((beats[i + 1] - beats[i] - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn return_map_shifts_the_window() {
        let w = RealWindow::new(-1, vec![0.3, 0.8, 0.6, 0.9]).unwrap();
        let gamma = synthesize(&w).unwrap();
        let shifted = return_map(&gamma).unwrap();
        let back = beat_itinerary(&shifted).unwrap();
        let expect = beat_itinerary(&gamma).unwrap().shift(1);
        assert_eq!(back.offset, expect.offset);
        for (a, b) in back.values.iter().zip(expect.values.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn arcs_are_continuous() {
        let w = RealWindow::new(0, vec![0.7, 0.2, 1.0, 0.5, 0.9]).unwrap();
        let gamma = synthesize(&w).unwrap();
        for pair in gamma.arcs.windows(2) {
            assert!((pair[0].t1 - pair[1].t0).abs() < 1e-9);
            assert!(pair[0].end().dist(pair[1].start()) < 1e-9);
        }
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        assert!(matches!(
            RealWindow::new(0, vec![0.5, 0.0]),
            Err(BeanError::ValueOutOfRange { index: 1, .. })
        ));
        assert!(matches!(
            RealWindow::new(2, vec![1.2]),
            Err(BeanError::ValueOutOfRange { index: 2, .. })
        ));
    }

    #[test]
    fn window_metric_tail_is_geometric() {
        let a = RealWindow::new(-2, vec![0.5; 5]).unwrap();
        let d = metric_d_real(&a, &a);
        assert_eq!(d.value, 0.0);
        // outside [-2, 2]: 2 * 2^{-2}
        assert!((d.tail - 0.5).abs() < 1e-12);
    }
}
