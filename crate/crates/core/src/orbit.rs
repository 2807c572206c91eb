//! Orbit-space geometry: Hausdorff distances between sampled arcs, the
//! exponentially weighted orbit metric `rho`, orbit normalization, and the
//! numerical verification that itineraries conjugate the time-one (or
//! first-return) shift to the symbol shift.

use crate::bean::{
    beat_itinerary, beat_times, metric_d_real, random_real_window, return_map, synthesize,
    BeanError, RealWindow,
};
use crate::canonical::{compartments, invariant_set, make_canonical, FamilyKind};
use crate::geom::{point_segment_distance, Point};
use crate::symbolic::{
    growth_tail, metric_d, random_admissible_word, Alphabet, MetricBound, SymbolWindow,
};
use crate::traj::{time_one, Engine, Trajectory};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("cannot take a Hausdorff distance of an empty sample")]
    EmptyCurve,
    #[error("curve has (near) zero arc length")]
    DegenerateCurve,
    #[error("orbits belong to different families")]
    FamilyMismatch,
    #[error("trajectories are too short for the requested window")]
    SpanTooShort,
    #[error(transparent)]
    Bean(#[from] BeanError),
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff_points(a: &[Point], b: &[Point]) -> Result<f64, OrbitError> {
    if a.is_empty() || b.is_empty() {
        return Err(OrbitError::EmptyCurve);
    }
    let directed = |from: &[Point], to: &[Point]| {
        from.iter()
            .map(|p| {
                to.iter()
                    .map(|q| p.dist(*q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// Hausdorff distance between two polylines: sample points of each side are
/// measured against the segments of the other, which converges to the true
/// set distance as the sampling refines.
pub fn hausdorff_polylines(a: &[Point], b: &[Point]) -> Result<f64, OrbitError> {
    if a.is_empty() || b.is_empty() {
        return Err(OrbitError::EmptyCurve);
    }
    let directed = |from: &[Point], to: &[Point]| {
        from.iter()
            .map(|p| {
                if to.len() == 1 {
                    return p.dist(to[0]);
                }
                to.windows(2)
                    .map(|s| point_segment_distance(*p, s[0], s[1]))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// A trajectory normalized so that its latest junction at nonpositive time
/// (fold hit for the chain families, section beat for the bean) sits at 0.
#[derive(Debug, Clone)]
pub struct OrbitClass {
    pub kind: FamilyKind,
    pub representative: Trajectory,
}

/// Shifts `gamma` onto the normalized representative of its orbit class.
pub fn normalize(kind: FamilyKind, gamma: &Trajectory) -> OrbitClass {
    let anchor = match kind {
        FamilyKind::Bean => beat_times(gamma)
            .into_iter()
            .filter(|&t| t <= 1e-9)
            .fold(f64::NEG_INFINITY, f64::max),
        FamilyKind::FiniteK(_) | FamilyKind::Infinite => {
            let fam = make_canonical(kind);
            let span = gamma
                .arcs
                .iter()
                .flat_map(|a| [a.start().x.abs(), a.end().x.abs()])
                .fold(0.0, f64::max);
            let parts = compartments(&fam, span as u32 + 2);
            let mut best = f64::NEG_INFINITY;
            for arc in &gamma.arcs {
                for t in [arc.t0, arc.t1] {
                    if t > 1e-9 {
                        continue;
                    }
                    let p = arc.at(t);
                    let on_fold = p.y.abs() <= 1e-9
                        && parts
                            .arcs
                            .iter()
                            .any(|c| (p.x - c.start_fold).abs() <= 1e-9);
                    if on_fold {
                        best = best.max(t);
                    }
                }
            }
            best
        }
    };
    let representative = if anchor.is_finite() && anchor.abs() > 1e-12 {
        gamma.shift_time(anchor)
    } else {
        gamma.clone()
    };
    OrbitClass {
        kind,
        representative,
    }
}

/// The orbit metric `rho = sum_i d_i / 2^{|i|}`, where `d_i` is the
/// Hausdorff distance between the `i`-th unit arcs (chain families) or
/// inter-beat loops (bean), over `|i| <= n`, plus a rigorous tail bound.
///
/// Chain tails: bounded arcs use the invariant-set diameter; the infinite
/// family uses the linear growth `d_i <= d_0 + 4 sqrt(5) |i|`.
pub fn rho(
    a: &OrbitClass,
    b: &OrbitClass,
    n: u32,
    samples_per_arc: usize,
) -> Result<MetricBound, OrbitError> {
    if a.kind != b.kind {
        return Err(OrbitError::FamilyMismatch);
    }
    match a.kind {
        FamilyKind::Bean => rho_bean(a, b, n, samples_per_arc),
        _ => rho_chain(a, b, n, samples_per_arc),
    }
}

fn rho_chain(
    a: &OrbitClass,
    b: &OrbitClass,
    n: u32,
    samples_per_arc: usize,
) -> Result<MetricBound, OrbitError> {
    let g1 = &a.representative;
    let g2 = &b.representative;
    let lo = g1.t_start().max(g2.t_start());
    let hi = g1.t_end().min(g2.t_end());
    let i_lo = (lo - 1e-9).ceil() as i64;
    let i_hi = (hi + 1e-9).floor() as i64 - 1;
    let n_eff = (n as i64).min(-i_lo).min(i_hi);
    if n_eff < 0 {
        return Err(OrbitError::SpanTooShort);
    }
    let mut value = 0.0;
    let mut d0 = 0.0;
    for i in -n_eff..=n_eff {
        let p1 = g1.segment_samples(i as f64, i as f64 + 1.0, samples_per_arc);
        let p2 = g2.segment_samples(i as f64, i as f64 + 1.0, samples_per_arc);
        let d = hausdorff_polylines(&p1, &p2)?;
        if i == 0 {
            d0 = d;
        }
        value += d * 2f64.powi(-(i.unsigned_abs() as i32));
    }
    let tail = match a.kind {
        FamilyKind::FiniteK(_) => {
            let m = invariant_set(&make_canonical(a.kind)).diameter();
            2.0 * growth_tail(n_eff + 1, m, 0.0)
        }
        FamilyKind::Infinite => {
            let slope = 4.0 * 5.0f64.sqrt();
            2.0 * growth_tail(n_eff + 1, d0 + slope * (n_eff + 1) as f64, slope)
        }
        FamilyKind::Bean => unreachable!(),
    };
    Ok(MetricBound { value, tail })
}

/// Beat times of a normalized bean trajectory, keyed by beat index.
fn indexed_beats(gamma: &Trajectory) -> Result<(i64, Vec<f64>), OrbitError> {
    let times = beat_times(gamma);
    if times.is_empty() {
        return Err(OrbitError::SpanTooShort);
    }
    let offset = match times.iter().rposition(|&t| t <= 1e-9) {
        Some(i) => -(i as i64),
        None => 1,
    };
    Ok((offset, times))
}

fn rho_bean(
    a: &OrbitClass,
    b: &OrbitClass,
    n: u32,
    samples_per_arc: usize,
) -> Result<MetricBound, OrbitError> {
    let g1 = &a.representative;
    let g2 = &b.representative;
    let (off1, t1) = indexed_beats(g1)?;
    let (off2, t2) = indexed_beats(g2)?;
    // loop i spans beats i .. i+1 of each trajectory
    let lo = off1.max(off2);
    let hi = (off1 + t1.len() as i64 - 2).min(off2 + t2.len() as i64 - 2);
    let n_eff = (n as i64).min(-lo).min(hi);
    if n_eff < 0 {
        return Err(OrbitError::SpanTooShort);
    }
    let mut value = 0.0;
    for i in -n_eff..=n_eff {
        let (s1, e1) = (t1[(i - off1) as usize], t1[(i - off1 + 1) as usize]);
        let (s2, e2) = (t2[(i - off2) as usize], t2[(i - off2 + 1) as usize]);
        let p1 = g1.segment_samples(s1, e1, samples_per_arc);
        let p2 = g2.segment_samples(s2, e2, samples_per_arc);
        let d = hausdorff_polylines(&p1, &p2)?;
        value += d * 2f64.powi(-(i.unsigned_abs() as i32));
    }
    let m = invariant_set(&make_canonical(FamilyKind::Bean)).diameter();
    Ok(MetricBound {
        value,
        tail: 2.0 * growth_tail(n_eff + 1, m, 0.0),
    })
}

/// A monotone arc-length correspondence between two sampled curves.
#[derive(Debug, Clone)]
pub struct ArcLengthMap {
    pts_b: Vec<Point>,
    cum_a: Vec<f64>,
    cum_b: Vec<f64>,
}

fn cumulative_lengths(pts: &[Point]) -> Vec<f64> {
    let mut cum = Vec::with_capacity(pts.len());
    let mut acc = 0.0;
    cum.push(0.0);
    for w in pts.windows(2) {
        acc += w[0].dist(w[1]);
        cum.push(acc);
    }
    cum
}

impl ArcLengthMap {
    /// Pairs the curves by normalized arc length. Errors when either curve
    /// has (numerically) zero length.
    pub fn new(a: &[Point], b: &[Point]) -> Result<Self, OrbitError> {
        if a.len() < 2 || b.len() < 2 {
            return Err(OrbitError::DegenerateCurve);
        }
        let mut cum_a = cumulative_lengths(a);
        let mut cum_b = cumulative_lengths(b);
        let (la, lb) = (*cum_a.last().unwrap(), *cum_b.last().unwrap());
        if la < 1e-12 || lb < 1e-12 {
            return Err(OrbitError::DegenerateCurve);
        }
        for v in &mut cum_a {
            *v /= la;
        }
        for v in &mut cum_b {
            *v /= lb;
        }
        Ok(ArcLengthMap {
            pts_b: b.to_vec(),
            cum_a,
            cum_b,
        })
    }

    /// Normalized arc-length position of vertex `i` of the first curve.
    pub fn fraction_of_vertex(&self, i: usize) -> f64 {
        self.cum_a[i]
    }

    /// Point of the second curve at normalized arc length `f`.
    pub fn at_fraction(&self, f: f64) -> Point {
        let f = f.clamp(0.0, 1.0);
        let i = self
            .cum_b
            .partition_point(|&c| c < f)
            .clamp(1, self.pts_b.len() - 1);
        let (c0, c1) = (self.cum_b[i - 1], self.cum_b[i]);
        let w = if c1 > c0 { (f - c0) / (c1 - c0) } else { 0.0 };
        self.pts_b[i - 1] + (self.pts_b[i] - self.pts_b[i - 1]) * w
    }

    /// Image of vertex `i` of the first curve under the correspondence.
    pub fn image_of_vertex(&self, i: usize) -> Point {
        self.at_fraction(self.cum_a[i])
    }
}

/// Outcome of one verification check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

/// Results of the conjugacy verification for one family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConjugacyReport {
    pub family: String,
    pub checks: Vec<CheckResult>,
}

impl ConjugacyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn check(checks: &mut Vec<CheckResult>, name: &str, pass: bool, details: String) {
    checks.push(CheckResult {
        name: name.to_string(),
        pass,
        details,
    });
}

/// Admissible predecessors of a chain symbol.
fn predecessors(kind: FamilyKind, s: i64) -> Vec<i64> {
    match kind {
        FamilyKind::FiniteK(_) => {
            let fam = make_canonical(kind);
            let parts = compartments(&fam, 0);
            let start = parts.by_index(s).unwrap().start_fold;
            parts
                .arcs
                .iter()
                .filter(|c| (c.end_fold - start).abs() < 1e-9)
                .map(|c| c.index)
                .collect()
        }
        FamilyKind::Infinite => [s - 1, s - 2, s + 1, s + 2]
            .into_iter()
            .filter(|&x| crate::symbolic::theta_inf_admissible_pair(x, s))
            .collect(),
        FamilyKind::Bean => panic!("the bean field has no symbolic alphabet"),
    }
}

/// Admissible successors of a chain symbol.
fn successors(kind: FamilyKind, s: i64) -> Vec<i64> {
    match kind {
        FamilyKind::FiniteK(_) => {
            let fam = make_canonical(kind);
            let parts = compartments(&fam, 0);
            let end = parts.by_index(s).unwrap().end_fold;
            parts
                .arcs
                .iter()
                .filter(|c| (c.start_fold - end).abs() < 1e-9)
                .map(|c| c.index)
                .collect()
        }
        FamilyKind::Infinite => [s - 1, s - 2, s + 1, s + 2]
            .into_iter()
            .filter(|&x| crate::symbolic::theta_inf_admissible_pair(s, x))
            .collect(),
        FamilyKind::Bean => panic!("the bean field has no symbolic alphabet"),
    }
}

/// Random admissible extension of `center` by `extra` symbols on each side.
fn extend_word(kind: FamilyKind, center: &SymbolWindow, extra: usize, seed: u64) -> SymbolWindow {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut symbols = center.symbols.clone();
    let mut offset = center.offset;
    for _ in 0..extra {
        let preds = predecessors(kind, symbols[0]);
        symbols.insert(0, preds[rng.gen_range(0..preds.len())]);
        offset -= 1;
        let last = *symbols.last().unwrap();
        let succs = successors(kind, last);
        symbols.push(succs[rng.gen_range(0..succs.len())]);
    }
    SymbolWindow {
        alphabet: center.alphabet,
        offset,
        symbols,
    }
}

/// Verifies, numerically, that itineraries conjugate the time-one shift
/// (chain families) or the first-return shift (bean) to the symbol shift,
/// and that close symbol sequences give close orbits.
pub fn verify_conjugacy(kind: FamilyKind, samples: usize, seed: u64) -> ConjugacyReport {
    match kind {
        FamilyKind::Bean => verify_bean(samples, seed),
        _ => verify_chain(kind, samples, seed),
    }
}

fn verify_chain(kind: FamilyKind, samples: usize, seed: u64) -> ConjugacyReport {
    let engine = Engine::new(kind);
    let mut checks = Vec::new();
    let len = 17usize;
    let half = (len as i64 - 1) / 2;

    // 1. itineraries invert synthesis: h(w) has itinerary w
    let mut bad = None;
    for s in 0..samples {
        let w = random_admissible_word(kind, len, -half, seed.wrapping_add(s as u64));
        let gamma = match engine.trajectory_from_symbols(&w) {
            Ok(g) => g,
            Err(e) => {
                bad = Some(format!("synthesis failed: {e}"));
                break;
            }
        };
        match engine.itinerary(&gamma, -half, half) {
            Ok(back) if back.symbols == w.symbols => {}
            Ok(back) => {
                bad = Some(format!("itinerary {:?} != word {:?}", back.symbols, w.symbols));
                break;
            }
            Err(e) => {
                bad = Some(format!("itinerary failed: {e}"));
                break;
            }
        }
    }
    check(
        &mut checks,
        "itinerary-inverts-synthesis",
        bad.is_none(),
        bad.clone().unwrap_or_else(|| format!("{samples} random words")),
    );

    // 2. the time-one map is conjugate to the shift
    let mut bad = None;
    for s in 0..samples {
        let w = random_admissible_word(kind, len, -half, seed.wrapping_add(1000 + s as u64));
        let gamma = engine.trajectory_from_symbols(&w).unwrap();
        let shifted = engine.itinerary(&time_one(&gamma), -half, half - 1).unwrap();
        let expect = w.shift(1);
        let ok = (shifted.offset..shifted.offset + shifted.symbols.len() as i64)
            .all(|j| shifted.get(j) == expect.get(j));
        if !ok {
            bad = Some(format!("shift mismatch for word {:?}", w.symbols));
            break;
        }
    }
    check(
        &mut checks,
        "time-one-conjugates-shift",
        bad.is_none(),
        bad.clone().unwrap_or_else(|| format!("{samples} random words")),
    );

    // 3. agreement on a center block forces orbit agreement there
    let n_agree = 5i64;
    let mut bad = None;
    for s in 0..samples.min(8) {
        let center =
            random_admissible_word(kind, (2 * n_agree + 1) as usize, -n_agree, seed + 77 + s as u64);
        let w1 = extend_word(kind, &center, 4, seed + 200 + s as u64);
        let w2 = extend_word(kind, &center, 4, seed + 300 + s as u64);
        let o1 = normalize(kind, &engine.trajectory_from_symbols(&w1).unwrap());
        let o2 = normalize(kind, &engine.trajectory_from_symbols(&w2).unwrap());
        let r = rho(&o1, &o2, (n_agree - 1) as u32, 64).unwrap();
        let d = metric_d(&w1, &w2).unwrap();
        if r.value > 1e-9 {
            bad = Some(format!("shared block but rho value {}", r.value));
            break;
        }
        // the differing tails must be seen by the symbol metric's own tail
        if d.value + d.tail < r.value {
            bad = Some("metric bounds inconsistent".to_string());
            break;
        }
    }
    check(
        &mut checks,
        "shared-block-forces-orbit-agreement",
        bad.is_none(),
        bad.clone().unwrap_or_else(|| "blocks of width 11".to_string()),
    );

    // 4. periodic words yield periodic trajectories
    let mut bad = None;
    if let FamilyKind::FiniteK(_) = kind {
        // the left loop fixed word, period 1
        let w = SymbolWindow {
            alphabet: match kind {
                FamilyKind::FiniteK(k) => Alphabet::Finite(2 * k as usize - 2),
                _ => unreachable!(),
            },
            offset: -4,
            symbols: vec![0; 9],
        };
        let gamma = engine.trajectory_from_symbols(&w).unwrap();
        for i in 0..40 {
            let t = -3.0 + 6.0 * i as f64 / 40.0;
            if gamma.at(t).dist(gamma.at(t + 1.0)) > 1e-9 {
                bad = Some(format!("fixed word not 1-periodic at t = {t}"));
                break;
            }
        }
    } else {
        // the (0, 1) cycle of the integer chain, period 2
        let w = SymbolWindow {
            alphabet: Alphabet::Integers,
            offset: -4,
            symbols: vec![0, 1, 0, 1, 0, 1, 0, 1, 0],
        };
        let gamma = engine.trajectory_from_symbols(&w).unwrap();
        for i in 0..40 {
            let t = -3.0 + 5.0 * i as f64 / 40.0;
            if gamma.at(t).dist(gamma.at(t + 2.0)) > 1e-9 {
                bad = Some(format!("period-2 word not 2-periodic at t = {t}"));
                break;
            }
        }
    }
    check(
        &mut checks,
        "periodic-words-give-periodic-orbits",
        bad.is_none(),
        bad.unwrap_or_else(|| "sampled over 40 times".to_string()),
    );

    ConjugacyReport {
        family: kind.to_string(),
        checks,
    }
}

fn verify_bean(samples: usize, seed: u64) -> ConjugacyReport {
    let mut checks = Vec::new();
    let len = 7usize;
    let off = -3i64;

    // 1. beats invert synthesis
    let mut bad = None;
    for s in 0..samples {
        let w = random_real_window(len, off, seed.wrapping_add(s as u64));
        let gamma = synthesize(&w).unwrap();
        let back = beat_itinerary(&gamma).unwrap();
        let ok = back.offset == w.offset
            && back
                .values
                .iter()
                .zip(w.values.iter())
                .all(|(a, b)| (a - b).abs() < 1e-9);
        if !ok {
            bad = Some(format!("beat mismatch for window {:?}", w.values));
            break;
        }
    }
    check(
        &mut checks,
        "beats-invert-synthesis",
        bad.is_none(),
        bad.clone().unwrap_or_else(|| format!("{samples} random windows")),
    );

    // 2. the first-return map is conjugate to the shift
    let mut bad = None;
    for s in 0..samples {
        let w = random_real_window(len, off, seed.wrapping_add(2000 + s as u64));
        let gamma = synthesize(&w).unwrap();
        let ret = return_map(&gamma).unwrap();
        let back = beat_itinerary(&ret).unwrap();
        let expect = w.shift(1);
        let ok = back.offset == expect.offset
            && back
                .values
                .iter()
                .zip(expect.values.iter())
                .all(|(a, b)| (a - b).abs() < 1e-9);
        if !ok {
            bad = Some(format!("return-map shift mismatch for {:?}", w.values));
            break;
        }
    }
    check(
        &mut checks,
        "first-return-conjugates-shift",
        bad.is_none(),
        bad.clone().unwrap_or_else(|| format!("{samples} random windows")),
    );

    // 3. agreement on a center block forces loop agreement
    let mut bad = None;
    for s in 0..samples.min(8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 500 + s as u64);
        let center: Vec<f64> = (0..5).map(|_| 1.0 - rng.gen::<f64>()).collect();
        let mut v1 = vec![1.0 - rng.gen::<f64>()];
        v1.extend_from_slice(&center);
        v1.push(1.0 - rng.gen::<f64>());
        let mut v2 = vec![1.0 - rng.gen::<f64>()];
        v2.extend_from_slice(&center);
        v2.push(1.0 - rng.gen::<f64>());
        let w1 = RealWindow::new(-3, v1).unwrap();
        let w2 = RealWindow::new(-3, v2).unwrap();
        let o1 = normalize(FamilyKind::Bean, &synthesize(&w1).unwrap());
        let o2 = normalize(FamilyKind::Bean, &synthesize(&w2).unwrap());
        let r = rho(&o1, &o2, 1, 64).unwrap();
        if r.value > 1e-9 {
            bad = Some(format!("shared beats but rho value {}", r.value));
            break;
        }
        let d = metric_d_real(&w1, &w2);
        if d.value > 1.5 * 2f64.powi(-2) {
            bad = Some(format!("beat metric value {} too large", d.value));
            break;
        }
    }
    check(
        &mut checks,
        "shared-beats-force-loop-agreement",
        bad.is_none(),
        bad.clone().unwrap_or_else(|| "blocks of width 5".to_string()),
    );

    // 4. the outer loop is the period-eta orbit
    let w = RealWindow::new(-1, vec![1.0; 4]).unwrap();
    let gamma = synthesize(&w).unwrap();
    let eta = crate::bean::return_time(&gamma).unwrap();
    let mut bad = None;
    if (eta - 3.0).abs() > 1e-9 {
        bad = Some(format!("outer loop period {eta} != 3"));
    } else {
        for i in 0..40 {
            let t = -2.0 + 4.0 * i as f64 / 40.0;
            if gamma.at(t).dist(gamma.at(t + 3.0)) > 1e-9 {
                bad = Some(format!("outer loop not 3-periodic at t = {t}"));
                break;
            }
        }
    }
    check(
        &mut checks,
        "outer-loop-period-three",
        bad.is_none(),
        bad.unwrap_or_else(|| "eta = 3".to_string()),
    );

    ConjugacyReport {
        family: FamilyKind::Bean.to_string(),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hausdorff_of_parallel_segments() {
        let a: Vec<Point> = (0..=10).map(|i| Point::new(i as f64 / 10.0, 0.0)).collect();
        let b: Vec<Point> = (0..=10).map(|i| Point::new(i as f64 / 10.0, 1.0)).collect();
        assert!((hausdorff_points(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        assert!((hausdorff_polylines(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polyline_distance_is_below_point_distance() {
        // the same parabola sampled on two incommensurate grids: point
        // distance sees the vertex offsets, the polyline variant only the
        // chordal sag
        let a: Vec<Point> = (0..=8)
            .map(|i| {
                let x = i as f64 / 8.0;
                Point::new(x, x * x)
            })
            .collect();
        let b: Vec<Point> = (0..=7)
            .map(|i| {
                let x = i as f64 / 7.0;
                Point::new(x, x * x)
            })
            .collect();
        let dp = hausdorff_points(&a, &b).unwrap();
        let dl = hausdorff_polylines(&a, &b).unwrap();
        assert!(dl <= dp + 1e-12);
        assert!(dl < 0.02, "chordal sag only, got {dl}");
        assert!(dl < 0.5 * dp);
    }

    #[test]
    fn rho_of_identical_orbits_is_tail_only() {
        let engine = Engine::new(FamilyKind::FiniteK(3));
        let w = random_admissible_word(FamilyKind::FiniteK(3), 17, -8, 9);
        let o = normalize(
            FamilyKind::FiniteK(3),
            &engine.trajectory_from_symbols(&w).unwrap(),
        );
        let r = rho(&o, &o, 6, 64).unwrap();
        assert_eq!(r.value, 0.0);
        // both index sides contribute `m * 2^{-n}` beyond `|i| <= 6`
        let m = invariant_set(&make_canonical(FamilyKind::FiniteK(3))).diameter();
        assert!((r.tail - m * 2f64.powi(-5)).abs() < 1e-9);
    }

    #[test]
    fn rho_shift_inequality() {
        let engine = Engine::new(FamilyKind::FiniteK(3));
        for seed in 0..4 {
            let w1 = random_admissible_word(FamilyKind::FiniteK(3), 21, -10, seed);
            let w2 = random_admissible_word(FamilyKind::FiniteK(3), 21, -10, seed + 50);
            let g1 = engine.trajectory_from_symbols(&w1).unwrap();
            let g2 = engine.trajectory_from_symbols(&w2).unwrap();
            let o1 = normalize(FamilyKind::FiniteK(3), &g1);
            let o2 = normalize(FamilyKind::FiniteK(3), &g2);
            let s1 = normalize(FamilyKind::FiniteK(3), &time_one(&g1));
            let s2 = normalize(FamilyKind::FiniteK(3), &time_one(&g2));
            let r = rho(&o1, &o2, 6, 48).unwrap();
            let rs = rho(&s1, &s2, 6, 48).unwrap();
            // the shift at most doubles the metric
            assert!(
                rs.value <= 2.0 * r.value + r.tail + 1e-9,
                "{} vs {}",
                rs.value,
                r.value
            );
        }
    }

    #[test]
    fn arc_length_map_pairs_endpoints() {
        let a: Vec<Point> = (0..=20)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / 20.0;
                Point::new(t.cos(), t.sin())
            })
            .collect();
        let b: Vec<Point> = (0..=5).map(|i| Point::new(i as f64 / 5.0, 0.0)).collect();
        let m = ArcLengthMap::new(&a, &b).unwrap();
        assert!(m.image_of_vertex(0).dist(Point::new(0.0, 0.0)) < 1e-12);
        assert!(m.image_of_vertex(20).dist(Point::new(1.0, 0.0)) < 1e-12);
        // the semicircle's quarter point maps to the segment's midpoint
        assert!(m.image_of_vertex(10).dist(Point::new(0.5, 0.0)) < 1e-9);
        // degenerate target is rejected
        let z = vec![Point::new(0.0, 0.0); 3];
        assert!(matches!(
            ArcLengthMap::new(&a, &z),
            Err(OrbitError::DegenerateCurve)
        ));
    }

    #[test]
    fn conjugacy_reports_pass() {
        for kind in [FamilyKind::FiniteK(3), FamilyKind::Infinite, FamilyKind::Bean] {
            let report = verify_conjugacy(kind, 6, 42);
            assert!(
                report.all_pass(),
                "family {}: {:?}",
                report.family,
                report
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .collect::<Vec<_>>()
            );
        }
    }
}
