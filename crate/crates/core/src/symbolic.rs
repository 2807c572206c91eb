//! Symbolic dynamics: itinerary windows, the exponentially weighted symbol
//! metric with rigorous tail bounds, subshift transition matrices derived
//! from the flow, and mixing/periodic-point counts.

use crate::canonical::{compartments, make_canonical, FamilyKind};
use crate::geom::Point;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("symbol windows use different alphabets")]
    AlphabetMismatch,
    #[error("symbol {symbol} is outside the alphabet")]
    SymbolOutOfRange { symbol: i64 },
}

/// Symbol set of a subshift: `Finite(m)` is `{0, .., m-1}`, `Integers` the
/// doubly infinite chain alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alphabet {
    Finite(usize),
    Integers,
}

impl Alphabet {
    pub fn contains(&self, s: i64) -> bool {
        match self {
            Alphabet::Finite(m) => s >= 0 && (s as usize) < *m,
            Alphabet::Integers => true,
        }
    }
}

/// A finite window of a bi-infinite symbol sequence: symbol `j` sits at
/// position `j - offset` of `symbols`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolWindow {
    pub alphabet: Alphabet,
    pub offset: i64,
    pub symbols: Vec<i64>,
}

impl SymbolWindow {
    pub fn new(alphabet: Alphabet, offset: i64, symbols: Vec<i64>) -> Result<Self, SymbolicError> {
        for &s in &symbols {
            if !alphabet.contains(s) {
                return Err(SymbolicError::SymbolOutOfRange { symbol: s });
            }
        }
        Ok(SymbolWindow {
            alphabet,
            offset,
            symbols,
        })
    }

    /// Inclusive index range covered by the window, `None` when empty.
    pub fn range(&self) -> Option<(i64, i64)> {
        if self.symbols.is_empty() {
            None
        } else {
            Some((self.offset, self.offset + self.symbols.len() as i64 - 1))
        }
    }

    pub fn get(&self, j: i64) -> Option<i64> {
        if j < self.offset {
            return None;
        }
        self.symbols.get((j - self.offset) as usize).copied()
    }

    /// The shifted window: `(sigma^steps w)_j = w_{j + steps}`.
    pub fn shift(&self, steps: i64) -> SymbolWindow {
        SymbolWindow {
            alphabet: self.alphabet,
            offset: self.offset - steps,
            symbols: self.symbols.clone(),
        }
    }
}

/// A computed metric value plus a rigorous bound on the mass the finite
/// window cannot see.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MetricBound {
    pub value: f64,
    pub tail: f64,
}

impl MetricBound {
    pub fn upper(&self) -> f64 {
        self.value + self.tail
    }
}

/// `sum_{j >= start} (a0 + slope * (j - start)) / 2^{|j|}`, exact in the
/// limit: summed term by term until the closed-form geometric remainder
/// applies.
pub(crate) fn growth_tail(start: i64, a0: f64, slope: f64) -> f64 {
    let mut total = 0.0;
    let mut a = a0;
    let mut j = start;
    while j < 1 || j < start + 4 {
        let e = j.unsigned_abs().min(1060) as i32;
        total += a * 2f64.powi(-e);
        a += slope;
        j += 1;
    }
    // remainder over j' >= j: (A + B) * 2^{1-j} with A the value at j
    total + (a + slope) * 2f64.powi(1 - j.min(1060) as i32)
}

/// The weighted symbol metric `d(x, y) = sum_j |x_j - y_j| / 2^{|j|}`
/// evaluated on the common indices, with a tail bound for the rest.
///
/// On the finite alphabet the per-symbol difference is bounded by `m - 1`;
/// on the integer alphabet it grows at most linearly (by 4 per step) away
/// from the last common index, which requires a nonempty overlap for a
/// finite bound.
pub fn metric_d(a: &SymbolWindow, b: &SymbolWindow) -> Result<MetricBound, SymbolicError> {
    if a.alphabet != b.alphabet {
        return Err(SymbolicError::AlphabetMismatch);
    }
    let common = match (a.range(), b.range()) {
        (Some((alo, ahi)), Some((blo, bhi))) => {
            let lo = alo.max(blo);
            let hi = ahi.min(bhi);
            if lo <= hi {
                Some((lo, hi))
            } else {
                None
            }
        }
        _ => None,
    };
    let Some((lo, hi)) = common else {
        return Ok(match a.alphabet {
            Alphabet::Finite(m) => MetricBound {
                value: 0.0,
                tail: 3.0 * (m - 1) as f64,
            },
            Alphabet::Integers => MetricBound {
                value: 0.0,
                tail: f64::INFINITY,
            },
        });
    };
    let mut value = 0.0;
    for j in lo..=hi {
        let diff = (a.get(j).unwrap() - b.get(j).unwrap()).abs() as f64;
        value += diff * 2f64.powi(-(j.unsigned_abs().min(1060) as i32));
    }
    let tail = match a.alphabet {
        Alphabet::Finite(m) => {
            let md = (m - 1) as f64;
            growth_tail(hi + 1, md, 0.0) + growth_tail(1 - lo, md, 0.0)
        }
        Alphabet::Integers => {
            let d_hi = (a.get(hi).unwrap() - b.get(hi).unwrap()).abs() as f64;
            let d_lo = (a.get(lo).unwrap() - b.get(lo).unwrap()).abs() as f64;
            growth_tail(hi + 1, d_hi + 4.0, 4.0) + growth_tail(1 - lo, d_lo + 4.0, 4.0)
        }
    };
    Ok(MetricBound { value, tail })
}

/// Adjacency rule of the infinite chain subshift: even symbols step up by
/// one or two, odd symbols step down by one or two.
pub fn theta_inf_admissible_pair(s: i64, next: i64) -> bool {
    if s.rem_euclid(2) == 0 {
        next == s + 1 || next == s + 2
    } else {
        next == s - 1 || next == s - 2
    }
}

/// Whether every adjacent pair of the window satisfies the chain rule.
pub fn theta_inf_admissible(w: &SymbolWindow) -> bool {
    w.alphabet == Alphabet::Integers
        && w.symbols
            .windows(2)
            .all(|p| theta_inf_admissible_pair(p[0], p[1]))
}

/// A zero-one transition matrix over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    pub n: usize,
    data: Vec<bool>,
}

impl TransitionMatrix {
    pub fn new(n: usize) -> Self {
        TransitionMatrix {
            n,
            data: vec![false; n * n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i * self.n + j] = v;
    }

    /// Whether every adjacent pair of the window is an allowed transition.
    pub fn admits(&self, w: &SymbolWindow) -> bool {
        w.symbols.iter().all(|&s| s >= 0 && (s as usize) < self.n)
            && w.symbols
                .windows(2)
                .all(|p| self.get(p[0] as usize, p[1] as usize))
    }

    fn bool_mul(&self, other: &TransitionMatrix) -> TransitionMatrix {
        let n = self.n;
        let mut out = TransitionMatrix::new(n);
        for i in 0..n {
            for k in 0..n {
                if self.get(i, k) {
                    for j in 0..n {
                        if other.get(k, j) {
                            out.set(i, j, true);
                        }
                    }
                }
            }
        }
        out
    }

    fn count_mul(a: &[Vec<u128>], b: &[Vec<u128>]) -> Vec<Vec<u128>> {
        let n = a.len();
        let mut out = vec![vec![0u128; n]; n];
        for i in 0..n {
            for k in 0..n {
                if a[i][k] != 0 {
                    for j in 0..n {
                        out[i][j] += a[i][k] * b[k][j];
                    }
                }
            }
        }
        out
    }

    fn counts(&self) -> Vec<Vec<u128>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| u128::from(self.get(i, j))).collect())
            .collect()
    }
}

/// Transition matrix of the finite chain family, read off the flow: each
/// compartment's mid-traversal point is continued one time unit through
/// every branch, and the compartment reached is recorded.
pub fn sft_matrix(k: u32) -> TransitionMatrix {
    let engine = crate::traj::Engine::new(FamilyKind::FiniteK(k));
    let parts = compartments(&engine.family, 0);
    let m = 2 * k as usize - 2;
    let mut mat = TransitionMatrix::new(m);
    for c in &parts.arcs {
        let mid = parts.midpoint(&engine.family, c.index).unwrap();
        let tree = engine.enumerate_branches(mid, 1.2, 4 * m);
        for leaf in &tree.leaves {
            if let Some(n) = parts.compartment_of(leaf.at(1.0), 1e-9) {
                mat.set(c.index as usize, n as usize, true);
            }
        }
    }
    mat
}

/// Smallest `n` with `M^n` strictly positive, searched up to the Wielandt
/// bound `(m - 1)^2 + 1`; `None` when the matrix is not primitive.
pub fn is_mixing(m: &TransitionMatrix) -> Option<usize> {
    if m.n == 0 {
        return None;
    }
    let bound = (m.n - 1) * (m.n - 1) + 1;
    let mut power = m.clone();
    for n in 1..=bound {
        if power.data.iter().all(|&b| b) {
            return Some(n);
        }
        power = power.bool_mul(m);
    }
    None
}

/// Number of admissible period-`n` words, `trace(M^n)`.
pub fn periodic_count(m: &TransitionMatrix, n: u32) -> u128 {
    assert!(n >= 1);
    let base = m.counts();
    let mut acc = base.clone();
    for _ in 1..n {
        acc = TransitionMatrix::count_mul(&acc, &base);
    }
    (0..m.n).map(|i| acc[i][i]).sum()
}

/// A uniformly random admissible word of the chain subshift, deterministic
/// in `seed`. Successors are read from the geometric fold adjacency.
pub fn random_admissible_word(
    kind: FamilyKind,
    len: usize,
    offset: i64,
    seed: u64,
) -> SymbolWindow {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        FamilyKind::FiniteK(k) => {
            let fam = make_canonical(kind);
            let parts = compartments(&fam, 0);
            let m = 2 * k as i64 - 2;
            let mut symbols = Vec::with_capacity(len);
            let mut s = rng.gen_range(0..m);
            for _ in 0..len {
                symbols.push(s);
                let end = parts.by_index(s).unwrap().end_fold;
                let nexts: Vec<i64> = parts
                    .arcs
                    .iter()
                    .filter(|c| (c.start_fold - end).abs() < 1e-9)
                    .map(|c| c.index)
                    .collect();
                s = nexts[rng.gen_range(0..nexts.len())];
            }
            SymbolWindow {
                alphabet: Alphabet::Finite(m as usize),
                offset,
                symbols,
            }
        }
        FamilyKind::Infinite => {
            let mut symbols = Vec::with_capacity(len);
            let mut s = rng.gen_range(-4..=4i64);
            for _ in 0..len {
                symbols.push(s);
                let step: i64 = if rng.gen_bool(0.5) { 1 } else { 2 };
                s = if s.rem_euclid(2) == 0 { s + step } else { s - step };
            }
            SymbolWindow {
                alphabet: Alphabet::Integers,
                offset,
                symbols,
            }
        }
        FamilyKind::Bean => panic!("the bean field has no symbolic alphabet"),
    }
}

/// The point `gamma(j)` can sit on the invariant set in two ways; helper for
/// tests comparing symbolic and geometric data.
pub fn on_curve(kind: FamilyKind, p: Point, tol: f64) -> bool {
    let fam = make_canonical(kind);
    crate::canonical::invariant_set(&fam).contains(p, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(offset: i64, symbols: &[i64]) -> SymbolWindow {
        SymbolWindow::new(Alphabet::Finite(4), offset, symbols.to_vec()).unwrap()
    }

    #[test]
    fn shift_moves_indices() {
        let a = w(0, &[0, 1, 2, 3]);
        let s = a.shift(2);
        assert_eq!(s.get(-2), Some(0));
        assert_eq!(s.get(1), Some(3));
        assert_eq!(s.get(2), None);
    }

    #[test]
    fn growth_tail_matches_brute_force() {
        for (start, a0, slope) in [(3i64, 1.5, 4.0), (-2, 0.0, 4.0), (1, 3.0, 0.0), (5, 2.0, 0.0)]
        {
            let mut brute = 0.0;
            for i in 0..2000i64 {
                let j = start + i;
                brute += (a0 + slope * i as f64) * 2f64.powi(-(j.unsigned_abs() as i32));
            }
            let got = growth_tail(start, a0, slope);
            assert!(
                (got - brute).abs() < 1e-12,
                "start={start}: {got} vs {brute}"
            );
        }
    }

    #[test]
    fn metric_of_identical_windows_is_tail_only() {
        let a = w(-3, &[0, 1, 3, 2, 0, 1, 2]);
        let d = metric_d(&a, &a).unwrap();
        assert_eq!(d.value, 0.0);
        // symmetric window [-3, 3]: tail = (m-1) * 2 * 2^{-3}
        assert!((d.tail - 3.0 * 2.0 * 0.125).abs() < 1e-12);
    }

    #[test]
    fn metric_weights_decay_from_zero() {
        let a = w(0, &[0, 0, 0]);
        let b = w(0, &[1, 0, 2]);
        let d = metric_d(&a, &b).unwrap();
        assert!((d.value - (1.0 + 2.0 / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn integer_metric_needs_overlap() {
        let a = SymbolWindow::new(Alphabet::Integers, 0, vec![0, 1]).unwrap();
        let b = SymbolWindow::new(Alphabet::Integers, 5, vec![0, 1]).unwrap();
        assert!(metric_d(&a, &b).unwrap().tail.is_infinite());
        let c = SymbolWindow::new(Alphabet::Integers, 1, vec![2, 0]).unwrap();
        let d = metric_d(&a, &c).unwrap();
        assert!(d.tail.is_finite());
        assert!((d.value - 1.0 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn chain_rule_matches_parity() {
        assert!(theta_inf_admissible_pair(0, 2));
        assert!(theta_inf_admissible_pair(0, 1));
        assert!(!theta_inf_admissible_pair(0, -1));
        assert!(theta_inf_admissible_pair(3, 1));
        assert!(theta_inf_admissible_pair(-1, -3));
        assert!(!theta_inf_admissible_pair(1, 2));
        let good = SymbolWindow::new(Alphabet::Integers, 0, vec![0, 2, 3, 1, 0, 1]).unwrap();
        assert!(theta_inf_admissible(&good));
        let bad = SymbolWindow::new(Alphabet::Integers, 0, vec![0, 3]).unwrap();
        assert!(!theta_inf_admissible(&bad));
    }

    #[test]
    fn k3_matrix_from_flow_matches_fold_adjacency() {
        let m = sft_matrix(3);
        let expected = [
            [true, true, false, false],
            [false, false, true, true],
            [true, true, false, false],
            [false, false, true, true],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.get(i, j), expected[i][j], "entry ({i}, {j})");
            }
        }
        assert_eq!(is_mixing(&m), Some(2));
        assert_eq!(periodic_count(&m, 1), 2);
        assert_eq!(periodic_count(&m, 2), 4);
    }

    #[test]
    fn k2_matrix_is_full() {
        let m = sft_matrix(2);
        assert!((0..2).all(|i| (0..2).all(|j| m.get(i, j))));
        assert_eq!(is_mixing(&m), Some(1));
        assert_eq!(periodic_count(&m, 3), 8);
    }

    #[test]
    fn random_words_are_admissible() {
        for seed in 0..8 {
            let w = random_admissible_word(FamilyKind::FiniteK(4), 24, -12, seed);
            let m = sft_matrix(4);
            assert!(m.admits(&w));
            let wi = random_admissible_word(FamilyKind::Infinite, 24, -12, seed);
            assert!(theta_inf_admissible(&wi));
        }
    }
}
