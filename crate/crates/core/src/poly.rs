//! The polynomial family behind the finite canonical fields.
//!
//! `Pk` keeps the factored form, so values and derivatives vanish exactly
//! (in floating point) at the roots; all roots are half-integers, hence the
//! expanded coefficients are dyadic rationals and exact in `f64`.

/// `P_k(x) = -(x - r0)(x - r1) * prod_{i=1..k-1} (x - p_i)^2`
/// with `r0 = (1-k)/2`, `r1 = (k-1)/2` and `p_i = i - k/2`.
#[derive(Debug, Clone)]
pub struct Pk {
    k: u32,
    r0: f64,
    r1: f64,
    doubles: Vec<f64>,
}

impl Pk {
    /// Requires `k >= 2`.
    pub fn new(k: u32) -> Self {
        assert!(k >= 2, "Pk is defined for k >= 2");
        let kf = k as f64;
        let doubles = (1..k).map(|i| i as f64 - kf / 2.0).collect();
        Pk {
            k,
            r0: (1.0 - kf) / 2.0,
            r1: (kf - 1.0) / 2.0,
            doubles,
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Simple root at the left end of the invariant set.
    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Simple root at the right end.
    pub fn r1(&self) -> f64 {
        self.r1
    }

    /// Abscissas of the double roots, `p_1 < ... < p_{k-1}`, spaced by 1.
    pub fn fold_abscissas(&self) -> &[f64] {
        &self.doubles
    }

    fn g(&self, x: f64) -> f64 {
        (x - self.r0) * (x - self.r1)
    }

    /// `prod_{l != skip} (x - p_l)^2`, with `skip` as indices into `doubles`.
    fn h_partial(&self, x: f64, skip: &[usize]) -> f64 {
        let mut acc = 1.0;
        for (l, &p) in self.doubles.iter().enumerate() {
            if !skip.contains(&l) {
                let d = x - p;
                acc *= d * d;
            }
        }
        acc
    }

    fn h(&self, x: f64) -> f64 {
        self.h_partial(x, &[])
    }

    fn h1(&self, x: f64) -> f64 {
        (0..self.doubles.len())
            .map(|i| 2.0 * (x - self.doubles[i]) * self.h_partial(x, &[i]))
            .sum()
    }

    fn h2(&self, x: f64) -> f64 {
        let n = self.doubles.len();
        let mut acc = 0.0;
        for i in 0..n {
            acc += 2.0 * self.h_partial(x, &[i]);
            for m in 0..n {
                if m != i {
                    acc += 4.0
                        * (x - self.doubles[i])
                        * (x - self.doubles[m])
                        * self.h_partial(x, &[i, m]);
                }
            }
        }
        acc
    }

    pub fn value(&self, x: f64) -> f64 {
        -self.g(x) * self.h(x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        // g' = 2x because r0 = -r1
        -(2.0 * x * self.h(x) + self.g(x) * self.h1(x))
    }

    pub fn d2(&self, x: f64) -> f64 {
        -(2.0 * self.h(x) + 2.0 * 2.0 * x * self.h1(x) + self.g(x) * self.h2(x))
    }

    /// Value of `P_k`, `P_k'` or `P_k''`.
    pub fn eval(&self, x: f64, derivative_order: u8) -> f64 {
        match derivative_order {
            0 => self.value(x),
            1 => self.d1(x),
            2 => self.d2(x),
            _ => panic!("derivative order must be 0, 1 or 2"),
        }
    }

    /// Expanded coefficients of `P_k`, ascending by degree (length `2k + 1`).
    pub fn coefficients(&self) -> Vec<f64> {
        let mut coeffs = vec![1.0];
        let mut roots = vec![self.r0, self.r1];
        for &p in &self.doubles {
            roots.push(p);
            roots.push(p);
        }
        for r in roots {
            // multiply by (x - r)
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] += -r * c;
            }
            coeffs = next;
        }
        for c in &mut coeffs {
            *c = -*c;
        }
        coeffs
    }
}

/// Coefficients of the derivative of an ascending coefficient vector.
pub fn differentiate(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}
