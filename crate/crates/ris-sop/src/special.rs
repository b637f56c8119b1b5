//! Gaussian tail functions, scaled products and combinatorics.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use crate::error::{domain, Result};

/// Weights and decay rates of the three-exponential Q approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QApproxWeights {
    pub w: [f64; 3],
    pub p: [f64; 3],
}

pub const Q_APPROX: QApproxWeights = QApproxWeights { w: [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0], p: [1.0, 4.0, 4.0 / 3.0] };

/// Gaussian tail probability Q(x).
pub fn q_exact(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Three-exponential approximation of Q(x) for x ≥ 0.
///
/// # Panics
/// Panics when `x` is negative; use [`q_approx3_signed`] for the full line.
pub fn q_approx3(x: f64) -> f64 {
    assert!(x >= 0.0, "q_approx3 needs x >= 0, got {x}");
    let h = 0.5 * x * x;
    let QApproxWeights { w, p } = Q_APPROX;
    0.5 * (w[0] * (-p[0] * h).exp() + w[1] * (-p[1] * h).exp() + w[2] * (-p[2] * h).exp())
}

/// Three-exponential approximation extended to x < 0 by the complement.
pub fn q_approx3_signed(x: f64) -> f64 {
    if x >= 0.0 {
        q_approx3(x)
    } else {
        1.0 - q_approx3(-x)
    }
}

/// Split `x` into a 26-bit head and a tail so that head² is exact.
fn split(x: f64) -> (f64, f64) {
    let c = 134_217_729.0 * x;
    let hi = c - (c - x);
    (hi, x - hi)
}

/// exp(x²) with the rounding of x² itself removed.
fn exp_square(x: f64) -> f64 {
    let (hi, lo) = split(x);
    (hi * hi).exp() * (lo * (2.0 * hi + lo)).exp()
}

/// Scaled complementary error function exp(x²)·erfc(x).
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        if x < -26.7 {
            return f64::INFINITY;
        }
        return 2.0 * exp_square(x) - erfcx(-x);
    }
    if x < 26.0 {
        return exp_square(x) * libm::erfc(x);
    }
    erfcx_asymptotic(x)
}

fn erfcx_asymptotic(x: f64) -> f64 {
    let t = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..8 {
        term *= -(2.0 * f64::from(n) - 1.0) * t;
        sum += term;
    }
    sum / (x * PI.sqrt())
}

/// ln(exp(x²)·erfc(x)), finite for every finite x.
pub fn ln_erfcx(x: f64) -> f64 {
    if x < 0.0 {
        x * x + libm::erfc(x).ln()
    } else {
        erfcx(x).ln()
    }
}

/// Value of exp(a)·Q(b) together with its logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpQ {
    pub value: f64,
    pub ln_value: f64,
    /// Set when the true product exceeds the largest finite double.
    pub overflow: bool,
}

impl ExpQ {
    fn from_ln(ln_value: f64) -> Self {
        let overflow = ln_value > f64::MAX.ln();
        let value = if overflow { f64::INFINITY } else { ln_value.exp() };
        Self { value, ln_value, overflow }
    }
}

/// exp(a)·Q(b) evaluated in log space.
pub fn exp_times_q(a: f64, b: f64) -> ExpQ {
    if b <= 0.0 {
        ExpQ::from_ln(a + q_exact(b).ln())
    } else {
        exp_times_q_reduced(a - 0.5 * b * b, b)
    }
}

/// exp(c + b²/2)·Q(b), for callers that already hold the reduced exponent
/// c = a − b²/2 in cancellation-free form.
pub fn exp_times_q_reduced(c: f64, b: f64) -> ExpQ {
    ExpQ::from_ln(c - LN_2 + ln_erfcx(b * FRAC_1_SQRT_2))
}

/// Binomial coefficient in 128-bit integer arithmetic.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * u128::from(n - i) / u128::from(i + 1);
    }
    r
}

pub fn binomial_f64(n: u32, k: u32) -> f64 {
    binomial(n, k) as f64
}

/// One term of the multinomial expansion of the three-exponential Q^m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultinomialVector {
    pub k: [u32; 3],
    pub coefficient: u128,
    /// Σ k_i·p_i.
    pub decay_sum: f64,
}

impl MultinomialVector {
    /// σ_U/sqrt(Σ k_i p_i).
    pub fn sigma_k(&self, sigma_u: f64) -> f64 {
        sigma_u / self.decay_sum.sqrt()
    }

    /// Coefficient of exp(−Σk_i p_i z²/2) in Q̃(z)^m, i.e. m!/k!·Π(w_i/2)^{k_i}.
    pub fn weight(&self) -> f64 {
        let w = Q_APPROX.w;
        let m = self.k.iter().sum::<u32>();
        let mut v = self.coefficient as f64;
        for (wi, &ki) in w.iter().zip(&self.k) {
            v *= wi.powi(ki as i32);
        }
        v * 0.5f64.powi(m as i32)
    }
}

/// All k with k1 + k2 + k3 = m.
pub fn enumerate_multinomial(m: u32) -> Result<Vec<MultinomialVector>> {
    if !(1..=64).contains(&m) {
        return Err(domain(format!("multinomial order must be in 1..=64, got {m}")));
    }
    let p = Q_APPROX.p;
    let mut out = Vec::with_capacity(((m + 1) * (m + 2) / 2) as usize);
    for k1 in (0..=m).rev() {
        for k2 in (0..=m - k1).rev() {
            let k3 = m - k1 - k2;
            out.push(MultinomialVector {
                k: [k1, k2, k3],
                coefficient: binomial(m, k1) * binomial(m - k1, k2),
                decay_sum: f64::from(k1) * p[0] + f64::from(k2) * p[1] + f64::from(k3) * p[2],
            });
        }
    }
    Ok(out)
}

/// Σ_{j=m}^{M} (−1)^{m+j}·C(M,j)·C(j,m); the Kronecker delta δ_{mM}.
pub fn collapse_identity_check(big_m: u32, m: u32) -> i128 {
    (m..=big_m)
        .map(|j| {
            let t = (binomial(big_m, j) * binomial(j, m)) as i128;
            if (m + j).is_multiple_of(2) {
                t
            } else {
                -t
            }
        })
        .sum()
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Σ|x|, a scale for the rounding error of alternating sums.
    pub fn abs_sum(&self) -> f64 {
        self.abs
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}
