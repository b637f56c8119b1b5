//! Globally adaptive Gauss-Kronrod (7/15) integration on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Result, SopError};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

/// Convergence settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-8, max_intervals: 4000 }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Integrates `f` over `[a, b]`, splitting first at the interior `breaks`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(domain(format!("invalid integration range [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, intervals: 0 });
    }
    let mut points: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|x| x.is_finite() && *x > a && *x < b))
        .chain(std::iter::once(b))
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut heap = BinaryHeap::new();
    let mut done_value = 0.0;
    let mut done_error = 0.0;
    for w in points.windows(2) {
        let (value, error) = gk15(&f, w[0], w[1]);
        heap.push(Segment { a: w[0], b: w[1], value, error });
    }
    let mut count = heap.len();
    loop {
        let total: f64 = done_value + heap.iter().map(|s| s.value).sum::<f64>();
        let error: f64 = done_error + heap.iter().map(|s| s.error).sum::<f64>();
        if !total.is_finite() || !error.is_finite() {
            return Err(SopError::Quadrature { estimate: total, achieved: error });
        }
        if error <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(QuadResult { value: total, abs_error: error, intervals: count });
        }
        let Some(worst) = heap.pop() else {
            return Ok(QuadResult { value: total, abs_error: error, intervals: count });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) <= 1e-14 * worst.a.abs().max(worst.b.abs()) {
            done_value += worst.value;
            done_error += worst.error;
            if heap.is_empty() {
                return Err(SopError::Quadrature { estimate: total, achieved: error });
            }
            continue;
        }
        if count >= opts.max_intervals {
            return Err(SopError::Quadrature { estimate: total, achieved: error });
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        count += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> QuadOptions {
        QuadOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 2000 }
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(7) - 3.0 * x * x, -1.0, 2.0, &[], opts()).unwrap();
        let exact = (256.0 - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn sharp_peak_with_breakpoint() {
        let w = 1e-3;
        let f = |x: f64| (-(x - 0.3) * (x - 0.3) / (2.0 * w * w)).exp();
        let r = integrate(f, 0.0, 1.0, &[0.3], opts()).unwrap();
        let exact = w * (2.0 * std::f64::consts::PI).sqrt();
        assert!((r.value / exact - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exponential_tail() {
        let r = integrate(|x| (-x).exp(), 0.0, 60.0, &[], opts()).unwrap();
        assert!((r.value - (1.0 - (-60f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn reports_failure() {
        let tight = QuadOptions { abs_tol: 0.0, rel_tol: 0.0, max_intervals: 5 };
        assert!(integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, &[], tight).is_err());
        assert!(integrate(|x| x, 1.0, 0.0, &[], tight).is_err());
    }
}
