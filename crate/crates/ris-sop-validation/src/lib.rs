//! Reference computations for the acceptance suite, written independently of
//! the evaluators they check: a separate Gauss-Legendre integrator, the Q
//! approximation retyped from its definition, and a KS statistic.

const GL_X: [f64; 10] = [
    0.07652652113349734,
    0.2277858511416451,
    0.37370608871541955,
    0.5108670019508271,
    0.636053680726515,
    0.7463319064601508,
    0.8391169718222188,
    0.9122344282513258,
    0.9639719272779138,
    0.9931285991850949,
];
const GL_W: [f64; 10] = [
    0.15275338713072578,
    0.14917298647260366,
    0.14209610931838187,
    0.13168863844917653,
    0.11819453196151825,
    0.10193011981724026,
    0.08327674157670467,
    0.06267204833410944,
    0.04060142980038622,
    0.017614007139153273,
];

/// 20-point Gauss-Legendre rule on [a, b].
pub fn gl20(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let s: f64 = GL_X.iter().zip(GL_W).map(|(x, w)| w * (f(c - h * x) + f(c + h * x))).sum();
    h * s
}

fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (gl20(f, a, m), gl20(f, m, b));
    if depth == 0 || (l + r - whole).abs() <= tol {
        l + r
    } else {
        adapt(f, a, m, l, 0.5 * tol, depth - 1) + adapt(f, m, b, r, 0.5 * tol, depth - 1)
    }
}

/// Integral over consecutive panels `points[i]..points[i+1]` to relative accuracy `rel`.
pub fn integrate(f: &dyn Fn(f64) -> f64, points: &[f64], rel: f64) -> f64 {
    let panels: Vec<(f64, f64, f64)> =
        points.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1], gl20(f, w[0], w[1]))).collect();
    let scale: f64 = panels.iter().map(|p| p.2.abs()).sum();
    if scale == 0.0 {
        return 0.0;
    }
    let tol = rel * scale / panels.len() as f64;
    panels.iter().map(|&(a, b, whole)| adapt(f, a, b, whole, tol, 60)).sum()
}

/// Q(x) from the complementary error function.
pub fn q_exact(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// exp(−x²/2)/12 + exp(−2x²)/6 + exp(−2x²/3)/6, applied to |x|.
pub fn q_tilde(x: f64) -> f64 {
    let x2 = x * x;
    (-0.5 * x2).exp() / 12.0 + (-2.0 * x2).exp() / 6.0 + (-2.0 * x2 / 3.0).exp() / 6.0
}

/// Inputs of the per-(m, l) term integrals.
#[derive(Debug, Clone, Copy)]
pub struct TermOracle {
    pub gbar_u: f64,
    pub rho: f64,
    pub mu: f64,
    pub sigma: f64,
    /// Mean of the exponential density, λ_E/l.
    pub lambda: f64,
}

impl TermOracle {
    /// Integrals run over u = sqrt((ρx + ρ − 1)/Γ̄_U), where the Q argument is (u − μ)/σ.
    fn x_of(&self, u: f64) -> f64 {
        (self.gbar_u * u * u - (self.rho - 1.0)) / self.rho
    }

    fn u_of(&self, x: f64) -> f64 {
        ((self.rho * x + self.rho - 1.0) / self.gbar_u).sqrt()
    }

    fn weight(&self, u: f64) -> f64 {
        let x = self.x_of(u).max(0.0);
        (-x / self.lambda).exp() / self.lambda * 2.0 * self.gbar_u * u / self.rho
    }

    fn points(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts = vec![lo, hi];
        let step = self.sigma / 2.0;
        let mut u = lo + step;
        while u < hi && pts.len() < 4000 {
            pts.push(u);
            u += step;
        }
        let x0 = self.x_of(lo).max(0.0);
        for k in [0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 30.0, 100.0] {
            let u = self.u_of(x0 + k * self.lambda);
            if u > lo && u < hi {
                pts.push(u);
            }
        }
        for z in [-3.0, -1.0, 0.0, 1.0, 3.0] {
            let u = self.mu + z * self.sigma;
            if u > lo && u < hi {
                pts.push(u);
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn u0(&self) -> f64 {
        self.u_of(0.0)
    }

    fn top(&self) -> f64 {
        self.u0().max(self.mu) + 60.0 * self.sigma
    }

    /// ∫_0^∞ Q̃(z)^m f(x) dx.
    pub fn j_plus(&self, m: u32) -> f64 {
        let f = |u: f64| q_tilde((u - self.mu) / self.sigma).powi(m as i32) * self.weight(u);
        integrate(&f, &self.points(self.u0(), self.top()), 1e-12)
    }

    /// ∫_{x_c}^∞ Q̃(z)^m f(x) dx, x_c being where z = 0.
    pub fn i_plus(&self, m: u32) -> f64 {
        let f = |u: f64| q_tilde((u - self.mu) / self.sigma).powi(m as i32) * self.weight(u);
        integrate(&f, &self.points(self.mu, self.top()), 1e-12)
    }

    /// ∫_0^{x_c} (1 − Q̃(−z))^m f(x) dx.
    pub fn i_minus(&self, m: u32) -> f64 {
        let f = |u: f64| (1.0 - q_tilde((self.mu - u) / self.sigma)).powi(m as i32) * self.weight(u);
        integrate(&f, &self.points(self.u0(), self.mu), 1e-12)
    }
}

/// Kolmogorov-Smirnov sup distance between samples and a CDF.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Relative difference |a − b|/|b|, zero when both vanish.
pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}
