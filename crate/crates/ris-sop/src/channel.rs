//! CLT statistics of the aligned cascaded channel and the SNR distributions
//! built on them.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::special::{binomial_f64, q_approx3_signed, q_exact, CompensatedSum};

/// Element count below which the Gaussian approximation is flagged.
pub const CLT_MIN_ELEMENTS: u32 = 16;

/// Non-fatal modelling caveats attached to results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelWarning {
    /// N is too small for the Gaussian approximation to be trusted.
    SmallElementCount { n: u32 },
}

/// Gaussian approximation of Y_U = η Σ_n |h_RU||h_SR|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltParams {
    pub mu_u: f64,
    pub sigma_u: f64,
    /// 1/Q(−μ_U/σ_U), renormalizing the truncation at zero.
    pub xi: f64,
    pub n: u32,
}

impl CltParams {
    pub fn warning(&self) -> Option<ModelWarning> {
        (self.n < CLT_MIN_ELEMENTS).then_some(ModelWarning::SmallElementCount { n: self.n })
    }
}

pub fn clt_params(n: u32, eta: f64) -> Result<CltParams> {
    if n == 0 {
        return Err(domain("N must be at least 1"));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(domain(format!("eta must lie in (0, 1], got {eta}")));
    }
    let nf = f64::from(n);
    let mu_u = eta * nf * PI / 4.0;
    let sigma_u = eta * (nf * (16.0 - PI * PI) / 16.0).sqrt();
    Ok(CltParams { mu_u, sigma_u, xi: 1.0 / q_exact(-mu_u / sigma_u), n })
}

/// Which Q function is used inside the user CDF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QModel {
    Exact,
    ThreeExp,
}

impl QModel {
    pub fn q(self, x: f64) -> f64 {
        match self {
            QModel::Exact => q_exact(x),
            QModel::ThreeExp => q_approx3_signed(x),
        }
    }
}

/// Standardized argument (sqrt(x/Γ̄_U) − μ_U)/σ_U of the user CDF.
pub fn user_snr_z(x: f64, gbar_u: f64, clt: &CltParams) -> f64 {
    ((x / gbar_u).sqrt() - clt.mu_u) / clt.sigma_u
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("SNR argument must be non-negative, got {x}")))
    }
}

/// CDF of one user's aligned SNR.
pub fn user_snr_cdf(x: f64, gbar_u: f64, clt: &CltParams) -> Result<f64> {
    check_x(x)?;
    Ok(user_snr_cdf_with(x, gbar_u, clt, QModel::Exact))
}

pub(crate) fn user_snr_cdf_with(x: f64, gbar_u: f64, clt: &CltParams, q: QModel) -> f64 {
    (1.0 - clt.xi * q.q(user_snr_z(x, gbar_u, clt))).max(0.0)
}

/// CDF of the best of M users, power form.
pub fn best_user_cdf(x: f64, gbar_u: f64, clt: &CltParams, m: u32) -> Result<f64> {
    check_x(x)?;
    if m == 0 {
        return Err(domain("M must be at least 1"));
    }
    Ok(user_snr_cdf_with(x, gbar_u, clt, QModel::Exact).powi(m as i32))
}

/// CDF of the best of M users, alternating binomial form.
pub fn best_user_cdf_expanded(x: f64, gbar_u: f64, clt: &CltParams, m: u32) -> Result<f64> {
    check_x(x)?;
    let xq = clt.xi * q_exact(user_snr_z(x, gbar_u, clt));
    let s: CompensatedSum = (1..=m)
        .map(|j| {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            sign * binomial_f64(m, j) * xq.powi(j as i32)
        })
        .collect();
    Ok(1.0 - s.value())
}

/// CDF of the best of K·M antenna-user pairs.
pub fn best_pair_cdf(x: f64, gbar_u: f64, clt: &CltParams, k: u32, m: u32) -> Result<f64> {
    if k == 0 {
        return Err(domain("K must be at least 1"));
    }
    best_user_cdf(x, gbar_u, clt, k * m)
}

/// Distribution of the largest of L i.i.d. exponential eavesdropper SNRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveMixture {
    pub l: u32,
    pub lambda_e: f64,
}

impl EveMixture {
    pub fn new(l: u32, lambda_e: f64) -> Result<Self> {
        if l == 0 {
            return Err(domain("L must be at least 1"));
        }
        if !(lambda_e > 0.0 && lambda_e.is_finite()) {
            return Err(domain(format!("lambda_E must be positive, got {lambda_e}")));
        }
        Ok(Self { l, lambda_e })
    }

    /// (weight (−1)^{l+1}C(L,l), mean λ_E/l) for l = 1..L.
    pub fn terms(&self) -> Vec<(f64, f64)> {
        (1..=self.l)
            .map(|j| {
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                (sign * binomial_f64(self.l, j), self.lambda_e / f64::from(j))
            })
            .collect()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        (-(-x / self.lambda_e).exp_m1()).powi(self.l as i32)
    }

    pub fn cdf_expanded(&self, x: f64) -> f64 {
        let s: CompensatedSum = self.terms().iter().map(|(w, r)| w * (-x / r).exp()).collect();
        1.0 - s.value()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let lf = f64::from(self.l);
        let e = (-x / self.lambda_e).exp();
        let base = -(-x / self.lambda_e).exp_m1();
        let tail = if self.l == 1 { 1.0 } else { base.powi(self.l as i32 - 1) };
        lf / self.lambda_e * e * tail
    }

    pub fn pdf_expanded(&self, x: f64) -> f64 {
        let s: CompensatedSum = self.terms().iter().map(|(w, r)| w / r * (-x / r).exp()).collect();
        s.value()
    }

    /// Upper truncation point for integrals against this density.
    pub fn truncation(&self) -> f64 {
        self.lambda_e * (50.0 + 10.0 * f64::from(self.l.max(2)).ln())
    }

    /// P[max > x] bounded by the union bound L·exp(−x/λ_E).
    pub fn tail_bound(&self, x: f64) -> f64 {
        f64::from(self.l) * (-x / self.lambda_e).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clt_reference_values() {
        let c = clt_params(1024, 1.0).unwrap();
        assert!((c.mu_u - 256.0 * PI).abs() < 1e-12);
        assert!((c.sigma_u - 19.807_708_558).abs() < 1e-8);
        assert_eq!(c.xi, 1.0);
        assert!(c.warning().is_none());
        let small = clt_params(4, 1.0).unwrap();
        assert!(small.xi > 1.0 && small.xi <= 2.0);
        assert!(small.warning().is_some());
        assert!(clt_params(0, 1.0).is_err());
    }

    #[test]
    fn user_cdf_landmarks() {
        let c = clt_params(64, 0.8).unwrap();
        let g = 3e-4;
        assert!(user_snr_cdf(0.0, g, &c).unwrap().abs() < 1e-15);
        let mid = user_snr_cdf(g * c.mu_u * c.mu_u, g, &c).unwrap();
        assert!((mid - (1.0 - c.xi / 2.0)).abs() < 1e-15);
        assert!(user_snr_cdf(-1.0, g, &c).is_err());
    }

    #[test]
    fn best_user_forms_agree() {
        let c = clt_params(512, 1.0).unwrap();
        let g = 1e-4;
        for &x in &[5.0, 14.0, 16.0, 17.0, 20.0] {
            let a = best_user_cdf(x, g, &c, 10).unwrap();
            let b = best_user_cdf_expanded(x, g, &c, 10).unwrap();
            assert!((a - b).abs() <= 1e-9 * a + 1e-13, "{x}: {a} {b}");
        }
        assert_eq!(best_pair_cdf(15.0, g, &c, 2, 5).unwrap(), best_user_cdf(15.0, g, &c, 10).unwrap());
    }

    #[test]
    fn eve_forms_agree() {
        let mix = EveMixture::new(10, 2.5).unwrap();
        let x = 2.5;
        assert!((mix.cdf(x) - mix.cdf_expanded(x)).abs() < 1e-10);
        assert!((mix.pdf(x) - mix.pdf_expanded(x)).abs() < 1e-10);
        assert_eq!(mix.pdf(0.0), 0.0);
        let one = EveMixture::new(1, 2.0).unwrap();
        assert_eq!(one.pdf(0.0), 0.5);
        assert!((one.cdf(1.0) - (1.0 - (-0.5f64).exp())).abs() < 1e-16);
    }
}
