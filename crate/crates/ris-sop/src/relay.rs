//! Decode-and-forward relay baseline and the RIS-versus-relay crossover.
//!
//! The relay takes the RIS position. In the first slot the source transmits
//! with power 2αP, in the second the relay forwards with 2(1−α)P. The
//! scheduled user is the one with the strongest relay-user channel. With a
//! direct link the user combines both slots (MRC).

use crate::analytic::{sop_closed, sop_os, SopQuery};
use crate::channel::EveMixture;
use crate::error::{domain, Result, SopError};
use crate::model::{derive_geometry, direct_path_loss, Scenario};
use crate::quadrature::{integrate, QuadOptions};
use crate::scheme::{Method, Scheme};
use crate::special::{binomial_f64, CompensatedSum};

/// Mean SNRs of the relay links at one transmit SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayBudget {
    pub gamma0: f64,
    pub lambda_su: f64,
    pub lambda_sr: f64,
    /// Mean of one relay-user link; the best-of-m term uses λ_RU/m.
    pub lambda_ru: f64,
    /// Mean of one relay-eavesdropper link.
    pub lambda_e: f64,
    pub rho: f64,
}

impl RelayBudget {
    pub fn new(s: &Scenario, p_over_n0: f64) -> Result<Self> {
        if !(p_over_n0.is_finite() && p_over_n0 > 0.0) {
            return Err(domain(format!("P/N0 must be positive, got {p_over_n0}")));
        }
        let g = derive_geometry(s)?;
        let wl = s.wavelength();
        let z = |d: f64| direct_path_loss(wl, d, s.upsilon);
        let a = s.alpha;
        Ok(Self {
            gamma0: p_over_n0,
            lambda_su: 2.0 * a * p_over_n0 * z(g.d_su)?,
            lambda_sr: 2.0 * a * p_over_n0 * z(g.d_sr)?,
            lambda_ru: 2.0 * (1.0 - a) * p_over_n0 * z(g.d_ru)?,
            lambda_e: 2.0 * (1.0 - a) * p_over_n0 * z(g.d_re)?,
            rho: s.rho_relay(),
        })
    }

    fn rate_sr_ru(&self, m: u32) -> f64 {
        1.0 / self.lambda_sr + f64::from(m) / self.lambda_ru
    }
}

fn sign(n: u32) -> f64 {
    if n % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// (e^{−at} − e^{−bt})/(b − a), factored on the slower rate so neither
/// exponential overflows; its limit at a = b is t·e^{−at}.
fn exp_difference(t: f64, a: f64, b: f64) -> f64 {
    let (lo, d) = (a.min(b), (a - b).abs());
    if d == 0.0 {
        t * (-a * t).exp()
    } else {
        (-lo * t).exp() * -(-d * t).exp_m1() / d
    }
}

/// CDF of the scheduled user's end-to-end SNR.
pub fn relay_user_cdf(x: f64, rb: &RelayBudget, m_users: u32, with_direct: bool) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain(format!("SNR argument must be non-negative, got {x}")));
    }
    if m_users == 0 {
        return Err(domain("M must be at least 1"));
    }
    let b = 1.0 / rb.lambda_su;
    let mut s = CompensatedSum::new();
    for m in 1..=m_users {
        let cm = sign(m) * binomial_f64(m_users, m);
        let a = rb.rate_sr_ru(m);
        if with_direct {
            // (e^{-ax} − e^{-bx})/D_m with D_m = λ_SU(b − a), free of the a = b pole.
            let v = exp_difference(x, a, b) / rb.lambda_su;
            s.add(cm * v);
        } else {
            s.add(cm * (-a * x).exp());
        }
    }
    let f = if with_direct { -(-b * x).exp_m1() - s.value() } else { 1.0 - s.value() };
    Ok(f.clamp(0.0, 1.0))
}

/// ∫ e^{−r(ρx+ρ−1)} f̂_l(x) dx for an exponential density of mean `lam`.
fn g_term(r: f64, rho: f64, lam: f64) -> f64 {
    (-r * (rho - 1.0)).exp() / (lam * r * rho + 1.0)
}

/// (g(a) − g(b))/(a − b) evaluated without cancellation.
fn g_divided_difference(a: f64, b: f64, rho: f64, lam: f64) -> f64 {
    let ha = lam * rho * a + 1.0;
    let hb = lam * rho * b + 1.0;
    let ea = (-a * (rho - 1.0)).exp();
    -ea * lam * rho / (ha * hb) - exp_difference(rho - 1.0, a, b) / hb
}

/// Closed-form SOP of the relay baseline.
pub fn sop_relay(rb: &RelayBudget, m_users: u32, l_eves: u32, with_direct: bool) -> Result<f64> {
    if m_users == 0 || l_eves == 0 {
        return Err(domain("M and L must be at least 1"));
    }
    let rho = rb.rho;
    let b = 1.0 / rb.lambda_su;
    let mut outer = CompensatedSum::new();
    for l in 1..=l_eves {
        let dl = sign(l) * binomial_f64(l_eves, l);
        let lam = rb.lambda_e / f64::from(l);
        let mut inner = CompensatedSum::new();
        for m in 1..=m_users {
            let cm = sign(m) * binomial_f64(m_users, m);
            let a = rb.rate_sr_ru(m);
            let v = if with_direct {
                g_term(b, rho, lam) - g_divided_difference(a, b, rho, lam) / rb.lambda_su
            } else {
                g_term(a, rho, lam)
            };
            inner.add(cm * v);
        }
        outer.add(dl * inner.value());
    }
    let p = 1.0 - outer.value();
    if !p.is_finite() {
        return Err(SopError::Instability { term: "relay SOP".into(), detail: format!("value {p}") });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Relay SOP by adaptive quadrature of F_U(ρx+ρ−1) against the max-of-L eavesdropper density.
pub fn sop_relay_quadrature(rb: &RelayBudget, m_users: u32, l_eves: u32, with_direct: bool) -> Result<f64> {
    let mix = EveMixture::new(l_eves, rb.lambda_e)?;
    let rho = rb.rho;
    let f = |x: f64| relay_user_cdf(rho * x + rho - 1.0, rb, m_users, with_direct).unwrap_or(f64::NAN) * mix.pdf(x);
    let scales = [rb.lambda_e, rb.lambda_su / rho, rb.lambda_sr / rho, rb.lambda_ru / rho];
    let mut breaks = Vec::new();
    for s in scales {
        breaks.extend([0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0].iter().map(|k| k * s));
    }
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, ..QuadOptions::default() };
    let r = integrate(f, 0.0, mix.truncation(), &breaks, opts)?;
    Ok(r.value.clamp(0.0, 1.0))
}

/// Relay SOP for a scenario at one transmit SNR.
pub fn sop_relay_for(s: &Scenario, p_over_n0: f64, with_direct: bool) -> Result<f64> {
    sop_relay(&RelayBudget::new(s, p_over_n0)?, s.m, s.l, with_direct)
}

/// Outcome of a crossover search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossover {
    /// Smallest N with RIS SOP below the relay SOP; `None` if not reached by [`CROSSOVER_MAX_N`].
    pub n: Option<u32>,
    /// RIS SOP at `n`, or at [`CROSSOVER_MAX_N`] when not found.
    pub ris_sop: f64,
    pub relay_sop: f64,
}

pub const CROSSOVER_MAX_N: u32 = 4096;

fn ris_sop_at(s: &Scenario, n: u32, p_over_n0: f64, scheme: Scheme) -> Result<f64> {
    let t = Scenario { n, ..s.clone() };
    let q = SopQuery { scenario: &t, p_over_n0, scheme, method: Method::ClosedForm };
    match scheme {
        Scheme::OS => sop_os(&q),
        Scheme::SS | Scheme::SingleUser => Ok(sop_closed(&q)?.0),
        other => Err(SopError::Validation(format!("crossover needs an RIS scheme, got {other}"))),
    }
}

/// Smallest RIS element count beating the relay, by bisection on N.
///
/// A relay SOP of 1 is beaten by any RIS, so N = 1 is returned directly.
pub fn crossover_n(s: &Scenario, p_over_n0: f64, ris_scheme: Scheme, relay_scheme: Scheme) -> Result<Crossover> {
    let with_direct = match relay_scheme {
        Scheme::RelayDL => true,
        Scheme::RelayNDL => false,
        other => return Err(SopError::Validation(format!("relay variant expected, got {other}"))),
    };
    let relay_sop = sop_relay_for(s, p_over_n0, with_direct)?;
    let at = |n| ris_sop_at(s, n, p_over_n0, ris_scheme);
    if relay_sop >= 1.0 {
        return Ok(Crossover { n: Some(1), ris_sop: at(1)?, relay_sop });
    }
    let top = at(CROSSOVER_MAX_N)?;
    if top >= relay_sop {
        return Ok(Crossover { n: None, ris_sop: top, relay_sop });
    }
    let first = at(1)?;
    if first < relay_sop {
        return Ok(Crossover { n: Some(1), ris_sop: first, relay_sop });
    }
    let (mut lo, mut hi, mut hi_sop) = (1u32, CROSSOVER_MAX_N, top);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let v = at(mid)?;
        if v < relay_sop {
            hi = mid;
            hi_sop = v;
        } else {
            lo = mid;
        }
    }
    Ok(Crossover { n: Some(hi), ris_sop: hi_sop, relay_sop })
}
