//! Closed-form and quadrature SOP for single-user, SS, OS and best-pair
//! scheduling.
//!
//! With Γ_E drawn from the max-of-L mixture and the best-of-M user CDF
//! written through the three-exponential Q approximation, the SOP reduces
//! to per-(m, l) integrals against exponential densities of mean λ_E/l.
//! Those integrals split into the terms `J+`, `I+` and `I-` assembled here.

use std::f64::consts::PI;

use crate::channel::{clt_params, user_snr_cdf_with, CltParams, EveMixture, ModelWarning, QModel};
use crate::error::{domain, Result, SopError};
use crate::model::{LinkBudget, Scenario};
use crate::quadrature::{integrate, QuadOptions};
use crate::scheme::{Method, Scheme};
use crate::special::{binomial_f64, enumerate_multinomial, exp_times_q_reduced, CompensatedSum, MultinomialVector};

/// One SOP evaluation request.
#[derive(Debug, Clone, Copy)]
pub struct SopQuery<'a> {
    pub scenario: &'a Scenario,
    /// Linear transmit SNR P/N0.
    pub p_over_n0: f64,
    pub scheme: Scheme,
    pub method: Method,
}

/// Which branch of the closed form applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremCase {
    /// Γ̄_U ≤ (ρ−1)/μ_U²: the Q argument is positive everywhere.
    PositiveArgument,
    /// Γ̄_U > (ρ−1)/μ_U²: the integration range splits at x_c.
    SplitRange,
}

/// Intermediate terms of a closed-form evaluation, indexed `[m-1][l-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TermBreakdown {
    pub j_plus: Vec<Vec<f64>>,
    pub i_plus: Vec<Vec<f64>>,
    /// Empty for [`TheoremCase::PositiveArgument`].
    pub i_minus: Vec<Vec<f64>>,
    pub case: TheoremCase,
    /// Unclamped SOP.
    pub raw_sop: f64,
    /// Σ|terms| of the outer alternating sum; raw_sop carries a rounding
    /// error of order 1e-16 times this.
    pub abs_term_sum: f64,
    pub warnings: Vec<ModelWarning>,
}

/// Fixed inputs shared by every term at one (budget, l).
#[derive(Debug, Clone, Copy)]
struct TermContext {
    gbar_u: f64,
    rho: f64,
    mu: f64,
    sigma: f64,
    lambda: f64,
}

impl TermContext {
    fn new(budget: &LinkBudget, clt: &CltParams, l: u32) -> Self {
        Self { gbar_u: budget.gbar_u, rho: budget.rho, mu: clt.mu_u, sigma: clt.sigma_u, lambda: budget.lambda_e_l(l) }
    }

    /// (μ²Γ̄_U − (ρ−1))/ρ, where the Q argument changes sign.
    fn x_c(&self) -> f64 {
        (self.mu * self.mu * self.gbar_u - (self.rho - 1.0)) / self.rho
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (-(a - b).abs()).exp().ln_1p()
}

/// Shared shape of both kernels: prefactor·exp(g)·[1 + K·½erfcx(b/√2)].
fn kernel(ctx: &TermContext, decay_sum: f64, lower: Lower) -> f64 {
    let s2 = ctx.sigma * ctx.sigma / decay_sum;
    let r = ctx.gbar_u / (ctx.rho * ctx.lambda);
    let ups = 0.5 / s2 + r;
    let ln_pref = (0.5 * r / ups).ln();
    let ln_k = (ctx.mu * PI.sqrt() / (s2 * ups.sqrt())).ln();
    let (g, b) = match lower {
        Lower::Zero => {
            let u0 = ((ctx.rho - 1.0) / ctx.gbar_u).sqrt();
            let d = u0 - ctx.mu;
            (-d * d / (2.0 * s2), (2.0 * ups).sqrt() * (u0 - ctx.mu / (2.0 * s2 * ups)))
        }
        Lower::Crossing => (-ctx.x_c() / ctx.lambda, 2f64.sqrt() * ctx.mu * r / ups.sqrt()),
    };
    let tail = exp_times_q_reduced(g, b).ln_value;
    (ln_pref + log_add_exp(g, ln_k + tail)).exp()
}

#[derive(Debug, Clone, Copy)]
enum Lower {
    Zero,
    Crossing,
}

fn checked(v: f64, term: impl FnOnce() -> String) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SopError::Instability { term: term(), detail: format!("value {v}") })
    }
}

/// ½∫_0^∞ exp(−S(√((ρ−1+ρx)/Γ̄_U) − μ_U)²/(2σ_U²))·f̂_l(x) dx for k with S = Σk_i p_i.
pub fn cal_j_plus(k: &MultinomialVector, l: u32, budget: &LinkBudget, clt: &CltParams) -> Result<f64> {
    check_term_inputs(budget, l)?;
    let ctx = TermContext::new(budget, clt, l);
    checked(kernel(&ctx, k.decay_sum, Lower::Zero), || format!("J+ k={:?} l={l}", k.k))
}

/// The same integrand as [`cal_j_plus`] over x ≥ (μ_U²Γ̄_U − (ρ−1))/ρ, with
/// the same ½ normalization.
pub fn cal_i_plus(k: &MultinomialVector, l: u32, budget: &LinkBudget, clt: &CltParams) -> Result<f64> {
    check_term_inputs(budget, l)?;
    let ctx = TermContext::new(budget, clt, l);
    checked(kernel(&ctx, k.decay_sum, Lower::Crossing), || format!("I+ k={:?} l={l}", k.k))
}

fn check_term_inputs(budget: &LinkBudget, l: u32) -> Result<()> {
    if !(budget.gbar_u > 0.0) || budget.rho < 1.0 || l == 0 {
        return Err(domain("terms need gbar_U > 0, rho >= 1 and l >= 1"));
    }
    Ok(())
}

/// Per-m aggregates J+^{(m,l)} and I+^{(m,l)} for m = 1..max_m at one l.
fn aggregate_terms(
    ctx: &TermContext,
    table: &[Vec<MultinomialVector>],
    l: u32,
    with_i: bool,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut jp = Vec::with_capacity(table.len());
    let mut ip = Vec::with_capacity(table.len());
    for (mi, ks) in table.iter().enumerate() {
        let mut js = CompensatedSum::new();
        let mut is = CompensatedSum::new();
        for k in ks {
            let w = 2.0 * k.weight();
            let j = checked(kernel(ctx, k.decay_sum, Lower::Zero), || format!("J+ m={} k={:?} l={l}", mi + 1, k.k))?;
            js.add(w * j);
            if with_i {
                let i = checked(kernel(ctx, k.decay_sum, Lower::Crossing), || {
                    format!("I+ m={} k={:?} l={l}", mi + 1, k.k)
                })?;
                is.add(w * i);
            }
        }
        jp.push(js.value());
        ip.push(is.value());
    }
    Ok((jp, ip))
}

fn i_minus_from(ctx: &TermContext, m: usize, jp: &[f64], ip: &[f64]) -> f64 {
    let mut s = CompensatedSum::new();
    s.add(-(-ctx.x_c() / ctx.lambda).exp_m1());
    for j in 1..=m {
        let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
        s.add(sign * binomial_f64(m as u32, j as u32) * (jp[j - 1] - ip[j - 1]));
    }
    s.value()
}

/// I−^{(m,l)}, the split-range contribution below the crossing point.
pub fn i_minus(m: u32, l: u32, budget: &LinkBudget, clt: &CltParams) -> Result<f64> {
    check_term_inputs(budget, l)?;
    let ctx = TermContext::new(budget, clt, l);
    if ctx.x_c() <= 0.0 {
        return Err(domain("I- is defined only when gbar_U > (rho-1)/mu_U^2"));
    }
    let table = multinomial_table(m)?;
    let (jp, ip) = aggregate_terms(&ctx, &table, l, true)?;
    checked(i_minus_from(&ctx, m as usize, &jp, &ip), || format!("I- m={m} l={l}"))
}

fn multinomial_table(max_m: u32) -> Result<Vec<Vec<MultinomialVector>>> {
    (1..=max_m).map(enumerate_multinomial).collect()
}

/// Closed-form SOP of the best of `m_users` users against `l_eves` eavesdroppers.
pub fn closed_form_sop(
    budget: &LinkBudget,
    clt: &CltParams,
    m_users: u32,
    l_eves: u32,
) -> Result<(f64, TermBreakdown)> {
    if m_users == 0 || l_eves == 0 {
        return Err(domain("M and L must be at least 1"));
    }
    if budget.rho < 1.0 {
        return Err(domain("rho must be at least 1"));
    }
    let case = if budget.gbar_u <= (budget.rho - 1.0) / (clt.mu_u * clt.mu_u) {
        TheoremCase::PositiveArgument
    } else {
        TheoremCase::SplitRange
    };
    let split = case == TheoremCase::SplitRange;
    let table = multinomial_table(m_users)?;
    let mm = m_users as usize;
    let mut j_plus = vec![Vec::with_capacity(l_eves as usize); mm];
    let mut i_plus = vec![Vec::with_capacity(l_eves as usize); mm];
    let mut i_minus = if split { vec![Vec::with_capacity(l_eves as usize); mm] } else { Vec::new() };

    let mut outer = CompensatedSum::new();
    for l in 1..=l_eves {
        let ctx = TermContext::new(budget, clt, l);
        let (jp, ip) = aggregate_terms(&ctx, &table, l, split)?;
        let mut inner = CompensatedSum::new();
        for m in 1..=mm {
            let t = if split {
                let im = checked(i_minus_from(&ctx, m, &jp, &ip), || format!("I- m={m} l={l}"))?;
                i_minus[m - 1].push(im);
                im + ip[m - 1]
            } else {
                jp[m - 1]
            };
            j_plus[m - 1].push(jp[m - 1]);
            if split {
                i_plus[m - 1].push(ip[m - 1]);
            }
            let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
            inner.add(sign * binomial_f64(m_users, m as u32) * clt.xi.powi(m as i32) * t);
        }
        let sign = if l % 2 == 1 { -1.0 } else { 1.0 };
        let v = sign * binomial_f64(l_eves, l) * inner.value();
        outer.add(v);
    }
    let raw = 1.0 - outer.value();
    let raw = checked(raw, || "SOP assembly".to_string())?;
    let breakdown = TermBreakdown {
        j_plus,
        i_plus,
        i_minus,
        case,
        raw_sop: raw,
        abs_term_sum: outer.abs_sum(),
        warnings: clt.warning().into_iter().collect(),
    };
    Ok((raw.clamp(0.0, 1.0), breakdown))
}

fn effective_users(q: &SopQuery<'_>) -> Result<u32> {
    let s = q.scenario;
    match q.scheme {
        Scheme::SingleUser => Ok(1),
        Scheme::SS => Ok(s.m),
        Scheme::BestPair => Ok(s.k * s.m),
        other => Err(SopError::Validation(format!("scheme {other} has no closed form here"))),
    }
}

fn prepare(q: &SopQuery<'_>) -> Result<(LinkBudget, CltParams)> {
    let budget = LinkBudget::new(q.scenario, q.p_over_n0)?;
    let clt = clt_params(q.scenario.n, q.scenario.eta)?;
    Ok((budget, clt))
}

/// Closed-form SOP for SingleUser or SS (BestPair is routed through SS with K·M users).
pub fn sop_closed(q: &SopQuery<'_>) -> Result<(f64, TermBreakdown)> {
    let m = effective_users(q)?;
    let (budget, clt) = prepare(q)?;
    closed_form_sop(&budget, &clt, m, q.scenario.l)
}

/// OS scheme: the single-user SOP raised to the power M, by closed form or quadrature.
pub fn sop_os(q: &SopQuery<'_>) -> Result<f64> {
    let single = SopQuery { scheme: Scheme::SingleUser, ..*q };
    let inner = match q.method {
        Method::ClosedForm => sop_closed(&single)?.0,
        Method::Quadrature => sop_quadrature(&single, true)?,
        other => return Err(SopError::Validation(format!("sop_os does not support method {other}"))),
    };
    Ok(inner.powi(q.scenario.m as i32))
}

/// Best antenna-user pair over K antennas: SS with K·M users.
pub fn sop_best_pair(q: &SopQuery<'_>, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(domain("K must be at least 1"));
    }
    let s = Scenario { m: q.scenario.m * k, k: 1, ..q.scenario.clone() };
    let ss = SopQuery { scenario: &s, scheme: Scheme::SS, ..*q };
    Ok(sop_closed(&ss)?.0)
}

/// Breakpoints in x where the user CDF at ρx+ρ−1 changes quickly.
fn transition_points(budget: &LinkBudget, clt: &CltParams, lambda: f64) -> Vec<f64> {
    let zs =
        [-8.0, -6.0, -4.0, -3.0, -2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 11.0];
    let mut pts: Vec<f64> = zs
        .iter()
        .filter_map(|z| {
            let u = clt.mu_u + z * clt.sigma_u;
            (u > 0.0).then(|| (budget.gbar_u * u * u - (budget.rho - 1.0)) / budget.rho)
        })
        .filter(|x| *x > 0.0)
        .collect();
    pts.extend([0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0].iter().map(|f| f * lambda));
    pts
}

/// Quadrature of ∫ F_U(ρx+ρ−1)^M f_E(x) dx for any of the single-hop RIS schemes.
pub fn sop_quadrature(q: &SopQuery<'_>, use_exact_q: bool) -> Result<f64> {
    let qmodel = if use_exact_q { QModel::Exact } else { QModel::ThreeExp };
    match q.scheme {
        Scheme::OS => {
            let single = SopQuery { scheme: Scheme::SingleUser, ..*q };
            Ok(sop_quadrature(&single, use_exact_q)?.powi(q.scenario.m as i32))
        }
        _ => {
            let m = effective_users(q)?;
            let (budget, clt) = prepare(q)?;
            quadrature_sop(&budget, &clt, m, q.scenario.l, qmodel)
        }
    }
}

/// Quadrature SOP for the best of `m_users` users and `l_eves` eavesdroppers.
pub fn quadrature_sop(budget: &LinkBudget, clt: &CltParams, m_users: u32, l_eves: u32, q: QModel) -> Result<f64> {
    let mix = EveMixture::new(l_eves, budget.lambda_e)?;
    let x_max = mix.truncation();
    debug_assert!(mix.tail_bound(x_max) < 1e-12);
    let rho = budget.rho;
    let f = |x: f64| {
        let fu = user_snr_cdf_with(rho * x + rho - 1.0, budget.gbar_u, clt, q);
        fu.powi(m_users as i32) * mix.pdf(x)
    };
    let breaks = transition_points(budget, clt, budget.lambda_e);
    let r = integrate(f, 0.0, x_max, &breaks, QuadOptions::default())?;
    Ok(r.value.clamp(0.0, 1.0))
}

/// Dispatches a query to the matching evaluator.
pub fn evaluate(q: &SopQuery<'_>) -> Result<f64> {
    match (q.scheme, q.method) {
        (Scheme::OS, _) => sop_os(q),
        (Scheme::BestPair, Method::ClosedForm) => sop_best_pair(q, q.scenario.k),
        (_, Method::ClosedForm) => Ok(sop_closed(q)?.0),
        (_, Method::Quadrature) => sop_quadrature(q, true),
        (s, m) => Err(SopError::Validation(format!("{s} with {m} is not an analytic evaluation"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(s: &Scenario, db: f64, scheme: Scheme) -> SopQuery<'_> {
        SopQuery { scenario: s, p_over_n0: s.p_over_n0(db), scheme, method: Method::ClosedForm }
    }

    #[test]
    fn single_user_paths_coincide() {
        let s = Scenario { m: 1, ..Scenario::default() };
        for db in [10.0, 20.0, 40.0] {
            let a = sop_closed(&query(&s, db, Scheme::SS)).unwrap().0;
            let b = sop_closed(&query(&s, db, Scheme::SingleUser)).unwrap().0;
            let c = sop_os(&query(&s, db, Scheme::OS)).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
            assert_eq!(a.to_bits(), c.to_bits());
        }
    }

    #[test]
    fn low_snr_is_certain_outage() {
        let s = Scenario::default();
        let (p, b) = sop_closed(&query(&s, 0.0, Scheme::SS)).unwrap();
        assert_eq!(b.case, TheoremCase::PositiveArgument);
        assert!(b.i_minus.is_empty());
        assert!((p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_threshold_uses_split_branch() {
        let s = Scenario { r_th: 0.0, ..Scenario::default() };
        let (p, b) = sop_closed(&query(&s, 20.0, Scheme::SS)).unwrap();
        assert_eq!(b.case, TheoremCase::SplitRange);
        assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn best_pair_is_ss_with_more_users() {
        let s = Scenario { m: 3, k: 2, ..Scenario::default() };
        let q = query(&s, 20.0, Scheme::BestPair);
        let s6 = Scenario { m: 6, k: 1, ..Scenario::default() };
        let ss = sop_closed(&query(&s6, 20.0, Scheme::SS)).unwrap().0;
        assert_eq!(sop_best_pair(&q, 2).unwrap().to_bits(), ss.to_bits());
    }

    #[test]
    fn rejects_unsupported_schemes() {
        let s = Scenario::default();
        assert!(sop_closed(&query(&s, 20.0, Scheme::NOMA)).is_err());
        assert!(evaluate(&query(&s, 20.0, Scheme::RelayDL)).is_err());
    }
}
