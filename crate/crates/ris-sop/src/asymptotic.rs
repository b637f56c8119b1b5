//! High-SNR saturation floors.
//!
//! At high P/N0 the SOP depends only on N, M, L, ρ and the path-loss ratio
//! r = ζ_SU/ζ_SE; η and ξ drop out.

use std::f64::consts::PI;

use crate::error::Result;
use crate::model::{derive_geometry, path_loss_ratio, Scenario};
use crate::scheme::Scheme;
use crate::special::{binomial_f64, enumerate_multinomial, CompensatedSum, Q_APPROX};

/// (16 − π²)/16, the normalized variance of one Rayleigh product.
const C_VAR: f64 = (16.0 - PI * PI) / 16.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFloor {
    pub scheme: Scheme,
    pub floor: f64,
    /// Per-element rate β of the dominant single-user component.
    pub decay_rate_beta: f64,
    /// (β1, β2) of the SS expression; β2 belongs to its dominant term.
    pub decay_rates_ss: Option<(f64, f64)>,
}

fn ratio(s: &Scenario) -> Result<f64> {
    Ok(path_loss_ratio(&derive_geometry(s)?))
}

/// Rate β_i = π² r/(16(ρ + 2rc/p_i)).
pub fn single_user_beta(r: f64, rho: f64, p_i: f64) -> f64 {
    PI * PI * r / (16.0 * (rho + 2.0 * r * C_VAR / p_i))
}

/// Single-user floor from n, l, ρ and r; also returns the dominant β.
pub fn single_user_floor(n: u32, l: u32, rho: f64, r: f64) -> (f64, f64) {
    let nf = f64::from(n);
    let mut sum = CompensatedSum::new();
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..3 {
        let (w, p) = (Q_APPROX.w[i], Q_APPROX.p[i]);
        let expo = -nf * PI * PI / (16.0 * (rho / r + 2.0 * C_VAR / p));
        let num = w * C_VAR * PI * (2.0 * PI * rho * nf * p).sqrt();
        let den = (rho * p / r + 2.0 * C_VAR) * ((16.0 - PI * PI) * (rho + 2.0 * r * C_VAR / p)).sqrt();
        let ln_term = expo + (num / den).ln();
        if ln_term > best.0 {
            best = (ln_term, single_user_beta(r, rho, p));
        }
        sum.add(ln_term.exp());
    }
    (f64::from(l) * sum.value(), best.1)
}

pub fn sop_single_hsnr(s: &Scenario) -> Result<AsymptoticFloor> {
    s.validate()?;
    let (floor, beta) = single_user_floor(s.n, s.l, s.rho_ris(), ratio(s)?);
    Ok(AsymptoticFloor { scheme: Scheme::SingleUser, floor, decay_rate_beta: beta, decay_rates_ss: None })
}

/// SS floor; returns (floor, β1, β2 of the largest-magnitude term).
pub fn ss_floor(n: u32, m_users: u32, l: u32, rho: f64, r: f64) -> Result<(f64, f64, f64)> {
    let nf = f64::from(n);
    let ln_e1 = -nf * PI * PI * r / (16.0 * rho);
    let beta1 = PI * PI * r / (16.0 * rho);
    let mut total = CompensatedSum::new();
    total.add(ln_e1.exp());
    let mut dominant = (f64::NEG_INFINITY, beta1);
    for m in 1..=m_users {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let cm = sign * binomial_f64(m_users, m);
        for k in enumerate_multinomial(m)? {
            let wk = 2.0 * k.weight();
            let a = C_VAR / k.decay_sum;
            let g = rho + 2.0 * a * r;
            let lead = cm * wk * a * r / g;
            total.add(lead * ln_e1.exp());
            let ln_root = (PI * (2.0 * PI * rho * nf * k.decay_sum).sqrt() / ((16.0 - PI * PI) * g).sqrt()).ln();
            for i in 0..3 {
                let (w, p) = (Q_APPROX.w[i], Q_APPROX.p[i]);
                let beta2 = PI * PI * r * (0.5 + p * a * r / rho) / (8.0 * g);
                let ln_mag = (lead.abs() * 0.5 * w).ln() + ln_root - beta2 * nf;
                if ln_mag > dominant.0 {
                    dominant = (ln_mag, beta2);
                }
                total.add(lead.signum() * ln_mag.exp());
            }
        }
    }
    Ok((f64::from(l) * total.value(), beta1, dominant.1))
}

pub fn sop_ss_hsnr(s: &Scenario) -> Result<AsymptoticFloor> {
    s.validate()?;
    let rho = s.rho_ris();
    let r = ratio(s)?;
    let (floor, b1, b2) = ss_floor(s.n, s.m, s.l, rho, r)?;
    let (_, beta) = single_user_floor(s.n, s.l, rho, r);
    Ok(AsymptoticFloor { scheme: Scheme::SS, floor, decay_rate_beta: beta, decay_rates_ss: Some((b1, b2)) })
}

pub fn sop_os_hsnr(s: &Scenario) -> Result<AsymptoticFloor> {
    let single = sop_single_hsnr(s)?;
    Ok(AsymptoticFloor { scheme: Scheme::OS, floor: single.floor.powi(s.m as i32), ..single })
}

/// Floor for any RIS scheme with a high-SNR expression.
pub fn floor_for(s: &Scenario, scheme: Scheme) -> Result<AsymptoticFloor> {
    match scheme {
        Scheme::SingleUser => sop_single_hsnr(s),
        Scheme::SS => sop_ss_hsnr(s),
        Scheme::OS => sop_os_hsnr(s),
        Scheme::BestPair => {
            let t = Scenario { m: s.m * s.k, k: 1, ..s.clone() };
            Ok(AsymptoticFloor { scheme: Scheme::BestPair, ..sop_ss_hsnr(&t)? })
        }
        other => Err(crate::error::SopError::Validation(format!("no high-SNR expression for {other}"))),
    }
}
