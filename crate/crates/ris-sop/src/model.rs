//! Scenario description, plane geometry and the two path-loss models.
//!
//! Nodes sit on parallel planes. `delta_SR`, `delta_SU` and `delta_SE` are
//! the distances from the source plane to the planes holding the RIS, the
//! users and the eavesdroppers. `delta_RS`, `delta_RU` and `delta_RE` are the
//! distances of the source, users and eavesdroppers from the RIS plane.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Full experiment description.
///
/// Serialized key names match the usual notation (`N`, `R_th`, `delta_SR`, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    /// Carrier frequency in Hz.
    pub f: f64,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "K")]
    pub k: u32,
    pub eta: f64,
    #[serde(rename = "R_th")]
    pub r_th: f64,
    #[serde(rename = "N0_dB")]
    pub n0_db: f64,
    #[serde(rename = "delta_SR")]
    pub delta_sr: f64,
    #[serde(rename = "delta_RS")]
    pub delta_rs: f64,
    #[serde(rename = "delta_SU")]
    pub delta_su: f64,
    #[serde(rename = "delta_RU")]
    pub delta_ru: f64,
    #[serde(rename = "delta_SE")]
    pub delta_se: f64,
    #[serde(rename = "delta_RE")]
    pub delta_re: f64,
    pub alpha: f64,
    pub upsilon: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            f: 2e9,
            n: 512,
            m: 10,
            l: 10,
            k: 1,
            eta: 1.0,
            r_th: 1.0,
            n0_db: -110.0,
            delta_sr: 200.0,
            delta_rs: 200.0,
            delta_su: 900.0,
            delta_ru: 200.0,
            delta_se: 300.0,
            delta_re: 200.0,
            alpha: 0.5,
            upsilon: 3.0,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.f.is_finite() && self.f > 0.0) {
            return Err(domain(format!("carrier frequency must be positive, got {}", self.f)));
        }
        if self.n == 0 || self.m == 0 || self.l == 0 || self.k == 0 {
            return Err(domain("N, M, L and K must all be at least 1"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(domain(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        if !(self.r_th.is_finite() && self.r_th >= 0.0) {
            return Err(domain(format!("R_th must be non-negative, got {}", self.r_th)));
        }
        if !self.n0_db.is_finite() {
            return Err(domain("N0_dB must be finite"));
        }
        for (name, d) in self.distances() {
            if !(d.is_finite() && d > 0.0) {
                return Err(domain(format!("{name} must be positive, got {d}")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(domain(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.upsilon.is_finite() && self.upsilon >= 2.0) {
            return Err(domain(format!("upsilon must be at least 2, got {}", self.upsilon)));
        }
        Ok(())
    }

    fn distances(&self) -> [(&'static str, f64); 6] {
        [
            ("delta_SR", self.delta_sr),
            ("delta_RS", self.delta_rs),
            ("delta_SU", self.delta_su),
            ("delta_RU", self.delta_ru),
            ("delta_SE", self.delta_se),
            ("delta_RE", self.delta_re),
        ]
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.f
    }

    /// Outage threshold factor for single-slot RIS transmission.
    pub fn rho_ris(&self) -> f64 {
        self.r_th.exp2()
    }

    /// Outage threshold factor for the two-slot relay.
    pub fn rho_relay(&self) -> f64 {
        (2.0 * self.r_th).exp2()
    }

    /// Linear P/N0 for a transmit power given in dB.
    ///
    /// Sweep axes are expressed as transmit power in dB; the noise floor
    /// `N0_dB` is removed here, once.
    pub fn p_over_n0(&self, power_db: f64) -> f64 {
        db_to_linear(power_db - self.n0_db)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Link distances and direction cosines derived from the plane layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub d_sr: f64,
    pub d_ru: f64,
    pub d_re: f64,
    /// Direct source-user distance used by the relay baseline.
    pub d_su: f64,
    pub cos_inc: f64,
    pub cos_ref_u: f64,
    pub cos_ref_e: f64,
}

pub fn derive_geometry(s: &Scenario) -> Result<Geometry> {
    s.validate()?;
    let d_sr = s.delta_sr.hypot(s.delta_rs);
    let d_ru = (s.delta_su - s.delta_sr).hypot(s.delta_ru);
    let d_re = (s.delta_se - s.delta_sr).hypot(s.delta_re);
    let d_su = s.delta_su.hypot(s.delta_rs);
    Ok(Geometry {
        d_sr,
        d_ru,
        d_re,
        d_su,
        cos_inc: s.delta_rs / d_sr,
        cos_ref_u: s.delta_ru / d_ru,
        cos_ref_e: s.delta_re / d_re,
    })
}

/// Path loss of the source-RIS-node link.
pub fn indirect_path_loss(wavelength: f64, d1: f64, d2: f64, cos_a: f64, cos_b: f64) -> Result<f64> {
    if !(wavelength > 0.0 && d1 > 0.0 && d2 > 0.0) {
        return Err(domain("wavelength and distances must be positive"));
    }
    if !(cos_a > 0.0 && cos_a <= 1.0 && cos_b > 0.0 && cos_b <= 1.0) {
        return Err(domain("direction cosines must lie in (0, 1]"));
    }
    let num = wavelength.powi(4) * (cos_a + cos_b).powi(2);
    Ok(num / (256.0 * PI * PI * d1 * d1 * d2 * d2))
}

/// Path loss of a point-to-point link with exponent `upsilon`.
pub fn direct_path_loss(wavelength: f64, d: f64, upsilon: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(domain(format!("distance must be positive, got {d}")));
    }
    if !(wavelength > 0.0) {
        return Err(domain("wavelength must be positive"));
    }
    if !(upsilon >= 2.0) {
        return Err(domain(format!("path-loss exponent must be at least 2, got {upsilon}")));
    }
    Ok(wavelength * wavelength / (16.0 * PI * PI * d.powf(upsilon)))
}

/// ζ_SU/ζ_SE written without the wavelength or the shared S-RIS hop.
pub fn path_loss_ratio(g: &Geometry) -> f64 {
    let c = (g.cos_inc + g.cos_ref_u) / (g.cos_inc + g.cos_ref_e);
    let d = g.d_re / g.d_ru;
    c * c * d * d
}

/// Average SNRs of the RIS links at one transmit SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub p_over_n0: f64,
    pub zeta_su: f64,
    pub zeta_se: f64,
    pub gbar_u: f64,
    pub gbar_e: f64,
    /// Mean eavesdropper SNR, η²·N·Γ̄_E.
    pub lambda_e: f64,
    pub rho: f64,
}

impl LinkBudget {
    pub fn new(s: &Scenario, p_over_n0: f64) -> Result<Self> {
        let g = derive_geometry(s)?;
        Self::with_geometry(s, &g, p_over_n0)
    }

    pub fn with_geometry(s: &Scenario, g: &Geometry, p_over_n0: f64) -> Result<Self> {
        if !(p_over_n0.is_finite() && p_over_n0 > 0.0) {
            return Err(domain(format!("P/N0 must be positive, got {p_over_n0}")));
        }
        let wl = s.wavelength();
        let zeta_su = indirect_path_loss(wl, g.d_sr, g.d_ru, g.cos_inc, g.cos_ref_u)?;
        let zeta_se = indirect_path_loss(wl, g.d_sr, g.d_re, g.cos_inc, g.cos_ref_e)?;
        let gbar_u = p_over_n0 * zeta_su;
        let gbar_e = p_over_n0 * zeta_se;
        if !(gbar_u > 0.0 && gbar_e > 0.0) {
            return Err(domain("average SNR underflowed to zero"));
        }
        Ok(Self {
            p_over_n0,
            zeta_su,
            zeta_se,
            gbar_u,
            gbar_e,
            lambda_e: s.eta * s.eta * f64::from(s.n) * gbar_e,
            rho: s.rho_ris(),
        })
    }

    /// Mean of the l-th term of the max-of-L mixture.
    pub fn lambda_e_l(&self, l: u32) -> f64 {
        self.lambda_e / f64::from(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_square() {
        let s = Scenario::default();
        let g = derive_geometry(&s).unwrap();
        assert!((g.d_sr - 200.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((g.cos_inc - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((g.d_ru - 700f64.hypot(200.0)).abs() < 1e-12);
    }

    #[test]
    fn eavesdropper_plane_through_ris() {
        let s = Scenario { delta_se: 200.0, ..Scenario::default() };
        let g = derive_geometry(&s).unwrap();
        assert_eq!(g.d_re, s.delta_re);
        assert_eq!(g.cos_ref_e, 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = Scenario { delta_ru: 0.0, ..Scenario::default() };
        assert!(derive_geometry(&s).is_err());
        assert!(direct_path_loss(0.1, 0.0, 3.0).is_err());
        assert!(indirect_path_loss(0.1, 1.0, 0.0, 0.5, 0.5).is_err());
        let s = Scenario { eta: 1.5, ..Scenario::default() };
        assert!(s.validate().is_err());
    }

    #[test]
    fn path_loss_scalings() {
        let a = indirect_path_loss(0.15, 100.0, 300.0, 0.7, 0.4).unwrap();
        let b = indirect_path_loss(0.15, 200.0, 600.0, 0.7, 0.4).unwrap();
        assert!((a / b - 16.0).abs() < 1e-12);
        let d1 = direct_path_loss(0.15, 1.0, 2.0).unwrap();
        let r = 0.15 / (4.0 * PI);
        assert!((d1 - r * r).abs() < 1e-18);
        let x = direct_path_loss(0.15, 35.0, 3.0).unwrap();
        let y = direct_path_loss(0.15, 70.0, 3.0).unwrap();
        assert!((x / y - 8.0).abs() < 1e-12);
    }

    #[test]
    fn axis_conversion() {
        let s = Scenario::default();
        assert!((s.p_over_n0(0.0) - 1e11).abs() / 1e11 < 1e-14);
        assert_eq!(s.rho_ris(), 2.0);
        assert_eq!(s.rho_relay(), 4.0);
    }
}
