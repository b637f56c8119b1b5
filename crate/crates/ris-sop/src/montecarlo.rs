//! Monte Carlo simulation of the RIS and relay systems.
//!
//! Every trial owns its random streams, derived from `(seed, trial, family)`,
//! with one family per channel group (S-RIS, RIS-users, RIS-eavesdroppers).
//! Results therefore do not depend on the number of worker threads, and
//! runs that differ only in M or L share the draws of their common users and
//! eavesdroppers. All schemes and SNR points of one call are evaluated on the
//! same draws.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_distr::{Exp1, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

use crate::channel::clt_params;
use crate::error::{domain, Result, SopError};
use crate::model::{LinkBudget, Scenario};
use crate::relay::RelayBudget;
use crate::scheme::Scheme;

/// How the cascaded channel is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelMode {
    /// Rayleigh product channels with RIS phase alignment.
    ExactProduct,
    /// Gaussian Y_U and independent exponential eavesdropper SNRs.
    CltSurrogate,
}

/// Outage counts for one scheme at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialBatch {
    pub trials: u64,
    pub outages: u64,
    pub seed: u64,
    pub scheme: Scheme,
    pub mode: ChannelMode,
}

impl TrialBatch {
    pub fn estimate(&self) -> f64 {
        self.outages as f64 / self.trials as f64
    }

    /// Wilson score interval for the outage probability.
    pub fn wilson(&self, z: f64) -> (f64, f64) {
        let n = self.trials as f64;
        let p = self.estimate();
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        let lo = if self.outages == 0 { 0.0 } else { (center - half).max(0.0) };
        let hi = if self.outages == self.trials { 1.0 } else { (center + half).min(1.0) };
        (lo, hi)
    }

    pub fn wilson95(&self) -> (f64, f64) {
        self.wilson(1.959_963_984_540_054)
    }
}

/// Power-split search grid for the NOMA pair; `a` is the strong user's share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomaConfig {
    pub a_min: f64,
    pub a_max: f64,
    pub step: f64,
}

impl Default for NomaConfig {
    fn default() -> Self {
        Self { a_min: 0.01, a_max: 0.5, step: 0.01 }
    }
}

impl NomaConfig {
    fn grid(&self) -> Result<Vec<f64>> {
        if !(self.a_min > 0.0 && self.a_min <= self.a_max && self.a_max <= 1.0 && self.step > 0.0) {
            return Err(domain("NOMA power grid needs 0 < a_min <= a_max <= 1 and step > 0"));
        }
        let count = ((self.a_max - self.a_min) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| self.a_min + i as f64 * self.step).collect())
    }
}

/// Run settings shared by the simulators.
#[derive(Clone, Copy)]
pub struct McOptions<'a> {
    pub trials: u64,
    pub seed: u64,
    pub mode: ChannelMode,
    pub noma: NomaConfig,
    /// Called with (completed, total) trials as chunks finish.
    pub progress: Option<&'a (dyn Fn(u64, u64) + Sync)>,
}

impl<'a> McOptions<'a> {
    pub fn new(trials: u64, seed: u64, mode: ChannelMode) -> Self {
        Self { trials, seed, mode, noma: NomaConfig::default(), progress: None }
    }
}

const CHUNK: u64 = 1024;
const MAX_TRIALS: u64 = 1 << 53;

const FAMILY_SR: u64 = 1;
const FAMILY_RU: u64 = 2;
const FAMILY_RE: u64 = 3;
const FAMILY_RELAY: u64 = 4;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream(seed: u64, trial: u64, family: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(splitmix(splitmix(seed) ^ splitmix(trial) ^ splitmix(family << 56)))
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(domain("trials must be at least 1"));
    }
    if trials > MAX_TRIALS {
        return Err(domain(format!("trials must not exceed {MAX_TRIALS}")));
    }
    Ok(())
}

fn complex_normal<R: Rng>(rng: &mut R) -> (f64, f64) {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    (x * FRAC_1_SQRT_2, y * FRAC_1_SQRT_2)
}

/// Channel realisation of one trial, normalized so that Γ_U = Γ̄_U·y² and
/// Γ_E = Γ̄_E·z.
struct Draw {
    n: usize,
    m: usize,
    l: usize,
    k: usize,
    eta: f64,
    /// |h_SR| per antenna set, `[k*n + i]`.
    sr: Vec<f64>,
    /// |h_RU|, `[m*n + i]`.
    ru_mag: Vec<f64>,
    /// conj(h_RU)/|h_RU|, `[m*n + i]`.
    ru_conj: Vec<(f64, f64)>,
    re: Vec<(f64, f64)>,
    /// Aligned amplitudes Y_U, `[k*m + j]`.
    y: Vec<f64>,
    scratch: Vec<(f64, f64)>,
    /// Surrogate eavesdropper SNRs, `[j*l + e]`.
    z_sur: Vec<f64>,
}

impl Draw {
    fn new(s: &Scenario, k: usize) -> Self {
        let (n, m, l) = (s.n as usize, s.m as usize, s.l as usize);
        Self {
            n,
            m,
            l,
            k,
            eta: s.eta,
            sr: vec![0.0; k * n],
            ru_mag: vec![0.0; m * n],
            ru_conj: vec![(0.0, 0.0); m * n],
            re: vec![(0.0, 0.0); l * n],
            y: vec![0.0; k * m],
            scratch: vec![(0.0, 0.0); n],
            z_sur: vec![0.0; m * l],
        }
    }

    fn fill_exact(&mut self, seed: u64, trial: u64) {
        let mut rng = stream(seed, trial, FAMILY_SR);
        for v in &mut self.sr {
            let e: f64 = rng.sample(Exp1);
            *v = e.sqrt();
        }
        let mut rng = stream(seed, trial, FAMILY_RU);
        for (mag, ph) in self.ru_mag.iter_mut().zip(&mut self.ru_conj) {
            let (a, b) = complex_normal(&mut rng);
            let r = (a * a + b * b).sqrt();
            *mag = r;
            *ph = (a / r, -b / r);
        }
        let mut rng = stream(seed, trial, FAMILY_RE);
        for v in &mut self.re {
            *v = complex_normal(&mut rng);
        }
        let n = self.n;
        for kk in 0..self.k {
            let sr = &self.sr[kk * n..(kk + 1) * n];
            for j in 0..self.m {
                let ru = &self.ru_mag[j * n..(j + 1) * n];
                let acc: f64 = sr.iter().zip(ru).map(|(a, b)| a * b).sum();
                self.y[kk * self.m + j] = self.eta * acc;
            }
        }
    }

    fn fill_surrogate(&mut self, seed: u64, trial: u64, mu: f64, sigma: f64) {
        let mut rng = stream(seed, trial, FAMILY_RU);
        for v in &mut self.y {
            *v = loop {
                let g: f64 = rng.sample(StandardNormal);
                let c = mu + sigma * g;
                if c >= 0.0 {
                    break c;
                }
            };
        }
        let mut rng = stream(seed, trial, FAMILY_RE);
        let mean = self.eta * self.eta * self.n as f64;
        for v in &mut self.z_sur {
            let e: f64 = rng.sample(Exp1);
            *v = mean * e;
        }
    }

    /// |Y_E|² for every eavesdropper when the RIS is aligned to user `j` over antenna set `kk`.
    fn eve_powers(&mut self, kk: usize, j: usize, out: &mut [f64]) {
        let n = self.n;
        let sr = &self.sr[kk * n..(kk + 1) * n];
        let ph = &self.ru_conj[j * n..(j + 1) * n];
        for ((c, &a), &(pr, pi)) in self.scratch.iter_mut().zip(sr).zip(ph) {
            *c = (a * pr, a * pi);
        }
        for (e, o) in out.iter_mut().enumerate().take(self.l) {
            let re = &self.re[e * n..(e + 1) * n];
            let (mut sr_acc, mut si_acc) = (0.0, 0.0);
            for (&(hr, hi), &(cr, ci)) in re.iter().zip(&self.scratch) {
                sr_acc += hr * cr - hi * ci;
                si_acc += hr * ci + hi * cr;
            }
            *o = self.eta * self.eta * (sr_acc * sr_acc + si_acc * si_acc);
        }
    }

    /// Amplitude of user `w` when the RIS is aligned to user `j` (antenna set 0).
    fn misaligned_amplitude(&self, j: usize, w: usize) -> f64 {
        let n = self.n;
        let sr = &self.sr[..n];
        let pj = &self.ru_conj[j * n..(j + 1) * n];
        let (mw, pw) = (&self.ru_mag[w * n..(w + 1) * n], &self.ru_conj[w * n..(w + 1) * n]);
        let (mut ar, mut ai) = (0.0, 0.0);
        for i in 0..n {
            // h_RU^(w) · conj(u^(j)) = |h_w| conj(pw)·pj
            let (wr, wi) = (pw[i].0, -pw[i].1);
            let (jr, ji) = pj[i];
            let s = sr[i] * mw[i];
            ar += s * (wr * jr - wi * ji);
            ai += s * (wr * ji + wi * jr);
        }
        self.eta * ar.hypot(ai)
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

#[inline]
fn in_outage(gu: f64, ge: f64, rho: f64) -> bool {
    1.0 + gu < rho * (1.0 + ge)
}

/// Precomputed per-point constants.
#[derive(Clone, Copy)]
struct Point {
    gbar_u: f64,
    gbar_e: f64,
}

struct NomaEval<'a> {
    grid: &'a [f64],
    threshold_ln: f64,
}

impl NomaEval<'_> {
    /// Secrecy-sum outage for strong SNR gs, weak SNR gw and eavesdropper ge.
    fn outage(&self, gs: f64, gw: f64, ge: f64) -> bool {
        let mut best_a = self.grid[0];
        let mut best_rate = f64::NEG_INFINITY;
        for &a in self.grid {
            let r = (a * gs).ln_1p() + gw.ln_1p() - (a * gw).ln_1p();
            if r > best_rate {
                best_rate = r;
                best_a = a;
            }
        }
        let a = best_a;
        let strong = ((a * gs).ln_1p() - (a * ge).ln_1p()).max(0.0);
        let weak = (gw.ln_1p() - (a * gw).ln_1p() - ge.ln_1p() + (a * ge).ln_1p()).max(0.0);
        strong + weak < self.threshold_ln
    }
}

fn validate_schemes(s: &Scenario, schemes: &[Scheme], mode: ChannelMode) -> Result<()> {
    if schemes.is_empty() {
        return Err(SopError::Validation("no schemes requested".into()));
    }
    for &sc in schemes {
        match sc {
            Scheme::RelayDL | Scheme::RelayNDL => {
                return Err(SopError::Validation("relay schemes use simulate_relay".into()));
            }
            Scheme::NOMA if s.m < 2 => return Err(domain("NOMA needs at least two users")),
            Scheme::NOMA if mode == ChannelMode::CltSurrogate => {
                return Err(SopError::Validation("NOMA is simulated with exact product channels only".into()));
            }
            _ => {}
        }
    }
    Ok(())
}

/// Simulates several RIS schemes at several transmit SNRs on shared draws.
///
/// Returns one batch per (scheme, point), indexed `[scheme][point]`.
pub fn simulate_points(
    s: &Scenario,
    p_over_n0: &[f64],
    schemes: &[Scheme],
    opts: &McOptions<'_>,
) -> Result<Vec<Vec<TrialBatch>>> {
    s.validate()?;
    check_trials(opts.trials)?;
    validate_schemes(s, schemes, opts.mode)?;
    let points: Vec<Point> = p_over_n0
        .iter()
        .map(|&p| LinkBudget::new(s, p).map(|b| Point { gbar_u: b.gbar_u, gbar_e: b.gbar_e }))
        .collect::<Result<_>>()?;
    let rho = s.rho_ris();
    let clt = clt_params(s.n, s.eta)?;
    let grid = opts.noma.grid()?;
    let noma = NomaEval { grid: &grid, threshold_ln: s.r_th * LN_2 };
    let k_sets = if schemes.contains(&Scheme::BestPair) { s.k as usize } else { 1 };
    let np = points.len();
    let ns = schemes.len();
    let chunks = opts.trials.div_ceil(CHUNK);
    let done = AtomicU64::new(0);

    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(opts.trials);
            let mut counts = vec![0u64; ns * np];
            let mut d = Draw::new(s, k_sets);
            let mut z = vec![0.0; d.l];
            let mut z_all: Vec<Option<f64>> = vec![None; d.m];
            for t in start..end {
                match opts.mode {
                    ChannelMode::ExactProduct => d.fill_exact(opts.seed, t),
                    ChannelMode::CltSurrogate => d.fill_surrogate(opts.seed, t, clt.mu_u, clt.sigma_u),
                }
                z_all.iter_mut().for_each(|v| *v = None);
                let eve_max = |d: &mut Draw, kk: usize, j: usize, z: &mut [f64], cache: &mut [Option<f64>]| {
                    if kk == 0 {
                        if let Some(v) = cache[j] {
                            return v;
                        }
                    }
                    let v = match opts.mode {
                        ChannelMode::ExactProduct => {
                            d.eve_powers(kk, j, z);
                            max_of(z)
                        }
                        ChannelMode::CltSurrogate => max_of(&d.z_sur[j * d.l..(j + 1) * d.l]),
                    };
                    if kk == 0 {
                        cache[j] = Some(v);
                    }
                    v
                };
                for (si, &sc) in schemes.iter().enumerate() {
                    let row = &mut counts[si * np..(si + 1) * np];
                    match sc {
                        Scheme::SS | Scheme::SingleUser => {
                            let j = if sc == Scheme::SS { argmax(&d.y[..d.m]) } else { 0 };
                            let y = d.y[j];
                            let ze = eve_max(&mut d, 0, j, &mut z, &mut z_all);
                            for (cnt, p) in row.iter_mut().zip(&points) {
                                *cnt += u64::from(in_outage(p.gbar_u * y * y, p.gbar_e * ze, rho));
                            }
                        }
                        Scheme::BestPair => {
                            let idx = argmax(&d.y);
                            let (kk, j) = (idx / d.m, idx % d.m);
                            let y = d.y[idx];
                            let ze = eve_max(&mut d, kk, j, &mut z, &mut z_all);
                            for (cnt, p) in row.iter_mut().zip(&points) {
                                *cnt += u64::from(in_outage(p.gbar_u * y * y, p.gbar_e * ze, rho));
                            }
                        }
                        Scheme::OS => {
                            let zs: Vec<f64> = (0..d.m).map(|j| eve_max(&mut d, 0, j, &mut z, &mut z_all)).collect();
                            for (cnt, p) in row.iter_mut().zip(&points) {
                                let all_out = (0..d.m).all(|j| {
                                    let y = d.y[j];
                                    in_outage(p.gbar_u * y * y, p.gbar_e * zs[j], rho)
                                });
                                *cnt += u64::from(all_out);
                            }
                        }
                        Scheme::NOMA => {
                            let j = argmax(&d.y[..d.m]);
                            let ys = d.y[j];
                            let yw = (0..d.m)
                                .filter(|&w| w != j)
                                .map(|w| d.misaligned_amplitude(j, w))
                                .fold(f64::INFINITY, f64::min);
                            let ze = eve_max(&mut d, 0, j, &mut z, &mut z_all);
                            for (cnt, p) in row.iter_mut().zip(&points) {
                                let gs = p.gbar_u * ys * ys;
                                let gw = p.gbar_u * yw * yw;
                                *cnt += u64::from(noma.outage(gs, gw, p.gbar_e * ze));
                            }
                        }
                        Scheme::RelayDL | Scheme::RelayNDL => unreachable!("rejected by validation"),
                    }
                }
            }
            if let Some(cb) = opts.progress {
                let total = done.fetch_add(end - start, Ordering::Relaxed) + (end - start);
                cb(total, opts.trials);
            }
            counts
        })
        .reduce(
            || vec![0u64; ns * np],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    Ok(schemes
        .iter()
        .enumerate()
        .map(|(si, &sc)| {
            (0..np)
                .map(|pi| TrialBatch {
                    trials: opts.trials,
                    outages: counts[si * np + pi],
                    seed: opts.seed,
                    scheme: sc,
                    mode: opts.mode,
                })
                .collect()
        })
        .collect())
}

/// Simulates one RIS scheme at one transmit SNR.
pub fn simulate_scheduling(
    s: &Scenario,
    p_over_n0: f64,
    scheme: Scheme,
    mode: ChannelMode,
    trials: u64,
    seed: u64,
) -> Result<TrialBatch> {
    let opts = McOptions::new(trials, seed, mode);
    Ok(simulate_points(s, &[p_over_n0], &[scheme], &opts)?[0][0])
}

/// NOMA pair scheduling at one transmit SNR with the default power grid.
pub fn simulate_noma(s: &Scenario, p_over_n0: f64, trials: u64, seed: u64) -> Result<TrialBatch> {
    if s.m < 2 {
        return Err(domain("NOMA needs at least two users"));
    }
    simulate_scheduling(s, p_over_n0, Scheme::NOMA, ChannelMode::ExactProduct, trials, seed)
}

/// Per-trial samples of Y_U of user 0 and |Y_E|² of (user 0, eavesdropper 0)
/// from exact product channels.
pub fn exact_snr_samples(s: &Scenario, trials: u64, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    s.validate()?;
    check_trials(trials)?;
    let one = Scenario { m: 1, l: 1, ..s.clone() };
    let pairs: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map_init(
            || (Draw::new(&one, 1), vec![0.0; 1]),
            |(d, z), t| {
                d.fill_exact(seed, t);
                d.eve_powers(0, 0, z);
                (d.y[0], z[0])
            },
        )
        .collect();
    Ok(pairs.into_iter().unzip())
}

/// One relay realisation: (Γ_U with direct link, Γ_U without, Γ_E).
fn relay_trial(rb: &RelayBudget, m: u32, l: u32, seed: u64, t: u64) -> (f64, f64, f64) {
    let mut rng = stream(seed, t, FAMILY_RELAY);
    let mut e = || -> f64 { rng.sample(Exp1) };
    let sr = rb.lambda_sr * e();
    let mut ru = 0.0f64;
    for _ in 0..m {
        ru = ru.max(rb.lambda_ru * e());
    }
    let su = rb.lambda_su * e();
    let mut eve = 0.0f64;
    for _ in 0..l {
        eve = eve.max(rb.lambda_e * e());
    }
    let hop = sr.min(ru);
    (su + hop, hop, eve)
}

/// Relay outage counts at several transmit SNRs, `(with direct, without)`.
pub fn simulate_relay_points(
    s: &Scenario,
    p_over_n0: &[f64],
    trials: u64,
    seed: u64,
) -> Result<(Vec<TrialBatch>, Vec<TrialBatch>)> {
    check_trials(trials)?;
    let budgets: Vec<RelayBudget> = p_over_n0.iter().map(|&p| RelayBudget::new(s, p)).collect::<Result<_>>()?;
    let np = budgets.len();
    let counts = (0..trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; 2 * np];
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                for (pi, rb) in budgets.iter().enumerate() {
                    let (dl, ndl, eve) = relay_trial(rb, s.m, s.l, seed, t);
                    counts[pi] += u64::from(in_outage(dl, eve, rb.rho));
                    counts[np + pi] += u64::from(in_outage(ndl, eve, rb.rho));
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; 2 * np],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let mk = |off: usize, scheme| {
        (0..np)
            .map(|pi| TrialBatch { trials, outages: counts[off + pi], seed, scheme, mode: ChannelMode::ExactProduct })
            .collect::<Vec<_>>()
    };
    Ok((mk(0, Scheme::RelayDL), mk(np, Scheme::RelayNDL)))
}

/// Relay outage at one transmit SNR.
pub fn simulate_relay(s: &Scenario, p_over_n0: f64, with_direct: bool, trials: u64, seed: u64) -> Result<TrialBatch> {
    let (dl, ndl) = simulate_relay_points(s, &[p_over_n0], trials, seed)?;
    Ok(if with_direct { dl[0] } else { ndl[0] })
}

/// Samples of the scheduled user's relay SNR.
pub fn relay_user_snr_samples(
    s: &Scenario,
    p_over_n0: f64,
    with_direct: bool,
    trials: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    check_trials(trials)?;
    let rb = RelayBudget::new(s, p_over_n0)?;
    Ok((0..trials)
        .into_par_iter()
        .map(|t| {
            let (dl, ndl, _) = relay_trial(&rb, s.m, s.l, seed, t);
            if with_direct {
                dl
            } else {
                ndl
            }
        })
        .collect())
}
