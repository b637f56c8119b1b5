//! Parameter sweeps, figure presets, config files and CSV output.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{evaluate, SopQuery};
use crate::asymptotic::floor_for;
use crate::error::{Result, SopError};
use crate::model::Scenario;
use crate::montecarlo::{simulate_points, simulate_relay_points, ChannelMode, McOptions, NomaConfig, TrialBatch};
use crate::relay::{crossover_n, sop_relay, sop_relay_quadrature, RelayBudget};
use crate::scheme::{Method, Scheme};

/// Smallest Monte Carlo run accepted without `allow_few_trials`.
pub const MIN_TRIALS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepVariable {
    /// Transmit power in dB; P/N0 = power − N0_dB.
    #[serde(rename = "P_over_N0_dB")]
    PowerDb,
    #[serde(rename = "N")]
    N,
    #[serde(rename = "delta_SE")]
    DeltaSe,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::PowerDb => "P_over_N0_dB",
            SweepVariable::N => "N",
            SweepVariable::DeltaSe => "delta_SE",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = SopError;

    fn from_str(s: &str) -> Result<Self> {
        [SweepVariable::PowerDb, SweepVariable::N, SweepVariable::DeltaSe]
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SopError::Parse(format!("unknown sweep variable '{s}'")))
    }
}

/// Inclusive arithmetic range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn values(&self) -> Result<Vec<f64>> {
        let ok = self.start.is_finite() && self.stop.is_finite() && self.step.is_finite();
        if !ok || self.step <= 0.0 || self.stop < self.start {
            return Err(SopError::Validation(format!(
                "sweep range needs start <= stop and step > 0, got {}:{}:{}",
                self.start, self.step, self.stop
            )));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| self.start + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scenario: Scenario,
    pub variable: SweepVariable,
    pub range: SweepRange,
    pub schemes: Vec<Scheme>,
    pub methods: Vec<Method>,
    pub mc_trials: u64,
    pub seed: u64,
    /// Accept Monte Carlo runs below [`MIN_TRIALS`].
    pub allow_few_trials: bool,
    /// Transmit power in dB used when the sweep variable is N or δ_SE.
    pub power_db: f64,
    pub noma: NomaConfig,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            scenario: Scenario::default(),
            variable: SweepVariable::PowerDb,
            range: SweepRange { start: 0.0, stop: 80.0, step: 5.0 },
            schemes: vec![Scheme::SS, Scheme::OS],
            methods: vec![Method::ClosedForm],
            mc_trials: 100_000,
            seed: 1,
            allow_few_trials: false,
            power_db: 20.0,
            noma: NomaConfig::default(),
        }
    }
}

fn check_combination(scheme: Scheme, method: Method) -> Result<()> {
    let ok = match (scheme, method) {
        (_, Method::MonteCarlo) => true,
        (Scheme::NOMA, _) => false,
        (Scheme::RelayDL | Scheme::RelayNDL, Method::Asymptotic) => false,
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        Err(SopError::Validation(format!("{scheme} cannot be evaluated with {method}")))
    }
}

impl SweepSpec {
    /// Checks every invariant before any computation starts.
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.schemes.is_empty() {
            return Err(SopError::Validation("no schemes selected".into()));
        }
        if self.methods.is_empty() {
            return Err(SopError::Validation("no methods selected".into()));
        }
        for &s in &self.schemes {
            for &m in &self.methods {
                check_combination(s, m)?;
            }
        }
        if self.schemes.contains(&Scheme::NOMA) && self.scenario.m < 2 {
            return Err(SopError::Validation("NOMA needs at least two users".into()));
        }
        if self.methods.contains(&Method::MonteCarlo) && self.mc_trials < MIN_TRIALS && !self.allow_few_trials {
            return Err(SopError::Validation(format!(
                "Monte Carlo with {} trials is below {MIN_TRIALS}; set allow_few_trials to override",
                self.mc_trials
            )));
        }
        // Config files store integers as TOML i64.
        if i64::try_from(self.seed).is_err() || i64::try_from(self.mc_trials).is_err() {
            return Err(SopError::Validation(format!("seed and trials must not exceed {}", i64::MAX)));
        }
        let xs = self.range.values()?;
        if self.variable == SweepVariable::N && xs.iter().any(|&x| x < 1.0 || x.fract() != 0.0) {
            return Err(SopError::Validation("N sweep values must be positive integers".into()));
        }
        if self.variable != SweepVariable::PowerDb && !self.power_db.is_finite() {
            return Err(SopError::Validation("power_db must be finite".into()));
        }
        Ok(())
    }

    /// Scenario and linear P/N0 at one sweep value.
    pub fn point(&self, x: f64) -> (Scenario, f64) {
        let mut s = self.scenario.clone();
        let db = match self.variable {
            SweepVariable::PowerDb => x,
            SweepVariable::N => {
                s.n = x as u32;
                self.power_db
            }
            SweepVariable::DeltaSe => {
                s.delta_se = x;
                self.power_db
            }
        };
        let p = s.p_over_n0(db);
        (s, p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub sop: f64,
    pub ci: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SopCurve {
    pub scheme: Scheme,
    pub method: Method,
    pub variable: SweepVariable,
    pub points: Vec<CurvePoint>,
    pub seed: u64,
    pub scenario_hash: String,
}

impl SopCurve {
    pub fn sops(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.sop).collect()
    }
}

/// FNV-1a of the resolved scenario's TOML form, as 16 hex digits.
pub fn scenario_hash(s: &Scenario) -> String {
    let text = toml::to_string(s).expect("scenario serializes");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

fn analytic_point(s: &Scenario, p: f64, scheme: Scheme, method: Method) -> Result<f64> {
    match (scheme, method) {
        (Scheme::RelayDL | Scheme::RelayNDL, _) => {
            let rb = RelayBudget::new(s, p)?;
            let direct = scheme == Scheme::RelayDL;
            match method {
                Method::Quadrature => sop_relay_quadrature(&rb, s.m, s.l, direct),
                _ => sop_relay(&rb, s.m, s.l, direct),
            }
        }
        (_, Method::Asymptotic) => Ok(floor_for(s, scheme)?.floor),
        _ => evaluate(&SopQuery { scenario: s, p_over_n0: p, scheme, method }),
    }
}

fn mc_point(x: f64, b: &TrialBatch) -> CurvePoint {
    CurvePoint { x, sop: b.estimate(), ci: Some(b.wilson95()) }
}

/// Monte Carlo curves for all schemes, `[scheme][point]`.
fn monte_carlo(
    spec: &SweepSpec,
    xs: &[f64],
    progress: Option<&(dyn Fn(u64, u64) + Sync)>,
) -> Result<Vec<Vec<CurvePoint>>> {
    let ris: Vec<Scheme> = spec.schemes.iter().copied().filter(|s| !s.is_relay()).collect();
    let opts =
        McOptions { noma: spec.noma, progress, ..McOptions::new(spec.mc_trials, spec.seed, ChannelMode::ExactProduct) };
    let mut ris_pts = vec![Vec::new(); ris.len()];
    let mut relay_pts = [Vec::new(), Vec::new()];
    let any_relay = spec.schemes.iter().any(|s| s.is_relay());
    // A power sweep keeps the scenario fixed, so all points share one pass.
    let groups: Vec<(Scenario, Vec<(f64, f64)>)> = match spec.variable {
        SweepVariable::PowerDb => {
            let s = spec.scenario.clone();
            let pts = xs.iter().map(|&x| (x, spec.point(x).1)).collect();
            vec![(s, pts)]
        }
        _ => xs
            .iter()
            .map(|&x| {
                let (s, p) = spec.point(x);
                (s, vec![(x, p)])
            })
            .collect(),
    };
    for (s, pts) in &groups {
        let ps: Vec<f64> = pts.iter().map(|p| p.1).collect();
        if !ris.is_empty() {
            let batches = simulate_points(s, &ps, &ris, &opts)?;
            for (dst, row) in ris_pts.iter_mut().zip(&batches) {
                dst.extend(pts.iter().zip(row).map(|((x, _), b)| mc_point(*x, b)));
            }
        }
        if any_relay {
            let (dl, ndl) = simulate_relay_points(s, &ps, spec.mc_trials, spec.seed)?;
            relay_pts[0].extend(pts.iter().zip(&dl).map(|((x, _), b)| mc_point(*x, b)));
            relay_pts[1].extend(pts.iter().zip(&ndl).map(|((x, _), b)| mc_point(*x, b)));
        }
    }
    let mut ris_iter = ris_pts.into_iter();
    Ok(spec
        .schemes
        .iter()
        .map(|s| match s {
            Scheme::RelayDL => relay_pts[0].clone(),
            Scheme::RelayNDL => relay_pts[1].clone(),
            _ => ris_iter.next().expect("one row per RIS scheme"),
        })
        .collect())
}

/// Runs a sweep; one curve per (scheme, method), schemes outermost.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SopCurve>> {
    run_sweep_with_progress(spec, None)
}

/// [`run_sweep`] reporting Monte Carlo progress as (completed, total) trials.
pub fn run_sweep_with_progress(
    spec: &SweepSpec,
    progress: Option<&(dyn Fn(u64, u64) + Sync)>,
) -> Result<Vec<SopCurve>> {
    spec.validate()?;
    let xs = spec.range.values()?;
    let hash = scenario_hash(&spec.scenario);
    let mc = if spec.methods.contains(&Method::MonteCarlo) { Some(monte_carlo(spec, &xs, progress)?) } else { None };
    let mut curves = Vec::new();
    for (si, &scheme) in spec.schemes.iter().enumerate() {
        for &method in &spec.methods {
            let points = if method == Method::MonteCarlo {
                mc.as_ref().expect("simulated above")[si].clone()
            } else {
                xs.par_iter()
                    .map(|&x| {
                        let (s, p) = spec.point(x);
                        Ok(CurvePoint { x, sop: analytic_point(&s, p, scheme, method)?, ci: None })
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            curves.push(SopCurve {
                scheme,
                method,
                variable: spec.variable,
                points,
                seed: spec.seed,
                scenario_hash: hash.clone(),
            });
        }
    }
    Ok(curves)
}

pub const CSV_HEADER: [&str; 9] =
    ["scheme", "method", "sweep_variable", "sweep_value", "sop", "ci_low", "ci_high", "seed", "scenario_hash"];

/// Twelve significant digits.
pub fn format_number(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn write_csv<W: Write>(curves: &[SopCurve], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for c in curves {
        for p in &c.points {
            let (lo, hi) = match p.ci {
                Some((lo, hi)) => (format_number(lo), format_number(hi)),
                None => (String::new(), String::new()),
            };
            w.write_record([
                c.scheme.name(),
                c.method.name(),
                c.variable.name(),
                &format_number(p.x),
                &format_number(p.sop),
                &lo,
                &hi,
                &c.seed.to_string(),
                &c.scenario_hash,
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(curves: &[SopCurve], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(curves, std::io::BufWriter::new(file))
}

fn csv_err(e: csv::Error) -> SopError {
    SopError::Parse(format!("csv: {e}"))
}

fn num(field: &str) -> Result<f64> {
    field.parse().map_err(|_| SopError::Parse(format!("bad number '{field}'")))
}

/// Reads curves back; consecutive rows with equal labels form one curve.
pub fn parse_csv<R: Read>(input: R) -> Result<Vec<SopCurve>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(SopError::Parse("unexpected CSV header".into()));
    }
    let mut curves: Vec<SopCurve> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let scheme: Scheme = rec[0].parse()?;
        let method: Method = rec[1].parse()?;
        let variable: SweepVariable = rec[2].parse()?;
        let ci = match (&rec[5], &rec[6]) {
            ("", "") => None,
            (lo, hi) => Some((num(lo)?, num(hi)?)),
        };
        let point = CurvePoint { x: num(&rec[3])?, sop: num(&rec[4])?, ci };
        let seed: u64 = rec[7].parse().map_err(|_| SopError::Parse(format!("bad seed '{}'", &rec[7])))?;
        let hash = rec[8].to_string();
        match curves.last_mut() {
            Some(c)
                if c.scheme == scheme
                    && c.method == method
                    && c.variable == variable
                    && c.seed == seed
                    && c.scenario_hash == hash =>
            {
                c.points.push(point)
            }
            _ => curves.push(SopCurve { scheme, method, variable, points: vec![point], seed, scenario_hash: hash }),
        }
    }
    Ok(curves)
}

/// `[sweep]` section of a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub schemes: Vec<Scheme>,
    pub methods: Vec<Method>,
    pub power_db: f64,
}

/// `[mc]` section of a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    pub trials: u64,
    pub seed: u64,
    pub allow_few_trials: bool,
    pub noma_a_min: f64,
    pub noma_a_max: f64,
    pub noma_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Scenario,
    pub sweep: SweepSection,
    pub mc: McSection,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSpec::default().into()
    }
}

impl Default for McSection {
    fn default() -> Self {
        SweepSpec::default().into()
    }
}

impl Default for ConfigFile {
    fn default() -> Self {
        SweepSpec::default().into()
    }
}

impl From<SweepSpec> for SweepSection {
    fn from(s: SweepSpec) -> Self {
        ConfigFile::from(s).sweep
    }
}

impl From<SweepSpec> for McSection {
    fn from(s: SweepSpec) -> Self {
        ConfigFile::from(s).mc
    }
}

impl From<SweepSpec> for ConfigFile {
    fn from(s: SweepSpec) -> Self {
        ConfigFile {
            sweep: SweepSection {
                variable: s.variable,
                start: s.range.start,
                stop: s.range.stop,
                step: s.range.step,
                schemes: s.schemes,
                methods: s.methods,
                power_db: s.power_db,
            },
            mc: McSection {
                trials: s.mc_trials,
                seed: s.seed,
                allow_few_trials: s.allow_few_trials,
                noma_a_min: s.noma.a_min,
                noma_a_max: s.noma.a_max,
                noma_step: s.noma.step,
            },
            scenario: s.scenario,
        }
    }
}

impl From<ConfigFile> for SweepSpec {
    fn from(c: ConfigFile) -> Self {
        SweepSpec {
            scenario: c.scenario,
            variable: c.sweep.variable,
            range: SweepRange { start: c.sweep.start, stop: c.sweep.stop, step: c.sweep.step },
            schemes: c.sweep.schemes,
            methods: c.sweep.methods,
            mc_trials: c.mc.trials,
            seed: c.mc.seed,
            allow_few_trials: c.mc.allow_few_trials,
            power_db: c.sweep.power_db,
            noma: NomaConfig { a_min: c.mc.noma_a_min, a_max: c.mc.noma_a_max, step: c.mc.noma_step },
        }
    }
}

/// Parses a config file. Unset keys take their defaults; BestPair requires
/// `K` to be given explicitly.
pub fn load_config(text: &str) -> Result<SweepSpec> {
    let table: toml::Table = toml::from_str(text).map_err(|e| SopError::Parse(e.to_string()))?;
    let cfg: ConfigFile = table.clone().try_into().map_err(|e: toml::de::Error| SopError::Parse(e.to_string()))?;
    let has_k = table.get("scenario").and_then(|s| s.as_table()).is_some_and(|s| s.contains_key("K"));
    if cfg.sweep.schemes.contains(&Scheme::BestPair) && !has_k {
        return Err(SopError::Validation("BestPair needs K in [scenario]".into()));
    }
    Ok(cfg.into())
}

/// Fully resolved config, defaults expanded.
pub fn resolved_config(spec: &SweepSpec) -> String {
    toml::to_string(&ConfigFile::from(spec.clone())).expect("config serializes")
}

/// Named sweep of a figure preset.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureSweep {
    pub label: String,
    pub spec: SweepSpec,
}

fn fig4_scenario(f: f64) -> Scenario {
    Scenario {
        f,
        m: 10,
        l: 3,
        delta_sr: 40.0,
        delta_su: 200.0,
        delta_se: 125.0,
        delta_rs: 30.0,
        delta_ru: 30.0,
        delta_re: 30.0,
        upsilon: 3.0,
        ..Scenario::default()
    }
}

/// Scenario of the δ_SE sweep. δ_SU is not part of that setup; 200 m is assumed.
pub fn fig5_scenario() -> Scenario {
    Scenario {
        f: 2e9,
        n: 64,
        m: 10,
        l: 3,
        delta_sr: 50.0,
        delta_rs: 70.0,
        delta_ru: 70.0,
        delta_re: 20.0,
        delta_su: 200.0,
        upsilon: 3.0,
        ..Scenario::default()
    }
}

/// Sweeps reproducing figures 2 to 5.
pub fn figure_preset(fig: u32, trials: u64, seed: u64) -> Result<Vec<FigureSweep>> {
    let base = SweepSpec { mc_trials: trials, seed, ..SweepSpec::default() };
    let both = vec![Method::ClosedForm, Method::MonteCarlo];
    let sweep = |label: String, spec: SweepSpec| FigureSweep { label, spec };
    let out = match fig {
        2 => {
            let mut v = Vec::new();
            for n in [512, 1024] {
                let scenario = Scenario { n, ..Scenario::default() };
                v.push(sweep(
                    format!("N={n}"),
                    SweepSpec {
                        scenario,
                        schemes: vec![Scheme::SS, Scheme::OS],
                        methods: both.clone(),
                        ..base.clone()
                    },
                ));
            }
            let me = Scenario { m: 1, ..Scenario::default() };
            v.push(sweep(
                "ME".into(),
                SweepSpec {
                    scenario: me.clone(),
                    schemes: vec![Scheme::SingleUser],
                    methods: both.clone(),
                    ..base.clone()
                },
            ));
            v.push(sweep(
                "SE".into(),
                SweepSpec {
                    scenario: Scenario { l: 1, ..me },
                    schemes: vec![Scheme::SingleUser],
                    methods: both,
                    ..base.clone()
                },
            ));
            v
        }
        3 => [512, 1024]
            .into_iter()
            .map(|n| {
                sweep(
                    format!("N={n}"),
                    SweepSpec {
                        scenario: Scenario { n, ..Scenario::default() },
                        schemes: vec![Scheme::SS, Scheme::OS, Scheme::NOMA],
                        methods: vec![Method::MonteCarlo],
                        // NOMA only separates from SS below about 40 dB.
                        range: SweepRange { start: 0.0, stop: 40.0, step: 2.0 },
                        ..base.clone()
                    },
                )
            })
            .collect(),
        4 => [1e9, 2e9]
            .into_iter()
            .map(|f| {
                sweep(
                    format!("f={}GHz", f / 1e9),
                    SweepSpec {
                        scenario: fig4_scenario(f),
                        variable: SweepVariable::N,
                        range: SweepRange { start: 4.0, stop: 200.0, step: 4.0 },
                        schemes: vec![Scheme::SS, Scheme::OS, Scheme::RelayDL, Scheme::RelayNDL],
                        methods: vec![Method::ClosedForm],
                        power_db: 20.0,
                        ..base.clone()
                    },
                )
            })
            .collect(),
        5 => vec![sweep(
            "delta_SE".into(),
            SweepSpec {
                scenario: fig5_scenario(),
                variable: SweepVariable::DeltaSe,
                range: SweepRange { start: 10.0, stop: 150.0, step: 5.0 },
                schemes: vec![Scheme::SingleUser, Scheme::SS, Scheme::OS, Scheme::RelayDL, Scheme::RelayNDL],
                methods: vec![Method::ClosedForm],
                power_db: 20.0,
                ..base
            },
        )],
        other => return Err(SopError::Validation(format!("no preset for figure {other}; choose 2, 3, 4 or 5"))),
    };
    Ok(out)
}

/// Scenario of the RIS-versus-relay comparison at carrier `f`.
pub fn crossover_scenario(f: f64) -> Scenario {
    fig4_scenario(f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverRow {
    pub f: f64,
    pub n: Option<u32>,
    pub ris_sop: f64,
    pub relay_sop: f64,
}

/// Crossover element count at each carrier frequency.
pub fn report_crossover(
    s: &Scenario,
    ris_scheme: Scheme,
    relay_scheme: Scheme,
    f_list: &[f64],
    power_db: f64,
) -> Result<Vec<CrossoverRow>> {
    f_list
        .par_iter()
        .map(|&f| {
            let t = Scenario { f, ..s.clone() };
            let c = crossover_n(&t, t.p_over_n0(power_db), ris_scheme, relay_scheme)?;
            Ok(CrossoverRow { f, n: c.n, ris_sop: c.ris_sop, relay_sop: c.relay_sop })
        })
        .collect()
}

/// Crossover table as CSV; an empty `n` means no crossover up to the search limit.
pub fn write_crossover_csv<W: Write>(rows: &[CrossoverRow], ris: Scheme, relay: Scheme, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["f_hz", "ris_scheme", "relay_scheme", "n_star", "ris_sop", "relay_sop"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            format_number(r.f),
            ris.name().to_string(),
            relay.name().to_string(),
            r.n.map(|n| n.to_string()).unwrap_or_default(),
            format_number(r.ris_sop),
            format_number(r.relay_sop),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_values_inclusive() {
        let r = SweepRange { start: 0.0, stop: 1.0, step: 0.25 };
        assert_eq!(r.values().unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(SweepRange { start: 1.0, stop: 0.0, step: 1.0 }.values().is_err());
        assert!(SweepRange { start: 0.0, stop: 1.0, step: 0.0 }.values().is_err());
    }

    #[test]
    fn validation_rules() {
        let ok = SweepSpec::default();
        assert!(ok.validate().is_ok());
        assert!(SweepSpec { schemes: vec![], ..ok.clone() }.validate().is_err());
        let noma_cf = SweepSpec { schemes: vec![Scheme::NOMA], methods: vec![Method::ClosedForm], ..ok.clone() };
        assert!(noma_cf.validate().is_err());
        let few = SweepSpec { methods: vec![Method::MonteCarlo], mc_trials: 10, ..ok.clone() };
        assert!(few.validate().is_err());
        assert!(SweepSpec { allow_few_trials: true, ..few }.validate().is_ok());
        let relay_asym = SweepSpec { schemes: vec![Scheme::RelayDL], methods: vec![Method::Asymptotic], ..ok };
        assert!(relay_asym.validate().is_err());
    }

    #[test]
    fn best_pair_requires_explicit_k() {
        let text = "[sweep]\nschemes = [\"BestPair\"]\n";
        assert!(load_config(text).is_err());
        let text = "[scenario]\nK = 2\n[sweep]\nschemes = [\"BestPair\"]\n";
        assert_eq!(load_config(text).unwrap().scenario.k, 2);
    }

    #[test]
    fn config_round_trip() {
        let spec = SweepSpec { seed: 9, power_db: 13.0, ..SweepSpec::default() };
        assert_eq!(load_config(&resolved_config(&spec)).unwrap(), spec);
        assert!(load_config("[scenario]\nbogus = 1\n").is_err());
    }

    #[test]
    fn hash_tracks_scenario() {
        let a = Scenario::default();
        assert_eq!(scenario_hash(&a), scenario_hash(&a.clone()));
        assert_ne!(scenario_hash(&a), scenario_hash(&Scenario { n: 1024, ..a }));
    }

    #[test]
    fn presets_validate() {
        for fig in 2..=5 {
            for f in figure_preset(fig, 10_000, 1).unwrap() {
                f.spec.validate().unwrap();
            }
        }
        assert!(figure_preset(6, 10_000, 1).is_err());
    }
}
