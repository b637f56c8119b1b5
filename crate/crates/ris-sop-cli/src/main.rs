//! Command-line sweep runner.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use ris_sop::experiments::{
    crossover_scenario, figure_preset, load_config, report_crossover, resolved_config, run_sweep_with_progress,
    scenario_hash, write_crossover_csv, write_csv, ConfigFile, FigureSweep, SweepSpec,
};
use ris_sop::{Scheme, SopCurve};

#[derive(Parser)]
#[command(name = "ris-sop", version, about = "Secrecy outage probability sweeps for RIS-aided wiretap systems")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep from a config file or a figure preset and write CSV.
    Sweep(SweepArgs),
    /// Re-run every sweep recorded in a metadata file.
    Rerun {
        meta: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the smallest RIS element count that beats the relay.
    Crossover(CrossoverArgs),
    /// Print the fully resolved config of a sweep without running it.
    ShowConfig(SourceArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// TOML file with [scenario], [sweep] and [mc] sections.
    #[arg(long, conflicts_with = "figure")]
    config: Option<PathBuf>,
    /// Preset reproducing one of figures 2 to 5.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=5))]
    figure: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Accept Monte Carlo runs below 1000 trials.
    #[arg(long)]
    allow_few_trials: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Output CSV path (stdout if absent); metadata goes to `<out>.meta.toml`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CrossoverArgs {
    /// Config whose [scenario] is used; the RIS-versus-relay setup otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "SS")]
    ris: Scheme,
    #[arg(long, default_value = "RelayDL")]
    relay: Scheme,
    /// Carrier frequencies in Hz.
    #[arg(long = "freq", default_values_t = vec![1e9, 2e9])]
    freqs: Vec<f64>,
    /// Transmit power in dB.
    #[arg(long, default_value_t = 20.0)]
    power_db: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Sidecar written next to each CSV.
#[derive(Serialize, Deserialize)]
struct Metadata {
    generated_unix: u64,
    version: String,
    runs: Vec<RunRecord>,
}

#[derive(Serialize, Deserialize)]
struct RunRecord {
    label: String,
    scenario_hash: String,
    config: ConfigFile,
}

fn resolve(src: &SourceArgs) -> Result<Vec<FigureSweep>> {
    let mut sweeps = match (src.figure, &src.config) {
        (Some(fig), _) => {
            let d = SweepSpec::default();
            figure_preset(fig, src.trials.unwrap_or(d.mc_trials), src.seed.unwrap_or(d.seed))?
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            vec![FigureSweep { label: "config".into(), spec: load_config(&text)? }]
        }
        (None, None) => bail!("give --config <file> or --figure <2..5>"),
    };
    for s in &mut sweeps {
        if let Some(seed) = src.seed {
            s.spec.seed = seed;
        }
        if let Some(t) = src.trials {
            s.spec.mc_trials = t;
        }
        s.spec.allow_few_trials |= src.allow_few_trials;
    }
    // Reject bad specs before any of them starts computing.
    for s in &sweeps {
        s.spec.validate().with_context(|| format!("sweep '{}'", s.label))?;
    }
    Ok(sweeps)
}

fn run_all(sweeps: &[FigureSweep], quiet: bool) -> Result<Vec<SopCurve>> {
    let mut curves = Vec::new();
    for s in sweeps {
        let last = AtomicU64::new(0);
        let report = |done: u64, total: u64| {
            let pct = done * 100 / total;
            if pct / 10 > last.fetch_max(pct / 10, Ordering::Relaxed) {
                eprintln!("[{}] Monte Carlo {pct}% ({done}/{total} trials)", s.label);
            }
        };
        if !quiet {
            eprintln!("[{}] running", s.label);
        }
        let progress: Option<&(dyn Fn(u64, u64) + Sync)> = if quiet { None } else { Some(&report) };
        curves.extend(run_sweep_with_progress(&s.spec, progress).with_context(|| format!("sweep '{}'", s.label))?);
    }
    Ok(curves)
}

fn metadata(sweeps: &[FigureSweep]) -> Metadata {
    let generated_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Metadata {
        generated_unix,
        version: env!("CARGO_PKG_VERSION").to_string(),
        runs: sweeps
            .iter()
            .map(|s| RunRecord {
                label: s.label.clone(),
                scenario_hash: scenario_hash(&s.spec.scenario),
                config: ConfigFile::from(s.spec.clone()),
            })
            .collect(),
    }
}

fn meta_path(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".meta.toml");
    PathBuf::from(p)
}

fn write_outputs(sweeps: &[FigureSweep], curves: &[SopCurve], out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(curves, io::BufWriter::new(f))?;
            let meta = toml::to_string(&metadata(sweeps))?;
            fs::write(meta_path(path), meta)?;
        }
        None => write_csv(curves, io::stdout().lock())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(w) = cli.workers {
        if w == 0 {
            bail!("--workers must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global()?;
    }
    match cli.command {
        Command::Sweep(a) => {
            let sweeps = resolve(&a.source)?;
            let curves = run_all(&sweeps, cli.quiet)?;
            write_outputs(&sweeps, &curves, a.out.as_deref())
        }
        Command::Rerun { meta, out } => {
            let text = fs::read_to_string(&meta).with_context(|| format!("reading {}", meta.display()))?;
            let m: Metadata = toml::from_str(&text).context("parsing metadata")?;
            let sweeps: Vec<FigureSweep> =
                m.runs.into_iter().map(|r| FigureSweep { label: r.label, spec: r.config.into() }).collect();
            for s in &sweeps {
                s.spec.validate()?;
            }
            let curves = run_all(&sweeps, cli.quiet)?;
            write_outputs(&sweeps, &curves, out.as_deref())
        }
        Command::Crossover(a) => {
            let base = match &a.config {
                Some(p) => load_config(&fs::read_to_string(p)?)?.scenario,
                None => crossover_scenario(1e9),
            };
            let rows = report_crossover(&base, a.ris, a.relay, &a.freqs, a.power_db)?;
            match &a.out {
                Some(p) => write_crossover_csv(&rows, a.ris, a.relay, fs::File::create(p)?)?,
                None => write_crossover_csv(&rows, a.ris, a.relay, io::stdout().lock())?,
            }
            Ok(())
        }
        Command::ShowConfig(src) => {
            let mut out = io::stdout().lock();
            for s in resolve(&src)? {
                writeln!(out, "# {}\n{}", s.label, resolved_config(&s.spec))?;
            }
            Ok(())
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
