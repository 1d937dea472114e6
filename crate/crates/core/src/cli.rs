//! `qaoa-bench` command-line interface.
//!
//! Exit codes: 0 success, 1 failed validation, 2 malformed input, 3 a
//! dimension budget exceeded. Every flag can also be set through an
//! environment variable named `QAOA_BENCH_<FLAG>`.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{generate_erdos_renyi, ProblemInstance, ProblemKind};
use crate::harness::{
    fit_summary, read_summary, run_experiment, Ansatz, ExperimentConfig, KRule, XAxis, SUMMARY_FILE,
};
use crate::qaoa::{AngleSchedule, QaoaEvaluator, Variant};
use crate::subspace::format_bits;
use crate::tuner::{AngleStrategy, InductiveTuner, TunerConfig};
use crate::validate::{run_validation_with_fault, Fault};

#[derive(Debug, Parser)]
#[command(name = "qaoa-bench", version, about = "Hamming-weight preserving QAOA simulator and benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the instance files of an experiment config.
    GenInstances(GenArgs),
    /// Evolve one instance under a fixed angle schedule.
    Run(RunArgs),
    /// Tune one instance round by round.
    Tune(TuneArgs),
    /// Run an ensemble experiment (resumable).
    Experiment(ExperimentArgs),
    /// Fit a scaling ansatz to an experiment summary.
    Fit(FitArgs),
    /// Emit tidy CSV data and fitted-curve samples for plotting.
    PlotData(PlotArgs),
    /// Check the simulator against the full-space oracle.
    Validate(ValidateArgs),
}

/// Config-file overrides shared by the ensemble commands.
#[derive(Debug, Args, Default)]
pub struct Overrides {
    /// Experiment config (JSON).
    #[arg(long, env = "QAOA_BENCH_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, env = "QAOA_BENCH_SEED")]
    pub seed: Option<u64>,
    #[arg(long, env = "QAOA_BENCH_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    /// Restrict to these variants (repeatable).
    #[arg(long, env = "QAOA_BENCH_VARIANT", value_delimiter = ',')]
    pub variant: Vec<Variant>,
    /// Target ratios (repeatable).
    #[arg(long, env = "QAOA_BENCH_TARGET", value_delimiter = ',')]
    pub target: Vec<f64>,
    /// Round cap.
    #[arg(long, env = "QAOA_BENCH_P_MAX")]
    pub p_max: Option<usize>,
    /// Restrict to these sizes (repeatable).
    #[arg(long, env = "QAOA_BENCH_N", value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Fixed subset size instead of `n / 2`.
    #[arg(long, env = "QAOA_BENCH_K")]
    pub k: Option<usize>,
    /// Restrict to these problems: densest, cover, bisection.
    #[arg(long, env = "QAOA_BENCH_KIND", value_delimiter = ',')]
    pub kind: Vec<ProblemKind>,
    #[arg(long, env = "QAOA_BENCH_INSTANCES")]
    pub instances: Option<usize>,
    #[arg(long, env = "QAOA_BENCH_STRATEGY")]
    pub strategy: Option<AngleStrategy>,
}

impl Overrides {
    fn experiment_config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::new(
                vec![ProblemKind::DensestSubgraph],
                vec![8],
                vec![Variant::GROVER_TH],
                0,
            ),
        };
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        if self.out_dir.is_some() {
            cfg.out_dir = self.out_dir.clone();
        }
        if !self.variant.is_empty() {
            cfg.variants = self.variant.clone();
        }
        if !self.target.is_empty() {
            cfg.targets = self.target.clone();
        }
        if self.p_max.is_some() {
            cfg.p_cap = self.p_max;
        }
        if !self.n.is_empty() {
            cfg.n_values = self.n.clone();
        }
        if let Some(k) = self.k {
            cfg.k_rule = KRule::Fixed(k);
        }
        if !self.kind.is_empty() {
            cfg.kinds = self.kind.clone();
        }
        if let Some(i) = self.instances {
            cfg.instances_per_n = i;
        }
        if let Some(s) = self.strategy {
            cfg.angle_strategy = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_dir(&self, cfg: &ExperimentConfig) -> Result<PathBuf> {
        cfg.out_dir
            .clone()
            .ok_or_else(|| Error::invalid("no output directory: pass --out-dir or set out_dir in the config"))
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Where a single-instance command gets its instance.
#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Instance file (JSON); otherwise a G(n, 0.5) instance is generated.
    #[arg(long, env = "QAOA_BENCH_INSTANCE")]
    pub instance: Option<PathBuf>,
    #[arg(long, env = "QAOA_BENCH_N")]
    pub n: Option<usize>,
    #[arg(long, env = "QAOA_BENCH_K")]
    pub k: Option<usize>,
    #[arg(long, env = "QAOA_BENCH_KIND", default_value = "densest")]
    pub kind: ProblemKind,
    #[arg(long, env = "QAOA_BENCH_SEED", default_value_t = 0)]
    pub seed: u64,
}

impl InstanceArgs {
    fn load(&self) -> Result<ProblemInstance> {
        if let Some(path) = &self.instance {
            return ProblemInstance::load(path);
        }
        let n = self
            .n
            .ok_or_else(|| Error::invalid("give an instance file with --instance or a size with --n"))?;
        let k = self.k.unwrap_or(n / 2);
        let graph = generate_erdos_renyi(n, 0.5, self.seed)?;
        Ok(ProblemInstance::new(graph, self.kind, k)?.with_seed(Some(self.seed)))
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, env = "QAOA_BENCH_VARIANT")]
    pub variant: Variant,
    /// Comma-separated betas; requires --gammas.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub betas: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gammas: Vec<f64>,
    /// Schedule file (JSON `{"betas": [...], "gammas": [...]}`).
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    /// Round count for a constant schedule of --beta / --gamma.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, default_value_t = PI, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = PI, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, env = "QAOA_BENCH_THRESHOLD", allow_hyphen_values = true)]
    pub threshold: Option<i64>,
    /// Write rank, bitstring, cost, probability and phase per state.
    #[arg(long)]
    pub state_csv: Option<PathBuf>,
    /// Print the result as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, env = "QAOA_BENCH_VARIANT")]
    pub variant: Variant,
    #[arg(long, env = "QAOA_BENCH_P_MAX", default_value_t = 5)]
    pub p_max: usize,
    /// Stop early once this ratio is reached.
    #[arg(long, env = "QAOA_BENCH_TARGET")]
    pub target: Option<f64>,
    #[arg(long, env = "QAOA_BENCH_STRATEGY", default_value = "gd")]
    pub strategy: AngleStrategy,
    /// Tuner settings (JSON, same keys as the experiment config's `tuner`).
    #[arg(long, env = "QAOA_BENCH_CONFIG")]
    pub config: Option<PathBuf>,
    /// Write all tuned rounds as JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub overrides: Overrides,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, env = "QAOA_BENCH_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Summary CSV, or an experiment directory containing one.
    #[arg(long, env = "QAOA_BENCH_SUMMARY")]
    pub summary: Option<PathBuf>,
    #[arg(long, env = "QAOA_BENCH_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    /// Refuse the summary unless it was produced by this config.
    #[arg(long, env = "QAOA_BENCH_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, env = "QAOA_BENCH_KIND", default_value = "densest")]
    pub kind: ProblemKind,
    #[arg(long, env = "QAOA_BENCH_VARIANT")]
    pub variant: Variant,
    #[arg(long, env = "QAOA_BENCH_TARGET", default_value_t = 0.99)]
    pub target: f64,
    #[arg(long, default_value = "power")]
    pub ansatz: Ansatz,
    #[arg(long, value_enum, default_value_t = AxisArg::N)]
    pub x_axis: AxisArg,
    /// Write the fit as JSON here as well as to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AxisArg {
    N,
    Dim,
}

impl From<AxisArg> for XAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::N => XAxis::N,
            AxisArg::Dim => XAxis::Dim,
        }
    }
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Experiment directory holding summary.csv; plot files are written there.
    #[arg(long, env = "QAOA_BENCH_OUT_DIR")]
    pub out_dir: PathBuf,
    #[arg(long, default_value = "power")]
    pub ansatz: Ansatz,
    #[arg(long, value_enum, default_value_t = AxisArg::N)]
    pub x_axis: AxisArg,
    /// Curve samples per fitted series.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 6, 8])]
    pub n: Vec<usize>,
    /// Random cases per variant and size.
    #[arg(long, default_value_t = 10)]
    pub draws: usize,
    #[arg(long, env = "QAOA_BENCH_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, hide = true)]
    pub inject_fault: Option<FaultArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FaultArg {
    FlipMixerSign,
}

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity { .. } => 3,
        _ => 2,
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::GenInstances(a) => gen_instances(&a, &mut out),
        Command::Run(a) => cmd_run(&a, &mut out),
        Command::Tune(a) => cmd_tune(&a, &mut out),
        Command::Experiment(a) => cmd_experiment(&a, &mut out),
        Command::Fit(a) => cmd_fit(&a, &mut out),
        Command::PlotData(a) => cmd_plot_data(&a, &mut out),
        Command::Validate(a) => cmd_validate(&a, &mut out),
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn gen_instances(a: &GenArgs, out: &mut impl Write) -> Result<i32> {
    let cfg = a.overrides.experiment_config()?;
    let dir = a.overrides.out_dir(&cfg)?.join("instances");
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut count = 0;
    for &kind in &cfg.kinds {
        for &n in &cfg.n_values {
            for m in cfg.ensemble(kind, n)? {
                m.instance.save(dir.join(format!("{kind}-n{n}-{:03}.json", m.index)))?;
                count += 1;
            }
        }
    }
    writeln!(out, "wrote {count} instances to {} (config {})", dir.display(), cfg.hash()).map_err(io_err)?;
    Ok(0)
}

#[derive(Debug, Serialize)]
struct RunOutput {
    variant: Variant,
    n: usize,
    k: usize,
    seed: Option<u64>,
    threshold: Option<i64>,
    p: usize,
    expectation: f64,
    approx_ratio: f64,
    per_round_ratios: Vec<f64>,
}

fn run_schedule(a: &RunArgs) -> Result<AngleSchedule> {
    if let Some(path) = &a.schedule {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        return Ok(serde_json::from_str(&text)?);
    }
    if !a.betas.is_empty() || !a.gammas.is_empty() {
        return AngleSchedule::new(a.betas.clone(), a.gammas.clone());
    }
    match a.p {
        Some(p) => Ok(AngleSchedule::constant(p, a.beta, a.gamma)),
        None => Err(Error::invalid("give angles with --betas/--gammas, --schedule or --p")),
    }
}

fn cmd_run(a: &RunArgs, out: &mut impl Write) -> Result<i32> {
    let inst = a.instance.load()?;
    let schedule = run_schedule(a)?;
    let sep = a.variant.phase_separator(a.threshold)?;
    let ev = QaoaEvaluator::new(&inst, a.variant.mixer)?;
    let result = ev.run(sep, &schedule, a.state_csv.is_some());
    if let (Some(path), Some(state)) = (&a.state_csv, &result.final_state) {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["rank", "bitstring", "cost", "probability", "phase", "seed"])?;
        let seed = inst.seed().map_or(String::new(), |s| s.to_string());
        for (r, amp) in state.amplitudes().iter().enumerate() {
            w.write_record([
                r.to_string(),
                format_bits(ev.index().states()[r], inst.n()),
                ev.cost().values()[r].to_string(),
                amp.norm_sqr().to_string(),
                amp.arg().to_string(),
                seed.clone(),
            ])?;
        }
        write_file(path, &w.into_inner().map_err(|e| Error::invalid(e.to_string()))?)?;
    }
    let report = RunOutput {
        variant: a.variant,
        n: inst.n(),
        k: inst.k(),
        seed: inst.seed(),
        threshold: a.threshold,
        p: schedule.p(),
        expectation: result.expectation,
        approx_ratio: result.approx_ratio,
        per_round_ratios: result.per_round_ratios,
    };
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?).map_err(io_err)?;
    } else {
        writeln!(out, "variant      {}", report.variant).map_err(io_err)?;
        writeln!(out, "rounds       {}", report.p).map_err(io_err)?;
        writeln!(out, "expectation  {:.12}", report.expectation).map_err(io_err)?;
        writeln!(out, "ratio        {:.12}", report.approx_ratio).map_err(io_err)?;
        let per: Vec<String> = report.per_round_ratios.iter().map(|r| format!("{r:.6}")).collect();
        writeln!(out, "per-round    {}", per.join(" ")).map_err(io_err)?;
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
struct TuneOutput<'a> {
    tuner_hash: String,
    seed: Option<u64>,
    variant: Variant,
    strategy: AngleStrategy,
    tuner: &'a TunerConfig,
    rounds: &'a [crate::tuner::TunedRound],
}

fn cmd_tune(a: &TuneArgs, out: &mut impl Write) -> Result<i32> {
    let inst = a.instance.load()?;
    let tuner_cfg: TunerConfig = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&text)?
        }
        None => TunerConfig::default(),
    };
    let ev = QaoaEvaluator::new(&inst, a.variant.mixer)?;
    let mut tuner = InductiveTuner::new(ev, a.variant, a.strategy, tuner_cfg.clone())?;
    writeln!(out, "{:>3} {:>10} {:>14} {:>10}", "p", "threshold", "expectation", "ratio").map_err(io_err)?;
    loop {
        let r = tuner.rounds().last().expect("round 0");
        let th = r.threshold.map_or("-".to_string(), |t| t.to_string());
        writeln!(out, "{:>3} {:>10} {:>14.9} {:>10.6}", r.p, th, r.expectation, r.approx_ratio).map_err(io_err)?;
        if r.p >= a.p_max || a.target.is_some_and(|t| r.approx_ratio >= t) {
            break;
        }
        tuner.next_round()?;
    }
    if let Some(path) = &a.output {
        let tuner_hash = hex::encode(Sha256::digest(serde_json::to_vec(&tuner_cfg)?));
        let doc = TuneOutput {
            tuner_hash,
            seed: inst.seed(),
            variant: a.variant,
            strategy: a.strategy,
            tuner: &tuner_cfg,
            rounds: tuner.rounds(),
        };
        write_file(path, serde_json::to_string_pretty(&doc)?.as_bytes())?;
    }
    Ok(0)
}

fn cmd_experiment(a: &ExperimentArgs, out: &mut impl Write) -> Result<i32> {
    let cfg = a.overrides.experiment_config()?;
    let dir = a.overrides.out_dir(&cfg)?;
    let jobs = a
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let outcome = run_experiment(&cfg, &dir, jobs)?;
    writeln!(
        out,
        "config {} seed {}: {} records ({} computed, {} reused) in {}",
        cfg.hash(),
        cfg.master_seed,
        outcome.records.len(),
        outcome.computed,
        outcome.skipped,
        dir.display()
    )
    .map_err(io_err)?;
    writeln!(
        out,
        "{:<10} {:<11} {:>6} {:>3} {:>8} {:>8} {:>5} {:>6}",
        "kind", "variant", "target", "n", "mean", "stddev", "count", "capped"
    )
    .map_err(io_err)?;
    for r in &outcome.summary {
        writeln!(
            out,
            "{:<10} {:<11} {:>6} {:>3} {:>8.3} {:>8.3} {:>5} {:>6}",
            r.kind.as_str(),
            r.variant.to_string(),
            r.target,
            r.n,
            r.mean,
            r.stddev,
            r.count,
            r.capped
        )
        .map_err(io_err)?;
    }
    Ok(0)
}

fn summary_path(summary: &Option<PathBuf>, out_dir: &Option<PathBuf>) -> Result<PathBuf> {
    match (summary, out_dir) {
        (Some(p), _) if p.is_dir() => Ok(p.join(SUMMARY_FILE)),
        (Some(p), _) => Ok(p.clone()),
        (None, Some(d)) => Ok(d.join(SUMMARY_FILE)),
        (None, None) => Err(Error::invalid("give --summary or --out-dir")),
    }
}

fn cmd_fit(a: &FitArgs, out: &mut impl Write) -> Result<i32> {
    let rows = read_summary(&summary_path(&a.summary, &a.out_dir)?)?;
    if let Some(path) = &a.config {
        let expected = ExperimentConfig::load(path)?.hash();
        if let Some(r) = rows.iter().find(|r| r.config_hash != expected) {
            return Err(Error::ConfigMismatch(format!(
                "summary comes from config {}, {} hashes to {expected}",
                r.config_hash,
                path.display()
            )));
        }
    }
    let report = fit_summary(&rows, a.kind, a.variant, a.target, a.ansatz, a.x_axis.into())?;
    let text = serde_json::to_string_pretty(&report)?;
    if let Some(path) = &a.output {
        write_file(path, text.as_bytes())?;
    }
    writeln!(out, "{text}").map_err(io_err)?;
    Ok(0)
}

fn cmd_plot_data(a: &PlotArgs, out: &mut impl Write) -> Result<i32> {
    let rows = read_summary(&a.out_dir.join(SUMMARY_FILE))?;
    let axis: XAxis = a.x_axis.into();
    let mut series: Vec<(ProblemKind, Variant, u64)> =
        rows.iter().map(|r| (r.kind, r.variant, r.target.to_bits())).collect();
    series.dedup();
    series.sort();
    series.dedup();
    let mut points = csv::Writer::from_writer(Vec::new());
    points.write_record([
        "kind", "variant", "target", "n", "x", "mean", "stddev", "fit_curve_value", "config_hash", "master_seed",
    ])?;
    let mut curves = csv::Writer::from_writer(Vec::new());
    curves.write_record(["kind", "variant", "target", "ansatz", "x", "value", "config_hash", "master_seed"])?;
    for &(kind, variant, t) in &series {
        let target = f64::from_bits(t);
        let fit = fit_summary(&rows, kind, variant, target, a.ansatz, axis).ok();
        let cell: Vec<_> = rows
            .iter()
            .filter(|r| r.kind == kind && r.variant == variant && r.target == target)
            .collect();
        for r in &cell {
            let x = axis.value(r.n, r.k);
            let fitted = fit.as_ref().map_or(String::new(), |f| f.fit.predict(x).to_string());
            points.write_record([
                kind.as_str().to_string(),
                variant.to_string(),
                target.to_string(),
                r.n.to_string(),
                x.to_string(),
                r.mean.to_string(),
                r.stddev.to_string(),
                fitted,
                r.config_hash.clone(),
                r.master_seed.to_string(),
            ])?;
        }
        if let Some(f) = &fit {
            let xs: Vec<f64> = cell.iter().map(|r| axis.value(r.n, r.k)).collect();
            let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
            let steps = a.samples.max(2);
            for i in 0..steps {
                let x = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
                curves.write_record([
                    kind.as_str().to_string(),
                    variant.to_string(),
                    target.to_string(),
                    a.ansatz.to_string(),
                    x.to_string(),
                    f.fit.predict(x).to_string(),
                    f.config_hash.clone(),
                    f.master_seed.to_string(),
                ])?;
            }
        }
    }
    let points_path = a.out_dir.join("plot_points.csv");
    let curves_path = a.out_dir.join("plot_curves.csv");
    write_file(&points_path, &points.into_inner().map_err(|e| Error::invalid(e.to_string()))?)?;
    write_file(&curves_path, &curves.into_inner().map_err(|e| Error::invalid(e.to_string()))?)?;
    writeln!(out, "wrote {} and {}", points_path.display(), curves_path.display()).map_err(io_err)?;
    Ok(0)
}

fn cmd_validate(a: &ValidateArgs, out: &mut impl Write) -> Result<i32> {
    if let Some(&n) = a.n.iter().find(|&&n| !(2..=8).contains(&n)) {
        return Err(Error::invalid(format!("validation sizes must lie in 2..=8, got {n}")));
    }
    let fault = match a.inject_fault {
        None => Fault::None,
        Some(FaultArg::FlipMixerSign) => Fault::FlipMixerSign,
    };
    let report = run_validation_with_fault(&a.n, a.draws, a.seed, fault)?;
    write!(out, "{report}").map_err(io_err)?;
    let ok = report.passed();
    writeln!(out, "{}", if ok { "all checks passed" } else { "VALIDATION FAILED" }).map_err(io_err)?;
    Ok(if ok { 0 } else { 1 })
}
