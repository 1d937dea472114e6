//! Ensemble experiments: rounds-to-target sweeps, summaries and scaling fits.
//!
//! An output directory holds `records.jsonl` (one [`ExperimentRecord`] per
//! instance and variant, sorted), `summary.csv`, `manifest.json` and a
//! `timings.jsonl` sidecar with wall-clock costs.

mod config;
mod fit;
mod io;
mod records;
mod stats;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{EnsembleMember, ExperimentConfig, KRule, SCHEMA_VERSION};
pub use fit::{fit_scaling, fit_weights, weighted_residual, Ansatz, ScalingFit, MULTI_STARTS, STDDEV_FLOOR};
pub use io::{
    read_manifest, read_records, read_summary, write_records, write_summary, Manifest, SummaryRow, TimingEntry,
    MANIFEST_FILE, RECORDS_FILE, SUMMARY_FILE, TIMINGS_FILE,
};
pub use records::{rounds_to_target, ExperimentRecord, RoundsToTarget, TargetOutcome, TargetRun};
pub use stats::{ensemble_stats, EnsembleStats};

use crate::error::{Error, Result};
use crate::graph::{ProblemInstance, ProblemKind};
use crate::qaoa::{QaoaEvaluator, Variant};
use crate::subspace::binomial;
use crate::tuner::{AngleStrategy, InductiveTuner, TunerConfig};

/// Result of [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub records: Vec<ExperimentRecord>,
    pub summary: Vec<SummaryRow>,
    pub computed: usize,
    pub skipped: usize,
}

type RecordKey = (ProblemKind, usize, usize, Variant);

/// Runs every (instance, variant) pair of `config` not already present in
/// `out_dir`, on a pool of `jobs` threads.
///
/// Finished records are appended as they complete, so an interrupted run
/// keeps its progress; the final files are rewritten in sorted order.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path, jobs: usize) -> Result<ExperimentOutcome> {
    config.validate()?;
    io::ensure_dir(out_dir)?;
    let hash = config.hash();
    let records_path = out_dir.join(RECORDS_FILE);
    let timings_path = out_dir.join(TIMINGS_FILE);
    let previous = read_manifest(out_dir)?;
    if let Some(m) = &previous {
        if m.config_hash != hash {
            return Err(Error::ConfigMismatch(format!(
                "{} was written by config {}, this config hashes to {hash}",
                out_dir.display(),
                m.config_hash
            )));
        }
    }
    let existing = read_records(&records_path)?;
    if let Some(r) = existing.iter().find(|r| r.config_hash != hash) {
        return Err(Error::ConfigMismatch(format!(
            "{} holds records from config {}",
            records_path.display(),
            r.config_hash
        )));
    }
    let done: BTreeSet<RecordKey> = existing.iter().map(|r| (r.kind, r.n, r.instance_index, r.variant)).collect();
    // rewrite so a truncated trailing line does not precede new appends
    write_records(&records_path, &existing)?;

    let mut tasks = Vec::new();
    for &kind in &config.kinds {
        for &n in &config.n_values {
            for member in config.ensemble(kind, n)? {
                for &variant in &config.variants {
                    if !done.contains(&(kind, n, member.index, variant)) {
                        tasks.push((member.clone(), variant));
                    }
                }
            }
        }
    }
    let computed = tasks.len();
    let fresh = Mutex::new(Vec::with_capacity(computed));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        tasks.par_iter().try_for_each(|(member, variant)| -> Result<()> {
            let (record, timing) = run_member(config, &hash, member, *variant)?;
            let mut fresh = fresh.lock().expect("no panics while holding the lock");
            io::append_line(&records_path, &record)?;
            io::append_line(&timings_path, &timing)?;
            fresh.push(record);
            Ok(())
        })
    })?;

    let mut records = existing;
    records.extend(fresh.into_inner().expect("lock not poisoned"));
    records.sort_by_key(|r| r.sort_key());
    write_records(&records_path, &records)?;
    let summary = summarize(&records);
    write_summary(&out_dir.join(SUMMARY_FILE), &summary)?;
    let now = io::unix_now();
    io::write_manifest(
        out_dir,
        &Manifest {
            config_hash: hash,
            master_seed: config.master_seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            created_unix: previous.map_or(now, |m| m.created_unix),
            updated_unix: now,
            records: records.len(),
            config: config.clone(),
        },
    )?;
    Ok(ExperimentOutcome {
        records,
        summary,
        computed,
        skipped: done.len(),
    })
}

fn run_member(
    config: &ExperimentConfig,
    hash: &str,
    member: &EnsembleMember,
    variant: Variant,
) -> Result<(ExperimentRecord, TimingEntry)> {
    let inst = &member.instance;
    let p_cap = config.p_cap_for(inst.n(), inst.k());
    let run = rounds_to_target(inst, variant, &config.targets, config.angle_strategy, &config.tuner, p_cap)?;
    let c_max = crate::subspace::build_cost_vector(inst, &crate::subspace::SubspaceIndex::new(inst.n(), inst.k())?)?.c_max();
    let record = ExperimentRecord {
        config_hash: hash.to_string(),
        master_seed: config.master_seed,
        kind: inst.kind(),
        n: inst.n(),
        k: inst.k(),
        instance_index: member.index,
        seed: inst.seed(),
        variant,
        strategy: config.angle_strategy,
        p_cap,
        c_max,
        rounds: run.rounds,
        rounds_to_target: run.outcomes,
    };
    let timing = TimingEntry {
        kind: inst.kind(),
        n: inst.n(),
        instance_index: member.index,
        variant,
        seconds_per_round: run.seconds,
    };
    Ok((record, timing))
}

/// Per `(kind, variant, target, n)` statistics of rounds-to-target.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(ProblemKind, Variant, u64, usize), (Vec<f64>, usize, &ExperimentRecord)> = BTreeMap::new();
    for r in records {
        for o in &r.rounds_to_target {
            // order targets descending, matching the config default
            let key = (r.kind, r.variant, u64::MAX - o.target.to_bits(), r.n);
            let cell = cells.entry(key).or_insert_with(|| (Vec::new(), 0, r));
            match o.rounds.reached() {
                Some(p) => cell.0.push(p as f64),
                None => cell.1 += 1,
            }
        }
    }
    cells
        .into_iter()
        .map(|((kind, variant, t, n), (values, capped, first))| {
            let (mean, stddev) = match ensemble_stats(&values) {
                Ok(s) => (s.mean, s.stddev),
                Err(_) => (values.first().copied().unwrap_or(f64::NAN), f64::NAN),
            };
            SummaryRow {
                kind,
                variant,
                target: f64::from_bits(u64::MAX - t),
                n,
                k: first.k,
                mean,
                stddev,
                count: values.len(),
                capped,
                config_hash: first.config_hash.clone(),
                master_seed: first.master_seed,
            }
        })
        .collect()
}

/// Independent variable of a scaling fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XAxis {
    /// Number of vertices.
    N,
    /// Feasible-subspace dimension `C(n, k)`.
    Dim,
}

impl XAxis {
    pub fn value(self, n: usize, k: usize) -> f64 {
        match self {
            XAxis::N => n as f64,
            XAxis::Dim => binomial(n as u64, k as u64).map_or(f64::INFINITY, |d| d as f64),
        }
    }
}

/// A fit together with the data selection and provenance it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub config_hash: String,
    pub master_seed: u64,
    pub kind: ProblemKind,
    pub variant: Variant,
    pub target: f64,
    pub x_axis: XAxis,
    pub fit: ScalingFit,
}

/// Fits one summary series; every row must come from the same config.
pub fn fit_summary(
    rows: &[SummaryRow],
    kind: ProblemKind,
    variant: Variant,
    target: f64,
    ansatz: Ansatz,
    x_axis: XAxis,
) -> Result<FitReport> {
    let Some(first) = rows.first() else {
        return Err(Error::InsufficientData("empty summary".into()));
    };
    if let Some(r) = rows.iter().find(|r| r.config_hash != first.config_hash || r.master_seed != first.master_seed) {
        return Err(Error::ConfigMismatch(format!(
            "summary mixes config {} (seed {}) with {} (seed {})",
            first.config_hash, first.master_seed, r.config_hash, r.master_seed
        )));
    }
    let series: Vec<&SummaryRow> = rows
        .iter()
        .filter(|r| r.kind == kind && r.variant == variant && r.target == target && r.mean.is_finite())
        .collect();
    let xs: Vec<f64> = series.iter().map(|r| x_axis.value(r.n, r.k)).collect();
    let means: Vec<f64> = series.iter().map(|r| r.mean).collect();
    let sds: Vec<f64> = series.iter().map(|r| if r.stddev.is_finite() { r.stddev } else { 0.0 }).collect();
    Ok(FitReport {
        config_hash: first.config_hash.clone(),
        master_seed: first.master_seed,
        kind,
        variant,
        target,
        x_axis,
        fit: fit_scaling(&xs, &means, &sds, ansatz)?,
    })
}

/// Mean approximation ratio per variant and round over an instance set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTable {
    pub variants: Vec<Variant>,
    /// `mean_ratio[v][p]` for `p = 0..=p_max`.
    pub mean_ratio: Vec<Vec<f64>>,
    pub instances: usize,
}

/// Tunes every variant on every instance to exactly `p_max` rounds.
pub fn round_by_round_table(
    instances: &[ProblemInstance],
    variants: &[Variant],
    p_max: usize,
    strategy: AngleStrategy,
    tuner: &TunerConfig,
) -> Result<RoundTable> {
    if instances.is_empty() {
        return Err(Error::InsufficientData("no instances".into()));
    }
    let per_pair: Vec<Vec<f64>> = variants
        .iter()
        .flat_map(|&v| instances.iter().map(move |inst| (v, inst)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(v, inst)| -> Result<Vec<f64>> {
            let ev = QaoaEvaluator::new(inst, v.mixer)?;
            let mut t = InductiveTuner::new(ev, v, strategy, tuner.clone())?;
            for _ in 0..p_max {
                t.next_round()?;
            }
            Ok(t.rounds().iter().map(|r| r.approx_ratio).collect())
        })
        .collect::<Result<_>>()?;
    let mean_ratio = per_pair
        .chunks(instances.len())
        .map(|chunk| {
            (0..=p_max)
                .map(|p| chunk.iter().map(|r| r[p]).sum::<f64>() / chunk.len() as f64)
                .collect()
        })
        .collect();
    Ok(RoundTable {
        variants: variants.to_vec(),
        mean_ratio,
        instances: instances.len(),
    })
}
