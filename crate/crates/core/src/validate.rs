//! Self-check of the subspace simulator against the full-space oracle.

use std::f64::consts::TAU;
use std::fmt;

use rand::Rng as _;
use serde::Serialize;

use crate::error::Result;
use crate::graph::{generate_erdos_renyi, ProblemInstance, ProblemKind};
use crate::oracle::{amplitude_amplification_probability, embed, full_space_run, max_deviation_up_to_phase};
use crate::qaoa::{grover_th_schedule, AngleSchedule, QaoaEvaluator, SeparatorKind, Variant};
use crate::rng::{derive_seed, seeded_rng};

pub const AMPLITUDE_TOLERANCE: f64 = 1e-10;
pub const NORM_TOLERANCE: f64 = 1e-12;
pub const GROVER_LAW_TOLERANCE: f64 = 1e-9;

/// Deliberate corruption of the subspace simulator, for negative controls.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    None,
    /// Runs every mixer as `exp(+i beta H_M)`.
    FlipMixerSign,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationCheck {
    pub check: &'static str,
    pub variant: Variant,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<20} {:<11} {:>6} {:>13} {:>10}  result",
            "check", "variant", "cases", "max_dev", "tolerance"
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<20} {:<11} {:>6} {:>13.3e} {:>10.0e}  {}",
                c.check,
                c.variant.to_string(),
                c.cases,
                c.max_deviation,
                c.tolerance,
                if c.passed { "PASS" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

struct Tally {
    cases: usize,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Tally { cases: 0, worst: 0.0 }
    }

    fn add(&mut self, dev: f64) {
        self.cases += 1;
        // NaN must fail the check, not vanish in max()
        self.worst = if dev.is_nan() { f64::INFINITY } else { self.worst.max(dev) };
    }

    fn finish(self, check: &'static str, variant: Variant, tolerance: f64) -> ValidationCheck {
        ValidationCheck {
            check,
            variant,
            cases: self.cases,
            max_deviation: self.worst,
            tolerance,
            passed: self.cases > 0 && self.worst <= tolerance,
        }
    }
}

/// Oracle agreement, normalisation, leakage and (for Grover-Th) the
/// amplitude-amplification law on `draws` random cases per variant and `n`.
pub fn run_validation(ns: &[usize], draws: usize, seed: u64) -> Result<ValidationReport> {
    run_validation_with_fault(ns, draws, seed, Fault::None)
}

#[doc(hidden)]
pub fn run_validation_with_fault(ns: &[usize], draws: usize, seed: u64, fault: Fault) -> Result<ValidationReport> {
    let mut checks = Vec::new();
    for (vi, variant) in Variant::ALL.into_iter().enumerate() {
        let mut agreement = Tally::new();
        let mut norm = Tally::new();
        let mut leakage = Tally::new();
        let mut grover = Tally::new();
        for &n in ns {
            for d in 0..draws {
                let mut rng = seeded_rng(derive_seed(seed, &[vi as u64, n as u64, d as u64]));
                let kind = ProblemKind::ALL[d % 3];
                let graph = generate_erdos_renyi(n, 0.5, rng.random())?;
                let inst = ProblemInstance::new(graph, kind, n / 2)?;
                let ev = QaoaEvaluator::new(&inst, variant.mixer)?;
                let threshold = (variant.separator == SeparatorKind::Threshold)
                    .then(|| rng.random_range(-1..=ev.cost().c_max()));
                let p = rng.random_range(1..=3);
                let betas: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..TAU)).collect();
                let gammas: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..TAU)).collect();
                let schedule = AngleSchedule::new(betas, gammas)?;
                let sep = variant.phase_separator(threshold)?;
                let state = ev.evolve(sep, &faulty(&schedule, fault));
                let reference = full_space_run(&inst, variant, &schedule, threshold)?;
                let embedded = embed(n, n / 2, state.amplitudes())?;
                agreement.add(max_deviation_up_to_phase(&embedded.amplitudes, &reference.amplitudes));
                norm.add((state.norm_sqr() - 1.0).abs());
                leakage.add(reference.leakage(n / 2));

                if variant == Variant::GROVER_TH {
                    let th = threshold.expect("threshold variant");
                    let marked = ev.cost().count_above(th) as u64;
                    for p in [0, 1, 2, 5] {
                        let pi_schedule = grover_th_schedule(p, p)?;
                        let s = ev.evolve(sep, &faulty(&pi_schedule, fault));
                        let prob: f64 = s
                            .amplitudes()
                            .iter()
                            .zip(ev.cost().values())
                            .filter(|(_, &c)| c > th)
                            .map(|(a, _)| a.norm_sqr())
                            .sum();
                        let law = amplitude_amplification_probability(ev.dim() as u64, marked, p);
                        grover.add((prob - law).abs());
                    }
                }
            }
        }
        checks.push(agreement.finish("oracle-agreement", variant, AMPLITUDE_TOLERANCE));
        checks.push(norm.finish("normalisation", variant, NORM_TOLERANCE));
        checks.push(leakage.finish("weight-leakage", variant, NORM_TOLERANCE));
        if variant == Variant::GROVER_TH {
            checks.push(grover.finish("grover-law", variant, GROVER_LAW_TOLERANCE));
        }
    }
    Ok(ValidationReport { checks })
}

fn faulty(schedule: &AngleSchedule, fault: Fault) -> AngleSchedule {
    match fault {
        Fault::None => schedule.clone(),
        Fault::FlipMixerSign => {
            let betas = schedule.betas().iter().map(|b| -b).collect();
            AngleSchedule::new(betas, schedule.gammas().to_vec()).expect("same length")
        }
    }
}
