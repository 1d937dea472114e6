use std::time::Instant;

use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ProblemInstance, ProblemKind};
use crate::qaoa::{QaoaEvaluator, Variant};
use crate::tuner::{AngleStrategy, InductiveTuner, TunedRound, TunerConfig};

/// First round count reaching a target, or `"cap-exceeded"` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundsToTarget {
    Reached(usize),
    CapExceeded,
}

impl RoundsToTarget {
    pub fn reached(self) -> Option<usize> {
        match self {
            RoundsToTarget::Reached(p) => Some(p),
            RoundsToTarget::CapExceeded => None,
        }
    }
}

const CAP_EXCEEDED: &str = "cap-exceeded";

impl Serialize for RoundsToTarget {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RoundsToTarget::Reached(p) => s.serialize_u64(*p as u64),
            RoundsToTarget::CapExceeded => s.serialize_str(CAP_EXCEEDED),
        }
    }
}

impl<'de> Deserialize<'de> for RoundsToTarget {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(usize),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(p) => Ok(RoundsToTarget::Reached(p)),
            Raw::Str(s) if s == CAP_EXCEEDED => Ok(RoundsToTarget::CapExceeded),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected an integer or \"{CAP_EXCEEDED}\", got \"{s}\""))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetOutcome {
    pub target: f64,
    pub rounds: RoundsToTarget,
}

/// Everything tuned for one (instance, variant) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentRecord {
    pub config_hash: String,
    pub master_seed: u64,
    pub kind: ProblemKind,
    pub n: usize,
    pub k: usize,
    pub instance_index: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    pub variant: Variant,
    pub strategy: AngleStrategy,
    pub p_cap: usize,
    pub c_max: i64,
    /// Indexed by `p`, starting at the Dicke state.
    pub rounds: Vec<TunedRound>,
    pub rounds_to_target: Vec<TargetOutcome>,
}

impl ExperimentRecord {
    pub fn outcome(&self, target: f64) -> Option<RoundsToTarget> {
        self.rounds_to_target.iter().find(|o| o.target == target).map(|o| o.rounds)
    }

    pub(crate) fn sort_key(&self) -> (ProblemKind, usize, usize, Option<u64>, Variant) {
        (self.kind, self.n, self.instance_index, self.seed, self.variant)
    }
}

/// Tuned rounds for one instance and variant, stopping at the largest target.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetRun {
    pub rounds: Vec<TunedRound>,
    pub outcomes: Vec<TargetOutcome>,
    /// Wall-clock seconds spent on each round, round 0 included.
    pub seconds: Vec<f64>,
}

/// Tunes rounds `p = 1, 2, ...` inductively until every target ratio is met
/// or `p_cap` rounds have been tuned.
pub fn rounds_to_target(
    instance: &ProblemInstance,
    variant: Variant,
    targets: &[f64],
    strategy: AngleStrategy,
    tuner: &TunerConfig,
    p_cap: usize,
) -> Result<TargetRun> {
    if let Some(t) = targets.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
        return Err(Error::invalid(format!("target ratio {t} outside (0, 1]")));
    }
    let hardest = targets.iter().copied().fold(0.0, f64::max);
    let start = Instant::now();
    let ev = QaoaEvaluator::new(instance, variant.mixer)?;
    let mut tuner = InductiveTuner::new(ev, variant, strategy, tuner.clone())?;
    let mut seconds = vec![start.elapsed().as_secs_f64()];
    while tuner.rounds().last().expect("round 0").approx_ratio < hardest && tuner.rounds().len() <= p_cap {
        let t = Instant::now();
        tuner.next_round()?;
        seconds.push(t.elapsed().as_secs_f64());
    }
    let rounds = tuner.into_rounds();
    let outcomes = targets
        .iter()
        .map(|&target| TargetOutcome {
            target,
            rounds: rounds
                .iter()
                .position(|r| r.approx_ratio >= target)
                .map_or(RoundsToTarget::CapExceeded, RoundsToTarget::Reached),
        })
        .collect();
    Ok(TargetRun {
        rounds,
        outcomes,
        seconds,
    })
}
