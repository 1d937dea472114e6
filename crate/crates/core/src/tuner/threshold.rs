use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::inductive::tune_angles_stream;
use super::{AngleStrategy, TunedRound, TunerConfig};
use crate::error::{Error, Result};
use crate::operators::{MixerKind, PhaseSeparator};
use crate::qaoa::{grover_th_schedule, AngleSchedule, QaoaEvaluator};
use crate::subspace::CostVector;

/// Values closer than this are treated as ties, resolved toward the smaller threshold.
const TIE_TOLERANCE: f64 = 1e-12;

/// Integer thresholds in `[prev, c_max - 1]`, one per distinct marked set.
///
/// Thresholds between two consecutive cost values mark the same states and
/// so behave identically; each class is represented by its smallest member,
/// which is `prev` itself or a cost value above it.
pub fn threshold_candidates(cost: &CostVector, prev: i64) -> Vec<i64> {
    let upper = cost.c_max() - 1;
    let mut out = vec![prev];
    out.extend(cost.distinct_values().into_iter().filter(|&c| c > prev && c <= upper));
    out
}

/// Grover-Th with π angles at one threshold, after choosing the best prefix length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroverThresholdPoint {
    pub threshold: i64,
    /// Number of leading π rounds; the remaining rounds are identities.
    pub p_star: usize,
    pub expectation: f64,
    pub approx_ratio: f64,
}

fn grover_point(ev: &QaoaEvaluator, p: usize, threshold: i64) -> GroverThresholdPoint {
    let schedule = grover_th_schedule(p, p).expect("p_star = p is valid");
    let prefix = ev.prefix_expectations(PhaseSeparator::Threshold(threshold), &schedule);
    let mut p_star = 0;
    for (i, &e) in prefix.iter().enumerate() {
        if e > prefix[p_star] + TIE_TOLERANCE {
            p_star = i;
        }
    }
    GroverThresholdPoint {
        threshold,
        p_star,
        expectation: prefix[p_star],
        approx_ratio: ev.ratio(prefix[p_star]),
    }
}

fn require_grover(ev: &QaoaEvaluator) -> Result<()> {
    if ev.mixer_kind() != MixerKind::Grover {
        return Err(Error::invalid(format!(
            "Grover threshold search needs the Grover mixer, evaluator has {}",
            ev.mixer_kind()
        )));
    }
    Ok(())
}

/// Exhaustive scan of π-schedule Grover-Th performance over the given thresholds.
pub fn grover_threshold_profile(ev: &QaoaEvaluator, p: usize, thresholds: &[i64]) -> Result<Vec<GroverThresholdPoint>> {
    require_grover(ev)?;
    Ok(thresholds.iter().map(|&th| grover_point(ev, p, th)).collect())
}

/// Peak search for the best Grover-Th threshold at `p` rounds.
///
/// Relies on the ratio-versus-threshold profile rising to a peak and then
/// falling, possibly with flat stretches: compare the midpoint with the
/// first right neighbour that differs from it and discard the half that
/// cannot hold the peak. Ties go to the smaller threshold.
pub fn find_threshold_grover(ev: &QaoaEvaluator, p: usize, prev_threshold: i64) -> Result<TunedRound> {
    require_grover(ev)?;
    let candidates = threshold_candidates(ev.cost(), prev_threshold);
    let mut memo: BTreeMap<usize, GroverThresholdPoint> = BTreeMap::new();
    let mut eval = |i: usize| *memo.entry(i).or_insert_with(|| grover_point(ev, p, candidates[i]));
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        let here = eval(mid).expectation;
        let mut j = mid + 1;
        while j < hi && (eval(j).expectation - here).abs() <= TIE_TOLERANCE {
            j += 1;
        }
        if eval(j).expectation > here + TIE_TOLERANCE {
            lo = j;
        } else {
            hi = mid;
        }
    }
    let best = eval(lo);
    let schedule = grover_th_schedule(p, best.p_star)?;
    Ok(TunedRound::evaluate(
        ev,
        PhaseSeparator::Threshold(best.threshold),
        schedule,
        true,
    ))
}

/// Per-threshold optimal schedules from the previous round.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ThresholdWarmStarts(pub BTreeMap<i64, AngleSchedule>);

/// Best threshold at `p` rounds for Clique-Th or Ring-Th by trying every
/// threshold class in `[prev_threshold, c_max - 1]` with freshly tuned angles.
///
/// Angles for threshold `th` start from `warm[th]` (that threshold's
/// `p - 1` optimum) when present, otherwise from `incumbent`. Returns the
/// winning round and the warm starts for round `p + 1`.
pub fn find_threshold_exhaustive(
    ev: &QaoaEvaluator,
    p: usize,
    prev_threshold: i64,
    strategy: AngleStrategy,
    config: &TunerConfig,
    warm: &ThresholdWarmStarts,
    incumbent: Option<&AngleSchedule>,
) -> Result<(TunedRound, ThresholdWarmStarts)> {
    let mut best: Option<TunedRound> = None;
    let mut next_warm = ThresholdWarmStarts::default();
    for th in threshold_candidates(ev.cost(), prev_threshold) {
        let start = warm.0.get(&th).or(incumbent);
        let stream = (th + 1) as u64;
        let round = tune_angles_stream(ev, PhaseSeparator::Threshold(th), p, start, strategy, config, stream)?;
        next_warm.0.insert(th, round.schedule.clone());
        if best
            .as_ref()
            .is_none_or(|b| round.expectation > b.expectation + TIE_TOLERANCE)
        {
            best = Some(round);
        }
    }
    Ok((best.expect("candidate list is never empty"), next_warm))
}
