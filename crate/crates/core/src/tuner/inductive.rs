use std::f64::consts::{PI, TAU};

use super::basin::basinhopping_stream;
use super::gradient::optimize_angles_gd;
use super::threshold::{find_threshold_exhaustive, find_threshold_grover, ThresholdWarmStarts};
use super::{extrapolate_angles, AngleStart, AngleStrategy, TunedRound, TunerConfig};
use crate::error::{Error, Result};
use crate::operators::{MixerKind, PhaseSeparator};
use crate::qaoa::{AngleSchedule, QaoaEvaluator, SeparatorKind, Variant};

const MONOTONE_SLACK: f64 = 1e-12;

/// Angles for `p` rounds at a fixed separator.
///
/// `prev` is the tuned `p - 1` schedule. Gradient descent starts from its
/// extrapolation (from a coarse grid at `p = 1`); extrapolated basin-hopping
/// starts there too (randomly at `p = 1`); random basin-hopping ignores it.
/// For the two inductive strategies the result is never worse than `prev`
/// with an identity round appended.
pub fn tune_angles(
    evaluator: &QaoaEvaluator,
    separator: PhaseSeparator,
    p: usize,
    prev: Option<&AngleSchedule>,
    strategy: AngleStrategy,
    config: &TunerConfig,
) -> Result<TunedRound> {
    tune_angles_stream(evaluator, separator, p, prev, strategy, config, 0)
}

pub(crate) fn tune_angles_stream(
    ev: &QaoaEvaluator,
    separator: PhaseSeparator,
    p: usize,
    prev: Option<&AngleSchedule>,
    strategy: AngleStrategy,
    config: &TunerConfig,
    stream: u64,
) -> Result<TunedRound> {
    config.validate()?;
    if let Some(prev) = prev {
        if prev.p() + 1 != p {
            return Err(Error::invalid(format!(
                "previous schedule has {} rounds, expected {}",
                prev.p(),
                p.saturating_sub(1)
            )));
        }
    }
    if p == 0 {
        return Ok(TunedRound::evaluate(ev, separator, AngleSchedule::empty(), true));
    }
    let extrapolated = prev.filter(|s| s.p() > 0).map(extrapolate_angles).transpose()?;
    let round = match strategy {
        AngleStrategy::GradientDescent => {
            let start = match extrapolated {
                Some(s) => s,
                None => grid_start(ev, separator, config.initial_grid),
            };
            optimize_angles_gd(ev, separator, &start, config)?
        }
        AngleStrategy::BasinHoppingExtrapolated => {
            let start = prev
                .filter(|s| s.p() > 0)
                .map_or(AngleStart::Random, |s| AngleStart::Extrapolated(s.clone()));
            basinhopping_stream(ev, separator, p, &start, config, stream)?
        }
        AngleStrategy::BasinHoppingRandom => {
            return basinhopping_stream(ev, separator, p, &AngleStart::Random, config, stream);
        }
    };
    match prev {
        Some(prev) => guard_monotone(ev, separator, prev, round, config),
        None => Ok(round),
    }
}

/// Best point of a `g x g` grid over one period of `(beta, gamma)`.
fn grid_start(ev: &QaoaEvaluator, separator: PhaseSeparator, g: usize) -> AngleSchedule {
    let beta_period = if ev.mixer_kind() == MixerKind::Clique { PI } else { TAU };
    let mut best = (f64::NEG_INFINITY, AngleSchedule::constant(1, 0.0, 0.0));
    for i in 0..g {
        for j in 0..g {
            let s = AngleSchedule::constant(1, beta_period * i as f64 / g as f64, TAU * j as f64 / g as f64);
            let e = ev.expectation(separator, &s);
            if e > best.0 {
                best = (e, s);
            }
        }
    }
    best.1
}

fn guard_monotone(
    ev: &QaoaEvaluator,
    separator: PhaseSeparator,
    prev: &AngleSchedule,
    round: TunedRound,
    config: &TunerConfig,
) -> Result<TunedRound> {
    let mut padded = prev.clone();
    padded.push(0.0, 0.0);
    let held = ev.expectation(separator, &padded);
    if round.expectation >= held - MONOTONE_SLACK {
        return Ok(round);
    }
    let mut best = optimize_angles_gd(ev, separator, &padded, config)?;
    for start in saddle_escapes(ev, separator, &padded, held) {
        let r = optimize_angles_gd(ev, separator, &start, config)?;
        if r.expectation > best.expectation {
            best = r;
        }
    }
    Ok(if best.expectation > round.expectation { best } else { round })
}

/// Starts that leave the identity-padded point along the new round's
/// direction of largest positive curvature.
///
/// The padded point is stationary in the appended `(beta, gamma)` whenever
/// the shorter schedule was, so plain ascent cannot leave it.
fn saddle_escapes(ev: &QaoaEvaluator, separator: PhaseSeparator, padded: &AngleSchedule, f0: f64) -> Vec<AngleSchedule> {
    const H: f64 = 1e-3;
    const STEP: f64 = 0.1;
    let last = padded.p() - 1;
    let at = |db: f64, dg: f64| {
        let mut x = padded.to_vec();
        x[last] += db;
        x[padded.p() + last] += dg;
        x
    };
    let f = |db: f64, dg: f64| {
        ev.expectation(separator, &AngleSchedule::from_vec(&at(db, dg)).expect("even length"))
    };
    let fbb = (f(H, 0.0) - 2.0 * f0 + f(-H, 0.0)) / (H * H);
    let fgg = (f(0.0, H) - 2.0 * f0 + f(0.0, -H)) / (H * H);
    let fbg = (f(H, H) - f(H, -H) - f(-H, H) + f(-H, -H)) / (4.0 * H * H);
    let mean = 0.5 * (fbb + fgg);
    let lambda = mean + (0.25 * (fbb - fgg).powi(2) + fbg * fbg).sqrt();
    if lambda <= 1e-6 {
        return Vec::new();
    }
    let (vb, vg) = if fbg.abs() > 1e-12 {
        (fbg, lambda - fbb)
    } else if fbb >= fgg {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    let norm = vb.hypot(vg);
    [1.0, -1.0]
        .into_iter()
        .map(|sign| {
            let x = at(sign * STEP * vb / norm, sign * STEP * vg / norm);
            AngleSchedule::from_vec(&x).expect("even length")
        })
        .collect()
}

/// Round-by-round tuning of one variant on one instance.
///
/// Round 0 is the Dicke state. Each call to [`next_round`](Self::next_round)
/// tunes one more round from the previous result: angles per the strategy
/// for `-Obj` variants, a nested threshold/angle search for Clique-Th and
/// Ring-Th, and the π-schedule peak search for Grover-Th.
#[derive(Debug, Clone)]
pub struct InductiveTuner {
    evaluator: QaoaEvaluator,
    variant: Variant,
    strategy: AngleStrategy,
    config: TunerConfig,
    rounds: Vec<TunedRound>,
    warm: ThresholdWarmStarts,
}

impl InductiveTuner {
    pub fn new(evaluator: QaoaEvaluator, variant: Variant, strategy: AngleStrategy, config: TunerConfig) -> Result<Self> {
        config.validate()?;
        if evaluator.mixer_kind() != variant.mixer {
            return Err(Error::invalid(format!(
                "evaluator mixer {} does not match variant {variant}",
                evaluator.mixer_kind()
            )));
        }
        let initial = TunedRound::evaluate(&evaluator, PhaseSeparator::Objective, AngleSchedule::empty(), true);
        Ok(InductiveTuner {
            evaluator,
            variant,
            strategy,
            config,
            rounds: vec![initial],
            warm: ThresholdWarmStarts::default(),
        })
    }

    pub fn evaluator(&self) -> &QaoaEvaluator {
        &self.evaluator
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Tuned rounds so far, indexed by `p`.
    pub fn rounds(&self) -> &[TunedRound] {
        &self.rounds
    }

    pub fn into_rounds(self) -> Vec<TunedRound> {
        self.rounds
    }

    pub fn next_round(&mut self) -> Result<&TunedRound> {
        let ev = &self.evaluator;
        let prev = self.rounds.last().expect("round 0 always present");
        let p = prev.p + 1;
        let prev_th = prev.threshold.unwrap_or(-1);
        let round = match (self.variant.separator, self.variant.mixer) {
            (SeparatorKind::Objective, _) => tune_angles(
                ev,
                PhaseSeparator::Objective,
                p,
                Some(&prev.schedule),
                self.strategy,
                &self.config,
            )?,
            (SeparatorKind::Threshold, MixerKind::Grover) => {
                let found = find_threshold_grover(ev, p, prev_th)?;
                let mut padded = prev.schedule.clone();
                padded.push(0.0, 0.0);
                let held = TunedRound::evaluate(ev, PhaseSeparator::Threshold(prev_th), padded, true);
                if held.expectation > found.expectation + MONOTONE_SLACK {
                    held
                } else {
                    found
                }
            }
            (SeparatorKind::Threshold, _) => {
                let (round, warm) = find_threshold_exhaustive(
                    ev,
                    p,
                    prev_th,
                    self.strategy,
                    &self.config,
                    &self.warm,
                    Some(&prev.schedule),
                )?;
                self.warm = warm;
                round
            }
        };
        self.rounds.push(round);
        Ok(self.rounds.last().expect("just pushed"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_erdos_renyi, Graph, ProblemInstance, ProblemKind};

    fn k_ds(n: usize, seed: u64) -> ProblemInstance {
        let g = generate_erdos_renyi(n, 0.5, seed).unwrap();
        ProblemInstance::new(g, ProblemKind::DensestSubgraph, n / 2).unwrap()
    }

    fn quick() -> TunerConfig {
        TunerConfig {
            bh_iterations: 5,
            bh_local_max_iterations: 30,
            max_gd_iterations: 200,
            ..TunerConfig::default()
        }
    }

    #[test]
    fn rounds_are_monotone_for_every_variant() {
        let inst = k_ds(6, 3);
        for variant in Variant::ALL {
            let ev = QaoaEvaluator::new(&inst, variant.mixer).unwrap();
            let mut tuner = InductiveTuner::new(ev, variant, AngleStrategy::GradientDescent, quick()).unwrap();
            for _ in 0..4 {
                tuner.next_round().unwrap();
            }
            let rounds = tuner.rounds();
            for w in rounds.windows(2) {
                assert!(w[1].expectation >= w[0].expectation - 1e-9, "{variant}: {:?}", w);
                assert_eq!(w[1].p, w[0].p + 1);
                if variant.uses_threshold() {
                    assert!(w[1].threshold.unwrap() >= w[0].threshold.unwrap_or(-1));
                }
            }
        }
    }

    #[test]
    fn stored_expectation_matches_rerun() {
        let inst = k_ds(6, 8);
        for variant in [Variant::CLIQUE_OBJ, Variant::RING_TH, Variant::GROVER_TH] {
            let ev = QaoaEvaluator::new(&inst, variant.mixer).unwrap();
            let mut tuner = InductiveTuner::new(ev, variant, AngleStrategy::GradientDescent, quick()).unwrap();
            tuner.next_round().unwrap();
            let r = tuner.next_round().unwrap().clone();
            let rerun = crate::qaoa::run_qaoa(&inst, variant, &r.schedule, r.threshold).unwrap();
            assert!((rerun.expectation - r.expectation).abs() < 1e-9);
        }
    }

    #[test]
    fn basin_hopping_strategies_run_several_rounds() {
        let inst = k_ds(6, 3);
        for strategy in [AngleStrategy::BasinHoppingExtrapolated, AngleStrategy::BasinHoppingRandom] {
            let ev = QaoaEvaluator::new(&inst, MixerKind::Clique).unwrap();
            let mut tuner = InductiveTuner::new(ev, Variant::CLIQUE_OBJ, strategy, quick()).unwrap();
            for _ in 0..3 {
                tuner.next_round().unwrap();
            }
            assert_eq!(tuner.rounds()[3].schedule.p(), 3);
        }
        let ev = QaoaEvaluator::new(&inst, MixerKind::Clique).unwrap();
        let mut tuner = InductiveTuner::new(ev, Variant::CLIQUE_OBJ, AngleStrategy::BasinHoppingExtrapolated, quick()).unwrap();
        for _ in 0..3 {
            tuner.next_round().unwrap();
        }
        let r = tuner.rounds();
        assert!(r.windows(2).all(|w| w[1].expectation >= w[0].expectation - 1e-9));
    }

    #[test]
    fn k4_is_solved_at_round_zero() {
        let inst = ProblemInstance::new(Graph::complete(4).unwrap(), ProblemKind::DensestSubgraph, 2).unwrap();
        let ev = QaoaEvaluator::new(&inst, MixerKind::Ring).unwrap();
        let mut tuner = InductiveTuner::new(ev, Variant::RING_OBJ, AngleStrategy::BasinHoppingExtrapolated, quick()).unwrap();
        assert!((tuner.rounds()[0].approx_ratio - 1.0).abs() < 1e-12);
        assert!((tuner.next_round().unwrap().approx_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_prev_is_rejected() {
        let inst = k_ds(6, 1);
        let ev = QaoaEvaluator::new(&inst, MixerKind::Clique).unwrap();
        let prev = AngleSchedule::constant(2, 0.1, 0.2);
        let err = tune_angles(&ev, PhaseSeparator::Objective, 2, Some(&prev), AngleStrategy::GradientDescent, &quick());
        assert!(err.is_err());
        let mismatch = InductiveTuner::new(ev, Variant::RING_OBJ, AngleStrategy::GradientDescent, quick());
        assert!(mismatch.is_err());
    }

    #[test]
    fn gd_from_extrapolated_start_keeps_previous_quality() {
        let inst = k_ds(8, 11);
        let ev = QaoaEvaluator::new(&inst, MixerKind::Clique).unwrap();
        let cfg = TunerConfig::default();
        let mut prev = tune_angles(&ev, PhaseSeparator::Objective, 1, Some(&AngleSchedule::empty()), AngleStrategy::GradientDescent, &cfg).unwrap();
        for p in 2..=4 {
            let next = tune_angles(&ev, PhaseSeparator::Objective, p, Some(&prev.schedule), AngleStrategy::GradientDescent, &cfg).unwrap();
            assert!(next.expectation >= prev.expectation - 1e-9);
            prev = next;
        }
    }
}
