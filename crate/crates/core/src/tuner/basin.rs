use std::f64::consts::TAU;

use rand::Rng as _;

use super::gradient::{ascend, AngleObjective, AscentLimits};
use super::{extrapolate_angles, AngleStart, TunedRound, TunerConfig};
use crate::error::{Error, Result};
use crate::operators::PhaseSeparator;
use crate::qaoa::{AngleSchedule, QaoaEvaluator};
use crate::rng::{derive_seed, seeded_rng};

/// Basin-hopping over all `2p` angles.
///
/// Each hop perturbs the current point by `U[-bh_step_size, bh_step_size]`
/// per angle, refines it by gradient ascent, and accepts it if it is better
/// or with Metropolis probability `exp(dE / T)` otherwise. The best point
/// seen is returned. The random stream is keyed by `(config.seed, p)`.
pub fn optimize_angles_basinhopping(
    evaluator: &QaoaEvaluator,
    separator: PhaseSeparator,
    p: usize,
    start: &AngleStart,
    config: &TunerConfig,
) -> Result<TunedRound> {
    basinhopping_stream(evaluator, separator, p, start, config, 0)
}

pub(crate) fn basinhopping_stream(
    evaluator: &QaoaEvaluator,
    separator: PhaseSeparator,
    p: usize,
    start: &AngleStart,
    config: &TunerConfig,
    stream: u64,
) -> Result<TunedRound> {
    config.validate()?;
    let mut rng = seeded_rng(derive_seed(config.seed, &[p as u64, stream]));
    let x0 = match start {
        AngleStart::Random => (0..2 * p).map(|_| rng.random_range(0.0..TAU)).collect(),
        AngleStart::Extrapolated(prev) => {
            if prev.p() + 1 != p {
                return Err(Error::invalid(format!(
                    "extrapolated start needs a {}-round schedule, got {}",
                    p.saturating_sub(1),
                    prev.p()
                )));
            }
            extrapolate_angles(prev)?.to_vec()
        }
    };
    if p == 0 {
        return Ok(TunedRound::evaluate(evaluator, separator, AngleSchedule::empty(), true));
    }

    let obj = AngleObjective::new(evaluator, separator);
    let local = |x: Vec<f64>| {
        ascend(
            &obj,
            x,
            AscentLimits {
                max_iterations: config.bh_local_max_iterations,
                tol: config.bh_local_tol,
            },
            config,
        )
    };

    let mut current = local(x0);
    let mut best = current.clone();
    for _ in 0..config.bh_iterations {
        let trial: Vec<f64> = current
            .x
            .iter()
            .map(|&a| a + rng.random_range(-config.bh_step_size..=config.bh_step_size))
            .collect();
        let candidate = local(trial);
        let delta = candidate.value - current.value;
        let u: f64 = rng.random();
        if delta >= 0.0 || u < (delta / config.bh_temperature).exp() {
            current = candidate;
            if current.value > best.value {
                best = current.clone();
            }
        }
    }
    let schedule = AngleSchedule::from_vec(&best.x)?;
    Ok(TunedRound::evaluate(evaluator, separator, schedule, best.converged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_erdos_renyi, Graph, ProblemInstance, ProblemKind};
    use crate::operators::MixerKind;
    use std::f64::consts::PI;

    fn quick() -> TunerConfig {
        TunerConfig {
            bh_iterations: 10,
            bh_local_max_iterations: 40,
            ..TunerConfig::default()
        }
    }

    #[test]
    fn k4_ratio_one_for_any_variant() {
        let inst = ProblemInstance::new(Graph::complete(4).unwrap(), ProblemKind::DensestSubgraph, 2).unwrap();
        for mixer in MixerKind::ALL {
            let ev = QaoaEvaluator::new(&inst, mixer).unwrap();
            for sep in [PhaseSeparator::Objective, PhaseSeparator::Threshold(0)] {
                let r = optimize_angles_basinhopping(&ev, sep, 1, &AngleStart::Random, &quick()).unwrap();
                assert!((r.approx_ratio - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn grover_th_reaches_pi_value_at_p1() {
        let inst =
            ProblemInstance::new(generate_erdos_renyi(8, 0.5, 21).unwrap(), ProblemKind::DensestSubgraph, 4).unwrap();
        let ev = QaoaEvaluator::new(&inst, MixerKind::Grover).unwrap();
        let th = ev.cost().c_max() - 2;
        let sep = PhaseSeparator::Threshold(th);
        let pi_value = ev.expectation(sep, &AngleSchedule::constant(1, PI, PI));
        let r = optimize_angles_basinhopping(&ev, sep, 1, &AngleStart::Random, &quick()).unwrap();
        assert!(r.expectation >= pi_value - 1e-6);
    }

    #[test]
    fn deterministic_given_seed() {
        let inst =
            ProblemInstance::new(generate_erdos_renyi(8, 0.5, 5).unwrap(), ProblemKind::DensestSubgraph, 4).unwrap();
        let ev = QaoaEvaluator::new(&inst, MixerKind::Clique).unwrap();
        let a = optimize_angles_basinhopping(&ev, PhaseSeparator::Objective, 2, &AngleStart::Random, &quick()).unwrap();
        let b = optimize_angles_basinhopping(&ev, PhaseSeparator::Objective, 2, &AngleStart::Random, &quick()).unwrap();
        assert_eq!(a, b);
        let other = TunerConfig { seed: 1, ..quick() };
        let c = optimize_angles_basinhopping(&ev, PhaseSeparator::Objective, 2, &AngleStart::Random, &other).unwrap();
        assert_ne!(a.schedule, c.schedule);
    }

    #[test]
    fn extrapolated_start_needs_matching_length() {
        let inst = ProblemInstance::new(Graph::complete(4).unwrap(), ProblemKind::DensestSubgraph, 2).unwrap();
        let ev = QaoaEvaluator::new(&inst, MixerKind::Clique).unwrap();
        let start = AngleStart::Extrapolated(AngleSchedule::constant(2, 0.1, 0.1));
        assert!(optimize_angles_basinhopping(&ev, PhaseSeparator::Objective, 2, &start, &quick()).is_err());
    }
}
