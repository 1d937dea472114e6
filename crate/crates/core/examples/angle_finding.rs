//! Inductive gradient ascent against random-start basin-hopping.

use constrained_qaoa::graph::{generate_erdos_renyi, ProblemInstance, ProblemKind};
use constrained_qaoa::qaoa::{QaoaEvaluator, Variant};
use constrained_qaoa::tuner::{AngleStrategy, InductiveTuner, TunerConfig};

fn main() -> constrained_qaoa::Result<()> {
    let inst = ProblemInstance::new(generate_erdos_renyi(8, 0.5, 1)?, ProblemKind::DensestSubgraph, 4)?;
    let config = TunerConfig { bh_iterations: 20, ..TunerConfig::default() };
    for strategy in [AngleStrategy::GradientDescent, AngleStrategy::BasinHoppingRandom] {
        let ev = QaoaEvaluator::new(&inst, Variant::CLIQUE_OBJ.mixer)?;
        let mut tuner = InductiveTuner::new(ev, Variant::CLIQUE_OBJ, strategy, config.clone())?;
        for _ in 0..5 {
            tuner.next_round()?;
        }
        let ratios: Vec<String> = tuner.rounds().iter().map(|r| format!("{:.4}", r.approx_ratio)).collect();
        println!("{strategy:>15}: {}", ratios.join(" "));
    }
    Ok(())
}
