//! Rounds each variant needs to reach a target ratio on one instance.

use constrained_qaoa::graph::{generate_erdos_renyi, ProblemInstance, ProblemKind};
use constrained_qaoa::harness::rounds_to_target;
use constrained_qaoa::qaoa::Variant;
use constrained_qaoa::tuner::{AngleStrategy, TunerConfig};

fn main() -> constrained_qaoa::Result<()> {
    let inst = ProblemInstance::new(generate_erdos_renyi(8, 0.5, 2)?, ProblemKind::VertexCover, 4)?;
    for variant in Variant::ALL {
        let run = rounds_to_target(&inst, variant, &[0.9, 0.99], AngleStrategy::GradientDescent, &TunerConfig::default(), 30)?;
        let outs: Vec<String> = run.outcomes.iter().map(|o| format!("{} -> {}", o.target, match o.rounds.reached() { Some(p) => p.to_string(), None => "cap".into() })).collect();
        println!("{variant:>10}: {}", outs.join(", "));
    }
    Ok(())
}
