//! Grover-Th with π angles follows the amplitude-amplification law.

use std::f64::consts::PI;

use constrained_qaoa::graph::{generate_erdos_renyi, ProblemInstance, ProblemKind};
use constrained_qaoa::operators::{MixerKind, PhaseSeparator};
use constrained_qaoa::oracle::amplitude_amplification_probability;
use constrained_qaoa::qaoa::{AngleSchedule, QaoaEvaluator};

fn main() -> constrained_qaoa::Result<()> {
    let inst = ProblemInstance::new(generate_erdos_renyi(10, 0.5, 3)?, ProblemKind::DensestSubgraph, 5)?;
    let ev = QaoaEvaluator::new(&inst, MixerKind::Grover)?;
    let th = ev.cost().c_max() - 1;
    let marked = ev.cost().count_above(th) as u64;
    println!("dim {}, c_max {}, {marked} states above {th}", ev.dim(), ev.cost().c_max());
    for p in 0..=8 {
        let state = ev.evolve(PhaseSeparator::Threshold(th), &AngleSchedule::constant(p, PI, PI));
        let hit: f64 = ev
            .cost()
            .values()
            .iter()
            .zip(state.probabilities())
            .filter(|(&c, _)| c > th)
            .map(|(_, q)| q)
            .sum();
        let law = amplitude_amplification_probability(ev.dim() as u64, marked, p);
        println!("p = {p}: marked {hit:.12}  law {law:.12}");
    }
    Ok(())
}
