//! Ratio against threshold for π-angle Grover-Th, and the peak search.

use constrained_qaoa::graph::{generate_erdos_renyi, ProblemInstance, ProblemKind};
use constrained_qaoa::operators::MixerKind;
use constrained_qaoa::qaoa::QaoaEvaluator;
use constrained_qaoa::tuner::{find_threshold_grover, grover_threshold_profile, threshold_candidates};

fn main() -> constrained_qaoa::Result<()> {
    let inst = ProblemInstance::new(generate_erdos_renyi(8, 0.5, 4)?, ProblemKind::DensestSubgraph, 4)?;
    let ev = QaoaEvaluator::new(&inst, MixerKind::Grover)?;
    let candidates = threshold_candidates(ev.cost(), -1);
    for p in 1..=4 {
        let row: Vec<String> = grover_threshold_profile(&ev, p, &candidates)?
            .iter()
            .map(|pt| format!("{}:{:.3}", pt.threshold, pt.approx_ratio))
            .collect();
        let found = find_threshold_grover(&ev, p, -1)?;
        println!("p = {p}  [{}]  search -> th {:?}", row.join(" "), found.threshold);
    }
    Ok(())
}
