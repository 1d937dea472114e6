//! Mean ratio per round for every variant on a small ensemble.

use constrained_qaoa::graph::{generate_erdos_renyi, ProblemInstance, ProblemKind};
use constrained_qaoa::harness::round_by_round_table;
use constrained_qaoa::qaoa::Variant;
use constrained_qaoa::tuner::{AngleStrategy, TunerConfig};

fn main() -> constrained_qaoa::Result<()> {
    let instances = (0..4)
        .map(|s| ProblemInstance::new(generate_erdos_renyi(6, 0.5, s)?, ProblemKind::DensestSubgraph, 3))
        .collect::<constrained_qaoa::Result<Vec<_>>>()?;
    let table = round_by_round_table(&instances, &Variant::ALL, 4, AngleStrategy::GradientDescent, &TunerConfig::default())?;
    for (v, row) in table.variants.iter().zip(&table.mean_ratio) {
        let cells: Vec<String> = row.iter().map(|r| format!("{r:.4}")).collect();
        println!("{v:>10}: {}", cells.join(" "));
    }
    Ok(())
}
