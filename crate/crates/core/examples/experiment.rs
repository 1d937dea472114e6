//! A resumable ensemble experiment written to a temporary directory.

use constrained_qaoa::graph::ProblemKind;
use constrained_qaoa::harness::{run_experiment, ExperimentConfig};
use constrained_qaoa::qaoa::Variant;

fn main() -> constrained_qaoa::Result<()> {
    let mut config = ExperimentConfig::new(vec![ProblemKind::DensestSubgraph], vec![4, 6], vec![Variant::GROVER_TH], 42);
    config.instances_per_n = 4;
    config.exhaustive_n4 = false;
    let dir = std::env::temp_dir().join(format!("qaoa-experiment-{}", std::process::id()));
    let first = run_experiment(&config, &dir, 1)?;
    let again = run_experiment(&config, &dir, 1)?;
    println!("computed {} then {}, skipped {}", first.computed, again.computed, again.skipped);
    for row in &again.summary {
        println!("n = {} target {}: mean {:.2} sd {:.2} ({} capped)", row.n, row.target, row.mean, row.stddev, row.capped);
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
