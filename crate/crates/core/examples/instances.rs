//! Seeded Erdős–Rényi instances and their brute-force optima.

use constrained_qaoa::graph::{generate_erdos_renyi, ProblemInstance, ProblemKind};
use constrained_qaoa::oracle::brute_force_optimum;
use constrained_qaoa::subspace::format_bits;

fn main() -> constrained_qaoa::Result<()> {
    let graph = generate_erdos_renyi(8, 0.5, 7)?;
    println!("n = {}, {} edges: {:?}", graph.n(), graph.edge_count(), graph.edges());
    for kind in [ProblemKind::DensestSubgraph, ProblemKind::VertexCover, ProblemKind::Bisection] {
        let inst = ProblemInstance::new(graph.clone(), kind, 4)?;
        let (best, x) = brute_force_optimum(&inst)?;
        println!("{kind:>16}: optimum {best} at {}", format_bits(x, inst.n()));
    }
    Ok(())
}
