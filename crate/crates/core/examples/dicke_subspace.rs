//! Ranking weight-k bitstrings and the uniform start state.

use constrained_qaoa::subspace::{dicke_state, format_bits, SubspaceIndex};

fn main() -> constrained_qaoa::Result<()> {
    let index = SubspaceIndex::new(5, 2)?;
    println!("C(5,2) = {}", index.dim());
    for r in 0..index.dim() {
        let x = index.unrank(r)?;
        assert_eq!(index.rank(x)?, r);
        println!("rank {r:2} <-> {}", format_bits(x, 5));
    }
    let psi = dicke_state(&index);
    println!("Dicke norm^2 = {:.15}", psi.norm_sqr());
    Ok(())
}
