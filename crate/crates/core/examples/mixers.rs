//! The three mixers acting on the feasible subspace.

use constrained_qaoa::operators::{apply_mixer, build_mixer, MixerKind, MixerRepresentation};
use constrained_qaoa::subspace::{SubspaceIndex, SubspaceState};

fn main() -> constrained_qaoa::Result<()> {
    let index = SubspaceIndex::new(6, 3)?;
    let start = SubspaceState::basis(index.dim(), 0);
    for kind in MixerKind::ALL {
        let op = build_mixer(kind, &index)?;
        let form = match op.representation() {
            MixerRepresentation::Spectral(_) => "spectral",
            MixerRepresentation::Rank1 => "rank-one",
        };
        let out = apply_mixer(&start, &op, 0.7)?;
        let spread = out.probabilities().iter().filter(|&&p| p > 1e-12).count();
        println!("{kind:>6} ({form}): norm^2 {:.15}, support {spread}/{}", out.norm_sqr(), index.dim());
    }
    Ok(())
}
