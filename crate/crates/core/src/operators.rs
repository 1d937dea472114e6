//! Mixers and phase separators restricted to the feasible subspace.
//!
//! `X_i X_j + Y_i Y_j` maps `|..1_i..0_j..>` to `2 |..0_i..1_j..>` and kills
//! states where bits `i` and `j` agree, so inside the weight-`k` sector the
//! Clique and Ring mixers are real symmetric "hop" matrices with entries 2.
//! Their exponentials are applied through a cached dense eigendecomposition.
//! The Grover mixer `|psi_0><psi_0|` is rank one and applied in closed form.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subspace::{CostVector, SubspaceIndex, SubspaceState};

/// Default cap on the dimension of a dense mixer matrix.
pub const DEFAULT_MATRIX_DIM_BUDGET: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MixerKind {
    Clique,
    Ring,
    Grover,
}

impl MixerKind {
    pub const ALL: [MixerKind; 3] = [MixerKind::Clique, MixerKind::Ring, MixerKind::Grover];

    pub fn as_str(self) -> &'static str {
        match self {
            MixerKind::Clique => "Clique",
            MixerKind::Ring => "Ring",
            MixerKind::Grover => "Grover",
        }
    }
}

impl fmt::Display for MixerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MixerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "clique" => Ok(MixerKind::Clique),
            "ring" => Ok(MixerKind::Ring),
            "grover" => Ok(MixerKind::Grover),
            other => Err(Error::invalid(format!("unknown mixer '{other}'"))),
        }
    }
}

/// Qubit pairs summed by a two-body mixer. Ring pairs are `(i, i+1 mod n)`,
/// deduplicated, so `n = 2` gives the single pair `(0, 1)`.
pub fn mixer_pairs(kind: MixerKind, n: usize) -> Vec<(usize, usize)> {
    match kind {
        MixerKind::Clique => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
        MixerKind::Ring => {
            let mut pairs: Vec<(usize, usize)> = (0..n)
                .map(|i| {
                    let j = (i + 1) % n;
                    (i.min(j), i.max(j))
                })
                .filter(|(i, j)| i != j)
                .collect();
            pairs.sort_unstable();
            pairs.dedup();
            pairs
        }
        MixerKind::Grover => Vec::new(),
    }
}

/// Dense row-major matrix of a mixer on the subspace (the projector for Grover).
pub fn mixer_matrix(kind: MixerKind, index: &SubspaceIndex) -> Result<Vec<f64>> {
    if kind == MixerKind::Grover {
        let dim = index.dim();
        return Ok(vec![1.0 / dim as f64; dim * dim]);
    }
    let dim = index.dim();
    let pairs = mixer_pairs(kind, index.n());
    let mut h = vec![0.0; dim * dim];
    for (r, &x) in index.states().iter().enumerate() {
        for &(i, j) in &pairs {
            if (x >> i ^ x >> j) & 1 == 1 {
                let s = index.rank_unchecked(x ^ (1 << i | 1 << j));
                h[r * dim + s] = 2.0;
            }
        }
    }
    Ok(h)
}

/// Eigendecomposition `H = Q diag(lambda) Q^T` of a real symmetric mixer.
#[derive(Debug, Clone)]
pub struct SpectralMixer {
    dim: usize,
    eigenvalues: Vec<f64>,
    // row-major; column e is the e-th eigenvector
    eigenvectors: Vec<f64>,
}

impl SpectralMixer {
    fn from_matrix(dim: usize, h: Vec<f64>) -> Self {
        let eig = SymmetricEigen::new(DMatrix::from_row_slice(dim, dim, &h));
        let mut eigenvectors = vec![0.0; dim * dim];
        for r in 0..dim {
            for e in 0..dim {
                eigenvectors[r * dim + e] = eig.eigenvectors[(r, e)];
            }
        }
        SpectralMixer {
            dim,
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Row-major `Q`.
    pub fn eigenvectors(&self) -> &[f64] {
        &self.eigenvectors
    }

    /// Coefficients `Q^T x`, split into real and imaginary parts.
    pub(crate) fn to_eigenbasis(&self, x: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let dim = self.dim;
        let mut re = vec![0.0; dim];
        let mut im = vec![0.0; dim];
        for (row, a) in self.eigenvectors.chunks_exact(dim).zip(x) {
            let (ar, ai) = (a.re, a.im);
            for ((yr, yi), &q) in re.iter_mut().zip(im.iter_mut()).zip(row) {
                *yr += q * ar;
                *yi += q * ai;
            }
        }
        (re, im)
    }

    /// Writes `Q y` into `out`.
    pub(crate) fn from_eigenbasis(&self, re: &[f64], im: &[f64], out: &mut [Complex64]) {
        for (row, o) in self.eigenvectors.chunks_exact(self.dim).zip(out.iter_mut()) {
            *o = Complex64::new(dot(row, re), dot(row, im));
        }
    }

    /// Multiplies eigenbasis coefficients by `exp(-i beta lambda)`.
    pub(crate) fn phase_eigenbasis(&self, re: &mut [f64], im: &mut [f64], beta: f64) {
        for ((yr, yi), &lam) in re.iter_mut().zip(im.iter_mut()).zip(&self.eigenvalues) {
            let (s, c) = (beta * lam).sin_cos();
            let (r, i) = (*yr, *yi);
            *yr = r * c + i * s;
            *yi = i * c - r * s;
        }
    }

    fn apply(&self, x: &mut [Complex64], beta: f64) {
        let (mut re, mut im) = self.to_eigenbasis(x);
        self.phase_eigenbasis(&mut re, &mut im, beta);
        self.from_eigenbasis(&re, &im, x);
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[derive(Debug, Clone)]
pub enum MixerRepresentation {
    Spectral(SpectralMixer),
    /// `|psi_0><psi_0|` with `psi_0` the Dicke state; nothing stored.
    Rank1,
}

#[derive(Debug, Clone)]
pub struct MixerOperator {
    kind: MixerKind,
    n: usize,
    k: usize,
    dim: usize,
    representation: MixerRepresentation,
}

impl MixerOperator {
    pub fn kind(&self) -> MixerKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn representation(&self) -> &MixerRepresentation {
        &self.representation
    }

    pub fn spectral(&self) -> Option<&SpectralMixer> {
        match &self.representation {
            MixerRepresentation::Spectral(s) => Some(s),
            MixerRepresentation::Rank1 => None,
        }
    }

    /// `H_M x`.
    pub fn hamiltonian_apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        match &self.representation {
            MixerRepresentation::Spectral(s) => {
                let (mut re, mut im) = s.to_eigenbasis(x);
                for ((r, i), &lam) in re.iter_mut().zip(im.iter_mut()).zip(&s.eigenvalues) {
                    *r *= lam;
                    *i *= lam;
                }
                let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
                s.from_eigenbasis(&re, &im, &mut out);
                out
            }
            MixerRepresentation::Rank1 => {
                let mean = x.iter().sum::<Complex64>() / self.dim as f64;
                vec![mean; self.dim]
            }
        }
    }

    /// In-place `exp(-i beta H_M)`.
    pub fn apply_in_place(&self, x: &mut [Complex64], beta: f64) {
        debug_assert_eq!(x.len(), self.dim);
        match &self.representation {
            MixerRepresentation::Spectral(s) => s.apply(x, beta),
            MixerRepresentation::Rank1 => {
                // exp(-i beta P) = I + (exp(-i beta) - 1) P for a projector P
                let factor = Complex64::new(beta.cos() - 1.0, -beta.sin());
                let shift = factor * x.iter().sum::<Complex64>() / self.dim as f64;
                for a in x.iter_mut() {
                    *a += shift;
                }
            }
        }
    }
}

pub fn build_mixer(kind: MixerKind, index: &SubspaceIndex) -> Result<MixerOperator> {
    build_mixer_with_budget(kind, index, DEFAULT_MATRIX_DIM_BUDGET)
}

pub fn build_mixer_with_budget(
    kind: MixerKind,
    index: &SubspaceIndex,
    dim_budget: usize,
) -> Result<MixerOperator> {
    let dim = index.dim();
    let representation = match kind {
        MixerKind::Grover => MixerRepresentation::Rank1,
        MixerKind::Clique | MixerKind::Ring => {
            if dim > dim_budget {
                return Err(Error::Capacity {
                    what: "dense mixer matrix",
                    required: (dim as u128) * (dim as u128),
                    budget: (dim_budget as u128) * (dim_budget as u128),
                });
            }
            MixerRepresentation::Spectral(SpectralMixer::from_matrix(dim, mixer_matrix(kind, index)?))
        }
    };
    Ok(MixerOperator {
        kind,
        n: index.n(),
        k: index.k(),
        dim,
        representation,
    })
}

pub fn apply_mixer(state: &SubspaceState, op: &MixerOperator, beta: f64) -> Result<SubspaceState> {
    check_dim(op.dim(), state.dim())?;
    let mut out = state.clone();
    op.apply_in_place(out.amplitudes_mut(), beta);
    Ok(out)
}

/// Phase separator choice; `Threshold(th)` phases states with cost `> th`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseSeparator {
    Objective,
    Threshold(i64),
}

impl PhaseSeparator {
    /// Diagonal entry of `H_P` for a state of the given cost.
    #[inline]
    pub fn eigenvalue(self, cost: i64) -> f64 {
        match self {
            PhaseSeparator::Objective => cost as f64,
            PhaseSeparator::Threshold(th) => {
                if cost > th {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn apply_in_place(self, x: &mut [Complex64], cost: &CostVector, gamma: f64) {
        debug_assert_eq!(x.len(), cost.dim());
        match self {
            PhaseSeparator::Objective => {
                let lo = cost.c_min();
                let table: Vec<Complex64> = (lo..=cost.c_max())
                    .map(|c| Complex64::from_polar(1.0, -gamma * c as f64))
                    .collect();
                for (a, &c) in x.iter_mut().zip(cost.values()) {
                    *a *= table[(c - lo) as usize];
                }
            }
            PhaseSeparator::Threshold(th) => {
                let phase = Complex64::from_polar(1.0, -gamma);
                for (a, &c) in x.iter_mut().zip(cost.values()) {
                    if c > th {
                        *a *= phase;
                    }
                }
            }
        }
    }
}

pub fn apply_phase_separator(
    state: &SubspaceState,
    separator: PhaseSeparator,
    cost: &CostVector,
    gamma: f64,
) -> Result<SubspaceState> {
    check_dim(cost.dim(), state.dim())?;
    let mut out = state.clone();
    separator.apply_in_place(out.amplitudes_mut(), cost, gamma);
    Ok(out)
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

type CacheKey = (MixerKind, usize, usize);
type CacheSlot = Arc<Mutex<Option<Arc<MixerOperator>>>>;

/// Construct-once cache of mixers keyed by `(kind, n, k)`.
///
/// Concurrent callers asking for the same key block on that key's slot
/// while the first one builds it; other keys proceed independently.
#[derive(Debug)]
pub struct MixerCache {
    dim_budget: usize,
    slots: Mutex<HashMap<CacheKey, CacheSlot>>,
}

impl Default for MixerCache {
    fn default() -> Self {
        MixerCache::new(DEFAULT_MATRIX_DIM_BUDGET)
    }
}

impl MixerCache {
    pub fn new(dim_budget: usize) -> Self {
        MixerCache {
            dim_budget,
            slots: Mutex::new(HashMap::new()),
        }
    }

    /// Process-wide cache with the default budget.
    pub fn global() -> &'static MixerCache {
        static GLOBAL: OnceLock<MixerCache> = OnceLock::new();
        GLOBAL.get_or_init(MixerCache::default)
    }

    pub fn get(&self, kind: MixerKind, index: &SubspaceIndex) -> Result<Arc<MixerOperator>> {
        let slot = {
            let mut slots = self.slots.lock().expect("mixer cache poisoned");
            slots
                .entry((kind, index.n(), index.k()))
                .or_default()
                .clone()
        };
        let mut guard = slot.lock().expect("mixer cache slot poisoned");
        if let Some(op) = guard.as_ref() {
            return Ok(op.clone());
        }
        let op = Arc::new(build_mixer_with_budget(kind, index, self.dim_budget)?);
        *guard = Some(op.clone());
        Ok(op)
    }

    pub fn len(&self) -> usize {
        self.slots
            .lock()
            .expect("mixer cache poisoned")
            .values()
            .filter(|s| s.lock().map(|g| g.is_some()).unwrap_or(false))
            .count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, ProblemInstance, ProblemKind};
    use crate::subspace::{build_cost_vector, dicke_state};
    use std::f64::consts::{FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn ring_pairs() {
        assert_eq!(mixer_pairs(MixerKind::Ring, 2), vec![(0, 1)]);
        assert_eq!(mixer_pairs(MixerKind::Ring, 4), vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert_eq!(mixer_pairs(MixerKind::Clique, 4).len(), 6);
    }

    #[test]
    fn small_mixer_matrices() {
        let idx = SubspaceIndex::new(2, 1).unwrap();
        assert_eq!(mixer_matrix(MixerKind::Ring, &idx).unwrap(), vec![0.0, 2.0, 2.0, 0.0]);
        let idx = SubspaceIndex::new(3, 1).unwrap();
        let h = mixer_matrix(MixerKind::Clique, &idx).unwrap();
        for r in 0..3 {
            for s in 0..3 {
                assert_eq!(h[r * 3 + s], if r == s { 0.0 } else { 2.0 });
            }
        }
        let op = build_mixer(MixerKind::Grover, &SubspaceIndex::new(6, 3).unwrap()).unwrap();
        assert!(matches!(op.representation(), MixerRepresentation::Rank1));
    }

    #[test]
    fn spectral_reconstruction_and_orthogonality() {
        let idx = SubspaceIndex::new(6, 3).unwrap();
        for kind in [MixerKind::Clique, MixerKind::Ring] {
            let h = mixer_matrix(kind, &idx).unwrap();
            let op = build_mixer(kind, &idx).unwrap();
            let s = op.spectral().unwrap();
            let d = s.dim();
            let q = s.eigenvectors();
            for a in 0..d {
                for b in 0..d {
                    let qtq: f64 = (0..d).map(|r| q[r * d + a] * q[r * d + b]).sum();
                    assert!((qtq - if a == b { 1.0 } else { 0.0 }).abs() < 1e-10);
                    let rec: f64 = (0..d).map(|e| q[a * d + e] * s.eigenvalues()[e] * q[b * d + e]).sum();
                    assert!((rec - h[a * d + b]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn mixer_identity_at_zero() {
        let idx = SubspaceIndex::new(5, 2).unwrap();
        let psi = SubspaceState::basis(idx.dim(), 3);
        for kind in MixerKind::ALL {
            let op = build_mixer(kind, &idx).unwrap();
            let out = apply_mixer(&psi, &op, 0.0).unwrap();
            assert!(close(out.amplitudes(), psi.amplitudes(), 1e-14));
        }
    }

    #[test]
    fn grover_pi_is_diffusion() {
        let idx = SubspaceIndex::new(6, 3).unwrap();
        let op = build_mixer(MixerKind::Grover, &idx).unwrap();
        let psi0 = dicke_state(&idx);
        let out = apply_mixer(&psi0, &op, PI).unwrap();
        let neg: Vec<_> = psi0.amplitudes().iter().map(|a| -a).collect();
        assert!(close(out.amplitudes(), &neg, 1e-14));
    }

    #[test]
    fn ring_two_qubits_closed_form() {
        // exp(-i beta [[0,2],[2,0]]) = cos(2 beta) I - i sin(2 beta) X
        let idx = SubspaceIndex::new(2, 1).unwrap();
        let op = build_mixer(MixerKind::Ring, &idx).unwrap();
        let out = apply_mixer(&SubspaceState::basis(2, 0), &op, FRAC_PI_4).unwrap();
        assert!(close(out.amplitudes(), &[c(0.0, 0.0), c(0.0, -1.0)], 1e-14));
    }

    #[test]
    fn phase_separators() {
        let idx = SubspaceIndex::new(4, 2).unwrap();
        let inst = ProblemInstance::new(Graph::path(4).unwrap(), ProblemKind::DensestSubgraph, 2).unwrap();
        let cost = build_cost_vector(&inst, &idx).unwrap();
        let psi0 = dicke_state(&idx);
        for sep in [PhaseSeparator::Objective, PhaseSeparator::Threshold(0)] {
            let out = apply_phase_separator(&psi0, sep, &cost, 0.0).unwrap();
            assert!(close(out.amplitudes(), psi0.amplitudes(), 1e-15));
        }
        let out = apply_phase_separator(&psi0, PhaseSeparator::Threshold(0), &cost, PI).unwrap();
        for (r, (a, b)) in out.amplitudes().iter().zip(psi0.amplitudes()).enumerate() {
            let expected = if cost.values()[r] > 0 { -b } else { *b };
            assert!((a - expected).norm() < 1e-15);
        }
        let out = apply_phase_separator(&psi0, PhaseSeparator::Objective, &cost, 2.0 * PI).unwrap();
        assert!(close(out.amplitudes(), psi0.amplitudes(), 1e-12));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let op = build_mixer(MixerKind::Grover, &SubspaceIndex::new(4, 2).unwrap()).unwrap();
        assert!(matches!(
            apply_mixer(&SubspaceState::basis(4, 0), &op, 0.1),
            Err(Error::DimensionMismatch { expected: 6, actual: 4 })
        ));
    }

    #[test]
    fn budget_and_cache() {
        let idx = SubspaceIndex::new(8, 4).unwrap();
        assert!(matches!(
            build_mixer_with_budget(MixerKind::Clique, &idx, 50),
            Err(Error::Capacity { .. })
        ));
        assert!(build_mixer_with_budget(MixerKind::Grover, &idx, 50).is_ok());
        let cache = MixerCache::new(100);
        let a = cache.get(MixerKind::Ring, &idx).unwrap();
        let b = cache.get(MixerKind::Ring, &idx).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn cache_builds_once_under_concurrency() {
        let cache = MixerCache::default();
        let idx = SubspaceIndex::new(7, 3).unwrap();
        let ops: Vec<_> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..4)
                .map(|_| s.spawn(|| cache.get(MixerKind::Clique, &idx).unwrap()))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert!(ops.windows(2).all(|w| Arc::ptr_eq(&w[0], &w[1])));
    }
}
