//! Brute-force reference implementations used to check the fast path.
//!
//! Nothing here shares code with [`crate::operators`] or [`crate::subspace`]
//! beyond the bit convention. Mixers are assembled in the full `2^n` space as
//! sums of Kronecker products of 2×2 Pauli matrices, costs come from Pauli-Z
//! polynomials, and exponentials are taken with a scaled Taylor series.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{Bits, ProblemInstance, ProblemKind};
use crate::operators::MixerKind;
use crate::qaoa::{AngleSchedule, SeparatorKind, Variant};

/// Largest `n` the full-space simulation accepts.
pub const MAX_FULL_SPACE_QUBITS: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Compressed sparse row complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseMatrix {
    pub fn from_dense(dim: usize, dense: &[Complex64]) -> Self {
        assert_eq!(dense.len(), dim * dim);
        let mut row_start = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..dim {
            for c in 0..dim {
                let v = dense[r * dim + c];
                if v != ZERO {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_start.push(cols.len());
        }
        SparseMatrix {
            dim,
            row_start,
            cols,
            vals,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        SparseMatrix {
            dim,
            row_start: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_start[r]..self.row_start[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &SparseMatrix) -> SparseMatrix {
        let dim = self.dim * other.dim;
        let mut row_start = vec![0];
        let mut cols = Vec::with_capacity(self.nnz() * other.nnz());
        let mut vals = Vec::with_capacity(self.nnz() * other.nnz());
        for a in 0..self.dim {
            for b in 0..other.dim {
                for (ca, va) in self.row(a) {
                    for (cb, vb) in other.row(b) {
                        cols.push(ca * other.dim + cb);
                        vals.push(va * vb);
                    }
                }
                row_start.push(cols.len());
            }
        }
        SparseMatrix {
            dim,
            row_start,
            cols,
            vals,
        }
    }

    /// Entrywise sum, dropping exact zeros.
    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.dim, other.dim);
        let mut row_start = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut merged: Vec<(usize, Complex64)> = Vec::new();
        for r in 0..self.dim {
            merged.clear();
            merged.extend(self.row(r));
            merged.extend(other.row(r));
            merged.sort_by_key(|&(c, _)| c);
            let mut iter = merged.iter().peekable();
            while let Some(&(c, mut v)) = iter.next() {
                while let Some(&&(c2, v2)) = iter.peek() {
                    if c2 != c {
                        break;
                    }
                    v += v2;
                    iter.next();
                }
                if v != ZERO {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_start.push(cols.len());
        }
        SparseMatrix {
            dim: self.dim,
            row_start,
            cols,
            vals,
        }
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|r| self.row(r).map(|(c, x)| x * v[c]).sum())
            .collect()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.row(r).find(|&(cc, _)| cc == c).map_or(ZERO, |(_, v)| v)
    }

    /// Maximum absolute row sum; bounds the spectral norm of a Hermitian matrix.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> SparseMatrix {
        let m = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        SparseMatrix::from_dense(2, &m)
    }
}

/// `P_{q_1} P_{q_2} ...` on `n` qubits; qubit `q` acts on bit `q` of the basis index.
pub fn pauli_string(n: usize, factors: &[(usize, Pauli)]) -> SparseMatrix {
    let mut out = SparseMatrix::from_dense(1, &[ONE]);
    // the leftmost Kronecker factor owns the most significant bit
    for q in (0..n).rev() {
        let p = factors.iter().find(|(fq, _)| *fq == q).map_or(Pauli::I, |&(_, p)| p);
        out = out.kron(&p.matrix());
    }
    out
}

/// A full-space Hamiltonian.
#[derive(Debug, Clone)]
pub enum FullOperator {
    Sparse(SparseMatrix),
    /// `|v><v|` for a unit vector `v`.
    Projector(Vec<Complex64>),
}

impl FullOperator {
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        match self {
            FullOperator::Sparse(m) => m.matvec(v),
            FullOperator::Projector(u) => {
                let overlap: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                u.iter().map(|a| a * overlap).collect()
            }
        }
    }

    fn norm_bound(&self) -> f64 {
        match self {
            FullOperator::Sparse(m) => m.norm_bound(),
            FullOperator::Projector(_) => 1.0,
        }
    }
}

/// Full-space Dicke state, built by scanning all `2^n` basis states.
pub fn full_dicke_state(n: usize, k: usize) -> Vec<Complex64> {
    let count = (0u64..1 << n).filter(|x| x.count_ones() as usize == k).count();
    let amp = Complex64::new(1.0 / (count as f64).sqrt(), 0.0);
    (0u64..1 << n)
        .map(|x| if x.count_ones() as usize == k { amp } else { ZERO })
        .collect()
}

/// `sum (X_i X_j + Y_i Y_j)` over the mixer's pairs, or the Dicke projector for Grover.
pub fn full_mixer_hamiltonian(kind: MixerKind, n: usize, k: usize) -> Result<FullOperator> {
    check_size(n)?;
    let pairs: Vec<(usize, usize)> = match kind {
        MixerKind::Clique => {
            let mut v = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    v.push((i, j));
                }
            }
            v
        }
        MixerKind::Ring => {
            let mut v: Vec<(usize, usize)> = Vec::new();
            for i in 0..n {
                let j = (i + 1) % n;
                let pair = (i.min(j), i.max(j));
                if pair.0 != pair.1 && !v.contains(&pair) {
                    v.push(pair);
                }
            }
            v
        }
        MixerKind::Grover => return Ok(FullOperator::Projector(full_dicke_state(n, k))),
    };
    let mut h = SparseMatrix::zeros(1 << n);
    for (i, j) in pairs {
        h = h.add(&pauli_string(n, &[(i, Pauli::X), (j, Pauli::X)]));
        h = h.add(&pauli_string(n, &[(i, Pauli::Y), (j, Pauli::Y)]));
    }
    Ok(FullOperator::Sparse(h))
}

/// Objective of every `2^n` basis state from its Pauli-Z polynomial.
///
/// With `z_i = 1 - 2 x_i`: AND is `(1 - z_u)(1 - z_v)/4`, OR is
/// `1 - (1 + z_u)(1 + z_v)/4`, XOR is `(1 - z_u z_v)/2`.
pub fn full_cost_diagonal(instance: &ProblemInstance) -> Vec<f64> {
    let n = instance.n();
    (0u64..1 << n)
        .map(|x| {
            let z = |i: usize| if x >> i & 1 == 1 { -1.0 } else { 1.0 };
            instance
                .graph()
                .edges()
                .iter()
                .map(|&(u, v)| match instance.kind() {
                    ProblemKind::DensestSubgraph => (1.0 - z(u)) * (1.0 - z(v)) / 4.0,
                    ProblemKind::VertexCover => 1.0 - (1.0 + z(u)) * (1.0 + z(v)) / 4.0,
                    ProblemKind::Bisection => (1.0 - z(u) * z(v)) / 2.0,
                })
                .sum()
        })
        .collect()
}

/// `exp(-i t H) v` by Taylor series on `s` equal sub-steps with `|t| ||H|| / s <= 1`.
pub fn expm_multiply(h: &FullOperator, v: &[Complex64], t: f64) -> Vec<Complex64> {
    let steps = (t.abs() * h.norm_bound()).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let mut out = v.to_vec();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for j in 1..200 {
            let hv = h.matvec(&term);
            let scale = Complex64::new(0.0, -dt / j as f64);
            term = hv.into_iter().map(|x| x * scale).collect();
            for (a, b) in acc.iter_mut().zip(&term) {
                *a += b;
            }
            if term.iter().map(|x| x.norm()).fold(0.0, f64::max) < 1e-18 {
                break;
            }
        }
        out = acc;
    }
    out
}

/// State vector over all `2^n` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    pub amplitudes: Vec<Complex64>,
}

impl FullState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability outside the weight-`k` sector.
    pub fn leakage(&self, k: usize) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(x, _)| (*x as u64).count_ones() as usize != k)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn expectation(&self, diagonal: &[f64]) -> f64 {
        self.amplitudes.iter().zip(diagonal).map(|(a, d)| d * a.norm_sqr()).sum()
    }
}

/// Reference evolution of `instance` in the full `2^n` space.
pub fn full_space_run(
    instance: &ProblemInstance,
    variant: Variant,
    schedule: &AngleSchedule,
    threshold: Option<i64>,
) -> Result<FullState> {
    let n = instance.n();
    check_size(n)?;
    let costs = full_cost_diagonal(instance);
    let phase_diag: Vec<f64> = match (variant.separator, threshold) {
        (SeparatorKind::Objective, None) => costs,
        (SeparatorKind::Threshold, Some(th)) => costs
            .iter()
            .map(|&c| if c > th as f64 + 0.5 { 1.0 } else { 0.0 })
            .collect(),
        _ => return Err(Error::invalid(format!("threshold must be given iff {variant} is a threshold variant"))),
    };
    let h_m = full_mixer_hamiltonian(variant.mixer, n, instance.k())?;
    let mut psi = full_dicke_state(n, instance.k());
    for (&beta, &gamma) in schedule.betas().iter().zip(schedule.gammas()) {
        for (a, &d) in psi.iter_mut().zip(&phase_diag) {
            *a *= Complex64::from_polar(1.0, -gamma * d);
        }
        psi = expm_multiply(&h_m, &psi, beta);
    }
    Ok(FullState { amplitudes: psi })
}

/// Places subspace amplitudes (given in increasing bitstring order) into the full space.
pub fn embed(n: usize, k: usize, amplitudes: &[Complex64]) -> Result<FullState> {
    check_size(n)?;
    let positions: Vec<usize> = (0usize..1 << n).filter(|x| x.count_ones() as usize == k).collect();
    if positions.len() != amplitudes.len() {
        return Err(Error::DimensionMismatch {
            expected: positions.len(),
            actual: amplitudes.len(),
        });
    }
    let mut full = vec![ZERO; 1 << n];
    for (&x, &a) in positions.iter().zip(amplitudes) {
        full[x] = a;
    }
    Ok(FullState { amplitudes: full })
}

/// Largest per-amplitude difference after aligning global phase on `b`'s largest entry.
pub fn max_deviation_up_to_phase(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let pivot = (0..b.len())
        .max_by(|&i, &j| b[i].norm_sqr().total_cmp(&b[j].norm_sqr()))
        .unwrap_or(0);
    let phase = if a[pivot].norm() > 0.0 && b[pivot].norm() > 0.0 {
        let r = b[pivot] / a[pivot];
        r / r.norm()
    } else {
        ONE
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}

/// Exhaustive maximum over weight-`k` strings; ties go to the numerically smallest string.
pub fn brute_force_optimum(instance: &ProblemInstance) -> Result<(i64, Bits)> {
    let n = instance.n();
    if n > 30 {
        return Err(Error::Capacity {
            what: "brute-force enumeration",
            required: 1u128 << n,
            budget: 1u128 << 30,
        });
    }
    let mut best: Option<(i64, Bits)> = None;
    for x in 0u64..1 << n {
        if x.count_ones() as usize != instance.k() {
            continue;
        }
        let value: i64 = instance
            .graph()
            .edges()
            .iter()
            .filter(|&&(u, v)| {
                let (a, b) = (x >> u & 1 == 1, x >> v & 1 == 1);
                match instance.kind() {
                    ProblemKind::DensestSubgraph => a && b,
                    ProblemKind::VertexCover => a || b,
                    ProblemKind::Bisection => a ^ b,
                }
            })
            .count() as i64;
        if best.is_none_or(|(b, _)| value > b) {
            best = Some((value, x));
        }
    }
    Ok(best.expect("0 < k < n guarantees a feasible string"))
}

/// Marked-state probability `sin^2((2p+1) asin(sqrt(M/N)))` after `p` Grover iterations.
pub fn amplitude_amplification_probability(n_total: u64, marked: u64, p: usize) -> f64 {
    assert!(n_total >= 1 && marked <= n_total);
    if marked == 0 {
        return 0.0;
    }
    if marked == n_total {
        return 1.0;
    }
    let theta = ((marked as f64) / (n_total as f64)).sqrt().asin();
    ((2 * p + 1) as f64 * theta).sin().powi(2)
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_FULL_SPACE_QUBITS {
        return Err(Error::Capacity {
            what: "full-space state",
            required: 1u128 << n,
            budget: 1u128 << MAX_FULL_SPACE_QUBITS,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bits_of, Graph};

    #[test]
    fn two_qubit_xx_plus_yy() {
        let h = pauli_string(2, &[(0, Pauli::X), (1, Pauli::X)]).add(&pauli_string(2, &[(0, Pauli::Y), (1, Pauli::Y)]));
        // |01> (index 1) <-> |10> (index 2) with weight 2, everything else zero
        for r in 0..4 {
            for c in 0..4 {
                let expected = if (r, c) == (1, 2) || (r, c) == (2, 1) { 2.0 } else { 0.0 };
                assert_eq!(h.get(r, c), Complex64::new(expected, 0.0));
            }
        }
    }

    #[test]
    fn pauli_z_acts_on_its_bit() {
        let z1 = pauli_string(3, &[(1, Pauli::Z)]);
        for x in 0..8 {
            let expected = if x >> 1 & 1 == 1 { -1.0 } else { 1.0 };
            assert_eq!(z1.get(x, x).re, expected);
        }
    }

    #[test]
    fn taylor_exponential_of_pauli_x() {
        let x = FullOperator::Sparse(Pauli::X.matrix());
        let out = expm_multiply(&x, &[ONE, ZERO], 0.7);
        assert!((out[0] - Complex64::new(0.7f64.cos(), 0.0)).norm() < 1e-14);
        assert!((out[1] - Complex64::new(0.0, -0.7f64.sin())).norm() < 1e-14);
    }

    #[test]
    fn cost_diagonal_matches_objective() {
        let g = crate::graph::generate_erdos_renyi(6, 0.5, 2).unwrap();
        for kind in ProblemKind::ALL {
            let inst = ProblemInstance::new(g.clone(), kind, 3).unwrap();
            let diag = full_cost_diagonal(&inst);
            for x in (0u64..64).filter(|x| x.count_ones() == 3) {
                assert_eq!(diag[x as usize], inst.objective(x).unwrap() as f64);
            }
        }
    }

    #[test]
    fn brute_force_examples() {
        let path = ProblemInstance::new(Graph::path(4).unwrap(), ProblemKind::DensestSubgraph, 2).unwrap();
        assert_eq!(brute_force_optimum(&path).unwrap(), (1, bits_of(&[0, 1])));
        let k4 = ProblemInstance::new(Graph::complete(4).unwrap(), ProblemKind::Bisection, 2).unwrap();
        assert_eq!(brute_force_optimum(&k4).unwrap(), (4, 0b0011));
        let empty = ProblemInstance::new(Graph::empty(5).unwrap(), ProblemKind::VertexCover, 2).unwrap();
        assert_eq!(brute_force_optimum(&empty).unwrap(), (0, 0b00011));
    }

    #[test]
    fn amplification_law_examples() {
        assert_eq!(amplitude_amplification_probability(6, 6, 0), 1.0);
        assert_eq!(amplitude_amplification_probability(6, 0, 3), 0.0);
        assert!((amplitude_amplification_probability(4, 1, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grover_iteration_by_dense_matrix() {
        // one iteration on N = 6, M = 1: oracle diag(-1, 1, ..) then 2|s><s| - I
        let n = 6;
        let s = 1.0 / (n as f64).sqrt();
        let mut v = vec![s; n];
        v[0] = -v[0];
        let mean_overlap: f64 = v.iter().map(|x| x * s).sum();
        let v: Vec<f64> = v.iter().map(|x| 2.0 * s * mean_overlap - x).collect();
        let matrix_prob = v[0] * v[0];
        assert!((matrix_prob - 49.0 / 54.0).abs() < 1e-14);
        assert!((amplitude_amplification_probability(6, 1, 1) - matrix_prob).abs() < 1e-14);
    }

    #[test]
    fn dicke_and_embedding() {
        let d = full_dicke_state(4, 2);
        assert_eq!(d.iter().filter(|a| a.norm() > 0.0).count(), 6);
        let e = embed(4, 2, &[Complex64::new(1.0 / 6f64.sqrt(), 0.0); 6]).unwrap();
        assert!(max_deviation_up_to_phase(&e.amplitudes, &d) < 1e-15);
        assert!(embed(4, 2, &[ONE]).is_err());
    }

    #[test]
    fn phase_alignment() {
        let a = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let g = Complex64::from_polar(1.0, 1.234);
        let b: Vec<_> = a.iter().map(|x| x * g).collect();
        assert!(max_deviation_up_to_phase(&a, &b) < 1e-15);
    }

    #[test]
    fn size_budget() {
        let g = Graph::empty(13).unwrap();
        let inst = ProblemInstance::new(g, ProblemKind::DensestSubgraph, 6).unwrap();
        assert!(matches!(
            full_space_run(&inst, Variant::GROVER_OBJ, &AngleSchedule::empty(), None),
            Err(Error::Capacity { .. })
        ));
    }
}
