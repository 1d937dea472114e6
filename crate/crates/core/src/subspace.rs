//! The weight-`k` feasible subspace: indexing, the Dicke state and cost vectors.
//!
//! Basis states are ranked in increasing numeric order of their bitstrings,
//! which is the colexicographic combinatorial number system: the rank of a
//! set `{c_1 < c_2 < ... < c_k}` is `sum_j C(c_j, j)`.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{Bits, ProblemInstance, MAX_VERTICES};

/// Default cap on the number of entries in a subspace vector.
pub const DEFAULT_VECTOR_BUDGET: usize = 1_000_000;

/// Exact binomial coefficient, `None` on `u128` overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// Bijection between ranks `0..C(n, k)` and weight-`k` bitstrings.
#[derive(Debug, Clone)]
pub struct SubspaceIndex {
    n: usize,
    k: usize,
    // choose[c * (k + 1) + j] = C(c, j)
    choose: Vec<usize>,
    states: Vec<Bits>,
}

impl SubspaceIndex {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        Self::with_budget(n, k, DEFAULT_VECTOR_BUDGET)
    }

    pub fn with_budget(n: usize, k: usize, budget: usize) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES || k == 0 || k >= n {
            return Err(Error::invalid(format!(
                "subspace requires 0 < k < n <= {MAX_VERTICES}, got n={n}, k={k}"
            )));
        }
        let dim = binomial(n as u64, k as u64).unwrap_or(u128::MAX);
        if dim > budget as u128 {
            return Err(Error::Capacity {
                what: "subspace vector",
                required: dim,
                budget: budget as u128,
            });
        }
        let mut choose = vec![0usize; (n + 1) * (k + 1)];
        for c in 0..=n {
            for j in 0..=k {
                choose[c * (k + 1) + j] = binomial(c as u64, j as u64).unwrap() as usize;
            }
        }
        let mut index = SubspaceIndex {
            n,
            k,
            choose,
            states: Vec::new(),
        };
        index.states = (0..dim as usize).map(|r| index.unrank_uncached(r)).collect();
        Ok(index)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Weight-`k` bitstrings in rank order.
    pub fn states(&self) -> &[Bits] {
        &self.states
    }

    #[inline]
    fn choose(&self, c: usize, j: usize) -> usize {
        self.choose[c * (self.k + 1) + j]
    }

    /// Rank of a weight-`k` bitstring on `n` bits.
    pub fn rank(&self, x: Bits) -> Result<usize> {
        if x.count_ones() as usize != self.k || (self.n < 64 && x >> self.n != 0) {
            return Err(Error::invalid(format!(
                "{x:#b} is not a weight-{} string on {} bits",
                self.k, self.n
            )));
        }
        Ok(self.rank_unchecked(x))
    }

    #[inline]
    pub(crate) fn rank_unchecked(&self, mut x: Bits) -> usize {
        let mut r = 0;
        let mut j = 1;
        while x != 0 {
            let c = x.trailing_zeros() as usize;
            r += self.choose(c, j);
            j += 1;
            x &= x - 1;
        }
        r
    }

    pub fn unrank(&self, r: usize) -> Result<Bits> {
        self.states.get(r).copied().ok_or_else(|| {
            Error::invalid(format!("rank {r} out of range for dimension {}", self.dim()))
        })
    }

    fn unrank_uncached(&self, mut r: usize) -> Bits {
        let mut x: Bits = 0;
        let mut c = self.n;
        for j in (1..=self.k).rev() {
            // largest c with C(c, j) <= r; c only ever decreases, so the scan is O(n) overall
            c -= 1;
            while self.choose(c, j) > r {
                c -= 1;
            }
            x |= 1 << c;
            r -= self.choose(c, j);
        }
        x
    }
}

/// Per-rank objective values of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector {
    values: Vec<i64>,
    c_max: i64,
    c_min: i64,
}

impl CostVector {
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn c_max(&self) -> i64 {
        self.c_max
    }

    pub fn c_min(&self) -> i64 {
        self.c_min
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Sorted distinct objective values.
    pub fn distinct_values(&self) -> Vec<i64> {
        let mut v = self.values.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Number of basis states with cost strictly above `threshold`.
    pub fn count_above(&self, threshold: i64) -> usize {
        self.values.iter().filter(|&&c| c > threshold).count()
    }

    /// Writes `rank,bitstring,cost` rows, bitstring printed most significant vertex first.
    pub fn write_csv(&self, index: &SubspaceIndex, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(out, "rank,bitstring,cost").map_err(io)?;
        for (r, (&x, &c)) in index.states().iter().zip(&self.values).enumerate() {
            writeln!(out, "{r},{},{c}", format_bits(x, index.n())).map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

/// Bitstring as text, vertex `n-1` first.
pub fn format_bits(x: Bits, n: usize) -> String {
    (0..n).rev().map(|i| if x >> i & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn build_cost_vector(instance: &ProblemInstance, index: &SubspaceIndex) -> Result<CostVector> {
    if instance.n() != index.n() || instance.k() != index.k() {
        return Err(Error::invalid(format!(
            "index is for (n={}, k={}) but instance has (n={}, k={})",
            index.n(),
            index.k(),
            instance.n(),
            instance.k()
        )));
    }
    let values: Vec<i64> = index
        .states()
        .iter()
        .map(|&x| instance.objective_unchecked(x))
        .collect();
    let c_max = values.iter().copied().max().unwrap_or(0);
    let c_min = values.iter().copied().min().unwrap_or(0);
    Ok(CostVector {
        values,
        c_max,
        c_min,
    })
}

/// Complex amplitudes over the feasible subspace, indexed by rank.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceState {
    amplitudes: Vec<Complex64>,
}

impl SubspaceState {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        SubspaceState { amplitudes }
    }

    /// Computational basis state of the given rank.
    pub fn basis(dim: usize, rank: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[rank] = Complex64::new(1.0, 0.0);
        SubspaceState { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &SubspaceState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Uniform superposition over all weight-`k` strings.
pub fn dicke_state(index: &SubspaceIndex) -> SubspaceState {
    let amp = 1.0 / (index.dim() as f64).sqrt();
    SubspaceState {
        amplitudes: vec![Complex64::new(amp, 0.0); index.dim()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, ProblemKind};

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 6), Some(924));
        assert_eq!(binomial(4, 2), Some(6));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(60, 30), Some(118_264_581_564_861_424));
    }

    #[test]
    fn index_n4_k2_is_numeric_order() {
        let idx = SubspaceIndex::new(4, 2).unwrap();
        assert_eq!(idx.states(), &[0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        for (r, &x) in idx.states().iter().enumerate() {
            assert_eq!(idx.rank(x).unwrap(), r);
        }
    }

    #[test]
    fn small_indices() {
        assert_eq!(SubspaceIndex::new(12, 6).unwrap().dim(), 924);
        let idx = SubspaceIndex::new(2, 1).unwrap();
        assert_eq!(idx.rank(0b01).unwrap(), 0);
        assert_eq!(idx.rank(0b10).unwrap(), 1);
    }

    #[test]
    fn index_errors() {
        assert!(matches!(SubspaceIndex::new(4, 0), Err(Error::InvalidInput(_))));
        assert!(matches!(SubspaceIndex::new(4, 4), Err(Error::InvalidInput(_))));
        assert!(matches!(
            SubspaceIndex::with_budget(12, 6, 900),
            Err(Error::Capacity { required: 924, .. })
        ));
        assert!(matches!(SubspaceIndex::new(40, 20), Err(Error::Capacity { .. })));
        let idx = SubspaceIndex::new(4, 2).unwrap();
        assert!(idx.rank(0b0111).is_err());
        assert!(idx.rank(0b1_0001).is_err());
        assert!(idx.unrank(6).is_err());
    }

    #[test]
    fn dicke_amplitudes() {
        let idx = SubspaceIndex::new(4, 2).unwrap();
        let psi = dicke_state(&idx);
        for a in psi.amplitudes() {
            assert!((a.re - 1.0 / 6f64.sqrt()).abs() < 1e-15);
            assert_eq!(a.im, 0.0);
        }
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-15);
        let psi2 = dicke_state(&SubspaceIndex::new(2, 1).unwrap());
        assert!((psi2.amplitudes()[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((psi2.amplitudes()[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn cost_vectors() {
        let idx = SubspaceIndex::new(4, 2).unwrap();
        let k4 = ProblemInstance::new(Graph::complete(4).unwrap(), ProblemKind::DensestSubgraph, 2).unwrap();
        let c = build_cost_vector(&k4, &idx).unwrap();
        assert_eq!(c.values(), &[1; 6]);
        assert_eq!(c.c_max(), 1);

        // by hand: pairs {01,02,12,03,13,23} contain path edges (0,1),(1,2),(2,3) at ranks 0,2,5
        let path = ProblemInstance::new(Graph::path(4).unwrap(), ProblemKind::DensestSubgraph, 2).unwrap();
        let c = build_cost_vector(&path, &idx).unwrap();
        assert_eq!(c.values(), &[1, 0, 1, 0, 0, 1]);
        assert_eq!(c.c_max(), 1);
        assert_eq!(c.c_min(), 0);
        assert_eq!(c.count_above(0), 3);

        for kind in ProblemKind::ALL {
            let empty = ProblemInstance::new(Graph::empty(4).unwrap(), kind, 2).unwrap();
            assert!(build_cost_vector(&empty, &idx).unwrap().values().iter().all(|&v| v == 0));
        }

        let other = SubspaceIndex::new(4, 1).unwrap();
        assert!(build_cost_vector(&path, &other).is_err());
    }

    #[test]
    fn cost_csv() {
        let dir = tempfile::tempdir().unwrap();
        let idx = SubspaceIndex::new(4, 2).unwrap();
        let path = ProblemInstance::new(Graph::path(4).unwrap(), ProblemKind::DensestSubgraph, 2).unwrap();
        let c = build_cost_vector(&path, &idx).unwrap();
        let file = dir.path().join("cost.csv");
        c.write_csv(&idx, &file).unwrap();
        let text = std::fs::read_to_string(file).unwrap();
        assert_eq!(text.lines().nth(1), Some("0,0011,1"));
        assert_eq!(text.lines().count(), 7);
    }
}
