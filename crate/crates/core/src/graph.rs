//! Graphs, problem instances and the integer objectives of the three
//! Hamming-weight constrained problems.
//!
//! Bit convention used throughout the crate: bit `i` of a bitstring (the
//! `1 << i` place value) is set iff vertex `i` is in the selected set `V'`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded_rng;

/// Computational basis state; bit `i` is vertex `i`.
pub type Bits = u64;

/// Largest vertex count representable in a [`Bits`] word.
pub const MAX_VERTICES: usize = 63;

/// Simple undirected graph with edges stored as sorted `(u, v)` pairs, `u < v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        Graph::new(raw.n, raw.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph {
            n: g.n,
            edges: g.edges.into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl Graph {
    /// Builds a graph, normalising each pair to `u < v` and sorting.
    ///
    /// Self-loops, duplicate edges and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::invalid(format!(
                "vertex count must be in 1..={MAX_VERTICES}, got {n}"
            )));
        }
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop on vertex {a}")));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if v >= n {
                return Err(Error::invalid(format!("edge ({a},{b}) out of range for n={n}")));
            }
            list.push((u, v));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("duplicate edge {:?}", w[0])));
        }
        Ok(Graph { n, edges: list })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Graph::new(n, std::iter::empty())
    }

    pub fn complete(n: usize) -> Result<Self> {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Result<Self> {
        Graph::new(n, (1..n).map(|v| (v - 1, v)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: perm.len(),
            });
        }
        Graph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        read_json(path.as_ref())
    }
}

/// Erdős–Rényi `G(n, p)`: each of the `n(n-1)/2` pairs, visited in
/// lexicographic order, is kept iff a uniform draw in `[0, 1)` is below `p`.
pub fn generate_erdos_renyi(n: usize, edge_probability: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&edge_probability) {
        return Err(Error::invalid(format!(
            "edge probability must be in [0, 1], got {edge_probability}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let draw: f64 = rng.random();
            if draw < edge_probability {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// All 64 graphs on four labelled vertices.
///
/// Graph `i` contains the `j`-th pair of `(0,1), (0,2), (0,3), (1,2), (1,3), (2,3)`
/// iff bit `j` of `i` is set, so index 0 is the empty graph and index 63 is K4.
pub fn all_four_vertex_graphs() -> Vec<Graph> {
    const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    (0u32..64)
        .map(|mask| {
            let edges = PAIRS
                .iter()
                .enumerate()
                .filter(|(j, _)| mask & (1 << j) != 0)
                .map(|(_, &e)| e);
            Graph::new(4, edges).expect("four-vertex pairs are valid")
        })
        .collect()
}

/// The three constrained problems, each an edge predicate on membership in `V'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProblemKind {
    /// k-Densest Subgraph: edges with both endpoints in `V'` (AND).
    #[serde(rename = "densest")]
    DensestSubgraph,
    /// Max k-Vertex Cover: edges with at least one endpoint in `V'` (OR).
    #[serde(rename = "cover")]
    VertexCover,
    /// Max Bisection: edges crossing the cut (XOR), `k = n/2`.
    #[serde(rename = "bisection")]
    Bisection,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [
        ProblemKind::DensestSubgraph,
        ProblemKind::VertexCover,
        ProblemKind::Bisection,
    ];

    #[inline]
    pub fn edge_value(self, u_in: bool, v_in: bool) -> bool {
        match self {
            ProblemKind::DensestSubgraph => u_in && v_in,
            ProblemKind::VertexCover => u_in || v_in,
            ProblemKind::Bisection => u_in != v_in,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::DensestSubgraph => "densest",
            ProblemKind::VertexCover => "cover",
            ProblemKind::Bisection => "bisection",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "densest" | "densest-subgraph" | "kds" => Ok(ProblemKind::DensestSubgraph),
            "cover" | "vertex-cover" | "kvc" => Ok(ProblemKind::VertexCover),
            "bisection" | "max-bisection" => Ok(ProblemKind::Bisection),
            other => Err(Error::invalid(format!("unknown problem kind '{other}'"))),
        }
    }
}

/// A graph, a problem kind and the Hamming weight `k` of feasible solutions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct ProblemInstance {
    graph: Graph,
    kind: ProblemKind,
    k: usize,
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    #[serde(flatten)]
    graph: Graph,
    kind: ProblemKind,
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

impl TryFrom<RawInstance> for ProblemInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        ProblemInstance::new(raw.graph, raw.kind, raw.k).map(|i| i.with_seed(raw.seed))
    }
}

impl From<ProblemInstance> for RawInstance {
    fn from(i: ProblemInstance) -> Self {
        RawInstance {
            graph: i.graph,
            kind: i.kind,
            k: i.k,
            seed: i.seed,
        }
    }
}

impl ProblemInstance {
    pub fn new(graph: Graph, kind: ProblemKind, k: usize) -> Result<Self> {
        let n = graph.n();
        if k == 0 || k >= n {
            return Err(Error::invalid(format!("constraint weight must satisfy 0 < k < n, got k={k}, n={n}")));
        }
        if kind == ProblemKind::Bisection && 2 * k != n {
            return Err(Error::invalid(format!("bisection requires k = n/2, got k={k}, n={n}")));
        }
        Ok(ProblemInstance {
            graph,
            kind,
            k,
            seed: None,
        })
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Number of edges `e = (u, v)` with `f(u ∈ V', v ∈ V')` true.
    pub fn objective(&self, x: Bits) -> Result<i64> {
        let weight = x.count_ones() as usize;
        if weight != self.k {
            return Err(Error::invalid(format!(
                "bitstring {x:#b} has Hamming weight {weight}, expected {}",
                self.k
            )));
        }
        if self.n() < 64 && x >> self.n() != 0 {
            return Err(Error::invalid(format!("bitstring {x:#b} has bits beyond n={}", self.n())));
        }
        Ok(self.objective_unchecked(x))
    }

    /// [`objective`](Self::objective) without the weight check.
    #[inline]
    pub fn objective_unchecked(&self, x: Bits) -> i64 {
        self.graph
            .edges
            .iter()
            .filter(|&&(u, v)| self.kind.edge_value(x >> u & 1 == 1, x >> v & 1 == 1))
            .count() as i64
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        read_json(path.as_ref())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Bitstring with the given vertices set.
pub fn bits_of(vertices: &[usize]) -> Bits {
    vertices.iter().fold(0, |acc, &v| acc | 1 << v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance(g: Graph, kind: ProblemKind, k: usize) -> ProblemInstance {
        ProblemInstance::new(g, kind, k).unwrap()
    }

    #[test]
    fn k4_bisection_cuts_four_edges() {
        let inst = instance(Graph::complete(4).unwrap(), ProblemKind::Bisection, 2);
        for x in (0u64..16).filter(|x| x.count_ones() == 2) {
            assert_eq!(inst.objective(x).unwrap(), 4);
        }
    }

    #[test]
    fn path_densest_and_cover() {
        let path = Graph::path(4).unwrap();
        let kds = instance(path.clone(), ProblemKind::DensestSubgraph, 2);
        assert_eq!(kds.objective(bits_of(&[1, 2])).unwrap(), 1);
        assert_eq!(kds.objective(bits_of(&[0, 3])).unwrap(), 0);
        let kvc = instance(path, ProblemKind::VertexCover, 2);
        assert_eq!(kvc.objective(bits_of(&[1, 2])).unwrap(), 3);
    }

    #[test]
    fn objective_rejects_wrong_weight() {
        let inst = instance(Graph::path(4).unwrap(), ProblemKind::DensestSubgraph, 2);
        assert!(matches!(inst.objective(0b0111), Err(Error::InvalidInput(_))));
        assert!(matches!(inst.objective(0b1_0001), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(3, [(1, 1)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
        assert!(Graph::new(0, []).is_err());
        let g = Graph::new(4, [(3, 2), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (2, 3)]);
    }

    #[test]
    fn instance_validation() {
        let g = Graph::complete(4).unwrap();
        assert!(ProblemInstance::new(g.clone(), ProblemKind::DensestSubgraph, 0).is_err());
        assert!(ProblemInstance::new(g.clone(), ProblemKind::DensestSubgraph, 4).is_err());
        assert!(ProblemInstance::new(g.clone(), ProblemKind::Bisection, 1).is_err());
        assert!(ProblemInstance::new(g, ProblemKind::Bisection, 2).is_ok());
    }

    #[test]
    fn erdos_renyi_extremes_and_determinism() {
        assert_eq!(generate_erdos_renyi(5, 0.0, 3).unwrap().edge_count(), 0);
        assert_eq!(generate_erdos_renyi(5, 1.0, 3).unwrap(), Graph::complete(5).unwrap());
        assert_eq!(
            generate_erdos_renyi(12, 0.5, 7).unwrap(),
            generate_erdos_renyi(12, 0.5, 7).unwrap()
        );
        assert_ne!(
            generate_erdos_renyi(12, 0.5, 7).unwrap(),
            generate_erdos_renyi(12, 0.5, 8).unwrap()
        );
        assert!(generate_erdos_renyi(5, 1.5, 3).is_err());
    }

    #[test]
    fn four_vertex_enumeration() {
        let all = all_four_vertex_graphs();
        assert_eq!(all.len(), 64);
        assert_eq!(all[0].edge_count(), 0);
        assert_eq!(all.iter().filter(|g| g.edge_count() == 6).count(), 1);
        assert_eq!(all[63], Graph::complete(4).unwrap());
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 64);
    }

    #[test]
    fn json_format() {
        let g = Graph::new(3, [(1, 2), (0, 1)]).unwrap();
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
        let inst = instance(g, ProblemKind::VertexCover, 1).with_seed(Some(5));
        let text = serde_json::to_string(&inst).unwrap();
        assert_eq!(text, r#"{"n":3,"edges":[[0,1],[1,2]],"kind":"cover","k":1,"seed":5}"#);
        let back: ProblemInstance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, inst);
        assert!(serde_json::from_str::<Graph>(r#"{"n":2,"edges":[[0,2]]}"#).is_err());
        assert!(serde_json::from_str::<ProblemInstance>(
            r#"{"n":4,"edges":[],"kind":"bisection","k":1}"#
        )
        .is_err());
    }

    #[test]
    fn kind_parsing() {
        for kind in ProblemKind::ALL {
            assert_eq!(kind.as_str().parse::<ProblemKind>().unwrap(), kind);
        }
        assert!("maxcut".parse::<ProblemKind>().is_err());
    }
}
