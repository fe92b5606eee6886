//! Simple undirected graphs on vertices `1..=n`.
//!
//! Vertices are 1-based at every public boundary. Internally each vertex keeps
//! a neighbour bitmask with vertex `i` stored at bit `i - 1`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::MAX_QUBITS;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<u64>,
    connected: bool,
}

/// On-disk form: `{"n": 4, "edges": [[1,2],[2,3]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl Graph {
    /// Validates `edges` and builds the graph. Edges are stored as `(min, max)`
    /// in sorted order.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if n > MAX_QUBITS {
            return Err(Error::TooManyVertices(n));
        }
        let mut seen = BTreeSet::new();
        let mut adjacency = vec![0u64; n];
        for &(i, j) in edges {
            if i == 0 || j == 0 || i > n || j > n {
                return Err(Error::VertexOutOfRange { i, j, n });
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            let e = (i.min(j), i.max(j));
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge(i, j));
            }
            adjacency[i - 1] |= 1 << (j - 1);
            adjacency[j - 1] |= 1 << (i - 1);
        }
        let connected = is_connected(&adjacency);
        Ok(Graph { n, edges: seen.into_iter().collect(), adjacency, connected })
    }

    /// Star graph centred on vertex 1, the graph of the `n`-qubit GHZ state.
    pub fn ghz(n: usize) -> Result<Self> {
        let edges: Vec<_> = (2..=n).map(|j| (1, j)).collect();
        Graph::new(n, &edges)
    }

    /// Path `1 - 2 - ... - n`, the 1-D cluster state.
    pub fn cluster1d(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Graph::new(n, &edges)
    }

    /// Cycle on `n >= 3` vertices.
    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!("a ring needs at least 3 vertices, got {n}")));
        }
        let mut edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        edges.push((1, n));
        Graph::new(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Neighbour bitmask of vertex `v` (bit `u - 1` set for each neighbour `u`).
    pub fn neighbor_mask(&self, v: usize) -> u64 {
        self.adjacency[v - 1]
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        bits(self.adjacency[v - 1])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v - 1].count_ones() as usize
    }

    pub fn are_adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u - 1] >> (v - 1) & 1 == 1
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile { n: self.n, edges: self.edges.iter().map(|&(i, j)| [i, j]).collect() }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Graph::try_from(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("graph serializes")
    }
}

impl TryFrom<GraphFile> for Graph {
    type Error = Error;

    fn try_from(file: GraphFile) -> Result<Self> {
        let edges: Vec<_> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::new(file.n, &edges)
    }
}

/// Parses the built-in shorthands `ghz:<N>`, `cluster1d:<N>` and `ring:<N>`.
impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, n) = s.split_once(':').ok_or_else(|| Error::UnknownGraph(s.to_string()))?;
        let n: usize = n.trim().parse().map_err(|_| Error::UnknownGraph(s.to_string()))?;
        match kind.trim() {
            "ghz" => Graph::ghz(n),
            "cluster1d" => Graph::cluster1d(n),
            "ring" => Graph::ring(n),
            _ => Err(Error::UnknownGraph(s.to_string())),
        }
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} edges=[", self.n)?;
        for (k, (i, j)) in self.edges.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({i},{j})")?;
        }
        write!(f, "]")
    }
}

/// 1-based indices of the set bits of `mask`, ascending.
pub(crate) fn bits(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize + 1);
        mask &= mask - 1;
    }
    out
}

fn is_connected(adjacency: &[u64]) -> bool {
    let n = adjacency.len();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut reached = 1u64;
    let mut frontier = 1u64;
    while frontier != 0 {
        let mut next = 0;
        for v in bits(frontier) {
            next |= adjacency[v - 1];
        }
        frontier = next & !reached;
        reached |= next;
    }
    reached == all
}
