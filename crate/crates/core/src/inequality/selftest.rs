//! Self-testing decision and the rank-deficient counterexample state.
//!
//! An expression self-tests its (connected) graph state exactly when the
//! stabilizers it uses have GF(2) rank `N`. When the rank is `N - 1`, the
//! equal mixture of the graph state and a copy with one generator eigenvalue
//! flipped reaches the same Bell value, so the state is not pinned down.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::inequality::config::BellConfig;
use crate::pauli::{generators, gf2_rank, Gf2Basis, PauliWord};
use crate::state::{expectation_mixed, stabilizer_projector, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfTestStatus {
    SelfTesting,
    NotSelfTesting,
    /// The graph is disconnected; no verdict is given.
    Unsupported,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SelfTestVerdict {
    pub rank: usize,
    pub n: usize,
    pub connected: bool,
}

impl SelfTestVerdict {
    pub fn is_selftesting(&self) -> bool {
        self.connected && self.rank == self.n
    }

    pub fn status(&self) -> SelfTestStatus {
        match (self.connected, self.rank == self.n) {
            (false, _) => SelfTestStatus::Unsupported,
            (true, true) => SelfTestStatus::SelfTesting,
            (true, false) => SelfTestStatus::NotSelfTesting,
        }
    }
}

pub fn is_selftesting(c: &BellConfig, g: &Graph) -> SelfTestVerdict {
    selftest_words(&c.used_words(), g)
}

pub fn selftest_words(words: &[PauliWord], g: &Graph) -> SelfTestVerdict {
    SelfTestVerdict { rank: gf2_rank(words), n: g.n(), connected: g.is_connected() }
}

/// Recovers the graph whose stabilizer group is spanned by `words`.
///
/// Needs rank `n` and an `x`-part of full rank; the group element with
/// `x`-part `e_i` is then `G_i`, whose `z`-part lists the neighbours of `i`.
/// Returns `None` when the span is not a graph-state stabilizer group.
pub fn recover_graph(words: &[PauliWord]) -> Option<Graph> {
    let n = words.first()?.len();
    if gf2_rank(words) != n {
        return None;
    }
    // Gauss-Jordan on the x parts, carrying z parts along.
    let mut rows: Vec<(u64, u64)> = words.iter().map(|w| (w.x_mask(), w.z_mask())).collect();
    let mut generator_z = vec![0u64; n];
    // full rank in x, so every column pivots and row `col` holds pivot `col`
    for col in 0..n {
        let bit = 1u64 << col;
        let p = (col..rows.len()).find(|&i| rows[i].0 & bit != 0)?;
        rows.swap(col, p);
        for i in 0..rows.len() {
            if i != col && rows[i].0 & bit != 0 {
                rows[i].0 ^= rows[col].0;
                rows[i].1 ^= rows[col].1;
            }
        }
    }
    for (i, row) in rows.iter().take(n).enumerate() {
        debug_assert_eq!(row.0, 1 << i);
        generator_z[i] = row.1;
    }
    let mut edges = Vec::new();
    for i in 0..n {
        if generator_z[i] >> i & 1 == 1 {
            return None;
        }
        for j in i + 1..n {
            let a = generator_z[i] >> j & 1;
            if a != generator_z[j] >> i & 1 {
                return None;
            }
            if a == 1 {
                edges.push((i + 1, j + 1));
            }
        }
    }
    Graph::new(n, &edges).ok()
}

/// The mixed state that matches the graph state on every stabilizer of a
/// rank-`(N-1)` set while differing from it.
#[derive(Debug, Clone)]
pub struct Counterexample {
    /// `(1/2) prod (S + I)/2` over the independent stabilizers.
    pub rho: DensityMatrix,
    /// Independent stabilizers used, in pivot order.
    pub independent: Vec<PauliWord>,
    /// Lowest-index generator outside their span (1-based vertex).
    pub missing_generator: usize,
    /// `psi'`: the independent stabilizers at `+1` and the missing generator at `-1`.
    pub flipped: DensityMatrix,
    /// Vertices whose generator has eigenvalue `-1` on `psi'`.
    pub flipped_vertices: Vec<usize>,
}

pub fn counterexample_state(c: &BellConfig, g: &Graph) -> Result<Counterexample> {
    counterexample_from_words(&c.used_words(), g)
}

pub fn counterexample_from_words(words: &[PauliWord], g: &Graph) -> Result<Counterexample> {
    let n = g.n();
    let mut basis = Gf2Basis::default();
    let mut independent = Vec::new();
    for w in words {
        if w.len() != n {
            return Err(Error::PartyMismatch { expected: n, found: w.len() });
        }
        if basis.insert(w.row()) {
            independent.push(*w);
        }
    }
    if independent.len() + 1 != n {
        return Err(Error::RankMismatch { expected: n - 1, found: independent.len() });
    }
    let gens = generators(g);
    let missing =
        gens.iter().position(|w| !basis.contains(w.row())).expect("rank N-1 leaves a generator outside the span");

    let base = stabilizer_projector(n, &independent);
    let mut rho = base.clone().into_matrix() * 0.5;
    rho = (&rho + rho.transpose()) * 0.5;
    let rho = DensityMatrix::new(n, rho)?;

    let dim = 1usize << n;
    let g_missing = crate::state::word_matrix(&gens[missing]).into_matrix();
    let minus = (nalgebra::DMatrix::identity(dim, dim) - g_missing) * 0.5;
    let flipped = DensityMatrix::new(n, symmetrize(&(minus * base.matrix())))?;
    let mut flipped_vertices = Vec::new();
    for (i, w) in gens.iter().enumerate() {
        if expectation_mixed(&flipped, w)? < -0.5 {
            flipped_vertices.push(i + 1);
        }
    }
    Ok(Counterexample { rho, independent, missing_generator: missing + 1, flipped, flipped_vertices })
}

fn symmetrize(m: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
    (m + m.transpose()) * 0.5
}
