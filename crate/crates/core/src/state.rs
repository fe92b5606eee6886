//! Dense graph-state vectors and Pauli expectations.
//!
//! Amplitudes are real: `prod CZ |+>^n` has only `±2^{-n/2}` entries, and
//! X/Z words keep vectors real. Basis bit `i - 1` is qubit `i`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{check_dense, HermitianOperator, DEFAULT_DENSE_LIMIT};
use crate::pauli::PauliWord;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<f64>,
}

/// Density operators share the dense operator representation.
pub type DensityMatrix = HermitianOperator;

impl StateVector {
    /// Wraps amplitudes; the squared norm must be 1 within `1e-12`.
    pub fn new(n: usize, amplitudes: Vec<f64>) -> Result<Self> {
        let dim = 1usize << n;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: amplitudes.len() });
        }
        let norm: f64 = amplitudes.iter().map(|a| a * a).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("state has squared norm {norm}")));
        }
        Ok(StateVector { n, amplitudes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        HermitianOperator::from_symmetric(self.n, &v * v.transpose())
    }

    /// `w |self>`.
    pub fn apply_word(&self, w: &PauliWord) -> Result<StateVector> {
        check_len(self.n, w)?;
        let (x, z) = (w.x_mask() as usize, w.z_mask() as usize);
        let mut out = vec![0.0; self.amplitudes.len()];
        for (b, a) in self.amplitudes.iter().enumerate() {
            let sign = if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[b ^ x] = sign * a;
        }
        Ok(StateVector { n: self.n, amplitudes: out })
    }

    pub fn inner(&self, other: &StateVector) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a * b).sum()
    }
}

fn check_len(n: usize, w: &PauliWord) -> Result<()> {
    if w.len() != n {
        Err(Error::DimensionMismatch { expected: n, found: w.len() })
    } else {
        Ok(())
    }
}

/// `|psi_G> = prod_{(i,j) in E} CZ_{ij} |+>^n`, capped at
/// [`DEFAULT_DENSE_LIMIT`] qubits.
pub fn graph_state_vector(g: &Graph) -> Result<StateVector> {
    graph_state_vector_limited(g, DEFAULT_DENSE_LIMIT)
}

pub fn graph_state_vector_limited(g: &Graph, max_qubits: usize) -> Result<StateVector> {
    let n = g.n();
    check_dense(n, max_qubits)?;
    let dim = 1usize << n;
    let amp = (dim as f64).sqrt().recip();
    let edge_masks: Vec<usize> = g.edges().iter().map(|&(i, j)| 1 << (i - 1) | 1 << (j - 1)).collect();
    let amplitudes = (0..dim)
        .map(|b| {
            let flips = edge_masks.iter().filter(|&&m| b & m == m).count();
            if flips % 2 == 1 {
                -amp
            } else {
                amp
            }
        })
        .collect();
    Ok(StateVector { n, amplitudes })
}

/// `<state| w |state>`.
pub fn expectation(state: &StateVector, w: &PauliWord) -> Result<f64> {
    Ok(state.inner(&state.apply_word(w)?))
}

/// `Tr(rho w)` for a dense density matrix.
pub fn expectation_mixed(rho: &DensityMatrix, w: &PauliWord) -> Result<f64> {
    check_len(rho.n(), w)?;
    let m = rho.matrix();
    let (x, z) = (w.x_mask() as usize, w.z_mask() as usize);
    // Tr(rho W) = sum_b <b| rho W |b> = sum_b sign(b) rho[b, b ^ x]
    Ok((0..m.nrows())
        .map(|b| {
            let sign = if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            sign * m[(b, b ^ x)]
        })
        .sum())
}

/// Dense matrix of a Pauli word.
pub fn word_matrix(w: &PauliWord) -> HermitianOperator {
    let dim = 1usize << w.len();
    let (x, z) = (w.x_mask() as usize, w.z_mask() as usize);
    let mut m = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        let sign = if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        m[(b ^ x, b)] = sign;
    }
    HermitianOperator::from_symmetric(w.len(), m)
}

/// `prod_i (S_i + I) / 2` as a dense matrix.
pub fn stabilizer_projector(n: usize, words: &[PauliWord]) -> HermitianOperator {
    let dim = 1usize << n;
    let mut p = DMatrix::identity(dim, dim);
    for w in words {
        let half = (word_matrix(w).into_matrix() + DMatrix::identity(dim, dim)) * 0.5;
        p = half * p;
    }
    HermitianOperator::from_symmetric(n, p)
}
