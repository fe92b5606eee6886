//! Independent reference implementations. Nothing here calls the numeric
//! kernels of the library; only plain data (sequences, weights, edges) is
//! read from library types.

use nalgebra::{DMatrix, DVector};

use graphbell::inequality::BellExpression;
use graphbell::Graph;

pub fn mat(rows: [[f64; 2]; 2]) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[rows[0][0], rows[0][1], rows[1][0], rows[1][1]])
}

pub fn x() -> DMatrix<f64> {
    mat([[0.0, 1.0], [1.0, 0.0]])
}

pub fn z() -> DMatrix<f64> {
    mat([[1.0, 0.0], [0.0, -1.0]])
}

/// Qubit 1 is the least significant bit, so it is the rightmost factor.
pub fn kron_all(factors: &[DMatrix<f64>]) -> DMatrix<f64> {
    let mut out = DMatrix::from_element(1, 1, 1.0);
    for f in factors.iter().rev() {
        out = out.kronecker(f);
    }
    out
}

/// `CZ` along every edge applied to `|+>^n`, as explicit diagonal matrices.
pub fn graph_state(g: &Graph) -> DVector<f64> {
    let n = g.n();
    let dim = 1usize << n;
    let mut psi = DVector::from_element(dim, 1.0 / (dim as f64).sqrt());
    for &(i, j) in g.edges() {
        let cz = DMatrix::from_fn(dim, dim, |r, c| {
            if r != c {
                0.0
            } else if r >> (i - 1) & 1 == 1 && r >> (j - 1) & 1 == 1 {
                -1.0
            } else {
                1.0
            }
        });
        psi = cz * psi;
    }
    psi
}

/// Bell operator from the defining formulas, by Kronecker products.
pub fn bell_operator(e: &BellExpression, theta: &[f64]) -> DMatrix<f64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let h = (x() + z()) * r;
    let v = (x() - z()) * r;
    let dim = 1usize << e.n;
    let mut total = DMatrix::zeros(dim, dim);
    for t in &e.terms {
        let factors: Vec<DMatrix<f64>> = t
            .sequence
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let (c, sn) = (theta[i].cos(), theta[i].sin());
                let in_ac = e.ac.contains(&(i + 1));
                let (p, q) = if in_ac { (x(), z()) } else { (h.clone(), v.clone()) };
                let a = &p * c + &q * sn;
                let b = &p * c - &q * sn;
                match (s, in_ac) {
                    (0, _) => DMatrix::identity(2, 2),
                    (s, true) => a + b * s as f64,
                    (1, false) => a,
                    (_, false) => b,
                }
            })
            .collect();
        total += kron_all(&factors) * t.weight;
    }
    total
}

/// Term-by-term evaluation over every deterministic strategy.
pub fn classical_bound(e: &BellExpression) -> f64 {
    let n = e.n;
    let mut best = f64::NEG_INFINITY;
    for code in 0..1u64 << (2 * n) {
        let out = |bit: u64| if code >> bit & 1 == 1 { 1.0 } else { -1.0 };
        let value: f64 = e
            .terms
            .iter()
            .map(|t| {
                let mut p = t.weight;
                for (i, &s) in t.sequence.iter().enumerate() {
                    let (a, b) = (out(2 * i as u64), out(2 * i as u64 + 1));
                    p *= match (s, e.ac.contains(&(i + 1))) {
                        (0, _) => 1.0,
                        (s, true) => a + s as f64 * b,
                        (1, false) => a,
                        (_, false) => b,
                    };
                }
                p
            })
            .sum();
        best = best.max(value);
    }
    best
}

/// Rank over GF(2) of the `(x | z)` rows of sign sequences.
pub fn gf2_rank(sequences: &[Vec<i8>]) -> usize {
    let mut rows: Vec<Vec<u8>> = sequences
        .iter()
        .map(|s| {
            let mut r: Vec<u8> = s.iter().map(|&v| (v == 1) as u8).collect();
            r.extend(s.iter().map(|&v| (v == -1) as u8));
            r
        })
        .collect();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && rows[i][c] == 1 {
                let pivot = rows[rank].clone();
                for (a, b) in rows[i].iter_mut().zip(pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn expectation(op: &DMatrix<f64>, psi: &DVector<f64>) -> f64 {
    psi.dot(&(op * psi))
}

pub fn max_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().max()
}
