//! Dense real-symmetric operators on `n` qubits and extremal eigenvalues.
//!
//! Every operator in this crate is built from `I`, `X`, `Z` and real
//! rotations of them, so real symmetric matrices represent the Hermitian
//! operators exactly. Basis index bit `i - 1` is qubit `i`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Single-qubit real operator `[[a00, a01], [a10, a11]]`.
pub type Qubit = [[f64; 2]; 2];

pub const ID: Qubit = [[1.0, 0.0], [0.0, 1.0]];
pub const PAULI_X: Qubit = [[0.0, 1.0], [1.0, 0.0]];
pub const PAULI_Z: Qubit = [[1.0, 0.0], [0.0, -1.0]];
/// `(X + Z) / sqrt 2`.
pub const HADAMARD_H: Qubit = [
    [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
    [std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2],
];
/// `(X - Z) / sqrt 2`.
pub const HADAMARD_V: Qubit = [
    [-std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
    [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
];

/// Default cap on qubits for dense vectors and matrices.
pub const DEFAULT_DENSE_LIMIT: usize = 14;

/// Largest dimension diagonalized in full; beyond it Lanczos is used.
pub const FULL_EIGEN_LIMIT: usize = 64;

pub fn check_dense(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::DenseLimit { n, limit })
    } else {
        Ok(())
    }
}

pub fn qubit_add(a: &Qubit, b: &Qubit, sb: f64) -> Qubit {
    let mut out = *a;
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] += sb * b[r][c];
        }
    }
    out
}

pub fn qubit_scale(a: &Qubit, s: f64) -> Qubit {
    let mut out = *a;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v *= s;
        }
    }
    out
}

pub fn qubit_mul(a: &Qubit, b: &Qubit) -> Qubit {
    let mut out = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn is_identity(q: &Qubit) -> bool {
    *q == ID
}

/// Tensor product of per-qubit factors; factor `k` acts on qubit `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductOperator {
    pub weight: f64,
    pub factors: Vec<Qubit>,
}

impl ProductOperator {
    pub fn n(&self) -> usize {
        self.factors.len()
    }

    /// `y += weight * (⊗ factors) x`.
    pub fn apply_add(&self, x: &[f64], y: &mut [f64], scratch: &mut Vec<f64>) {
        scratch.clear();
        scratch.extend_from_slice(x);
        for (site, f) in self.factors.iter().enumerate() {
            if !is_identity(f) {
                apply_local_vec(scratch, site, f);
            }
        }
        for (yi, si) in y.iter_mut().zip(scratch.iter()) {
            *yi += self.weight * si;
        }
    }

    /// Adds `weight * (⊗ factors)` into a dense matrix.
    pub fn add_to(&self, m: &mut DMatrix<f64>) {
        let dim = m.nrows();
        // Columns of the product are images of basis vectors; exploit the
        // two-sparse structure per site by expanding entry products directly.
        for c in 0..dim {
            let mut entries: Vec<(usize, f64)> = vec![(0, self.weight)];
            for (site, f) in self.factors.iter().enumerate() {
                let cb = (c >> site) & 1;
                let mut next = Vec::with_capacity(entries.len() * 2);
                for &(r, v) in &entries {
                    for (rb, row) in f.iter().enumerate() {
                        let a = row[cb];
                        if a != 0.0 {
                            next.push((r | rb << site, v * a));
                        }
                    }
                }
                entries = next;
                if entries.is_empty() {
                    break;
                }
            }
            for (r, v) in entries {
                m[(r, c)] += v;
            }
        }
    }
}

/// Applies a single-qubit operator on 0-based `site` to a state vector in place.
pub fn apply_local_vec(v: &mut [f64], site: usize, f: &Qubit) {
    let bit = 1usize << site;
    for i in 0..v.len() {
        if i & bit == 0 {
            let j = i | bit;
            let (a, b) = (v[i], v[j]);
            v[i] = f[0][0] * a + f[0][1] * b;
            v[j] = f[1][0] * a + f[1][1] * b;
        }
    }
}

/// `F M F^T` for a single-qubit `F` on 0-based `site`.
pub fn conjugate_local(m: &DMatrix<f64>, site: usize, f: &Qubit) -> DMatrix<f64> {
    let dim = m.nrows();
    let bit = 1usize << site;
    let mut left = m.clone();
    for c in 0..dim {
        for r in 0..dim {
            if r & bit == 0 {
                let s = r | bit;
                let (a, b) = (m[(r, c)], m[(s, c)]);
                left[(r, c)] = f[0][0] * a + f[0][1] * b;
                left[(s, c)] = f[1][0] * a + f[1][1] * b;
            }
        }
    }
    let mut out = left.clone();
    for c in 0..dim {
        if c & bit == 0 {
            let d = c | bit;
            for r in 0..dim {
                let (a, b) = (left[(r, c)], left[(r, d)]);
                out[(r, c)] = f[0][0] * a + f[0][1] * b;
                out[(r, d)] = f[1][0] * a + f[1][1] * b;
            }
        }
    }
    out
}

/// Anything that can be applied to a vector of length `dim`.
pub trait LinearMap {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Sum of product operators, applied without forming the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSum {
    pub n: usize,
    pub terms: Vec<ProductOperator>,
}

impl ProductSum {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for t in &self.terms {
            t.add_to(&mut m);
        }
        m
    }
}

impl LinearMap for ProductSum {
    fn dim(&self) -> usize {
        1 << self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        let mut scratch = Vec::with_capacity(x.len());
        for t in &self.terms {
            t.apply_add(x, y, &mut scratch);
        }
    }
}

/// Dense Hermitian (real symmetric) operator on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    n: usize,
    matrix: DMatrix<f64>,
}

impl HermitianOperator {
    /// Wraps `matrix`, symmetrizing away rounding-level asymmetry. Fails when
    /// the matrix is not `2^n` square or is asymmetric beyond `1e-12`.
    pub fn new(n: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let dim = 1usize << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: matrix.nrows() });
        }
        let asym = (&matrix - matrix.transpose()).amax();
        let scale = matrix.amax().max(1.0);
        if asym > 1e-12 * scale {
            return Err(Error::InvalidArgument(format!("matrix is not symmetric (residual {asym:e})")));
        }
        Ok(Self::from_symmetric(n, matrix))
    }

    pub(crate) fn from_symmetric(n: usize, matrix: DMatrix<f64>) -> Self {
        let sym = (&matrix + matrix.transpose()) * 0.5;
        HermitianOperator { n, matrix: sym }
    }

    pub fn zeros(n: usize) -> Self {
        let dim = 1usize << n;
        HermitianOperator { n, matrix: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(n: usize) -> Self {
        let dim = 1usize << n;
        HermitianOperator { n, matrix: DMatrix::identity(dim, dim) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// `Tr(self * other)`.
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        self.matrix.component_mul(&other.matrix).sum()
    }

    /// `<v| self |v>`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        v.dot(&(&self.matrix * &v))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn max_eigenvalue(&self) -> f64 {
        extremal_eigenpair(self, Extreme::Largest).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        extremal_eigenpair(self, Extreme::Smallest).0
    }

    pub fn scaled_add(&self, s: f64, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator { n: self.n, matrix: &self.matrix + &other.matrix * s }
    }
}

impl LinearMap for HermitianOperator {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let r = &self.matrix * DVector::from_column_slice(x);
        y.copy_from_slice(r.as_slice());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Largest,
    Smallest,
}

/// Largest or smallest eigenvalue with a unit eigenvector.
pub fn extremal_eigenpair<M: LinearMap + ?Sized>(map: &M, which: Extreme) -> (f64, Vec<f64>) {
    let dim = map.dim();
    if dim <= FULL_EIGEN_LIMIT {
        let mut m = DMatrix::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        let mut col = vec![0.0; dim];
        for c in 0..dim {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[c] = 1.0;
            map.apply(&e, &mut col);
            m.set_column(c, &DVector::from_column_slice(&col));
        }
        let m = (&m + m.transpose()) * 0.5;
        return dense_extremal(m, which);
    }
    lanczos(map, which, 1e-12, 40)
}

/// Extremal eigenvalue only; skips eigenvectors on the dense path.
pub fn extremal_eigenvalue(m: &DMatrix<f64>, which: Extreme) -> f64 {
    let ev = m.clone().symmetric_eigenvalues();
    match which {
        Extreme::Largest => ev.max(),
        Extreme::Smallest => ev.min(),
    }
}

fn dense_extremal(m: DMatrix<f64>, which: Extreme) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(m);
    let idx = match which {
        Extreme::Largest => eig.eigenvalues.imax(),
        Extreme::Smallest => eig.eigenvalues.imin(),
    };
    (eig.eigenvalues[idx], eig.eigenvectors.column(idx).iter().copied().collect())
}

// Restarted Lanczos with full reorthogonalization. Each cycle builds a Krylov
// basis of at most `krylov` vectors and restarts from the current Ritz vector.
fn lanczos<M: LinearMap + ?Sized>(map: &M, which: Extreme, tol: f64, max_restarts: usize) -> (f64, Vec<f64>) {
    let dim = map.dim();
    let krylov = dim.min(60);
    // deterministic, non-degenerate start vector
    let mut start: Vec<f64> = (0..dim).map(|i| 1.0 + ((i * 7919) % 104729) as f64 * 1e-5).collect();
    normalize(&mut start);
    let mut best = (f64::NAN, start.clone());
    let mut w = vec![0.0; dim];
    for _ in 0..max_restarts {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..krylov {
            map.apply(&basis[j], &mut w);
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            for _ in 0..2 {
                for b in &basis {
                    let p = dot(&w, b);
                    axpy(-p, b, &mut w);
                }
            }
            let norm = dot(&w, &w).sqrt();
            if j + 1 == krylov || norm < 1e-14 {
                break;
            }
            beta.push(norm);
            basis.push(w.iter().map(|v| v / norm).collect());
        }
        let k = alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let (theta, y) = dense_extremal(t, which);
        let mut ritz = vec![0.0; dim];
        for (c, b) in y.iter().zip(&basis) {
            axpy(*c, b, &mut ritz);
        }
        normalize(&mut ritz);
        map.apply(&ritz, &mut w);
        axpy(-theta, &ritz, &mut w);
        let resid = dot(&w, &w).sqrt();
        best = (theta, ritz.clone());
        if resid < tol * theta.abs().max(1.0) || k < krylov {
            break;
        }
        start = ritz;
    }
    best
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}
