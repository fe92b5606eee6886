//! Numerical certification of classical and quantum bounds.
//!
//! Classical bounds are exact maxima over all `4^N` deterministic strategies.
//! Quantum values use the qubit reduction with one angle per party:
//! inside AC `A, B = cos θ X ± sin θ Z`, elsewhere the same with `X, Z`
//! replaced by `H, V = (X ± Z)/√2`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::inequality::selftest::{counterexample_from_words, recover_graph, SelfTestStatus};
use crate::inequality::{BellExpression, Term};
use crate::linalg::{
    check_dense, extremal_eigenpair, extremal_eigenvalue, qubit_add, Extreme, HermitianOperator, LinearMap,
    ProductOperator, ProductSum, Qubit, DEFAULT_DENSE_LIMIT, FULL_EIGEN_LIMIT, HADAMARD_H, HADAMARD_V, ID, PAULI_X,
    PAULI_Z,
};
use crate::pauli::gf2_rank;
use crate::state::{graph_state_vector_limited, StateVector};

/// Largest party count accepted by [`brute_force_classical_bound`].
pub const MAX_ENUMERATION_PARTIES: usize = 13;

/// One deterministic local strategy: party `i + 1` outputs `a[i]` for `A`
/// and `b[i]` for `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Strategy {
    pub a: Vec<i8>,
    pub b: Vec<i8>,
}

impl Strategy {
    pub fn new(a: Vec<i8>, b: Vec<i8>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch(a.len(), b.len()));
        }
        if let Some((site, &v)) = a.iter().chain(&b).enumerate().find(|(_, v)| v.abs() != 1) {
            return Err(Error::BadSequenceEntry { site: site % a.len() + 1, value: v as i64 });
        }
        Ok(Strategy { a, b })
    }

    /// Every output `+1`.
    pub fn all_plus(n: usize) -> Self {
        Strategy { a: vec![1; n], b: vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Position in the lexicographic order over `(a1, b1, a2, b2, ...)`
    /// with `-1 < +1`.
    pub fn rank(&self) -> u64 {
        self.a.iter().zip(&self.b).fold(0, |acc, (&a, &b)| acc << 2 | ((a > 0) as u64) << 1 | (b > 0) as u64)
    }

    pub fn from_rank(n: usize, rank: u64) -> Self {
        let mut a = vec![0; n];
        let mut b = vec![0; n];
        for i in 0..n {
            let shift = 2 * (n - 1 - i);
            a[i] = if rank >> (shift + 1) & 1 == 1 { 1 } else { -1 };
            b[i] = if rank >> shift & 1 == 1 { 1 } else { -1 };
        }
        Strategy { a, b }
    }

    fn masks(&self) -> (u64, u64) {
        let mask = |v: &[i8]| v.iter().enumerate().filter(|(_, &x)| x > 0).fold(0u64, |m, (i, _)| m | 1 << i);
        (mask(&self.a), mask(&self.b))
    }
}

/// Value of `e` when every `A_i, B_i` is replaced by `a_i, b_i`.
pub fn classical_value(e: &BellExpression, strategy: &Strategy) -> Result<f64> {
    if strategy.len() != e.n {
        return Err(Error::PartyMismatch { expected: e.n, found: strategy.len() });
    }
    let (a, b) = strategy.masks();
    Ok(CompiledTerms::new(e).value(a, b))
}

/// Terms as bit masks over parties (bit `i` is party `i + 1`).
struct CompiledTerms {
    terms: Vec<CompiledTerm>,
}

struct CompiledTerm {
    weight: f64,
    /// Parties read through `A` (outside AC, `+1`) and through `B`.
    a_set: u64,
    b_set: u64,
    /// AC parties with entry `+1` (need `a = b`) and `-1` (need `a = -b`).
    ac_plus: u64,
    ac_minus: u64,
}

impl CompiledTerms {
    fn new(e: &BellExpression) -> Self {
        let terms = e
            .terms
            .iter()
            .map(|t| {
                let mut c = CompiledTerm { weight: t.weight, a_set: 0, b_set: 0, ac_plus: 0, ac_minus: 0 };
                for (i, &s) in t.sequence.iter().enumerate() {
                    let bit = 1u64 << i;
                    match (e.in_ac(i + 1), s) {
                        (_, 0) => {}
                        (true, 1) => c.ac_plus |= bit,
                        (true, _) => c.ac_minus |= bit,
                        (false, 1) => c.a_set |= bit,
                        (false, _) => c.b_set |= bit,
                    }
                }
                c
            })
            .collect();
        CompiledTerms { terms }
    }

    /// `a`, `b`: masks of parties outputting `+1`.
    fn value(&self, a: u64, b: u64) -> f64 {
        let diff = a ^ b;
        let mut total = 0.0;
        for t in &self.terms {
            if diff & t.ac_plus != 0 || diff & t.ac_minus != t.ac_minus {
                continue;
            }
            // (a + s b) = 2a when it does not vanish
            let ac = t.ac_plus | t.ac_minus;
            let negatives = (!a & (t.a_set | ac)).count_ones() + (!b & t.b_set).count_ones();
            let magnitude = t.weight * (1u64 << ac.count_ones()) as f64;
            total += if negatives.is_multiple_of(2) { magnitude } else { -magnitude };
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalBound {
    pub value: f64,
    /// Lexicographically smallest maximizer.
    pub argmax: Strategy,
}

/// Exact classical bound by enumerating all `4^N` deterministic strategies.
pub fn brute_force_classical_bound(e: &BellExpression) -> Result<ClassicalBound> {
    let n = e.n;
    if n > MAX_ENUMERATION_PARTIES {
        return Err(Error::EnumerationLimit { n, limit: MAX_ENUMERATION_PARTIES });
    }
    let compiled = CompiledTerms::new(e);
    let total: u64 = 1 << (2 * n);
    // party i+1 owns rank bits 2(n-1-i)+1 (a) and 2(n-1-i) (b)
    let decode = |rank: u64| -> (u64, u64) {
        let (mut a, mut b) = (0u64, 0u64);
        for i in 0..n {
            let shift = 2 * (n - 1 - i);
            a |= (rank >> (shift + 1) & 1) << i;
            b |= (rank >> shift & 1) << i;
        }
        (a, b)
    };
    const CHUNK: u64 = 1 << 14;
    let chunks = total.div_ceil(CHUNK);
    let (value, rank) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut best = (f64::NEG_INFINITY, 0u64);
            for rank in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let (a, b) = decode(rank);
                let v = compiled.value(a, b);
                if v > best.0 {
                    best = (v, rank);
                }
            }
            best
        })
        .reduce(|| (f64::NEG_INFINITY, u64::MAX), better_first);
    Ok(ClassicalBound { value, argmax: Strategy::from_rank(n, rank) })
}

/// Larger value wins; equal values go to the smaller index.
fn better_first(x: (f64, u64), y: (f64, u64)) -> (f64, u64) {
    if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
        y
    } else {
        x
    }
}

/// One measurement angle per party, each in `[0, π/2]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleAssignment {
    theta: Vec<f64>,
}

impl AngleAssignment {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if let Some(&t) = theta.iter().find(|t| !(0.0..=FRAC_PI_2).contains(*t)) {
            return Err(Error::AngleOutOfRange(t));
        }
        Ok(AngleAssignment { theta })
    }

    /// `θ_i = π/4` for every party.
    pub fn canonical(n: usize) -> Self {
        AngleAssignment { theta: vec![FRAC_PI_4; n] }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }
}

/// `(A, B)` for a party at angle `theta`.
pub fn observables(theta: f64, in_ac: bool) -> Result<(Qubit, Qubit)> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::AngleOutOfRange(theta));
    }
    let (c, s) = (theta.cos(), theta.sin());
    let (h, v) = if in_ac { (PAULI_X, PAULI_Z) } else { (HADAMARD_H, HADAMARD_V) };
    let hc = crate::linalg::qubit_scale(&h, c);
    Ok((qubit_add(&hc, &v, s), qubit_add(&hc, &v, -s)))
}

fn term_factors(e: &BellExpression, t: &Term, obs: &[(Qubit, Qubit)]) -> Vec<Qubit> {
    t.sequence
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let (a, b) = &obs[i];
            match (e.in_ac(i + 1), s) {
                (_, 0) => ID,
                (true, s) => qubit_add(a, b, s as f64),
                (false, 1) => *a,
                (false, _) => *b,
            }
        })
        .collect()
}

/// The Bell operator as a sum of tensor products; usable at any `N`.
pub fn bell_product_sum(e: &BellExpression, angles: &AngleAssignment) -> Result<ProductSum> {
    if angles.len() != e.n {
        return Err(Error::PartyMismatch { expected: e.n, found: angles.len() });
    }
    let obs =
        angles.theta.iter().enumerate().map(|(i, &t)| observables(t, e.in_ac(i + 1))).collect::<Result<Vec<_>>>()?;
    let terms =
        e.terms.iter().map(|t| ProductOperator { weight: t.weight, factors: term_factors(e, t, &obs) }).collect();
    Ok(ProductSum { n: e.n, terms })
}

/// Dense Bell operator; `dense_limit` caps the qubit count.
pub fn bell_operator(e: &BellExpression, angles: &AngleAssignment, dense_limit: usize) -> Result<HermitianOperator> {
    check_dense(e.n, dense_limit)?;
    let ps = bell_product_sum(e, angles)?;
    Ok(HermitianOperator::from_symmetric(e.n, ps.to_dense()))
}

/// `<psi| B(θ) |psi>`.
pub fn expression_value(e: &BellExpression, angles: &AngleAssignment, psi: &StateVector) -> Result<f64> {
    if psi.n() != e.n {
        return Err(Error::PartyMismatch { expected: e.n, found: psi.n() });
    }
    let ps = bell_product_sum(e, angles)?;
    let mut y = vec![0.0; psi.amplitudes().len()];
    ps.apply(psi.amplitudes(), &mut y);
    Ok(crate::linalg::dot(psi.amplitudes(), &y))
}

/// Graph-state value at canonical angles.
pub fn canonical_value(e: &BellExpression, g: &Graph, dense_limit: usize) -> Result<f64> {
    if g.n() != e.n {
        return Err(Error::PartyMismatch { expected: g.n(), found: e.n });
    }
    let psi = graph_state_vector_limited(g, dense_limit)?;
    expression_value(e, &AngleAssignment::canonical(e.n), &psi)
}

/// `λ_max` of the Bell operator at `angles`.
pub fn max_eigenvalue(e: &BellExpression, angles: &AngleAssignment) -> Result<f64> {
    let ps = bell_product_sum(e, angles)?;
    Ok(lambda(&ps, Extreme::Largest))
}

pub(crate) fn lambda(ps: &ProductSum, which: Extreme) -> f64 {
    if ps.dim() <= FULL_EIGEN_LIMIT {
        extremal_eigenvalue(&ps.to_dense(), which)
    } else {
        extremal_eigenpair(ps, which).0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOptions {
    /// Angle spacing of the grid, per party.
    pub grid_step: f64,
    /// Refinement stops once the value can change by less than this.
    pub refine_tol: f64,
    /// Largest number of grid points evaluated; above it the grid is
    /// subsampled at random (with the canonical point always included).
    pub budget: usize,
    pub seed: u64,
    pub dense_limit: usize,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            grid_step: PI / 32.0,
            refine_tol: 1e-8,
            budget: 200_000,
            seed: 0,
            dense_limit: DEFAULT_DENSE_LIMIT,
            threads: None,
        }
    }
}

/// Runs `f` on a pool with `threads` workers, or on the current pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(k) => rayon::ThreadPoolBuilder::new().num_threads(k).build().expect("thread pool").install(f),
        None => f(),
    }
}

/// Angle grid `{0, step, 2 step, ...} ∩ [0, π/2]`, with `π/2` included.
pub(crate) fn grid_axis(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= FRAC_PI_2) {
        return Err(Error::InvalidArgument(format!("grid step {step} outside (0, π/2]")));
    }
    let k = (FRAC_PI_2 / step - 1e-9).ceil() as usize;
    Ok((0..=k).map(|i| (i as f64 * step).min(FRAC_PI_2)).collect())
}

/// Grid point with mixed-radix index `idx` (party 1 most significant).
pub(crate) fn grid_point(axis: &[f64], n: usize, mut idx: u64) -> Vec<f64> {
    let m = axis.len() as u64;
    let mut theta = vec![0.0; n];
    for i in (0..n).rev() {
        theta[i] = axis[(idx % m) as usize];
        idx /= m;
    }
    theta
}

/// Indices to visit: the whole grid if it fits the budget, otherwise a
/// seeded random sample plus the grid point nearest the canonical angles.
pub(crate) fn grid_indices(axis: &[f64], n: usize, budget: usize, seed: u64) -> Vec<u64> {
    let m = axis.len() as u64;
    let total = (m as f64).powi(n as i32);
    if total <= budget as f64 {
        return (0..m.pow(n as u32)).collect();
    }
    let centre = axis
        .iter()
        .enumerate()
        .min_by(|x, y| (x.1 - FRAC_PI_4).abs().total_cmp(&(y.1 - FRAC_PI_4).abs()))
        .map(|(k, _)| k as u64)
        .unwrap_or(0);
    let canonical = (0..n).fold(0u64, |acc, _| acc * m + centre);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![canonical];
    out.extend((1..budget.max(1)).map(|_| (0..n).fold(0u64, |acc, _| acc * m + rng.gen_range(0..m))));
    out.sort_unstable();
    out.dedup();
    out
}

/// Pattern search over single coordinates: tries `θ_i ± h`, halves `h` when
/// nothing improves, and stops once `h² < tol` (the value is then stationary
/// to about `tol`). Maximizes `f`.
pub(crate) fn coordinate_ascent(
    start: Vec<f64>,
    start_value: f64,
    h0: f64,
    tol: f64,
    mut f: impl FnMut(&[f64]) -> f64,
) -> (Vec<f64>, f64) {
    let mut theta = start;
    let mut best = start_value;
    let mut h = h0;
    while h * h >= tol && h > 1e-12 {
        let mut improved = false;
        for i in 0..theta.len() {
            for dir in [1.0, -1.0] {
                let old = theta[i];
                let t = (old + dir * h).clamp(0.0, FRAC_PI_2);
                if t == old {
                    continue;
                }
                theta[i] = t;
                let v = f(&theta);
                if v > best {
                    best = v;
                    improved = true;
                    break;
                }
                theta[i] = old;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (theta, best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumSearch {
    pub value: f64,
    pub argmax: AngleAssignment,
    /// Grid points evaluated before refinement.
    pub grid_points: usize,
    /// Whether the full grid was searched (otherwise a random subsample).
    pub exhaustive: bool,
}

/// Largest `λ_max(B(θ))` over the angle grid, refined from the best point.
pub fn quantum_bound_search(e: &BellExpression, opts: &SearchOptions) -> Result<QuantumSearch> {
    let n = e.n;
    check_dense(n, opts.dense_limit)?;
    let axis = grid_axis(opts.grid_step)?;
    let indices = grid_indices(&axis, n, opts.budget, opts.seed);
    let exhaustive = (axis.len() as f64).powi(n as i32) <= opts.budget as f64;
    let eval = |theta: &[f64]| -> f64 {
        let angles = AngleAssignment { theta: theta.to_vec() };
        let ps = bell_product_sum(e, &angles).expect("angles on the grid are valid");
        lambda(&ps, Extreme::Largest)
    };
    let (value, idx) = with_threads(opts.threads, || {
        indices
            .par_iter()
            .map(|&i| (eval(&grid_point(&axis, n, i)), i))
            .reduce(|| (f64::NEG_INFINITY, u64::MAX), better_first)
    });
    let (theta, value) =
        coordinate_ascent(grid_point(&axis, n, idx), value, opts.grid_step / 2.0, opts.refine_tol, eval);
    Ok(QuantumSearch { value, argmax: AngleAssignment { theta }, grid_points: indices.len(), exhaustive })
}

/// Outcome of certifying one stored bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub stored: f64,
    pub certified: f64,
    pub tolerance: f64,
    pub ok: bool,
}

impl BoundCheck {
    fn new(stored: f64, certified: f64, tolerance: f64) -> Self {
        BoundCheck { stored, certified, tolerance, ok: (stored - certified).abs() <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleCheck {
    /// `Tr(ρ B)` at canonical angles.
    pub value: f64,
    pub beta_q: f64,
    pub tolerance: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub beta_c: BoundCheck,
    pub classical_argmax: Strategy,
    /// Graph-state value at canonical angles against the stored `β_Q`.
    pub canonical: Option<BoundCheck>,
    /// Searched maximum against the stored `β_Q`.
    pub beta_q: BoundCheck,
    pub quantum_argmax: Vec<f64>,
    pub quantum_grid_points: usize,
    pub quantum_exhaustive: bool,
    pub rank: usize,
    pub selftest: SelfTestStatus,
    pub counterexample: Option<CounterexampleCheck>,
    pub grid_step: f64,
    pub refine_tol: f64,
    pub wall_time_s: f64,
}

impl VerificationReport {
    /// Whether every certified value agrees with the stored one.
    pub fn consistent(&self) -> bool {
        self.beta_c.ok
            && self.beta_q.ok
            && self.canonical.as_ref().is_none_or(|c| c.ok)
            && self.counterexample.as_ref().is_none_or(|c| c.ok)
    }
}

pub const CLASSICAL_TOL: f64 = 1e-9;
pub const CANONICAL_TOL: f64 = 1e-10;
pub const SEARCH_TOL: f64 = 1e-6;
pub const COUNTEREXAMPLE_TOL: f64 = 1e-9;

/// Certifies the stored bounds of `e`. Without `graph`, the graph is
/// recovered from the stabilizers when they have full rank.
pub fn verify_expression(
    e: &BellExpression,
    graph: Option<&Graph>,
    opts: &SearchOptions,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let words = e.words()?;
    let recovered = if graph.is_none() { recover_graph(&words) } else { None };
    let graph = graph.or(recovered.as_ref());
    if let Some(g) = graph {
        if g.n() != e.n {
            return Err(Error::PartyMismatch { expected: g.n(), found: e.n });
        }
    }

    let classical = with_threads(opts.threads, || brute_force_classical_bound(e))?;
    let canonical = match graph {
        Some(g) => Some(BoundCheck::new(e.beta_q, canonical_value(e, g, opts.dense_limit)?, CANONICAL_TOL)),
        None => None,
    };
    let search = quantum_bound_search(e, opts)?;
    let rank = gf2_rank(&words);
    let selftest = match graph {
        Some(g) if !g.is_connected() => SelfTestStatus::Unsupported,
        _ if rank == e.n => SelfTestStatus::SelfTesting,
        _ => SelfTestStatus::NotSelfTesting,
    };
    let counterexample = match graph {
        Some(g) if rank + 1 == e.n && g.is_connected() => {
            check_dense(e.n, opts.dense_limit)?;
            let ce = counterexample_from_words(&words, g)?;
            let b = bell_operator(e, &AngleAssignment::canonical(e.n), opts.dense_limit)?;
            let value = ce.rho.trace_product(&b);
            Some(CounterexampleCheck {
                value,
                beta_q: e.beta_q,
                tolerance: COUNTEREXAMPLE_TOL,
                ok: (value - e.beta_q).abs() <= COUNTEREXAMPLE_TOL,
            })
        }
        _ => None,
    };
    Ok(VerificationReport {
        n: e.n,
        beta_c: BoundCheck::new(e.beta_c, classical.value, CLASSICAL_TOL),
        classical_argmax: classical.argmax,
        canonical,
        beta_q: BoundCheck::new(e.beta_q, search.value, SEARCH_TOL),
        quantum_argmax: search.argmax.theta,
        quantum_grid_points: search.grid_points,
        quantum_exhaustive: search.exhaustive,
        rank,
        selftest,
        counterexample,
        grid_step: opts.grid_step,
        refine_tol: opts.refine_tol,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
