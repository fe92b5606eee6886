//! Robust self-testing: linear fidelity bounds `F >= s β + μ`.
//!
//! Each party applies the extraction channel
//! `Λ(ρ) = (1+g)/2 ρ + (1-g)/2 Γ ρ Γ`, `g(x) = (1+√2)(sin x + cos x - 1)`,
//! and `K(θ) = ⊗ Λ_i†(|ψ_G⟩⟨ψ_G|)`. If `K(θ) ⪰ s B(θ) + μ I` for every `θ`,
//! the extractable fidelity of any state reaching Bell value `β` is at least
//! `s β + μ`. The bound is pinned to `s β_Q + μ = 1` and `s` minimized.
//!
//! Note the sign: `g` uses `- 1`. With `+ 1` the channel would not be
//! completely positive (`g(0) = 2(1+√2)`) and would not reduce to the
//! identity at `x = π/4`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::inequality::BellExpression;
use crate::linalg::{
    check_dense, conjugate_local, extremal_eigenvalue, qubit_add, qubit_mul, qubit_scale, Extreme, HermitianOperator,
    Qubit, DEFAULT_DENSE_LIMIT, HADAMARD_H, HADAMARD_V, PAULI_X, PAULI_Z,
};
use crate::pauli::gf2_rank;
use crate::state::{expectation, graph_state_vector_limited};
use crate::verify::{bell_product_sum, coordinate_ascent, grid_axis, grid_point, with_threads, AngleAssignment};

/// `(1+√2)(sin x + cos x - 1)`; maps `[0, π/2]` onto `[0, 1]`.
pub fn extraction_g(x: f64) -> Result<f64> {
    check_angle(x)?;
    Ok((1.0 + SQRT_2) * (x.sin() + x.cos() - 1.0))
}

fn check_angle(x: f64) -> Result<()> {
    if (0.0..=FRAC_PI_2).contains(&x) {
        Ok(())
    } else {
        Err(Error::AngleOutOfRange(x))
    }
}

/// Second Kraus direction. The switch at `π/4` belongs to the upper branch.
pub fn extraction_gamma(x: f64, in_ac: bool) -> Qubit {
    match (in_ac, x < FRAC_PI_4) {
        (true, true) => PAULI_X,
        (true, false) => PAULI_Z,
        (false, true) => HADAMARD_H,
        (false, false) => HADAMARD_V,
    }
}

/// `Λ(ρ)` on one qubit. The dual channel has the same form.
pub fn extraction_channel(rho: &Qubit, x: f64, in_ac: bool) -> Result<Qubit> {
    let g = extraction_g(x)?;
    let gamma = extraction_gamma(x, in_ac);
    let flipped = qubit_mul(&qubit_mul(&gamma, rho), &gamma);
    Ok(qubit_add(&qubit_scale(rho, (1.0 + g) / 2.0), &flipped, (1.0 - g) / 2.0))
}

/// `K(θ)`: the per-party dual channels applied to the graph-state projector.
pub fn dual_k_operator(
    g: &Graph,
    ac: &[usize],
    angles: &AngleAssignment,
    dense_limit: usize,
) -> Result<HermitianOperator> {
    let n = g.n();
    if angles.len() != n {
        return Err(Error::PartyMismatch { expected: n, found: angles.len() });
    }
    check_dense(n, dense_limit)?;
    let psi = graph_state_vector_limited(g, dense_limit)?;
    let projector = psi.projector().into_matrix();
    let k = apply_channels(projector, ac, angles.theta())?;
    Ok(HermitianOperator::from_symmetric(n, k))
}

fn apply_channels(mut m: DMatrix<f64>, ac: &[usize], theta: &[f64]) -> Result<DMatrix<f64>> {
    for (site, &x) in theta.iter().enumerate() {
        let g = extraction_g(x)?;
        if g == 1.0 {
            continue;
        }
        let conj = conjugate_local(&m, site, &extraction_gamma(x, ac.contains(&(site + 1))));
        m = m * ((1.0 + g) / 2.0) + conj * ((1.0 - g) / 2.0);
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustOptions {
    /// Angle spacing of the minimization grid.
    pub grid_step: f64,
    /// Refinement stops once `h² < refine_tol` for angle step `h`.
    pub refine_tol: f64,
    /// Largest slope considered.
    pub s_max: f64,
    pub dense_limit: usize,
    pub threads: Option<usize>,
}

impl Default for RobustOptions {
    fn default() -> Self {
        RobustOptions {
            grid_step: PI / 60.0,
            refine_tol: 1e-8,
            s_max: 2.0,
            dense_limit: DEFAULT_DENSE_LIMIT,
            threads: None,
        }
    }
}

/// Pre-built pieces for evaluating `K(θ) - s B(θ)` at many angles.
struct Problem<'a> {
    e: &'a BellExpression,
    projector: DMatrix<f64>,
}

impl<'a> Problem<'a> {
    fn new(e: &'a BellExpression, g: &Graph, dense_limit: usize) -> Result<Self> {
        if g.n() != e.n {
            return Err(Error::PartyMismatch { expected: g.n(), found: e.n });
        }
        check_dense(e.n, dense_limit)?;
        let psi = graph_state_vector_limited(g, dense_limit)?;
        // a mislabelled graph (e.g. a star for a path) would fit the wrong state
        for (i, w) in e.words()?.iter().enumerate() {
            if (expectation(&psi, w)? - 1.0).abs() > 1e-9 {
                return Err(Error::NotAStabilizer { term: i + 1 });
            }
        }
        let projector = psi.projector().into_matrix();
        Ok(Problem { e, projector })
    }

    /// `(K(θ), B(θ))` as dense matrices.
    fn operators(&self, theta: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
        let k = apply_channels(self.projector.clone(), &self.e.ac, theta).expect("grid angles are in range");
        let angles = AngleAssignment::new(theta.to_vec()).expect("grid angles are in range");
        let b = bell_product_sum(self.e, &angles).expect("party counts match").to_dense();
        (k, b)
    }

    fn lambda_min(k: &DMatrix<f64>, b: &DMatrix<f64>, s: f64) -> f64 {
        extremal_eigenvalue(&(k - b * s), Extreme::Smallest)
    }

    /// Smallest `s` in `[lo, s_max]` with `λ_min(K - sB) + s β_Q >= 1`,
    /// given that it fails at `lo`. The gap is concave and non-decreasing in
    /// `s`, so bisection applies.
    fn critical_slope(&self, k: &DMatrix<f64>, b: &DMatrix<f64>, lo: f64, s_max: f64) -> Option<f64> {
        let gap = |s: f64| Self::lambda_min(k, b, s) + s * self.e.beta_q - 1.0;
        if gap(s_max) < -FEASIBILITY_SLACK {
            return None;
        }
        let (mut lo, mut hi) = (lo, s_max);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if gap(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    /// Whether `K - sB - (1 - s β_Q) I` is positive semidefinite (up to
    /// `FEASIBILITY_SLACK`), via a Cholesky attempt.
    fn feasible(&self, k: &DMatrix<f64>, b: &DMatrix<f64>, s: f64) -> bool {
        let shift = 1.0 - s * self.e.beta_q - FEASIBILITY_SLACK;
        let mut m = k - b * s;
        for i in 0..m.nrows() {
            m[(i, i)] -= shift;
        }
        m.cholesky().is_some()
    }
}

/// Slack for feasibility checks on the operator inequality.
const FEASIBILITY_SLACK: f64 = 1e-11;

/// `μ(s) = min_θ λ_min(K(θ) - s B(θ))` over the grid, refined locally.
pub fn mu_for_s(e: &BellExpression, g: &Graph, s: f64, opts: &RobustOptions) -> Result<(f64, AngleAssignment)> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::InvalidArgument(format!("slope must be non-negative, got {s}")));
    }
    let problem = Problem::new(e, g, opts.dense_limit)?;
    let n = e.n;
    let axis = grid_axis(opts.grid_step)?;
    let total = (axis.len() as u64).pow(n as u32);
    let eval = |theta: &[f64]| {
        let (k, b) = problem.operators(theta);
        Problem::lambda_min(&k, &b, s)
    };
    let (neg, idx) = with_threads(opts.threads, || {
        (0..total)
            .into_par_iter()
            .map(|i| (-eval(&grid_point(&axis, n, i)), i))
            .reduce(|| (f64::NEG_INFINITY, u64::MAX), first_max)
    });
    let (theta, neg) =
        coordinate_ascent(grid_point(&axis, n, idx), neg, opts.grid_step / 2.0, opts.refine_tol, |t| -eval(t));
    Ok((-neg, AngleAssignment::new(theta)?))
}

fn first_max(x: (f64, u64), y: (f64, u64)) -> (f64, u64) {
    if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
        y
    } else {
        x
    }
}

/// Fitted bound `F >= s β + μ`, also in normalized form
/// `F >= a x + b` with `x = (β - β_C)/(β_Q - β_C)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFidelityBound {
    pub s: f64,
    pub mu: f64,
    pub beta_c: f64,
    pub beta_q: f64,
    pub a: f64,
    pub b: f64,
    pub beta_half: f64,
}

impl LinearFidelityBound {
    /// Bound saturating `s β_Q + μ = 1`.
    pub fn saturating(s: f64, beta_c: f64, beta_q: f64) -> Result<Self> {
        Self::new(s, 1.0 - s * beta_q, beta_c, beta_q)
    }

    pub fn new(s: f64, mu: f64, beta_c: f64, beta_q: f64) -> Result<Self> {
        if s.is_nan() || s <= 0.0 {
            return Err(Error::NonPositiveSlope(s));
        }
        Ok(LinearFidelityBound {
            s,
            mu,
            beta_c,
            beta_q,
            a: s * (beta_q - beta_c),
            b: s * beta_c + mu,
            beta_half: (0.5 - mu) / s,
        })
    }

    /// Lower bound on the fidelity at raw Bell value `beta`.
    pub fn fidelity(&self, beta: f64) -> f64 {
        self.s * beta + self.mu
    }
}

/// Result of [`optimal_linear_bound`] with the worst-case angles found.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustFit {
    pub bound: LinearFidelityBound,
    /// Angles at which the operator inequality is tight.
    pub critical_angles: AngleAssignment,
    pub grid_step: f64,
    pub refine_tol: f64,
}

/// Smallest `s` such that `K(θ) ⪰ s B(θ) + (1 - s β_Q) I` on the searched
/// angle set.
///
/// For fixed `θ` the gap `λ_min(K - sB) + s β_Q - 1` is concave in `s` with
/// non-negative slope at infinity (since `λ_max(B) <= β_Q`), so it is
/// non-decreasing and each `θ` has a critical slope `s_θ`. The answer is the
/// largest `s_θ`. The grid is scanned with one Cholesky test per point at the
/// running maximum, bisecting only where it fails; the top points are then
/// refined by coordinate ascent on `s_θ`.
pub fn optimal_linear_bound(e: &BellExpression, g: &Graph, opts: &RobustOptions) -> Result<RobustFit> {
    let words = e.words()?;
    let rank = gf2_rank(&words);
    if rank != e.n || !g.is_connected() {
        return Err(Error::NotSelfTesting { rank, n: e.n });
    }
    let problem = Problem::new(e, g, opts.dense_limit)?;
    let n = e.n;
    let axis = grid_axis(opts.grid_step)?;
    let total = (axis.len() as u64).pow(n as u32);

    let slope_at = |theta: &[f64], floor: f64| -> Option<Option<f64>> {
        let (k, b) = problem.operators(theta);
        if problem.feasible(&k, &b, floor) {
            return Some(None);
        }
        problem.critical_slope(&k, &b, floor, opts.s_max).map(Some)
    };

    // Chunks scan independently from a shared starting floor; the reduction
    // keeps the largest slope and, among equals, the smallest index.
    const CHUNK: u64 = 4096;
    let start = problem_floor(&problem, n);
    let chunks = total.div_ceil(CHUNK);
    let scanned: Vec<Option<(f64, u64)>> = with_threads(opts.threads, || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut best = (start, u64::MAX);
                for i in c * CHUNK..((c + 1) * CHUNK).min(total) {
                    match slope_at(&grid_point(&axis, n, i), best.0) {
                        None => return None,
                        Some(Some(s)) if s > best.0 => best = (s, i),
                        _ => {}
                    }
                }
                Some(best)
            })
            .collect()
    });
    let mut best = (start, u64::MAX);
    for c in scanned {
        let c = c.ok_or(Error::BoundNotFound { max_s: opts.s_max })?;
        best = first_max(best, c);
    }

    // Refine from the critical grid point.
    let start_theta = if best.1 == u64::MAX { vec![FRAC_PI_4; n] } else { grid_point(&axis, n, best.1) };
    let mut s_star = best.0;
    let critical = |theta: &[f64]| -> f64 {
        let (k, b) = problem.operators(theta);
        let gap = Problem::lambda_min(&k, &b, s_star) + s_star * e.beta_q - 1.0;
        if gap >= 0.0 {
            // no improvement at the current level
            return s_star - gap;
        }
        problem.critical_slope(&k, &b, s_star, opts.s_max).unwrap_or(opts.s_max)
    };
    let (theta, refined) = coordinate_ascent(start_theta, s_star, opts.grid_step / 2.0, opts.refine_tol, critical);
    s_star = s_star.max(refined);

    Ok(RobustFit {
        bound: LinearFidelityBound::saturating(s_star, e.beta_c, e.beta_q)?,
        critical_angles: AngleAssignment::new(theta)?,
        grid_step: opts.grid_step,
        refine_tol: opts.refine_tol,
    })
}

/// Starting floor for the scan: the critical slope of a few corner points.
/// Any valid `s_θ` is a lower bound on the answer, so starting there only
/// saves bisections.
fn problem_floor(problem: &Problem<'_>, n: usize) -> f64 {
    let mut floor = 0.0;
    for corner in [0.0, FRAC_PI_2] {
        let theta = vec![corner; n];
        let (k, b) = problem.operators(&theta);
        if !problem.feasible(&k, &b, floor) {
            if let Some(s) = problem.critical_slope(&k, &b, floor, 2.0) {
                floor = floor.max(s);
            }
        }
    }
    // stay strictly below so the critical point itself is recorded
    (floor - 1e-9).max(0.0)
}

/// `β₀.₅ = (0.5 - μ)/s`: Bell values above it certify fidelity above one
/// half and hence genuine multipartite entanglement.
pub fn witness_threshold(b: &LinearFidelityBound) -> Result<f64> {
    if b.s.is_nan() || b.s <= 0.0 {
        return Err(Error::NonPositiveSlope(b.s));
    }
    Ok((0.5 - b.mu) / b.s)
}

/// `β₀.₅` from the normalized form: `(0.5 - b)(β_Q - β_C)/a + β_C`.
pub fn witness_threshold_normalized(bound: &LinearFidelityBound) -> Result<f64> {
    if bound.a.is_nan() || bound.a <= 0.0 {
        return Err(Error::NonPositiveSlope(bound.a));
    }
    Ok((0.5 - bound.b) * (bound.beta_q - bound.beta_c) / bound.a + bound.beta_c)
}

/// `samples` points `(x, F)` with `x` uniform on `[0, 1]` and `F` the bound
/// at `β = β_C + x (β_Q - β_C)`.
pub fn fidelity_curve(b: &LinearFidelityBound, samples: usize) -> Result<Vec<(f64, f64)>> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("a curve needs at least 2 samples, got {samples}")));
    }
    Ok((0..samples)
        .map(|k| {
            let x = k as f64 / (samples - 1) as f64;
            (x, b.fidelity(b.beta_c + x * (b.beta_q - b.beta_c)))
        })
        .collect())
}

pub const CURVE_HEADER: &str = "normalized_beta,fidelity_lower_bound";

/// CSV with [`CURVE_HEADER`] and six decimals per value.
pub fn curve_csv(points: &[(f64, f64)]) -> String {
    let mut out = format!("{CURVE_HEADER}\n");
    for (x, f) in points {
        writeln!(out, "{x:.6},{f:.6}").expect("writing to a string");
    }
    out
}

/// Published Mermin-inequality bound used as a comparison line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MerminReference {
    pub parties: usize,
    pub s: f64,
    pub mu: f64,
    pub beta_c: f64,
    pub beta_q: f64,
}

impl MerminReference {
    pub fn for_parties(n: usize) -> Option<Self> {
        match n {
            3 => Some(MerminReference {
                parties: 3,
                s: (2.0 + SQRT_2) / 8.0,
                mu: -1.0 / SQRT_2,
                beta_c: 2.0,
                beta_q: 4.0,
            }),
            4 => Some(MerminReference { parties: 4, s: 0.219, mu: -0.752, beta_c: 4.0, beta_q: 8.0 }),
            _ => None,
        }
    }

    pub fn bound(&self) -> LinearFidelityBound {
        LinearFidelityBound::new(self.s, self.mu, self.beta_c, self.beta_q).expect("positive slope")
    }
}
