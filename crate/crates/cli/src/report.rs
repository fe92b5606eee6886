use serde::Serialize;

use graphbell::inequality::SelfTestStatus;
use graphbell::robust::RobustFit;
use graphbell::verify::VerificationReport;

/// Machine-readable summary of one command.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub graph: Option<String>,
    pub construction: Option<String>,
    pub n: usize,
    pub beta_c: Option<Certified>,
    pub beta_q: Option<Certified>,
    pub selftest: Option<SelfTestStatus>,
    pub rank: Option<usize>,
    pub robust: Option<RobustSummary>,
    pub verification: Option<VerificationReport>,
    pub wall_time_s: f64,
}

/// A stored value next to the value certified for it.
#[derive(Debug, Serialize)]
pub struct Certified {
    pub stored: f64,
    pub certified: f64,
    pub tolerance: f64,
    pub method: &'static str,
}

#[derive(Debug, Serialize)]
pub struct RobustSummary {
    pub s: f64,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub beta_half: f64,
    /// `β₀.₅` via the normalized form; agrees with `beta_half` to `identity_tolerance`.
    pub beta_half_normalized: f64,
    pub identity_tolerance: f64,
    pub critical_angles: Vec<f64>,
    pub grid_step: f64,
    pub refine_tol: f64,
    pub mermin: Option<MerminSummary>,
}

#[derive(Debug, Serialize)]
pub struct MerminSummary {
    pub s: f64,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub beta_half: f64,
}

impl RobustSummary {
    pub fn new(fit: &RobustFit, beta_half_normalized: f64, mermin: Option<MerminSummary>) -> Self {
        let b = &fit.bound;
        RobustSummary {
            s: b.s,
            mu: b.mu,
            a: b.a,
            b: b.b,
            beta_half: b.beta_half,
            beta_half_normalized,
            identity_tolerance: 1e-9,
            critical_angles: fit.critical_angles.theta().to_vec(),
            grid_step: fit.grid_step,
            refine_tol: fit.refine_tol,
            mermin,
        }
    }
}

impl RunReport {
    pub fn new(command: &'static str, n: usize) -> Self {
        RunReport {
            command,
            graph: None,
            construction: None,
            n,
            beta_c: None,
            beta_q: None,
            selftest: None,
            rank: None,
            robust: None,
            verification: None,
            wall_time_s: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}: n = {}", self.command, self.n);
        if let Some(g) = &self.graph {
            out += &format!(", graph {g}");
        }
        if let Some(c) = &self.construction {
            out += &format!(", construction {c}");
        }
        out.push('\n');
        for (name, c) in [("beta_c", &self.beta_c), ("beta_q", &self.beta_q)] {
            if let Some(c) = c {
                out += &format!(
                    "{name}: stored {:.10}, certified {:.10} ({}, tol {:e})\n",
                    c.stored, c.certified, c.method, c.tolerance
                );
            }
        }
        if let (Some(st), Some(rank)) = (&self.selftest, self.rank) {
            out += &format!("selftest: {st:?} (rank {rank} of {})\n", self.n);
        }
        if let Some(r) = &self.robust {
            out += &format!("s = {:.6}, mu = {:.6}, a = {:.6}, b = {:.6}\n", r.s, r.mu, r.a, r.b);
            out += &format!("beta_0.5 = {:.6}\n", r.beta_half);
            if let Some(m) = &r.mermin {
                out += &format!("mermin: s = {:.6}, mu = {:.6}, beta_0.5 = {:.6}\n", m.s, m.mu, m.beta_half);
            }
        }
        out += &format!("wall time: {:.3} s\n", self.wall_time_s);
        out
    }
}
