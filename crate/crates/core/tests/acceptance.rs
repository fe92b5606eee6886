//! Acceptance suite. Prints one PASS/FAIL line per criterion (and per row
//! where a criterion has several) and exits non-zero if any criterion fails.
//!
//! Run alone with `cargo test -p graphbell-core --test acceptance`.

#[path = "acceptance/oracle.rs"]
mod oracle;
#[path = "acceptance/properties.rs"]
mod properties;

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use graphbell::inequality::{
    build_expression, catalogue, constant_ratio_config, constant_ratio_expression, counterexample_from_words,
    counterexample_state, is_selftesting, selftest_words, validate_config, BellConfig, CatalogueEntry,
};
use graphbell::robust::{
    optimal_linear_bound, witness_threshold, witness_threshold_normalized, LinearFidelityBound, RobustOptions,
};
use graphbell::verify::{
    bell_operator, brute_force_classical_bound, canonical_value, max_eigenvalue, quantum_bound_search, AngleAssignment,
    SearchOptions,
};
use graphbell::{gf2_rank, Graph};

pub struct Report {
    failed: Vec<String>,
}

impl Report {
    pub fn line(&mut self, label: &str, ok: bool, detail: impl AsRef<str>) {
        println!("[{}] {label}: {}", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
        if !ok {
            self.failed.push(label.to_string());
        }
    }
}

fn main() {
    let mut report = Report { failed: Vec::new() };
    let start = Instant::now();
    criterion_1(&mut report);
    criterion_2(&mut report);
    criterion_3(&mut report);
    criterion_4(&mut report);
    let fits = criterion_5(&mut report);
    criterion_6(&mut report, &fits);
    properties::criterion_7(&mut report, &fits);
    println!("acceptance finished in {:.1} s", start.elapsed().as_secs_f64());
    if report.failed.is_empty() {
        println!("all acceptance criteria passed");
    } else {
        println!("failed: {}", report.failed.join(", "));
        std::process::exit(1);
    }
}

/// Quantum-to-classical ratios of the reference constructions, as literals.
fn reference_ratio(name: &str) -> f64 {
    let single = (SQRT_2 + 1.0) / 2.0;
    let double = (4.0 * SQRT_2 + 1.0) / 5.0;
    match name {
        "ghz3:1" => (2.0 * SQRT_2 + 1.0) / 3.0,
        "ghz3:2" => double,
        "ghz3:3" | "ghz3:4" => SQRT_2,
        "ghz4:1" | "ghz4:2" => single,
        "ghz4:3" => double,
        "ghz4:4" => SQRT_2,
        "cluster4:1" => single,
        "cluster4:2" => double,
        "cluster4:3" | "cluster4:4" => SQRT_2,
        _ => panic!("no reference ratio for {name}"),
    }
}

fn criterion_1(report: &mut Report) {
    let start = Instant::now();
    let mut bad = Vec::new();
    for entry in catalogue() {
        let e = entry.expression();
        let name = entry.name();
        let (p, r) = (entry.pairs.len() as f64, entry.remainder.len() as f64);
        let classical = brute_force_classical_bound(&e).unwrap().value;
        let oracle_classical = oracle::classical_bound(&e);
        let canonical = canonical_value(&e, &entry.graph(), 10).unwrap();
        let psi = oracle::graph_state(&entry.graph());
        let oracle_canonical = oracle::expectation(&oracle::bell_operator(&e, &[PI / 4.0; 4][..e.n]), &psi);
        let beta_q = 2.0 * SQRT_2 * p + r;
        let ok = classical == 2.0 * p + r
            && oracle_classical == 2.0 * p + r
            && e.beta_c == 2.0 * p + r
            && (canonical - beta_q).abs() <= 1e-10
            && (oracle_canonical - beta_q).abs() <= 1e-10
            && (canonical / classical - reference_ratio(&name)).abs() <= 1e-10;
        if !ok {
            bad.push(format!("{name} (βc {classical}, canonical {canonical})"));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report.line(
        "criterion 1 (catalogue bounds)",
        bad.is_empty() && elapsed < 1.0,
        if bad.is_empty() {
            format!(
                "12 constructions: βc = 2|P|+|R| exact, canonical value within 1e-10, ratios match ({elapsed:.2} s)"
            )
        } else {
            format!("mismatches: {}", bad.join("; "))
        },
    );
}

pub fn random_connected_graph(n: usize, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for v in 2..=n {
        edges.push((rng.gen_range(1..v), v));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            if !edges.contains(&(i, j)) && rng.gen_bool(0.3) {
                edges.push((i, j));
            }
        }
    }
    // relabel so vertex 1 is not always the tree root
    let mut perm: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let edges: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (perm[a - 1], perm[b - 1])).collect();
    Graph::new(n, &edges).unwrap()
}

fn criterion_2(report: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut graphs: Vec<(String, Graph)> = Vec::new();
    for n in 3..=10 {
        graphs.push((format!("path{n}"), Graph::cluster1d(n).unwrap()));
        graphs.push((format!("ring{n}"), Graph::ring(n).unwrap()));
        graphs.push((format!("star{n}"), Graph::ghz(n).unwrap()));
    }
    for k in 0..20 {
        let n = 3 + k % 8;
        graphs.push((format!("random{k}(n={n})"), random_connected_graph(n, &mut rng)));
    }
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for (label, g) in &graphs {
        let n = g.n();
        let e = constant_ratio_expression(g).unwrap();
        let config = constant_ratio_config(g).unwrap();
        let classical = brute_force_classical_bound(&e).unwrap().value;
        let opts = SearchOptions { budget: if n <= 4 { 20_000 } else { 32 }, ..SearchOptions::default() };
        let quantum = quantum_bound_search(&e, &opts).unwrap().value;
        let ratio_err = (quantum / classical - SQRT_2).abs();
        worst = worst.max(ratio_err);
        let rank = gf2_rank(&config.used_words());
        let ok = e.correlation_count() == 2 * n && ratio_err <= 1e-6 && rank == n && e.selftest == Some(true);
        if !ok {
            bad.push(format!(
                "{label}: {} correlations, ratio {:.9}, rank {rank}",
                e.correlation_count(),
                quantum / classical
            ));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report.line(
        "criterion 2 (constant ratio)",
        bad.is_empty() && elapsed < 30.0,
        if bad.is_empty() {
            format!(
                "{} graphs, N = 3..10: 2N correlations, rank N, |ratio - √2| <= {worst:.1e} ({elapsed:.1} s)",
                graphs.len()
            )
        } else {
            format!("{}; {elapsed:.1} s", bad.join("; "))
        },
    );
}

/// Smallest sets of used stabilizers whose deletion leaves a valid
/// configuration of rank `N - 1`. Pairs are deleted whole.
fn reduced_configs(entry: &CatalogueEntry) -> Vec<(Vec<usize>, BellConfig)> {
    let full = entry.config();
    let used = full.used_indices();
    for size in 1..used.len() {
        let mut out = Vec::new();
        for mask in 0u32..1 << used.len() {
            if mask.count_ones() as usize != size {
                continue;
            }
            let drop: Vec<usize> = (0..used.len()).filter(|&i| mask >> i & 1 == 1).map(|i| used[i]).collect();
            let pairs: Vec<_> =
                full.pairs.iter().copied().filter(|&(l, k)| !drop.contains(&l) && !drop.contains(&k)).collect();
            let remainder: Vec<_> = full.remainder.iter().copied().filter(|r| !drop.contains(r)).collect();
            let kept = pairs.len() * 2 + remainder.len();
            if pairs.is_empty() || kept + drop.len() != used.len() {
                continue;
            }
            let c = BellConfig::new(full.stabilizers.clone(), pairs, remainder, full.ac.clone()).unwrap();
            if validate_config(&c).is_empty() && gf2_rank(&c.used_words()) + 1 == full.n() {
                out.push((drop, c));
            }
        }
        if !out.is_empty() {
            return out;
        }
    }
    Vec::new()
}

fn word_matrix(w: &graphbell::PauliWord) -> DMatrix<f64> {
    let f: Vec<DMatrix<f64>> = w
        .sequence()
        .iter()
        .map(|&s| match s {
            1 => oracle::x(),
            -1 => oracle::z(),
            _ => DMatrix::identity(2, 2),
        })
        .collect();
    oracle::kron_all(&f)
}

fn criterion_3(report: &mut Report) {
    let start = Instant::now();
    let mut bad = Vec::new();
    let (mut checked, mut word_level) = (0, Vec::new());
    for entry in catalogue() {
        let g = entry.graph();
        let psi = oracle::graph_state(&g);
        let reduced = reduced_configs(&entry);
        if reduced.is_empty() {
            // no valid sub-inequality of rank N-1 exists; check the statement on the stabilizer set
            let words = entry.config().used_words();
            for i in 0..words.len() {
                let rest: Vec<_> = words.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, w)| *w).collect();
                if gf2_rank(&rest) + 1 != g.n() {
                    continue;
                }
                let ce = counterexample_from_words(&rest, &g).unwrap();
                let worst = rest
                    .iter()
                    .map(|w| (ce.rho.matrix().component_mul(&word_matrix(w)).sum() - 1.0).abs())
                    .fold(0.0, f64::max);
                let fidelity = oracle::expectation(ce.rho.matrix(), &psi);
                checked += 1;
                if selftest_words(&rest, &g).is_selftesting() || worst > 1e-9 || (fidelity - 0.5).abs() > 1e-9 {
                    bad.push(format!("{} words without #{}: max |<S> - 1| = {worst:e}", entry.name(), i + 1));
                }
            }
            word_level.push(entry.name());
            continue;
        }
        for (drop, c) in reduced {
            let e = build_expression(&c).unwrap();
            let verdict = is_selftesting(&c, &g);
            let ce = counterexample_state(&c, &g).unwrap();
            let b = bell_operator(&e, &AngleAssignment::canonical(e.n), 10).unwrap();
            let value = ce.rho.trace_product(&b);
            // the state differs from the graph state
            let fidelity = oracle::expectation(ce.rho.matrix(), &psi);
            checked += 1;
            if verdict.is_selftesting() || (value - e.beta_q).abs() > 1e-9 || (fidelity - 0.5).abs() > 1e-9 {
                bad.push(format!("{} without {drop:?}: value {value}, βq {}", entry.name(), e.beta_q));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report.line(
        "criterion 3 (counterexample state)",
        bad.is_empty() && elapsed < 5.0,
        if bad.is_empty() {
            format!(
                "{checked} rank N-1 reductions: not self-testing, Tr(ρB) = βq within 1e-9, F(ρ) = 1/2; \
                 stabilizer-set check only for {word_level:?} ({elapsed:.2} s)"
            )
        } else {
            bad.join("; ")
        },
    );
}

fn criterion_4(report: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::NEG_INFINITY;
    let mut bad = Vec::new();
    for entry in catalogue() {
        let e = entry.expression();
        for _ in 0..200 {
            let theta: Vec<f64> = (0..e.n).map(|_| rng.gen_range(0.0..=PI / 2.0)).collect();
            let lam = max_eigenvalue(&e, &AngleAssignment::new(theta.clone()).unwrap()).unwrap();
            let oracle_lam = oracle::max_eigenvalue(&oracle::bell_operator(&e, &theta));
            worst = worst.max(lam - e.beta_q);
            if lam > e.beta_q + 1e-8 || (lam - oracle_lam).abs() > 1e-9 {
                bad.push(format!("{} at {theta:?}: {lam}", entry.name()));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report.line(
        "criterion 4 (SOS bound)",
        bad.is_empty() && elapsed < 60.0,
        if bad.is_empty() {
            format!("12 x 200 random angles: max(λmax - βq) = {worst:.2e} ({elapsed:.1} s)")
        } else {
            bad.join("; ")
        },
    );
}

/// Fitted bounds keyed by catalogue name.
pub type Fits = Vec<(String, LinearFidelityBound)>;

fn criterion_5(report: &mut Report) -> Fits {
    // (constructions sharing the row, s, μ)
    let rows: [(&[&str], f64, f64); 9] = [
        (&["ghz3:1"], 0.906, -2.4686),
        (&["ghz3:3", "ghz3:4"], 0.6036, -2.4145),
        (&["ghz4:1", "ghz4:2"], 1.0, -1.0 - 2.0 * SQRT_2),
        (&["ghz4:3"], 0.69, -3.5931),
        (&["ghz4:4"], 0.49, -3.1578),
        (&["cluster4:1"], 1.0, -1.0 - 2.0 * SQRT_2),
        (&["cluster4:2"], 0.7400, -3.9262),
        (&["cluster4:3", "cluster4:4"], 0.6200, -2.5071),
        // the GHZ3 "1 & 2" row in normalized form (a, b) is shared by both;
        // here construction 2 is checked against the row's normalized bound
        (&["ghz3:2"], f64::NAN, f64::NAN),
    ];
    let mut fits = Fits::new();
    let mut failed_rows = 0;
    let start = Instant::now();
    for (names, s_ref, mu_ref) in rows {
        let mut row_ok = true;
        for name in names {
            let t = Instant::now();
            let entry = graphbell::inequality::lookup(name).unwrap();
            let fit = optimal_linear_bound(&entry.expression(), &entry.graph(), &RobustOptions::default()).unwrap();
            let b = fit.bound;
            let took = t.elapsed().as_secs_f64();
            let theta = fit.critical_angles.theta().to_vec();
            fits.push((name.to_string(), b.clone()));
            if s_ref.is_nan() {
                continue;
            }
            let (ds, dmu) = (b.s - s_ref, b.mu - mu_ref);
            let ok = ds.abs() <= 1e-2 && dmu.abs() <= 5e-3;
            row_ok &= ok;
            report.line(
                &format!("criterion 5 row {name}"),
                ok,
                format!(
                    "s = {:.5} (ref {s_ref}, Δ {ds:+.4}), μ = {:.5} (ref {mu_ref:.4}, Δ {dmu:+.4}), critical θ = {theta:.4?} ({took:.1} s)",
                    b.s, b.mu
                ),
            );
        }
        if !s_ref.is_nan() && !row_ok {
            failed_rows += 1;
        }
    }
    let c1 = fit(&fits, "ghz3:1").clone();
    let c2 = fit(&fits, "ghz3:2").clone();
    let same = (c1.a - c2.a).abs() <= 1e-3 && (c1.b - c2.b).abs() <= 1e-3;
    report.line(
        "criterion 5 row ghz3:2",
        same,
        format!(
            "normalized a = {:.5}, b = {:.5} vs construction 1 a = {:.5}, b = {:.5} (s = {:.5}, μ = {:.5})",
            c2.a, c2.b, c1.a, c1.b, c2.s, c2.mu
        ),
    );
    report.line(
        "criterion 5 (robustness constants)",
        failed_rows == 0 && same,
        format!(
            "{} of 8 (s, μ) rows plus the shared GHZ3 row within |Δs| <= 1e-2 and |Δμ| <= 5e-3; g(x) = (1+√2)(sin x + cos x - 1) ({:.0} s)",
            8 - failed_rows,
            start.elapsed().as_secs_f64()
        ),
    );
    fits
}

pub fn fit<'a>(fits: &'a Fits, name: &str) -> &'a LinearFidelityBound {
    &fits.iter().find(|(n, _)| n == name).expect("fitted in criterion 5").1
}

fn criterion_6(report: &mut Report, fits: &Fits) {
    let targets = [("ghz3:1", 3.2766), ("ghz4:1", 1.5 + 2.0 * SQRT_2), ("cluster4:1", 1.5 + 2.0 * SQRT_2)];
    let mut ok = true;
    let mut details = Vec::new();
    for (name, want) in targets {
        let b = fit(fits, name);
        let got = witness_threshold(b).unwrap();
        let normalized = witness_threshold_normalized(b).unwrap();
        let row_ok =
            (got - want).abs() <= 5e-3 && (got - normalized).abs() <= 1e-9 && b.beta_c <= got && got <= b.beta_q;
        ok &= row_ok;
        details.push(format!("{name} β0.5 = {got:.5} (target {want:.5}, Δ {:+.1e})", got - want));
    }
    report.line("criterion 6 (witness thresholds)", ok, details.join("; "));
}
