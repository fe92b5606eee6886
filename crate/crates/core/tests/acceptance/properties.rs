//! Criterion 7: algebraic laws and numerical invariants, driven by proptest.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use graphbell::coloring::color_classes;
use graphbell::error::{Error, Violation};
use graphbell::inequality::{
    build_expression, catalogue, constant_ratio_config, constant_ratio_expression, find_suitable_ac, lookup,
    single_pair_expression, validate_config, BellConfig, BellExpression,
};
use graphbell::linalg::Qubit;
use graphbell::robust::{curve_csv, dual_k_operator, extraction_channel, fidelity_curve, mu_for_s, RobustOptions};
use graphbell::state::graph_state_vector;
use graphbell::verify::{
    bell_operator, brute_force_classical_bound, classical_value, AngleAssignment, Strategy as LocalStrategy,
};
use graphbell::{expectation, generators, gf2_rank, is_pairable, Graph, PauliWord};

use super::{fit, oracle, Fits, Report};

fn run<S: Strategy>(
    report: &mut Report,
    label: &str,
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    match runner.run(&strategy, test) {
        Ok(()) => report.line(&format!("criterion 7 {label}"), true, format!("{cases} cases")),
        Err(e) => report.line(&format!("criterion 7 {label}"), false, e.to_string()),
    }
}

fn word(n: usize) -> impl Strategy<Value = PauliWord> {
    vec(-1i8..=1, n).prop_map(|s| PauliWord::from_sequence(&s).unwrap())
}

fn words(count: usize) -> impl Strategy<Value = Vec<PauliWord>> {
    (1usize..=10).prop_flat_map(move |n| vec(word(n), count))
}

fn any_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2usize..=max_n).prop_flat_map(|n| {
        vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 1..=n {
                for j in i + 1..=n {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            Graph::new(n, &edges).unwrap()
        })
    })
}

fn connected_graph(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n).prop_flat_map(|n| {
        (vec(any::<u32>(), n - 1), vec(proptest::bool::weighted(0.25), n * (n - 1) / 2)).prop_map(
            move |(parents, extra)| {
                let mut edges: Vec<(usize, usize)> =
                    (2..=n).map(|v| (parents[v - 2] as usize % (v - 1) + 1, v)).collect();
                let mut k = 0;
                for i in 1..=n {
                    for j in i + 1..=n {
                        if extra[k] && !edges.contains(&(i, j)) {
                            edges.push((i, j));
                        }
                        k += 1;
                    }
                }
                Graph::new(n, &edges).unwrap()
            },
        )
    })
}

fn angles(n: usize) -> impl Strategy<Value = Vec<f64>> {
    vec(0.0..=FRAC_PI_2, n)
}

fn catalogue_entry() -> impl Strategy<Value = usize> {
    0usize..12
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

pub fn criterion_7(report: &mut Report, fits: &Fits) {
    pauli_laws(report);
    rank_laws(report);
    builder_laws(report);
    numeric_laws(report);
    robust_laws(report, fits);
    validation_completeness(report);
}

fn pauli_laws(report: &mut Report) {
    run(report, "multiply commutative, associative, self-inverse", 512, words(3), |w| {
        let (a, b, c) = (w[0], w[1], w[2]);
        check(a.multiply(&a).unwrap() == PauliWord::identity(a.len()), || format!("{a} * {a}"))?;
        match (a.multiply(&b), b.multiply(&a)) {
            (Ok(x), Ok(y)) => check(x == y, || format!("{a} {b}"))?,
            (Err(_), Err(_)) => {}
            _ => return Err(TestCaseError::fail("commutativity of acceptance")),
        }
        if let (Ok(ab), Ok(bc)) = (a.multiply(&b), b.multiply(&c)) {
            if let (Ok(l), Ok(r)) = (ab.multiply(&c), a.multiply(&bc)) {
                check(l == r, || format!("({a}{b}){c} != {a}({b}{c})"))?;
            }
        }
        Ok(())
    });
    run(report, "is_pairable symmetric", 512, words(2), |w| {
        check(is_pairable(&w[0], &w[1]) == is_pairable(&w[1], &w[0]), || format!("{} {}", w[0], w[1]))
    });
    run(report, "same-colour generator products succeed (N <= 8)", 256, any_graph(8), |g| {
        let gens = generators(&g);
        let coloring = color_classes(&g);
        check(coloring.is_proper(&g), || format!("improper colouring of {g}"))?;
        for class in &coloring.classes {
            for (k, &i) in class.iter().enumerate() {
                for &j in &class[k + 1..] {
                    check(gens[i - 1].multiply(&gens[j - 1]).is_ok(), || format!("G{i} G{j} on {g}"))?;
                }
            }
        }
        Ok(())
    });
    run(
        report,
        "generator products stabilize the graph state",
        128,
        (connected_graph(2, 8), any::<u64>()),
        |(g, pick)| {
            let gens = generators(&g);
            let psi = graph_state_vector(&g).unwrap();
            // products of pairwise non-adjacent generators stay Y-free
            let mut w = PauliWord::identity(g.n());
            let mut chosen: Vec<usize> = Vec::new();
            for v in 1..=g.n() {
                if pick >> (v - 1) & 1 == 1 && chosen.iter().all(|&u| !g.are_adjacent(u, v)) {
                    w = w.multiply(&gens[v - 1]).unwrap();
                    chosen.push(v);
                }
            }
            let value = expectation(&psi, &w).unwrap();
            check((value - 1.0).abs() <= 1e-10, || format!("<{w}> = {value} on {g}"))
        },
    );
}

fn rank_laws(report: &mut Report) {
    run(
        report,
        "gf2_rank matches oracle and is invariant under swaps and row products",
        512,
        (words(5), any::<u64>()),
        |(ws, r)| {
            let base = gf2_rank(&ws);
            let seqs: Vec<Vec<i8>> = ws.iter().map(|w| w.sequence()).collect();
            check(base == oracle::gf2_rank(&seqs), || "oracle rank".into())?;
            let (i, j) = ((r % 5) as usize, ((r >> 8) % 5) as usize);
            let mut swapped = ws.clone();
            swapped.swap(i, j);
            check(gf2_rank(&swapped) == base, || "swap".into())?;
            if i != j {
                if let Ok(p) = ws[i].multiply(&ws[j]) {
                    let mut replaced = ws.clone();
                    replaced[i] = p;
                    check(gf2_rank(&replaced) == base, || "row product".into())?;
                }
            }
            Ok(())
        },
    );
}

fn builder_laws(report: &mut Report) {
    run(report, "constructed expressions validate; unit-weight bounds exact", 128, connected_graph(2, 10), |g| {
        let gens = generators(&g);
        let c = find_suitable_ac(&gens).unwrap();
        check(validate_config(&c).is_empty(), || format!("find_suitable_ac on {g}"))?;
        let e = build_expression(&c).unwrap();
        if c.has_unit_weights() {
            let (p, r) = (c.pairs.len() as f64, c.remainder.len() as f64);
            check(e.beta_c == 2.0 * p + r && e.beta_q == 2.0 * std::f64::consts::SQRT_2 * p + r, || "bounds".into())?;
        }
        let cr = constant_ratio_config(&g).unwrap();
        check(validate_config(&cr).is_empty(), || format!("constant ratio on {g}"))?;
        let (l, k) = c.pairs[0];
        let sp = single_pair_expression(&g, &gens, (l, k), &c.remainder, &c.ac).unwrap();
        check(sp.beta_c == 2.0 + c.remainder.len() as f64, || "single pair βc".into())?;
        Ok(())
    });
    run(report, "constant ratio: rank N and 2N correlations (N <= 10)", 128, connected_graph(2, 10), |g| {
        let e = constant_ratio_expression(&g).unwrap();
        let c = constant_ratio_config(&g).unwrap();
        check(e.correlation_count() == 2 * g.n(), || format!("{} correlations on {g}", e.correlation_count()))?;
        check(gf2_rank(&c.used_words()) == g.n(), || format!("rank on {g}"))?;
        check((e.ratio() - std::f64::consts::SQRT_2).abs() < 1e-12, || "ratio".into())
    });
    run(report, "expression JSON round trip is bit-stable", 64, catalogue_entry(), |k| {
        let e = catalogue()[k].expression();
        let json = e.to_json();
        let back = BellExpression::from_json(&json).unwrap();
        check(back.to_json() == json && back.beta_c == e.beta_c && back.beta_q == e.beta_q, || json.clone())
    });
}

fn numeric_laws(report: &mut Report) {
    run(
        report,
        "classical_value <= brute-force bound; enumeration matches oracle",
        64,
        (catalogue_entry(), vec(any::<bool>(), 8)),
        |(k, bits)| {
            let e = catalogue()[k].expression();
            let bound = brute_force_classical_bound(&e).unwrap();
            let a = bits[..e.n].iter().map(|&b| if b { 1 } else { -1 }).collect();
            let b = bits[4..4 + e.n].iter().map(|&b| if b { 1 } else { -1 }).collect();
            let v = classical_value(&e, &LocalStrategy::new(a, b).unwrap()).unwrap();
            check(v <= bound.value, || "sampled strategy beats the bound".into())?;
            check(bound.value == oracle::classical_bound(&e), || "oracle disagrees".into())?;
            check(classical_value(&e, &bound.argmax).unwrap() == bound.value, || "argmax value".into())
        },
    );
    run(report, "Bell operator matches Kronecker-product oracle", 64, (catalogue_entry(), angles(4)), |(k, th)| {
        let e = catalogue()[k].expression();
        let th = &th[..e.n];
        let ours = bell_operator(&e, &AngleAssignment::new(th.to_vec()).unwrap(), 10).unwrap();
        let diff = (ours.matrix() - oracle::bell_operator(&e, th)).amax();
        check(diff < 1e-12, || format!("max deviation {diff:e}"))
    });
}

fn random_density(entries: &[f64], dim: usize) -> DMatrix<f64> {
    let a = DMatrix::from_column_slice(dim, dim, &entries[..dim * dim]);
    let m = &a * a.transpose() + DMatrix::identity(dim, dim) * 1e-3;
    let t = m.trace();
    m / t
}

fn robust_laws(report: &mut Report, fits: &Fits) {
    run(
        report,
        "extraction channel preserves trace and positivity",
        100,
        (vec(-1.0f64..1.0, 4), 0.0..=FRAC_PI_2, any::<bool>()),
        |(v, x, in_ac)| {
            let m = random_density(&v, 2);
            let rho: Qubit = [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]];
            let out = extraction_channel(&rho, x, in_ac).unwrap();
            let tr = out[0][0] + out[1][1];
            let det = out[0][0] * out[1][1] - out[0][1] * out[1][0];
            check((tr - 1.0).abs() < 1e-12 && det >= -1e-12 && out[0][0] >= -1e-12, || format!("{out:?}"))
        },
    );
    run(report, "K(θ) is positive semidefinite with unit trace", 100, (catalogue_entry(), angles(4)), |(k, th)| {
        let entry = &catalogue()[k];
        let g = entry.graph();
        let th = AngleAssignment::new(th[..g.n()].to_vec()).unwrap();
        let kk = dual_k_operator(&g, &entry.ac, &th, 10).unwrap();
        let ev = kk.eigenvalues();
        check((kk.trace() - 1.0).abs() < 1e-10 && ev[0] >= -1e-10 && ev[ev.len() - 1] <= 1.0 + 1e-10, || {
            format!("{ev:?}")
        })
    });

    // μ(s) non-increasing on a monotone grid
    let entry = lookup("ghz3:1").unwrap();
    let opts = RobustOptions { grid_step: PI / 12.0, ..RobustOptions::default() };
    let e = entry.expression();
    let mus: Vec<f64> = (0..=6).map(|i| mu_for_s(&e, &entry.graph(), 0.2 * i as f64, &opts).unwrap().0).collect();
    let monotone = mus.windows(2).all(|w| w[1] <= w[0] + 1e-12) && mus[0] >= -1e-12;
    report.line("criterion 7 μ(s) non-increasing", monotone, format!("ghz3:1, s = 0, 0.2, ..., 1.2: {mus:.4?}"));

    // operator inequality implies the scalar one on random states and angles
    let b = fit(fits, "ghz3:1").clone();
    let g = entry.graph();
    run(report, "soundness: ⟨σ,K⟩ >= s Tr(σB) + μ", 100, (angles(3), vec(-1.0f64..1.0, 64)), |(th, v)| {
        let a = AngleAssignment::new(th).unwrap();
        let sigma = random_density(&v, 8);
        let kk = dual_k_operator(&g, &e.ac, &a, 10).unwrap();
        let bb = bell_operator(&e, &a, 10).unwrap();
        let lhs = kk.matrix().component_mul(&sigma).sum();
        let rhs = b.s * bb.matrix().component_mul(&sigma).sum() + b.mu;
        check(lhs >= rhs - 1e-9, || format!("{lhs} < {rhs}"))
    });

    // canonical residual: (K - sB - μI) ψ = (1 - sβ_Q - μ) ψ = 0
    let mut worst = 0.0f64;
    for (name, bound) in fits {
        let entry = lookup(name).unwrap();
        let e = entry.expression();
        let g = entry.graph();
        let canon = AngleAssignment::canonical(g.n());
        let kk = dual_k_operator(&g, &e.ac, &canon, 10).unwrap();
        let bb = bell_operator(&e, &canon, 10).unwrap();
        let psi = nalgebra::DVector::from_column_slice(graph_state_vector(&g).unwrap().amplitudes());
        let m = kk.matrix() - bb.matrix() * bound.s - DMatrix::identity(psi.len(), psi.len()) * bound.mu;
        worst = worst.max((m * &psi).amax());
    }
    report.line(
        "criterion 7 canonical residual",
        worst < 1e-9,
        format!("max |(K - sB - μI)ψ| = {worst:.1e} over {} fits", fits.len()),
    );

    // fidelity curves from the certified bounds
    let mut ok = true;
    for (_, bound) in fits {
        let pts = fidelity_curve(bound, 21).unwrap();
        ok &= (pts[20].1 - 1.0).abs() < 1e-6 && (pts[0].0, pts[20].0) == (0.0, 1.0);
        let at_half = bound.fidelity(bound.beta_half);
        ok &= (at_half - 0.5).abs() < 1e-12;
        ok &= curve_csv(&pts).lines().count() == 22;
    }
    report.line("criterion 7 fidelity curves", ok, "F(x=1) = 1 and F(β0.5) = 1/2 for every fitted bound, 21-point CSV");
}

type Fixture = (&'static str, BellConfig, fn(&Violation) -> bool);

/// One crafted configuration per violation kind.
fn validation_completeness(report: &mut Report) {
    let path3 = generators(&Graph::cluster1d(3).unwrap());
    let cluster4 = lookup("cluster4:1").unwrap().config().stabilizers;
    let cases: Vec<Fixture> = vec![
        ("unknown stabilizer", BellConfig::new(path3.clone(), vec![(1, 9)], vec![], vec![1]).unwrap(), |v| {
            matches!(v, Violation::UnknownStabilizer { index: 9 })
        }),
        (
            "pair without anticommuting AC position",
            BellConfig::new(path3.clone(), vec![(1, 3)], vec![], vec![1]).unwrap(),
            |v| matches!(v, Violation::NoAnticommutingPosition { .. }),
        ),
        (
            "pair anticommuting at two AC positions",
            BellConfig::new(path3.clone(), vec![(1, 2)], vec![], vec![1, 2]).unwrap(),
            |v| matches!(v, Violation::MultipleAnticommutingPositions { .. }),
        ),
        (
            "pair not identity on other AC position",
            BellConfig::new(cluster4.clone(), vec![(1, 2)], vec![], vec![1, 3]).unwrap(),
            |v| matches!(v, Violation::PairNotIdentity { .. }),
        ),
        (
            "remainder not identity on AC",
            BellConfig::new(cluster4.clone(), vec![(1, 2), (5, 6)], vec![2], vec![1]).unwrap(),
            |v| matches!(v, Violation::RemainderNotIdentity { index: 2, position: 1 }),
        ),
        ("AC position out of range", BellConfig::new(path3.clone(), vec![(1, 2)], vec![], vec![4]).unwrap(), |v| {
            matches!(v, Violation::PositionOutOfRange { position: 4 })
        }),
        (
            "negative weight",
            BellConfig::new(path3.clone(), vec![(1, 2)], vec![3], vec![1])
                .unwrap()
                .with_weights(vec![1.0, -2.0, 1.0])
                .unwrap(),
            |v| matches!(v, Violation::BadWeight { index: 2 }),
        ),
    ];
    let mut missed = Vec::new();
    for (label, config, want) in &cases {
        let found = validate_config(config);
        let rejected = matches!(build_expression(config), Err(Error::InvalidConfig(_)));
        if !found.iter().any(want) || !rejected {
            missed.push(format!("{label}: {found:?}"));
        }
    }
    report.line(
        "criterion 7 validation completeness",
        missed.is_empty(),
        if missed.is_empty() {
            format!("{} violation kinds each triggered and rejected", cases.len())
        } else {
            missed.join("; ")
        },
    );
}
