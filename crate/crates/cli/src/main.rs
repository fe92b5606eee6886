mod report;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use graphbell::inequality::{
    auto_expression, catalogue, constant_ratio_expression, find_suitable_ac, lookup, single_pair_expression,
    BellExpression, Family,
};
use graphbell::robust::{
    fidelity_curve, optimal_linear_bound, witness_threshold_normalized, LinearFidelityBound, MerminReference,
    RobustOptions,
};
use graphbell::verify::{verify_expression, SearchOptions, CLASSICAL_TOL, SEARCH_TOL};
use graphbell::{generators, Graph};

use report::{Certified, MerminSummary, RobustSummary, RunReport};

/// Bell inequalities for graph states: construction, certification and
/// robust self-testing bounds.
#[derive(Parser)]
#[command(name = "graphbell", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Args)]
struct GlobalOpts {
    /// Angle grid spacing, as a number or `pi/<k>` (default pi/32 for
    /// searches, pi/60 for robustness fits).
    #[arg(long, global = true, value_parser = parse_angle)]
    grid_step: Option<f64>,
    /// Refinement tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    refine_tol: f64,
    /// Largest qubit count for dense vectors and operators.
    #[arg(long, global = true, default_value_t = 14)]
    dense_limit: usize,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for subsampled grids.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build a Bell expression for a graph state.
    Construct {
        /// `ghz:<N>`, `cluster1d:<N>`, `ring:<N>` or a graph JSON file.
        graph: String,
        /// `auto`, `constant-ratio`, `single-pair` or `catalogue:<k>`.
        #[arg(long, default_value = "auto")]
        strategy: String,
    },
    /// Re-certify the bounds stored in an expression file.
    Verify {
        expression: PathBuf,
        /// Target graph; recovered from the terms when omitted.
        #[arg(long)]
        graph: Option<String>,
    },
    /// Fit the optimal linear fidelity bound and emit its curve.
    Robust {
        expression: PathBuf,
        graph: String,
        /// Add a reference line (`mermin`).
        #[arg(long)]
        compare: Option<String>,
        /// Points on the fidelity curve.
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Also write the curve CSV to this file.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Bell value above which fidelity exceeds one half.
    Witness {
        /// Expression to fit (with `graph`); omit to pass `--s/--mu` directly.
        expression: Option<PathBuf>,
        graph: Option<String>,
        #[arg(long, requires_all = ["mu", "beta_c", "beta_q"], conflicts_with = "expression")]
        s: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        #[arg(long)]
        beta_c: Option<f64>,
        #[arg(long)]
        beta_q: Option<f64>,
    },
    /// Built-in named constructions.
    Catalogue {
        #[command(subcommand)]
        action: CatalogueAction,
    },
}

#[derive(Subcommand)]
enum CatalogueAction {
    List,
}

// Exit codes.
const EXIT_RUNTIME: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_MISMATCH: u8 = 4;
const EXIT_NOT_SELFTESTING: u8 = 5;

/// Stored bounds contradicted by certification.
#[derive(Debug, thiserror::Error)]
#[error("certified values contradict the stored bounds")]
struct Mismatch;

/// Malformed command-line input not caught by clap.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

fn exit_code(err: &anyhow::Error) -> u8 {
    use graphbell::Error as E;
    if err.downcast_ref::<Mismatch>().is_some() {
        return EXIT_MISMATCH;
    }
    if err.downcast_ref::<Usage>().is_some() {
        return EXIT_PARSE;
    }
    match err.downcast_ref::<E>() {
        Some(
            E::Parse(_)
            | E::UnknownGraph(_)
            | E::UnknownCatalogue(_)
            | E::BadPauliWord(_)
            | E::BadSequenceEntry { .. }
            | E::YFactor(_)
            | E::LengthMismatch(..)
            | E::EmptyGraph
            | E::SelfLoop(_)
            | E::DuplicateEdge(..)
            | E::VertexOutOfRange { .. }
            | E::TooManyVertices(_),
        ) => EXIT_PARSE,
        Some(
            E::InvalidConfig(_)
            | E::NoPairablePair
            | E::BadIndex(_)
            | E::NotAStabilizer { .. }
            | E::PartyMismatch { .. },
        ) => EXIT_CONFIG,
        Some(E::NotSelfTesting { .. }) => EXIT_NOT_SELFTESTING,
        _ => EXIT_RUNTIME,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let opts = &cli.opts;
    let output = match cli.command {
        Command::Construct { graph, strategy } => construct(&graph, &strategy, opts)?,
        Command::Verify { expression, graph } => return verify(&expression, graph.as_deref(), opts),
        Command::Robust { expression, graph, compare, samples, curve } => {
            robust(&expression, &graph, compare.as_deref(), samples, curve.as_deref(), opts)?
        }
        Command::Witness { expression, graph, s, mu, beta_c, beta_q } => {
            witness(expression.as_deref(), graph.as_deref(), s.zip(mu).zip(beta_c.zip(beta_q)), opts)?
        }
        Command::Catalogue { action: CatalogueAction::List } => catalogue_list(opts.format)?,
    };
    emit(opts, &output)
}

fn emit(opts: &GlobalOpts, text: &str) -> anyhow::Result<()> {
    match &opts.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let v = match t.strip_prefix("pi/") {
        Some(k) => k.parse::<f64>().map(|k| std::f64::consts::PI / k),
        None => t.parse::<f64>(),
    }
    .map_err(|_| format!("expected a number or pi/<k>, got {s:?}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("grid step must be positive, got {s:?}"))
    }
}

/// Shorthand descriptor, or else a JSON file.
fn load_graph(source: &str) -> anyhow::Result<Graph> {
    if !Path::new(source).exists() {
        if let Ok(g) = source.parse::<Graph>() {
            return Ok(g);
        }
        if source.contains(':') {
            return Err(graphbell::Error::UnknownGraph(source.to_string()).into());
        }
    }
    let text = std::fs::read_to_string(source).with_context(|| format!("reading graph {source}"))?;
    Graph::from_json(&text).with_context(|| format!("graph file {source}"))
}

fn load_expression(path: &Path) -> anyhow::Result<BellExpression> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    BellExpression::from_json(&text).with_context(|| format!("expression file {}", path.display()))
}

fn search_options(opts: &GlobalOpts) -> SearchOptions {
    let mut o = SearchOptions {
        refine_tol: opts.refine_tol,
        seed: opts.seed,
        dense_limit: opts.dense_limit,
        threads: opts.threads,
        ..SearchOptions::default()
    };
    if let Some(step) = opts.grid_step {
        o.grid_step = step;
    }
    o
}

fn robust_options(opts: &GlobalOpts) -> RobustOptions {
    let mut o = RobustOptions {
        refine_tol: opts.refine_tol,
        dense_limit: opts.dense_limit,
        threads: opts.threads,
        ..RobustOptions::default()
    };
    if let Some(step) = opts.grid_step {
        o.grid_step = step;
    }
    o
}

fn construct(source: &str, strategy: &str, opts: &GlobalOpts) -> anyhow::Result<String> {
    let g = load_graph(source)?;
    let gens = generators(&g);
    let e = match strategy {
        "auto" => auto_expression(&g, &gens)?,
        "constant-ratio" => constant_ratio_expression(&g)?,
        "single-pair" => {
            let c = find_suitable_ac(&gens)?;
            single_pair_expression(&g, &gens, c.pairs[0], &c.remainder, &c.ac)?
        }
        other => {
            let Some(index) = other.strip_prefix("catalogue:") else {
                return Err(Usage(format!("unknown strategy {other:?}")).into());
            };
            let family = Family::for_graph(Some(source), &g)
                .ok_or_else(|| graphbell::Error::UnknownCatalogue(format!("no catalogue family for {source}")))?;
            lookup(&format!("{family}:{index}"))?.expression()
        }
    };
    match opts.format {
        Format::Json => Ok(e.to_json() + "\n"),
        Format::Text => Ok(format!("{e}\n")),
        Format::Csv => Err(Usage("construct emits json or text".into()).into()),
    }
}

fn verify(path: &Path, graph: Option<&str>, opts: &GlobalOpts) -> anyhow::Result<()> {
    let start = Instant::now();
    let e = load_expression(path)?;
    let g = graph.map(load_graph).transpose()?;
    let v = verify_expression(&e, g.as_ref(), &search_options(opts))?;
    let mut r = RunReport::new("verify", e.n);
    r.graph = graph.map(str::to_string);
    r.construction = Some(path.display().to_string());
    r.beta_c = Some(Certified {
        stored: v.beta_c.stored,
        certified: v.beta_c.certified,
        tolerance: CLASSICAL_TOL,
        method: "exhaustive deterministic strategies",
    });
    r.beta_q = Some(Certified {
        stored: v.beta_q.stored,
        certified: v.beta_q.certified,
        tolerance: SEARCH_TOL,
        method: "angle grid + coordinate ascent on the largest eigenvalue",
    });
    r.selftest = Some(v.selftest);
    r.rank = Some(v.rank);
    let consistent = v.consistent();
    r.verification = Some(v);
    r.wall_time_s = start.elapsed().as_secs_f64();
    let text = match opts.format {
        Format::Json => r.to_json() + "\n",
        Format::Text => r.to_text(),
        Format::Csv => return Err(Usage("verify emits json or text".into()).into()),
    };
    emit(opts, &text)?;
    if consistent {
        Ok(())
    } else {
        Err(Mismatch.into())
    }
}

fn mermin_summary(n: usize) -> anyhow::Result<(LinearFidelityBound, MerminSummary)> {
    let m = MerminReference::for_parties(n)
        .ok_or_else(|| Usage(format!("no Mermin reference constants for {n} parties")))?;
    let b = m.bound();
    let summary = MerminSummary { s: b.s, mu: b.mu, a: b.a, b: b.b, beta_half: b.beta_half };
    Ok((b, summary))
}

fn robust(
    path: &Path,
    source: &str,
    compare: Option<&str>,
    samples: usize,
    curve_path: Option<&Path>,
    opts: &GlobalOpts,
) -> anyhow::Result<String> {
    let start = Instant::now();
    let e = load_expression(path)?;
    let g = load_graph(source)?;
    if g.n() != e.n {
        return Err(graphbell::Error::PartyMismatch { expected: g.n(), found: e.n }.into());
    }
    let mermin = match compare {
        None => None,
        Some("mermin") => Some(mermin_summary(e.n)?),
        Some(other) => return Err(Usage(format!("unknown comparison {other:?}")).into()),
    };
    let fit = optimal_linear_bound(&e, &g, &robust_options(opts))?;
    let mut curves = vec![("fidelity_lower_bound".to_string(), fit.bound.clone())];
    if let Some((b, _)) = &mermin {
        curves.push(("mermin".to_string(), b.clone()));
    }
    let csv = curves_csv(&curves, samples)?;
    if let Some(p) = curve_path {
        std::fs::write(p, &csv).with_context(|| format!("writing {}", p.display()))?;
    }
    let mut r = RunReport::new("robust", e.n);
    r.graph = Some(source.to_string());
    r.construction = Some(path.display().to_string());
    r.robust = Some(RobustSummary::new(&fit, witness_threshold_normalized(&fit.bound)?, mermin.map(|m| m.1)));
    r.wall_time_s = start.elapsed().as_secs_f64();
    Ok(match opts.format {
        Format::Json => r.to_json() + "\n",
        Format::Text => r.to_text(),
        Format::Csv => csv,
    })
}

/// Columns share the normalized Bell value `x` in `[0, 1]`.
fn curves_csv(curves: &[(String, LinearFidelityBound)], samples: usize) -> anyhow::Result<String> {
    let points = curves.iter().map(|(_, b)| fidelity_curve(b, samples)).collect::<Result<Vec<_>, _>>()?;
    let mut out = String::from("normalized_beta");
    for (name, _) in curves {
        write!(out, ",{name}")?;
    }
    out.push('\n');
    for k in 0..samples {
        write!(out, "{:.6}", points[0][k].0)?;
        for p in &points {
            write!(out, ",{:.6}", p[k].1)?;
        }
        out.push('\n');
    }
    Ok(out)
}

type Direct = Option<((f64, f64), (f64, f64))>;

fn witness(path: Option<&Path>, source: Option<&str>, direct: Direct, opts: &GlobalOpts) -> anyhow::Result<String> {
    let start = Instant::now();
    let mut r;
    match (path, source, direct) {
        (_, _, Some(((s, mu), (beta_c, beta_q)))) => {
            let b = LinearFidelityBound::new(s, mu, beta_c, beta_q)?;
            r = RunReport::new("witness", 0);
            r.robust = Some(RobustSummary {
                s,
                mu,
                a: b.a,
                b: b.b,
                beta_half: b.beta_half,
                beta_half_normalized: witness_threshold_normalized(&b)?,
                identity_tolerance: 1e-9,
                critical_angles: Vec::new(),
                grid_step: 0.0,
                refine_tol: 0.0,
                mermin: None,
            });
        }
        (Some(path), Some(source), None) => {
            let e = load_expression(path)?;
            let g = load_graph(source)?;
            let fit = optimal_linear_bound(&e, &g, &robust_options(opts))?;
            r = RunReport::new("witness", e.n);
            r.graph = Some(source.to_string());
            r.construction = Some(path.display().to_string());
            r.robust = Some(RobustSummary::new(&fit, witness_threshold_normalized(&fit.bound)?, None));
        }
        _ => bail!(Usage("witness needs <expression> <graph>, or --s --mu --beta-c --beta-q".into())),
    }
    r.wall_time_s = start.elapsed().as_secs_f64();
    Ok(match opts.format {
        Format::Json => r.to_json() + "\n",
        Format::Text => r.to_text(),
        Format::Csv => {
            let rb = r.robust.as_ref().expect("set above");
            format!("s,mu,beta_half\n{:.6},{:.6},{:.6}\n", rb.s, rb.mu, rb.beta_half)
        }
    })
}

#[derive(Serialize)]
struct CatalogueRow {
    name: String,
    graph: String,
    ac: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    remainder: Vec<usize>,
    ratio: String,
    beta_c: f64,
    beta_q: f64,
    correlations: usize,
}

fn catalogue_list(format: Format) -> anyhow::Result<String> {
    let rows: Vec<CatalogueRow> = catalogue()
        .into_iter()
        .map(|c| {
            let e = c.expression();
            CatalogueRow {
                name: c.name(),
                graph: c.graph().to_string(),
                ac: c.ac.clone(),
                pairs: c.pairs.clone(),
                remainder: c.remainder.clone(),
                ratio: c.ratio_label.to_string(),
                beta_c: e.beta_c,
                beta_q: e.beta_q,
                correlations: e.correlation_count(),
            }
        })
        .collect();
    let mut out = String::new();
    match format {
        Format::Json => out = serde_json::to_string_pretty(&rows)? + "\n",
        Format::Text => {
            for r in &rows {
                writeln!(
                    out,
                    "{:<11} AC={:?} P={:?} R={:?} ratio {} beta_c {} beta_q {:.6}",
                    r.name, r.ac, r.pairs, r.remainder, r.ratio, r.beta_c, r.beta_q
                )?;
            }
        }
        Format::Csv => {
            out.push_str("name,beta_c,beta_q,correlations,ratio\n");
            for r in &rows {
                writeln!(out, "{},{},{:.6},{},{}", r.name, r.beta_c, r.beta_q, r.correlations, r.ratio)?;
            }
        }
    }
    Ok(out)
}
