//! The `malstein` command line.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use malstein_core::bounds::{all_generic_bounds, dejong_bounds};
use malstein_core::graph_coloring::{fang_bound, mono_bound, mono_edge_functional_with_cap, t2_moments};
use malstein_core::montecarlo::{empirical_kolmogorov, MonoEdgeSampler};
use malstein_core::random_sums::{random_sum_functional_with_cap, rs_bound};
use malstein_core::stein::{kolmogorov_distance, wasserstein_distance};
use malstein_core::verify::{run_suite, DEFAULT_CASES};
use malstein_core::{Error, Functional, DEFAULT_MAX_OUTCOMES};
use serde_json::{Map, Value};

use crate::io::{read_edge_list, read_functional, read_law, read_randsum_spec, InputError};
use crate::output::{int, law_value, num, object, render, report_value, reports_value, usize_value, Format};
use crate::parallel::{default_workers, sample_parallel};

/// Exact Malliavin-Stein normal approximation bounds on finite product spaces.
#[derive(Debug, Clone, Parser)]
#[command(name = "malstein", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Largest product space that is enumerated exactly.
    #[arg(long, env = "MALSTEIN_MAX_OUTCOMES", default_value_t = DEFAULT_MAX_OUTCOMES, global = true)]
    pub max_outcomes: usize,
    /// Sampling threads; the output does not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Run the operator identity suite on random small spaces.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CASES)]
        cases: usize,
    },
    /// Monochromatic edges of a uniformly colored graph.
    Mono {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        colors: usize,
        /// Monte Carlo sample count; sampling is skipped when absent.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Normalized random sums.
    Randsum {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Fourth-moment bounds for a degenerate U-statistic.
    Dejong {
        #[arg(long)]
        spec: PathBuf,
        /// Order of the degenerate U-statistic.
        #[arg(long)]
        p: usize,
        /// Fourth-moment constant for order `p`.
        #[arg(long)]
        kappa: f64,
    },
    /// Exact Kolmogorov and Wasserstein distances of a finite law to N(0, 1).
    Distances {
        #[arg(long)]
        law: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Exit code for a violated invariant.
pub const EXIT_INVARIANT: i32 = 1;
/// Exit code for unusable input.
pub const EXIT_INPUT: i32 = 2;

enum Failure {
    Input(InputError),
    Model(Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

fn error_json(kind: &str, message: &str) -> String {
    let doc = object([(
        "error",
        object([("kind", Value::String(kind.to_string())), ("message", Value::String(message.to_string()))]),
    )]);
    format!("{doc}\n")
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> RunOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => run(&config),
        Err(e) if !e.use_stderr() => RunOutcome { code: 0, stdout: e.to_string(), stderr: String::new() },
        Err(e) => RunOutcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: error_json("UsageError", e.to_string().trim_end()),
        },
    }
}

pub fn run(config: &RunConfig) -> RunOutcome {
    let result = match &config.command {
        Command::Verify { seed, cases } => Ok(verify(*seed, *cases)),
        Command::Mono { edges, colors, samples, seed } => mono(config, edges, *colors, *samples, *seed),
        Command::Randsum { spec } => randsum(config, spec),
        Command::Dejong { spec, p, kappa } => dejong(config, spec, *p, *kappa),
        Command::Distances { law } => distances(law),
    };
    match result {
        Ok((doc, ok)) => RunOutcome {
            code: if ok { 0 } else { EXIT_INVARIANT },
            stdout: render(&doc, config.common.format),
            stderr: String::new(),
        },
        Err(Failure::Input(e)) => {
            RunOutcome { code: EXIT_INPUT, stdout: String::new(), stderr: error_json(e.kind(), &e.to_string()) }
        }
        Err(Failure::Model(e)) => {
            RunOutcome { code: EXIT_INPUT, stdout: String::new(), stderr: error_json(e.kind(), &e.to_string()) }
        }
    }
}

type Report = Result<(Value, bool), Failure>;

fn verify(seed: u64, cases: usize) -> (Value, bool) {
    let suite = run_suite(seed, cases);
    let families = suite
        .families
        .iter()
        .map(|f| {
            object([
                ("name", Value::String(f.name.to_string())),
                ("passed", usize_value(f.passed)),
                ("failed", usize_value(f.failed)),
                ("worst_ratio", num(f.worst_ratio)),
            ])
        })
        .collect();
    let ok = suite.all_passed();
    let doc = object([
        ("command", Value::String("verify".into())),
        ("seed", int(seed)),
        ("cases", usize_value(cases)),
        ("all_passed", Value::Bool(ok)),
        ("families", Value::Array(families)),
    ]);
    (doc, ok)
}

/// Exact distances of `f` to N(0, 1) plus the generic bound families. Returns
/// the JSON block and whether `wass_bound` (when given) dominates `d_W`.
fn exact_block(f: &Functional, wass_bound: Option<f64>) -> (Value, bool) {
    let law = f.law();
    let d_k = kolmogorov_distance(&law);
    let d_w = wasserstein_distance(&law);
    let mut m = Map::new();
    m.insert("space_size".into(), usize_value(f.len()));
    m.insert("d_K".into(), num(d_k));
    m.insert("d_W".into(), num(d_w));
    m.insert("law_atoms".into(), usize_value(law.len()));
    let mut ok = wass_bound.is_none_or(|b| b >= d_w - 1e-9);
    match all_generic_bounds(f) {
        Ok(reports) => {
            for r in &reports {
                let exact = if r.bound_name.ends_with("wasserstein") { d_w } else { d_k };
                ok &= r.total >= exact - 1e-9;
            }
            m.insert("generic_bounds".into(), reports_value(&reports));
        }
        Err(e) => {
            m.insert("generic_bounds_skipped".into(), Value::String(e.to_string()));
        }
    }
    m.insert("dominance_holds".into(), Value::Bool(ok));
    (Value::Object(m), ok)
}

fn insert_exact(
    doc: &mut Map<String, Value>,
    built: Result<Functional, Error>,
    wass: Option<f64>,
) -> Result<bool, Error> {
    match built {
        Ok(f) => {
            let (block, ok) = exact_block(&f, wass);
            doc.insert("exact".into(), block);
            Ok(ok)
        }
        Err(e @ Error::SpaceTooLarge { .. }) => {
            doc.insert("exact".into(), Value::Null);
            doc.insert("exact_skipped".into(), Value::String(e.to_string()));
            Ok(true)
        }
        Err(e) => Err(e),
    }
}

fn mono(config: &RunConfig, edges: &std::path::Path, c: usize, samples: Option<usize>, seed: u64) -> Report {
    let g = read_edge_list(edges)?;
    let stats = g.stats();
    let (mean, variance) = t2_moments(stats.m, c)?;
    let bound = mono_bound(&stats, c)?;
    let mut doc = Map::new();
    doc.insert("command".into(), Value::String("mono".into()));
    doc.insert("n".into(), usize_value(stats.n));
    doc.insert("m".into(), usize_value(stats.m));
    doc.insert("c".into(), usize_value(c));
    doc.insert("c4_count".into(), int(stats.c4_count));
    doc.insert("wedge_sums".into(), Value::Array(vec![int(stats.wedge_sums.0), int(stats.wedge_sums.1)]));
    doc.insert("mean".into(), num(mean));
    doc.insert("variance".into(), num(variance));
    doc.insert("fang_bound".into(), num(fang_bound(stats.m, c)));
    let built = mono_edge_functional_with_cap(&g, c, config.common.max_outcomes).map(|(_, f)| f);
    let ok = insert_exact(&mut doc, built, Some(bound.total))?;
    doc.insert("reports".into(), Value::Array(vec![report_value(&bound)]));
    if let Some(n) = samples {
        let sampler = MonoEdgeSampler::new(&g, c)?;
        let workers = config.common.workers.unwrap_or_else(default_workers);
        let summary = sample_parallel(&sampler, n, seed, workers);
        let (estimate, radius) = empirical_kolmogorov(&summary)?;
        doc.insert(
            "monte_carlo".into(),
            object([
                ("n_samples", usize_value(summary.n_samples)),
                ("seed", int(seed)),
                ("sample_mean", num(summary.mean())),
                ("sample_variance", num(summary.variance())),
                ("d_K_estimate", num(estimate)),
                ("dkw_radius", num(radius)),
            ]),
        );
    }
    Ok((Value::Object(doc), ok))
}

fn randsum(config: &RunConfig, path: &std::path::Path) -> Report {
    let spec = read_randsum_spec(path)?;
    let bound = rs_bound(&spec)?;
    let mut doc = Map::new();
    doc.insert("command".into(), Value::String("randsum".into()));
    doc.insert("n_max".into(), usize_value(spec.n_max()));
    doc.insert("sigma".into(), num(spec.sigma()));
    doc.insert("truncated_mass".into(), num(spec.truncated_mass));
    let built = random_sum_functional_with_cap(&spec, config.common.max_outcomes).map(|(_, f)| f);
    let ok = insert_exact(&mut doc, built, Some(bound.total))?;
    doc.insert("reports".into(), Value::Array(vec![report_value(&bound)]));
    Ok((Value::Object(doc), ok))
}

fn dejong(config: &RunConfig, path: &std::path::Path, p: usize, kappa: f64) -> Report {
    let f = read_functional(path, config.common.max_outcomes)?;
    let (wass, kol) = dejong_bounds(&f, p, kappa)?;
    let law = f.law();
    let d_k = kolmogorov_distance(&law);
    let d_w = wasserstein_distance(&law);
    let doc = object([
        ("command", Value::String("dejong".into())),
        ("p", usize_value(p)),
        ("kappa", num(kappa)),
        ("d_K", num(d_k)),
        ("d_W", num(d_w)),
        ("reports", reports_value(&[wass, kol])),
    ]);
    Ok((doc, true))
}

fn distances(path: &std::path::Path) -> Report {
    let law = read_law(path)?;
    let doc = object([
        ("command", Value::String("distances".into())),
        ("law", law_value(&law)),
        ("d_K", num(kolmogorov_distance(&law))),
        ("d_W", num(wasserstein_distance(&law))),
    ]);
    Ok((doc, true))
}
