//! Readers for edge lists, laws, random-sum specs and functional specs.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use malstein_core::graph_coloring::parse_edge_list;
use malstein_core::{DiscreteDistribution, Functional, Graph, LawOfF, ProductSpace, RandomSumSpec};
use serde::Deserialize;

/// Anything that makes an input file unusable.
#[derive(Debug)]
pub enum InputError {
    Io { path: String, message: String },
    Json { path: String, message: String },
    Model { path: String, error: malstein_core::Error },
}

impl InputError {
    pub fn kind(&self) -> &'static str {
        match self {
            InputError::Io { .. } => "IoError",
            InputError::Json { .. } => "JsonError",
            InputError::Model { error, .. } => error.kind(),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Io { path, message } => write!(f, "{path}: {message}"),
            InputError::Json { path, message } => write!(f, "{path}: invalid JSON: {message}"),
            InputError::Model { path, error } => write!(f, "{path}: {error}"),
        }
    }
}

impl std::error::Error for InputError {}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path)
        .map_err(|e| InputError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, InputError> {
    let text = read(path)?;
    serde_json::from_str(&text)
        .map_err(|e| InputError::Json { path: path.display().to_string(), message: e.to_string() })
}

fn model<T>(path: &Path, r: malstein_core::Result<T>) -> Result<T, InputError> {
    r.map_err(|error| InputError::Model { path: path.display().to_string(), error })
}

pub fn read_edge_list(path: &Path) -> Result<Graph, InputError> {
    let text = read(path)?;
    model(path, parse_edge_list(&text))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LawDoc {
    atoms: Vec<f64>,
    probs: Vec<f64>,
}

/// `{"atoms": [...], "probs": [...]}` with atoms in any order.
pub fn read_law(path: &Path) -> Result<LawOfF, InputError> {
    let doc: LawDoc = parse_json(path)?;
    if doc.atoms.len() != doc.probs.len() {
        return model(
            path,
            Err(malstein_core::Error::LengthMismatch { values: doc.atoms.len(), probs: doc.probs.len() }),
        );
    }
    model(path, LawOfF::from_unsorted(doc.atoms.into_iter().zip(doc.probs).collect()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistDoc {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl DistDoc {
    fn build(self) -> malstein_core::Result<DiscreteDistribution> {
        DiscreteDistribution::new(self.values, self.probs)
    }
}

/// Either a full law (`values`, `probs`) or the weights `pmf` of `N = 0, 1, …`
/// from a longer distribution cut off by the caller.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexDoc {
    values: Option<Vec<f64>>,
    probs: Option<Vec<f64>>,
    pmf: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandSumDoc {
    #[serde(rename = "N")]
    n: IndexDoc,
    #[serde(rename = "X")]
    x: DistDoc,
}

/// `{"N": {"values": [...], "probs": [...]}, "X": {...}}`, or `"N": {"pmf": [...]}`
/// for a truncated index law whose missing mass is reported.
pub fn read_randsum_spec(path: &Path) -> Result<RandomSumSpec, InputError> {
    let doc: RandSumDoc = parse_json(path)?;
    let x = model(path, doc.x.build())?;
    let spec = match doc.n {
        IndexDoc { values: Some(values), probs: Some(probs), pmf: None } => {
            DiscreteDistribution::new(values, probs).and_then(|n| RandomSumSpec::new(n, x))
        }
        IndexDoc { values: None, probs: None, pmf: Some(pmf) } => RandomSumSpec::truncated(&pmf, x),
        _ => Err(malstein_core::Error::InvalidSpec("N needs either values and probs, or pmf".to_string())),
    };
    model(path, spec)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionalDoc {
    coords: Vec<DistDoc>,
    table: Vec<f64>,
}

/// `{"coords": [{"values": [...], "probs": [...]}, ...], "table": [...]}`.
/// The table is indexed with coordinate 0 varying fastest.
pub fn read_functional(path: &Path, cap: usize) -> Result<Functional, InputError> {
    let doc: FunctionalDoc = parse_json(path)?;
    let dists = doc.coords.into_iter().map(DistDoc::build).collect::<malstein_core::Result<Vec<_>>>();
    let dists = model(path, dists)?;
    let space = Arc::new(model(path, ProductSpace::with_cap(dists, cap))?);
    model(path, Functional::new(space, doc.table))
}
