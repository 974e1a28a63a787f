//! Report serialization.
//!
//! JSON objects use sorted keys and every float is written with 17
//! significant digits (`{:.16e}`), so equal inputs give byte-identical text.
//! CSV output is a flat `label,value` listing of the same document.

use std::str::FromStr;

use malstein_core::{BoundReport, LawOfF};
use serde_json::{Map, Number, Value};

/// A float as a JSON number with 17 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{x:.16e}");
    Value::Number(Number::from_str(&text).expect("scientific notation is valid JSON"))
}

pub fn int<T: Into<u64>>(x: T) -> Value {
    Value::Number(Number::from(x.into()))
}

pub fn usize_value(x: usize) -> Value {
    int(x as u64)
}

/// Builds an object from key/value pairs; `serde_json::Map` keeps keys sorted.
pub fn object<I: IntoIterator<Item = (&'static str, Value)>>(entries: I) -> Value {
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

pub fn report_value(report: &BoundReport) -> Value {
    let terms = report
        .terms
        .iter()
        .map(|t| {
            object([
                ("label", Value::String(t.label.clone())),
                ("value", num(t.value)),
                ("included", Value::Bool(t.included)),
            ])
        })
        .collect();
    let meta = &report.metadata;
    let mut m = Map::new();
    if let Some(c) = meta.coords {
        m.insert("coords".into(), usize_value(c));
    }
    if let Some(s) = meta.space_size {
        m.insert("space_size".into(), usize_value(s));
    }
    if let Some(x) = meta.mean {
        m.insert("mean".into(), num(x));
    }
    if let Some(x) = meta.second_moment {
        m.insert("second_moment".into(), num(x));
    }
    if let Some(x) = meta.merge_tol {
        m.insert("merge_tol".into(), num(x));
    }
    m.insert("degenerate_normalization".into(), Value::Bool(meta.degenerate_normalization));
    m.insert("vacuous".into(), Value::Bool(meta.vacuous));
    let params: Map<String, Value> = meta.params.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
    m.insert("params".into(), Value::Object(params));
    object([
        ("bound_name", Value::String(report.bound_name.clone())),
        ("total", num(report.total)),
        ("terms", Value::Array(terms)),
        ("metadata", Value::Object(m)),
    ])
}

pub fn reports_value(reports: &[BoundReport]) -> Value {
    Value::Array(reports.iter().map(report_value).collect())
}

pub fn law_value(law: &LawOfF) -> Value {
    object([
        ("atoms", Value::Array(law.atoms().iter().map(|&a| num(a)).collect())),
        ("probs", Value::Array(law.probs().iter().map(|&p| num(p)).collect())),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("values always serialize");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(doc),
    }
}

/// Flattens a document to `label,value` rows. Nested keys join with `.`;
/// array elements that carry a `label` (bound terms) or `bound_name` (reports)
/// or `name` (suite families) are keyed by it, others by position.
pub fn to_csv(doc: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", doc, &mut rows);
    let mut out = String::from("label,value\n");
    for (label, value) in rows {
        out.push_str(&csv_field(&label));
        out.push(',');
        out.push_str(&csv_field(&value));
        out.push('\n');
    }
    out
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn element_key(v: &Value, index: usize) -> String {
    ["label", "bound_name", "name"]
        .iter()
        .find_map(|k| v.get(k).and_then(Value::as_str).map(str::to_string))
        .unwrap_or_else(|| index.to_string())
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&join(prefix, k), child, rows);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                if let Some(obj) = item.as_object().filter(|o| o.contains_key("label") && o.contains_key("value")) {
                    let mut key = join(prefix, &element_key(item, i));
                    if obj.get("included") == Some(&Value::Bool(false)) {
                        key.push_str(" (excluded)");
                    }
                    rows.push((key, scalar(&obj["value"])));
                } else if item.is_object() {
                    flatten(&join(prefix, &element_key(item, i)), item, rows);
                } else {
                    flatten(&join(prefix, &i.to_string()), item, rows);
                }
            }
        }
        other => rows.push((prefix.to_string(), scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
