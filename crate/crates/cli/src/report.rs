//! Report documents and their JSON / CSV renderings.
//!
//! Every float is rounded to 15 significant digits before rendering, and CSV
//! cells reuse the JSON text of each number, so both formats carry the same
//! values digit for digit.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Number, Value};

use qdkd::protocol::{BobMode, RoundOutcome};
use qdkd::quantum::BellOutcome;

use crate::error::{CliError, CliResult};
use crate::spec::OutputFormat;

pub const SIGNIFICANT_DIGITS: usize = 15;

pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x + 0.0;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Rounds every float in `v`; non-finite values become null.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            Number::from_f64(round_significant(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, normalize(v))).collect())
        }
        other => other,
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    normalize(serde_json::to_value(x).expect("report types serialize"))
}

/// Dotted-key flattening of nested objects, in field order.
pub fn flatten(v: &Value) -> Vec<(String, Value)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, child, out);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), child, out);
                }
            }
            leaf => out.push((prefix.to_string(), leaf.clone())),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

/// CSV text of a scalar; absent values are empty cells.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Renders rows sharing one header (taken from the first row).
pub fn csv_table(rows: &[Vec<(String, Value)>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = rows.first() {
        w.write_record(first.iter().map(|(k, _)| k.as_str()))
            .expect("in-memory csv");
        for row in rows {
            w.write_record(row.iter().map(|(_, v)| cell(v)))
                .expect("in-memory csv");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

fn bit(b: Option<bool>) -> Value {
    b.map_or(Value::Null, |b| Value::from(u8::from(b)))
}

fn bell(m: Option<BellOutcome>) -> Value {
    match m {
        None => Value::Null,
        Some(BellOutcome::Fail) => Value::from("FAIL"),
        Some(o) => bit(o.bit()),
    }
}

pub const ROUND_COLUMNS: [&str; 11] = [
    "index",
    "mode",
    "j",
    "k",
    "m",
    "kA",
    "jB",
    "eve_j",
    "eve_k",
    "cm_detected",
    "cm_correlated",
];

/// One round as an ordered record; the JSON form adds Eve's branch and the
/// raw control-mode results.
pub fn round_record(o: &RoundOutcome, detailed: bool) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("index".into(), Value::from(o.index));
    m.insert(
        "mode".into(),
        Value::from(match o.bob_mode {
            BobMode::Message => "MM",
            BobMode::Control => "CM",
        }),
    );
    m.insert("j".into(), bit(Some(o.j)));
    m.insert("k".into(), bit(o.k));
    m.insert("m".into(), bell(o.m));
    m.insert("kA".into(), bit(o.k_view_a));
    m.insert("jB".into(), bit(o.j_view_b));
    m.insert("eve_j".into(), bit(o.eve_symbol_j));
    m.insert("eve_k".into(), bit(o.eve_symbol_k));
    m.insert("cm_detected".into(), bit(o.bob_cm_detected));
    m.insert("cm_correlated".into(), bit(o.correlated));
    if detailed {
        m.insert("eve_branch".into(), Value::from(o.eve_branch().as_str()));
        m.insert("bob_cm_result".into(), bit(o.bob_cm_result));
        m.insert("alice_cm_result".into(), bit(o.alice_cm_result));
    }
    m
}

pub fn rounds_csv(outcomes: &[RoundOutcome]) -> String {
    let rows: Vec<Vec<(String, Value)>> = outcomes
        .iter()
        .map(|o| round_record(o, false).into_iter().collect())
        .collect();
    if rows.is_empty() {
        return ROUND_COLUMNS.join(",") + "\n";
    }
    csv_table(&rows)
}

pub fn rounds_json(outcomes: &[RoundOutcome]) -> Value {
    Value::Array(
        outcomes
            .iter()
            .map(|o| Value::Object(round_record(o, true)))
            .collect(),
    )
}

/// JSON text, or a one-row CSV of the flattened document.
pub fn render(doc: &Value, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("json value serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => csv_table(&[flatten(doc)]),
    }
}

pub fn write_output(text: &str, path: Option<&Path>) -> CliResult<()> {
    let io_err = |e: io::Error| CliError::Io(e.to_string());
    match path {
        Some(p) => {
            let mut f =
                File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            f.write_all(text.as_bytes()).map_err(io_err)
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(io_err)
        }
    }
}
