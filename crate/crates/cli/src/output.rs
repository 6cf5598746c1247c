//! Canonical JSON plus CSV and plain-text renderings of a report.

use std::str::FromStr;

use mvop_core::linalg::Matrix;
use mvop_core::polynomial::{MultiIndex, Polynomial};
use mvop_core::Scalar;
use serde_json::{Number, Value};

use crate::Format;

/// Seventeen significant digits, which round-trips every double.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    let x = if x == 0.0 { 0.0 } else { x };
    Value::Number(Number::from_str(&format!("{x:.16e}")).expect("valid JSON number"))
}

/// `"p/q"` in exact mode, a fixed-width float otherwise.
pub fn scalar<T: Scalar>(x: &T) -> Value {
    match x.exact_string() {
        Some(s) => Value::String(s),
        None => float(x.to_f64()),
    }
}

pub fn vector<T: Scalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(scalar).collect())
}

pub fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().copied().map(float).collect())
}

pub fn matrix<T: Scalar>(m: &Matrix<T>) -> Value {
    Value::Array((0..m.rows()).map(|r| vector(m.row(r))).collect())
}

pub fn index(k: &MultiIndex) -> Value {
    Value::Array(k.entries().iter().map(|&e| Value::from(e)).collect())
}

pub fn indices(ks: &[MultiIndex]) -> Value {
    Value::Array(ks.iter().map(index).collect())
}

pub fn polynomial<T: Scalar>(p: &Polynomial<T>) -> Value {
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| a.0.cmp(b.0)));
    Value::Array(
        terms
            .into_iter()
            .map(|(k, c)| Value::Array(vec![index(k), scalar(c)]))
            .collect(),
    )
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(v).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut rows = Vec::new();
            flatten(v, String::new(), &mut rows);
            let mut s = String::from("key,value\n");
            for (k, val) in rows {
                s.push_str(&format!("{},{}\n", csv_cell(&k), csv_cell(&val)));
            }
            s
        }
        Format::Pretty => {
            let mut s = String::new();
            pretty(v, 0, &mut s);
            s
        }
    }
}

fn leaf(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(v: &Value, prefix: String, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(o) => o.iter().for_each(|(k, v)| flatten(v, join(k), out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(v, join(&i.to_string()), out)),
        other => out.push((prefix, leaf(other))),
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(|x| !x.is_object() && !x.is_array()) || a.iter().all(is_row),
        Value::Object(_) => false,
        _ => true,
    }
}

fn is_row(v: &Value) -> bool {
    matches!(v, Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()))
}

fn inline(v: &Value) -> String {
    match v {
        Value::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => leaf(other),
    }
}

fn pretty(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(o) => {
            for (k, v) in o {
                if is_flat(v) && !(matches!(v, Value::Array(a) if !a.is_empty() && a.iter().all(|x| x.is_array()))) {
                    out.push_str(&format!("{pad}{k}: {}\n", inline(v)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    pretty(v, depth + 1, out);
                }
            }
        }
        Value::Array(a) => {
            for (i, v) in a.iter().enumerate() {
                if v.is_object() {
                    out.push_str(&format!("{pad}- [{i}]\n"));
                    pretty(v, depth + 1, out);
                } else {
                    out.push_str(&format!("{pad}{}\n", inline(v)));
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", leaf(other))),
    }
}
