//! Measure specs and Fock inputs as JSON documents.

use std::collections::HashMap;
use std::path::Path;

use mvop_core::favard::FockInput;
use mvop_core::linalg::Matrix;
use mvop_core::measures::{
    circle_functional, discrete_functional, gaussian_functional, jacobi_to_moments,
    product_functional, table_functional, DiscreteMeasure, Functional, JacobiPair1D,
    DEFAULT_MAX_DEGREE,
};
use mvop_core::polynomial::MultiIndex;
use mvop_core::Scalar;
use serde_json::{Map, Value};

use crate::Failure;

pub const SPEC_VERSION: u64 = 1;

pub fn read_document(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))?;
    match doc.get("spec_version").and_then(Value::as_u64) {
        Some(SPEC_VERSION) => Ok(doc),
        Some(v) => Err(Failure::malformed(format!("unsupported spec_version {v}"))),
        None => Err(Failure::malformed(format!("{}: missing spec_version", path.display()))),
    }
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value, Failure> {
    obj.get(key)
        .ok_or_else(|| Failure::malformed(format!("missing field `{key}`")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, Failure> {
    v.as_array()
        .ok_or_else(|| Failure::malformed(format!("`{what}` must be an array")))
}

fn count(v: &Value, what: &str) -> Result<usize, Failure> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Failure::malformed(format!("`{what}` must be a non-negative integer")))
}

pub fn scalar<T: Scalar>(v: &Value) -> Result<T, Failure> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(Failure::malformed(format!("expected a number, found {other}"))),
    };
    Ok(T::parse_str(&text)?)
}

fn scalars<T: Scalar>(v: &Value, what: &str) -> Result<Vec<T>, Failure> {
    array(v, what)?.iter().map(scalar).collect()
}

fn matrix<T: Scalar>(v: &Value, what: &str) -> Result<Matrix<T>, Failure> {
    let rows = array(v, what)?
        .iter()
        .map(|r| scalars(r, what))
        .collect::<Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Err(Failure::malformed(format!("`{what}` is empty")));
    }
    Ok(Matrix::from_rows(rows)?)
}

/// Every scalar in the document is a string or an integer literal.
pub fn all_rational(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.is_i64() || n.is_u64(),
        Value::Array(a) => a.iter().all(all_rational),
        Value::Object(o) => o.iter().all(|(k, v)| k == "spec_version" || all_rational(v)),
        _ => true,
    }
}

/// The measure has a backend with exact moments.
pub fn exact_capable(spec: &Value) -> bool {
    match spec.get("type").and_then(Value::as_str) {
        Some("circle" | "half_circle") => false,
        Some("product") => spec
            .get("factors")
            .and_then(Value::as_array)
            .is_some_and(|f| f.iter().all(exact_capable)),
        _ => true,
    }
}

/// Builds the moment functional of a spec. `needed` is the moment depth the
/// requested analysis uses; backends with a finite reliable depth default to it.
pub fn functional<T: Scalar>(spec: &Value, needed: usize) -> Result<Functional<T>, Failure> {
    let kind = field(spec, "type")?
        .as_str()
        .ok_or_else(|| Failure::malformed("`type` must be a string"))?;
    let depth = match spec.get("max_degree") {
        Some(v) => Some(count(v, "max_degree")?),
        None => None,
    };
    let f: Functional<T> = match kind {
        "discrete" => {
            let atoms = array(field(spec, "atoms")?, "atoms")?
                .iter()
                .map(|a| scalars(a, "atoms"))
                .collect::<Result<Vec<_>, _>>()?;
            let weights = scalars(field(spec, "weights")?, "weights")?;
            discrete_functional(DiscreteMeasure::new(atoms, weights)?)
        }
        "product" => {
            let factors = array(field(spec, "factors")?, "factors")?
                .iter()
                .map(|f| functional(f, needed))
                .collect::<Result<Vec<_>, _>>()?;
            product_functional(factors)?
        }
        "circle" | "half_circle" => {
            circle_functional(kind == "half_circle", depth.unwrap_or(DEFAULT_MAX_DEGREE.max(needed)))?
        }
        "gaussian" => gaussian_functional(),
        "moments_table" => {
            let dim = count(field(spec, "dimension")?, "dimension")?;
            let mut entries = HashMap::new();
            for e in array(field(spec, "entries")?, "entries")? {
                let index = array(field(e, "index")?, "index")?
                    .iter()
                    .map(|k| count(k, "index").map(|k| k as u32))
                    .collect::<Result<Vec<_>, _>>()?;
                entries.insert(MultiIndex::new(index), scalar(field(e, "value")?)?);
            }
            let depth = match depth {
                Some(d) => d,
                None => count(field(spec, "depth")?, "depth")?,
            };
            table_functional(dim, entries, depth)?
        }
        "jacobi_1d" => {
            let omega = scalars(field(spec, "omega")?, "omega")?;
            let alpha = scalars(field(spec, "alpha")?, "alpha")?;
            let j = JacobiPair1D::new(omega, alpha)?;
            match depth {
                Some(d) => jacobi_to_moments(&j, d)?,
                // deepest table the sequences support, up to what is needed
                None => (0..=needed)
                    .rev()
                    .find_map(|d| jacobi_to_moments(&j, d).ok())
                    .ok_or_else(|| Failure::malformed("Jacobi sequences are empty"))?,
            }
        }
        other => return Err(Failure::malformed(format!("unknown measure type `{other}`"))),
    };
    if let Some(d) = spec.get("dimension") {
        let d = count(d, "dimension")?;
        if d != f.dimension() {
            return Err(Failure::malformed(format!(
                "declared dimension {d} but the {kind} measure has dimension {}",
                f.dimension()
            )));
        }
    }
    Ok(f)
}

/// Reads a Fock input: `gram` or `omega` per degree, optional `preservation[i][n]`.
pub fn fock_input<T: Scalar>(doc: &Value) -> Result<FockInput<T>, Failure> {
    let dim = count(field(doc, "dimension")?, "dimension")?;
    let mats = |key: &str| -> Result<Option<Vec<Matrix<T>>>, Failure> {
        match doc.get(key) {
            Some(v) => Ok(Some(
                array(v, key)?
                    .iter()
                    .map(|m| matrix(m, key))
                    .collect::<Result<_, _>>()?,
            )),
            None => Ok(None),
        }
    };
    let preservation = match doc.get("preservation") {
        Some(v) => Some(
            array(v, "preservation")?
                .iter()
                .map(|per_i| {
                    array(per_i, "preservation")?
                        .iter()
                        .map(|m| matrix(m, "preservation"))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let fi = match (mats("gram")?, mats("omega")?) {
        (Some(g), None) => match preservation {
            Some(p) => FockInput::from_gram(dim, g, p),
            None => FockInput::without_preservation(dim, g),
        },
        (None, Some(o)) => {
            let zeros = FockInput::without_preservation(dim, vec![]);
            let p = preservation.unwrap_or(zeros.preservation);
            let mut fi = FockInput::from_omega(dim, o, p)?;
            if fi.preservation.iter().all(Vec::is_empty) {
                fi = FockInput::without_preservation(dim, fi.gram);
            }
            fi
        }
        _ => return Err(Failure::malformed("Fock input needs exactly one of `gram` or `omega`")),
    };
    if let Some(d) = doc.get("depth") {
        let d = count(d, "depth")?;
        if d != fi.depth() {
            return Err(Failure::malformed(format!(
                "declared depth {d} but {} matrices given",
                fi.gram.len()
            )));
        }
    }
    if fi.preservation.len() != dim || fi.preservation.iter().any(|p| p.len() != fi.gram.len()) {
        return Err(Failure::malformed(format!(
            "preservation must hold {dim} lists of {} matrices",
            fi.gram.len()
        )));
    }
    Ok(fi)
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}
