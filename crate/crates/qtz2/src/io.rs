//! JSON file formats.
//!
//! Every scalar on the wire is either a pair `[num, den]` meaning
//! `exp(2πi·num/den)` or the literal `0`. Sums that are not roots of unity
//! are written as `{"order": N, "coeffs": [[p, q], ...]}`, the rational
//! coefficients of `1, ζ_N, ζ_N², …`. Object keys are emitted in sorted
//! order, so equal inputs serialize to identical bytes.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cocycle::{DataError, ExtensionData};
use crate::group::{FiniteAbelianGroup, GroupElement, GroupError, Involution};
use crate::hopf::{BasisElement, TensorElement};
use crate::rmatrix::{RMatrix, RMatrixError, Table};
use crate::scalar::{Cyclotomic, Rational, RootOfUnity};
use crate::solver::{SolutionTuple, TupleKind};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    RMatrix(#[from] RMatrixError),
}

fn bad(msg: impl Into<String>) -> IoError {
    IoError::Format(msg.into())
}

fn field<'a>(v: &'a Value, key: &str, what: &str) -> Result<&'a Value, IoError> {
    v.get(key).ok_or_else(|| bad(format!("{} is missing key {:?}", what, key)))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array().ok_or_else(|| bad(format!("{} must be an array", what)))
}

fn integer(v: &Value, what: &str) -> Result<i64, IoError> {
    v.as_i64().ok_or_else(|| bad(format!("{} must be an integer", what)))
}

fn big(v: &Value, what: &str) -> Result<BigInt, IoError> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| bad(format!("{} must be an integer", what))),
        Value::String(s) => s.parse().map_err(|_| bad(format!("{} is not an integer: {:?}", what, s))),
        _ => Err(bad(format!("{} must be an integer", what))),
    }
}

fn big_to_json(b: &BigInt) -> Value {
    b.to_i64().map_or_else(|| Value::String(b.to_string()), Value::from)
}

pub fn root_to_json(r: RootOfUnity) -> Value {
    json!([r.num(), r.den()])
}

/// Reads `[num, den]`. The literal `0` is rejected: every table entry in
/// these formats must be invertible.
pub fn root_from_json(v: &Value) -> Result<RootOfUnity, IoError> {
    if v.as_i64() == Some(0) {
        return Err(bad("scalar 0 is not allowed here; entries must be roots of unity"));
    }
    let pair = array(v, "scalar")?;
    if pair.len() != 2 {
        return Err(bad(format!("scalar must be [num, den], got {}", v)));
    }
    let num = integer(&pair[0], "scalar numerator")?;
    let den = integer(&pair[1], "scalar denominator")?;
    if den <= 0 {
        return Err(bad(format!("scalar denominator must be positive, got {}", den)));
    }
    Ok(RootOfUnity::new(num, den as u64))
}

/// `0`, `[num, den]` when the value is a root of unity, otherwise the
/// coefficient form.
pub fn scalar_to_json(c: &Cyclotomic) -> Value {
    if c.is_zero() {
        return json!(0);
    }
    match c.as_root_of_unity() {
        Some(r) => root_to_json(r),
        None => cyclotomic_to_json(c),
    }
}

pub fn cyclotomic_to_json(c: &Cyclotomic) -> Value {
    let coeffs: Vec<Value> = c
        .coeffs()
        .iter()
        .map(|q| json!([big_to_json(q.numer()), big_to_json(q.denom())]))
        .collect();
    json!({ "order": c.order(), "coeffs": coeffs })
}

/// Accepts all three scalar forms. `[num, den]` lands in `Q(ζ_den)`.
pub fn scalar_from_json(v: &Value) -> Result<Cyclotomic, IoError> {
    if v.as_i64() == Some(0) {
        return Ok(Cyclotomic::zero(1));
    }
    if v.is_array() {
        let r = root_from_json(v)?;
        return Ok(r.to_cyclotomic());
    }
    let order = integer(field(v, "order", "cyclotomic")?, "order")?;
    if order <= 0 || order > u32::MAX as i64 {
        return Err(bad(format!("cyclotomic order out of range: {}", order)));
    }
    let coeffs = array(field(v, "coeffs", "cyclotomic")?, "coeffs")?
        .iter()
        .map(|pq| {
            let pq = array(pq, "coefficient")?;
            if pq.len() != 2 {
                return Err(bad("coefficient must be [p, q]"));
            }
            let (p, q) = (big(&pq[0], "p")?, big(&pq[1], "q")?);
            if q == BigInt::from(0) {
                return Err(bad("coefficient with zero denominator"));
            }
            Ok(Rational::new(p, q))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Cyclotomic::from_coeffs(order as u32, &coeffs))
}

fn exps_from_json(v: &Value, what: &str) -> Result<GroupElement, IoError> {
    let exps = array(v, what)?
        .iter()
        .map(|e| {
            let e = integer(e, what)?;
            u32::try_from(e).map_err(|_| bad(format!("{} has a negative or huge exponent", what)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroupElement { exps })
}

/// The canonical data file. `sigma` follows the group's element order
/// (lexicographic exponent vectors, last factor fastest) and `tau` is the
/// matching square table.
pub fn data_to_json(data: &ExtensionData) -> Value {
    let g = data.group();
    let action: Vec<Value> = data.action().images.iter().map(|e| json!(e.exps)).collect();
    let sigma: Vec<Value> = data.sigma_table().iter().map(|&r| root_to_json(r)).collect();
    let tau: Vec<Value> = g
        .elements()
        .map(|x| Value::Array(data.tau_row(x).iter().map(|&r| root_to_json(r)).collect()))
        .collect();
    json!({
        "group": { "factor_orders": g.factor_orders(), "action": action },
        "sigma": sigma,
        "tau": tau,
    })
}

/// Reads a data file. The action may sit inside `group` or at top level.
/// Only shapes are checked here; use `validate` for the identities.
pub fn data_from_json(v: &Value) -> Result<ExtensionData, IoError> {
    let group = field(v, "group", "data file")?;
    let orders = array(field(group, "factor_orders", "group")?, "factor_orders")?
        .iter()
        .map(|d| {
            let d = integer(d, "factor order")?;
            u32::try_from(d).map_err(|_| bad(format!("factor order out of range: {}", d)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let action = match (group.get("action"), v.get("action")) {
        (Some(_), Some(_)) => return Err(bad("action given both inside group and at top level")),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return Err(bad("data file has no action")),
    };
    let images = array(action, "action")?
        .iter()
        .map(|e| exps_from_json(e, "action image"))
        .collect::<Result<Vec<_>, _>>()?;
    let group = FiniteAbelianGroup::new(orders)?;
    let sigma = array(field(v, "sigma", "data file")?, "sigma")?
        .iter()
        .map(root_from_json)
        .collect::<Result<Vec<_>, _>>()?;
    let tau = array(field(v, "tau", "data file")?, "tau")?
        .iter()
        .map(|row| array(row, "tau row")?.iter().map(root_from_json).collect())
        .collect::<Result<Vec<Vec<_>>, _>>()?;
    Ok(ExtensionData::new(group, Involution::new(images), sigma, tau)?)
}

pub fn parse_data(text: &str) -> Result<ExtensionData, IoError> {
    data_from_json(&serde_json::from_str(text)?)
}

fn read_json(path: &Path) -> Result<Value, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_data(path: &Path) -> Result<ExtensionData, IoError> {
    data_from_json(&read_json(path)?)
}

/// SHA-256 of the compact canonical data file.
pub fn fingerprint(data: &ExtensionData) -> String {
    let bytes = serde_json::to_vec(&data_to_json(data)).expect("serializing a Value cannot fail");
    hex::encode(Sha256::digest(bytes))
}

fn table_to_json(t: &Table) -> Value {
    Value::Array(
        t.to_rows()
            .into_iter()
            .map(|row| Value::Array(row.into_iter().map(root_to_json).collect()))
            .collect(),
    )
}

fn table_from_json(v: &Value, name: &str) -> Result<Table, IoError> {
    let rows = array(v, name)?
        .iter()
        .map(|row| array(row, name)?.iter().map(root_from_json).collect())
        .collect::<Result<Vec<Vec<_>>, _>>()?;
    Ok(Table::from_rows(rows)?)
}

/// `{"form": "trivial", "w1": …}` with `w1` over `G × G`, or
/// `{"form": "nontrivial", "w1".."w4": …}` over the ascending `S`/`T` lists.
pub fn rmatrix_to_json(r: &RMatrix) -> Value {
    match r {
        RMatrix::Trivial { w1 } => json!({ "form": "trivial", "w1": table_to_json(w1) }),
        RMatrix::NonTrivial { w1, w2, w3, w4 } => json!({
            "form": "nontrivial",
            "w1": table_to_json(w1),
            "w2": table_to_json(w2),
            "w3": table_to_json(w3),
            "w4": table_to_json(w4),
        }),
    }
}

/// Parses an R-matrix file and checks its table shapes against `data`.
pub fn rmatrix_from_json(data: &ExtensionData, v: &Value) -> Result<RMatrix, IoError> {
    let form = field(v, "form", "R-matrix file")?
        .as_str()
        .ok_or_else(|| bad("form must be a string"))?;
    let t = |name: &str| table_from_json(field(v, name, "R-matrix file")?, name);
    let r = match form {
        "trivial" => RMatrix::Trivial { w1: t("w1")? },
        "nontrivial" => RMatrix::NonTrivial {
            w1: t("w1")?,
            w2: t("w2")?,
            w3: t("w3")?,
            w4: t("w4")?,
        },
        other => return Err(bad(format!("unknown form {:?}; expected trivial or nontrivial", other))),
    };
    r.check_shape(data)?;
    Ok(r)
}

pub fn read_rmatrix(data: &ExtensionData, path: &Path) -> Result<RMatrix, IoError> {
    rmatrix_from_json(data, &read_json(path)?)
}

fn kind_name(k: TupleKind) -> &'static str {
    match k {
        TupleKind::General => "general",
        TupleKind::Special => "special",
    }
}

pub fn tuple_to_json(t: &SolutionTuple) -> Value {
    let list = |v: &[RootOfUnity]| Value::Array(v.iter().map(|&r| root_to_json(r)).collect());
    json!({
        "kind": kind_name(t.kind),
        "alpha": Value::Array(t.alpha.iter().map(|row| list(row)).collect()),
        "beta": list(&t.beta),
        "gamma": list(&t.gamma),
        "delta": root_to_json(t.delta),
    })
}

fn basis_to_json(data: &ExtensionData, b: BasisElement) -> Value {
    json!([data.group().element(b.g).exps, b.x as u8])
}

/// `[{"basis": [[exps, eps], …], "value": scalar}, …]` in key order, where
/// `eps` is 1 for `e_g x` and 0 for `e_g`.
pub fn tensor_to_json(data: &ExtensionData, t: &TensorElement) -> Value {
    Value::Array(
        t.terms()
            .map(|(k, c)| {
                let basis: Vec<Value> = t.basis_of(k).into_iter().map(|b| basis_to_json(data, b)).collect();
                json!({ "basis": basis, "value": scalar_to_json(c) })
            })
            .collect(),
    )
}

/// Dense coefficient matrix of an element of `H` (one row) or `H ⊗ H`
/// (rows by first slot, columns by second). Basis order is
/// `e_{g_0}, e_{g_0}x, e_{g_1}, e_{g_1}x, …`.
pub fn dense_matrix(data: &ExtensionData, t: &TensorElement) -> Result<Vec<Vec<Cyclotomic>>, IoError> {
    let dim = 2 * data.group().order();
    let (rows, arity) = match t.arity() {
        1 => (1, 1),
        2 => (dim, 2),
        a => return Err(bad(format!("dense rendering needs arity at most 2, got {}", a))),
    };
    let mut m = vec![vec![Cyclotomic::zero(1); dim]; rows];
    for (k, c) in t.terms() {
        let (r, col) = if arity == 1 { (0, k[0]) } else { (k[0], k[1]) };
        m[r as usize][col as usize] = c.clone();
    }
    Ok(m)
}

pub fn basis_labels(data: &ExtensionData) -> Vec<String> {
    let g = data.group();
    g.elements()
        .flat_map(|x| {
            let e = g.element(x);
            [format!("e{}", e), format!("e{}x", e)]
        })
        .collect()
}

pub fn matrix_to_json(data: &ExtensionData, t: &TensorElement) -> Result<Value, IoError> {
    let m = dense_matrix(data, t)?;
    Ok(json!({
        "basis": basis_labels(data),
        "matrix": m.iter().map(|row| row.iter().map(scalar_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    }))
}

/// Floating-point rendering for inspection; carries an explicit label.
pub fn complex_to_json(data: &ExtensionData, t: &TensorElement) -> Result<Value, IoError> {
    let m = dense_matrix(data, t)?;
    let round = |x: f64| (x * 1e12).round() / 1e12 + 0.0;
    Ok(json!({
        "note": "floating-point approximation for inspection only; not authoritative",
        "basis": basis_labels(data),
        "matrix": m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        let (re, im) = c.to_complex();
                        json!([round(re), round(im)])
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>(),
    }))
}

/// Solution-set export: the R-matrix files in order plus a summary with
/// per-kind counts and the data fingerprint.
pub fn solution_set_to_json(data: &ExtensionData, entries: &[(&str, &RMatrix)]) -> Value {
    let mut counts = Map::new();
    for (kind, _) in entries {
        let c = counts.entry(kind.to_string()).or_insert(json!(0));
        *c = json!(c.as_u64().unwrap_or(0) + 1);
    }
    json!({
        "rmatrices": entries
            .iter()
            .map(|(kind, r)| {
                let mut v = rmatrix_to_json(r);
                v["kind"] = json!(kind);
                v
            })
            .collect::<Vec<_>>(),
        "summary": {
            "counts": counts,
            "total": entries.len(),
            "data_fingerprint": fingerprint(data),
        },
    })
}

/// Canonical pretty form used for every file the CLI writes.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializing a Value cannot fail");
    s.push('\n');
    s
}
