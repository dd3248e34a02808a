//! JSON formats for series, matrices and tuples.
//!
//! Complex entries are `[re, im]` (a bare number is read as a real entry).
//! Matrices are row-major arrays of rows. A series file is
//! `{"n": .., "degree": .., "coeff_dim": .., "coeffs": {"12": [1, 0], ..}}`
//! with word keys in digit form (`""` is the empty word) and matrix
//! coefficients given as nested rows when `coeff_dim > 1`.

use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{Mat, C64};
use crate::series::{FreeSeries, PositiveRegularFunction};
use crate::tuple::OperatorTuple;
use crate::words::Word;

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn complex_to_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_from_json(v: &Value) -> Result<C64> {
    if let Some(re) = v.as_f64() {
        return Ok(C64::new(re, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(format_err(format!("complex entry must hold two numbers, got {v}"))),
        },
        _ => Err(format_err(format!("expected [re, im] or a number, got {v}"))),
    }
}

pub fn matrix_to_json(a: &Mat) -> Value {
    Value::Array(
        (0..a.nrows())
            .map(|i| Value::Array((0..a.ncols()).map(|j| complex_to_json(a[(i, j)])).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value) -> Result<Mat> {
    let rows = v.as_array().ok_or_else(|| format_err("matrix must be an array of rows"))?;
    let parsed: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| format_err("matrix row must be an array"))?
                .iter()
                .map(complex_from_json)
                .collect()
        })
        .collect::<Result<_>>()?;
    let ncols = parsed.first().map(Vec::len).unwrap_or(0);
    if let Some(bad) = parsed.iter().position(|r| r.len() != ncols) {
        return Err(format_err(format!("row {} has {} entries, expected {ncols}", bad + 1, parsed[bad].len())));
    }
    Ok(Mat::from_fn(parsed.len(), ncols, |i, j| parsed[i][j]))
}

pub fn tuple_to_json(x: &OperatorTuple) -> Value {
    Value::Array(x.components().iter().map(matrix_to_json).collect())
}

pub fn tuple_from_json(v: &Value) -> Result<OperatorTuple> {
    let comps = v.as_array().ok_or_else(|| format_err("tuple must be an array of matrices"))?;
    OperatorTuple::new(comps.iter().map(matrix_from_json).collect::<Result<_>>()?)
}

pub fn series_to_json(s: &FreeSeries) -> Value {
    let mut coeffs = Map::new();
    for (w, c) in s.terms() {
        let v = if s.coeff_dim() == 1 { complex_to_json(c[(0, 0)]) } else { matrix_to_json(c) };
        coeffs.insert(w.to_text(), v);
    }
    json!({
        "n": s.n(),
        "degree": s.degree(),
        "coeff_dim": s.coeff_dim(),
        "coeffs": coeffs,
    })
}

fn field_usize(obj: &Map<String, Value>, name: &str) -> Result<Option<usize>> {
    match obj.get(name) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(|x| Some(x as usize))
            .ok_or_else(|| format_err(format!("field `{name}` must be a nonnegative integer"))),
    }
}

pub fn series_from_json(v: &Value) -> Result<FreeSeries> {
    let obj = v.as_object().ok_or_else(|| format_err("series must be an object"))?;
    let n = field_usize(obj, "n")?.ok_or_else(|| format_err("series is missing field `n`"))?;
    let coeff_dim = field_usize(obj, "coeff_dim")?.unwrap_or(1);
    let terms = obj
        .get("coeffs")
        .and_then(Value::as_object)
        .ok_or_else(|| format_err("series is missing object field `coeffs`"))?;
    let words: Vec<Word> = terms.keys().map(|k| Word::parse(n, k)).collect::<Result<_>>()?;
    let degree = match field_usize(obj, "degree")? {
        Some(d) => d,
        None => words.iter().map(Word::len).max().unwrap_or(0),
    };
    let mut s = FreeSeries::zero(n, degree, coeff_dim);
    for (w, c) in words.into_iter().zip(terms.values()) {
        let coeff = if coeff_dim == 1 && complex_from_json(c).is_ok() {
            Mat::from_element(1, 1, complex_from_json(c)?)
        } else {
            matrix_from_json(c)?
        };
        s.set(w, coeff)?;
    }
    Ok(s)
}

/// Reads a symbol and applies the positive-regularity checks.
pub fn symbol_from_json(v: &Value) -> Result<PositiveRegularFunction> {
    PositiveRegularFunction::new(series_from_json(v)?)
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| format_err(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| format_err(format!("{}: {e}", path.display())))
}

pub fn read_series(path: &Path) -> Result<FreeSeries> {
    series_from_json(&read_json(path)?)
}

pub fn read_symbol(path: &Path) -> Result<PositiveRegularFunction> {
    symbol_from_json(&read_json(path)?)
}

pub fn read_matrix(path: &Path) -> Result<Mat> {
    matrix_from_json(&read_json(path)?)
}

pub fn read_tuple(path: &Path) -> Result<OperatorTuple> {
    tuple_from_json(&read_json(path)?)
}
