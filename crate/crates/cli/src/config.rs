//! Domain configuration files.
//!
//! ```json
//! {"n": 2, "m": 1, "depth": 4,
//!  "symbol": {"n": 2, "coeffs": {"1": [1, 0], "2": [1, 0], "12": [1, 0]}},
//!  "tolerances": {"eigen": 1e-9}, "seed": 7}
//! ```
//!
//! `symbol` may also be a path to a series file, resolved against the
//! config file's directory.

use std::path::{Path, PathBuf};

use ncdomain::io::{read_json, symbol_from_json};
use ncdomain::tolerances::Tolerances;
use ncdomain::words::{dim_cap, fock_dim};
use ncdomain::{Error, PositiveRegularFunction, Result};
use serde::Deserialize;
use serde_json::Value;

#[derive(Clone, Debug)]
pub struct DomainConfig {
    pub n: usize,
    pub m: usize,
    pub depth: usize,
    pub symbol: PositiveRegularFunction,
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: Option<usize>,
    m: usize,
    depth: usize,
    symbol: Value,
    #[serde(default)]
    tolerances: Tolerances,
    seed: Option<u64>,
}

fn field_error(field: &str, e: impl std::fmt::Display) -> Error {
    Error::Format(format!("config field `{field}`: {e}"))
}

pub fn parse_config(path: &Path) -> Result<DomainConfig> {
    let value = read_json(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    config_from_value(value, &base)
}

pub fn config_from_value(value: Value, base: &Path) -> Result<DomainConfig> {
    let raw: RawConfig = serde_json::from_value(value).map_err(|e| Error::Format(format!("config: {e}")))?;
    let symbol = match &raw.symbol {
        Value::String(p) => {
            let p = base.join(p);
            symbol_from_json(&read_json(&p).map_err(|e| field_error("symbol", e))?)
        }
        v => symbol_from_json(v),
    }
    .map_err(|e| field_error("symbol", e))?;
    let n = raw.n.unwrap_or(symbol.n());
    if n != symbol.n() {
        return Err(field_error("n", format!("{n} does not match the symbol's {} letters", symbol.n())));
    }
    if raw.m == 0 {
        return Err(field_error("m", "positivity order must be at least 1"));
    }
    validate_depth(n, raw.depth).map_err(|e| field_error("depth", e))?;
    let t = raw.tolerances;
    for (name, v) in [("eigen", t.eigen), ("oracle_rel", t.oracle_rel), ("form", t.form), ("exact", t.exact)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(field_error(&format!("tolerances.{name}"), format!("must be a finite nonnegative number, got {v}")));
        }
    }
    Ok(DomainConfig { n, m: raw.m, depth: raw.depth, symbol, tolerances: t, seed: raw.seed })
}

pub fn validate_depth(n: usize, depth: usize) -> Result<()> {
    let cap = dim_cap();
    match fock_dim(n, depth) {
        Some(dim) if dim <= cap => Ok(()),
        Some(dim) => Err(Error::DimensionCap { dim, cap }),
        None => Err(Error::DimensionCap { dim: usize::MAX, cap }),
    }
}
