//! Seeded generators for symbols, tuples and domain members used by tests,
//! the acceptance suite and the nilpotent probes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cp_maps::membership;
use crate::error::Result;
use crate::fock_model::HereditaryTerm;
use crate::linalg::{Mat, C64};
use crate::series::{FreeSeries, PositiveRegularFunction};
use crate::tuple::OperatorTuple;
use crate::words::{Word, WordIndex};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_tuple(rng: &mut impl Rng, n: usize, d: usize) -> OperatorTuple {
    OperatorTuple::new((0..n).map(|_| random_matrix(rng, d, d)).collect()).expect("square")
}

/// Strictly upper-triangular tuple; every product of `d` factors vanishes.
pub fn random_strictly_upper(rng: &mut impl Rng, n: usize, d: usize) -> OperatorTuple {
    let mats = (0..n)
        .map(|_| {
            let mut m = random_matrix(rng, d, d);
            for j in 0..d {
                for i in j..d {
                    m[(i, j)] = C64::default();
                }
            }
            m
        })
        .collect();
    OperatorTuple::new(mats).expect("square")
}

/// Random polynomial symbol with coefficients in quarter steps: linear
/// coefficients in `[1/4, 2]`, each longer word of length `<= max_degree`
/// present with probability 0.3 and coefficient in `[1/4, 1]`.
pub fn random_symbol(rng: &mut impl Rng, n: usize, max_degree: usize) -> PositiveRegularFunction {
    let index = WordIndex::new(n, max_degree.max(1)).expect("small index");
    let mut terms = Vec::new();
    for w in index.words() {
        match w.len() {
            0 => {}
            1 => terms.push((w.clone(), C64::new(rng.random_range(1..=8) as f64 / 4.0, 0.0))),
            _ => {
                if rng.random_bool(0.3) {
                    terms.push((w.clone(), C64::new(rng.random_range(1..=4) as f64 / 4.0, 0.0)));
                }
            }
        }
    }
    let degree = terms.iter().map(|(w, _)| w.len()).max().unwrap_or(1);
    PositiveRegularFunction::new(FreeSeries::scalar(n, degree, terms).expect("valid words")).expect("regular")
}

/// Random scalar polynomial with coefficients uniform in the unit square.
pub fn random_polynomial(rng: &mut impl Rng, n: usize, poly_degree: usize, trunc_degree: usize, constant: bool) -> FreeSeries {
    let index = WordIndex::new(n, poly_degree).expect("small index");
    let terms: Vec<(Word, C64)> = index
        .words()
        .iter()
        .filter(|w| constant || !w.is_empty())
        .map(|w| (w.clone(), C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
        .collect();
    FreeSeries::scalar(n, trunc_degree, terms).expect("degree fits")
}

/// Largest `t` (to bisection accuracy) with `tX` in `D_f^m`; the returned value
/// is always a feasible endpoint.
pub fn feasible_scale(f: &PositiveRegularFunction, m: usize, x: &OperatorTuple, tol: f64, iterations: usize) -> Result<f64> {
    let member = |t: f64| membership(f, m, &x.scaled(t), tol).map(|v| v.member);
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while member(hi)? {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Ok(lo);
        }
    }
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if member(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Random direction pulled back to `0.9 t*` along its ray.
pub fn random_member(rng: &mut impl Rng, f: &PositiveRegularFunction, m: usize, d: usize, tol: f64) -> Result<OperatorTuple> {
    let x = random_tuple(rng, f.n(), d);
    let t = feasible_scale(f, m, &x, tol, 20)?;
    Ok(x.scaled(0.9 * t))
}

/// Random strictly upper-triangular tuple scaled to the feasible bisection endpoint.
pub fn random_nilpotent_member(rng: &mut impl Rng, f: &PositiveRegularFunction, m: usize, d: usize, tol: f64) -> Result<OperatorTuple> {
    let x = random_strictly_upper(rng, f.n(), d);
    let t = feasible_scale(f, m, &x, tol, 20)?;
    Ok(x.scaled(t))
}

/// Random hereditary polynomial with word lengths `<= max_len`.
pub fn random_hereditary(rng: &mut impl Rng, n: usize, max_len: usize, terms: usize, e: usize) -> Vec<HereditaryTerm> {
    let index = WordIndex::new(n, max_len).expect("small index");
    let words = index.words();
    (0..terms)
        .map(|_| HereditaryTerm {
            alpha: words[rng.random_range(0..words.len())].clone(),
            beta: words[rng.random_range(0..words.len())].clone(),
            coeff: random_matrix(rng, e, e),
        })
        .collect()
}
