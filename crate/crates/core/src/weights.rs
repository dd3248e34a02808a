//! The weights `b_α^(m)` of a positive regular symbol, computed by
//! factorization enumeration and, independently, as the word coefficients
//! of `(1 - f)^{-m}`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::c64;
use crate::series::{FreeSeries, PositiveRegularFunction};
use crate::words::{binomial, Word, WordIndex};

/// `C(k + m - 1, m - 1)`.
pub fn binomial_constant(k: usize, m: usize) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidParameter("positivity order m must be at least 1".into()));
    }
    binomial(k + m - 1, m - 1).ok_or(Error::BinomialOverflow { top: k + m - 1, bottom: m - 1 })
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy, Debug)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `b_α^(m)` for every word of length at most `depth`, in graded-lex order.
#[derive(Clone, Debug)]
pub struct WeightTable {
    symbol: PositiveRegularFunction,
    m: usize,
    index: WordIndex,
    values: Vec<f64>,
}

impl WeightTable {
    pub fn symbol(&self) -> &PositiveRegularFunction {
        &self.symbol
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    pub fn depth(&self) -> usize {
        self.index.depth()
    }

    pub fn index(&self) -> &WordIndex {
        &self.index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn get(&self, word: &Word) -> Option<f64> {
        self.index.index_of(word).map(|i| self.values[i])
    }

    /// Largest violation of `b_{g_i α} ≥ a_{g_i} b_α` over stored words (0 if none).
    pub fn chain_violation(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for idx in 0..self.index.dim() {
            for i in 0..n {
                if let Some(j) = self.index.prepend(i, idx) {
                    let a = self.symbol.coeff(&Word::generator(n, i));
                    worst = worst.max(a * self.values[idx] - self.values[j]);
                }
            }
        }
        worst
    }

    /// Largest relative difference against another table over the same words.
    pub fn max_rel_diff(&self, other: &WeightTable) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()))
            .fold(0.0, f64::max)
    }
}

fn check_order(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("positivity order m must be at least 1".into()));
    }
    Ok(())
}

/// Weights by enumerating factorizations `γ_1 ⋯ γ_j = α` whose factors all lie
/// in the support of `f`.
pub fn weights_direct(f: &PositiveRegularFunction, m: usize, depth: usize) -> Result<WeightTable> {
    check_order(m)?;
    let index = WordIndex::new(f.n(), depth)?;
    let support: HashMap<&[usize], f64> = f.support().iter().map(|(w, a)| (w.letters(), *a)).collect();
    let max_factor = f.degree();
    let binoms: Vec<f64> = (0..=depth)
        .map(|j| binomial_constant(j, m).map(|b| b as f64))
        .collect::<Result<_>>()?;

    let values = index
        .words()
        .iter()
        .map(|alpha| {
            if alpha.is_empty() {
                return 1.0;
            }
            let mut acc = CompensatedSum::default();
            enumerate_factorizations(alpha.letters(), 0, 0, 1.0, &support, max_factor, &mut |parts, prod| {
                acc.add(binoms[parts] * prod);
            });
            acc.value()
        })
        .collect();
    Ok(WeightTable { symbol: f.clone(), m, index, values })
}

fn enumerate_factorizations(
    letters: &[usize],
    pos: usize,
    parts: usize,
    prod: f64,
    support: &HashMap<&[usize], f64>,
    max_factor: usize,
    emit: &mut impl FnMut(usize, f64),
) {
    if pos == letters.len() {
        emit(parts, prod);
        return;
    }
    let longest = max_factor.min(letters.len() - pos);
    for len in 1..=longest {
        if let Some(&a) = support.get(&letters[pos..pos + len]) {
            enumerate_factorizations(letters, pos + len, parts + 1, prod * a, support, max_factor, emit);
        }
    }
}

/// Weights as word coefficients of `Σ_j C(j+m-1, m-1) f^j`, accumulating the
/// powers `f^j` for `j = 0..=depth`.
pub fn weights_oracle(f: &PositiveRegularFunction, m: usize, depth: usize) -> Result<WeightTable> {
    check_order(m)?;
    let index = WordIndex::new(f.n(), depth)?;
    let n = f.n();
    let symbol = f.series().truncate(depth).with_degree(depth)?;
    let mut power = FreeSeries::constant(n, depth, c64(1.0));
    let mut total = power.clone();
    for j in 1..=depth {
        power = power.multiply(&symbol)?;
        let c = binomial_constant(j, m)? as f64;
        total = total.add(&power.scale(c64(c)))?;
    }
    let values = index.words().iter().map(|w| total.scalar_coeff(w).re).collect();
    Ok(WeightTable { symbol: f.clone(), m, index, values })
}
