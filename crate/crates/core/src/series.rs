//! Truncated free power series `Σ C_(α) Z_α` with scalar or square-matrix
//! coefficients, and the positive regular symbols that generate domains.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c64, identity, kron, op_norm, zeros, Mat, C64};
use crate::tuple::OperatorTuple;
use crate::weights::WeightTable;
use crate::words::Word;

/// A free power series truncated at `degree`. Coefficients are
/// `coeff_dim × coeff_dim` matrices; absent words have zero coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeSeries {
    n: usize,
    degree: usize,
    coeff_dim: usize,
    coeffs: BTreeMap<Word, Mat>,
}

impl FreeSeries {
    pub fn zero(n: usize, degree: usize, coeff_dim: usize) -> Self {
        assert!(n >= 1 && coeff_dim >= 1);
        Self { n, degree, coeff_dim, coeffs: BTreeMap::new() }
    }

    /// Scalar series from `(word, coefficient)` pairs.
    pub fn scalar(n: usize, degree: usize, terms: impl IntoIterator<Item = (Word, C64)>) -> Result<Self> {
        let mut s = Self::zero(n, degree, 1);
        for (w, c) in terms {
            s.add_term(w, Mat::from_element(1, 1, c))?;
        }
        Ok(s)
    }

    /// Scalar series with real coefficients from text words, e.g. `[("1", 1.0), ("12", 0.5)]`.
    pub fn from_real_terms(n: usize, degree: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|(w, c)| Ok((Word::parse(n, w)?, c64(*c))))
            .collect::<Result<Vec<_>>>()?;
        Self::scalar(n, degree, terms)
    }

    pub fn constant(n: usize, degree: usize, value: C64) -> Self {
        let mut s = Self::zero(n, degree, 1);
        s.coeffs.insert(Word::empty(n), Mat::from_element(1, 1, value));
        s
    }

    /// The coordinate function `Z_{i+1}`.
    pub fn variable(n: usize, degree: usize, i: usize) -> Self {
        let mut s = Self::zero(n, degree, 1);
        if degree >= 1 {
            s.coeffs.insert(Word::generator(n, i), identity(1));
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff_dim(&self) -> usize {
        self.coeff_dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Mat)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, word: &Word) -> Option<&Mat> {
        self.coeffs.get(word)
    }

    /// Scalar coefficient of `word` (top-left entry), zero if absent.
    pub fn scalar_coeff(&self, word: &Word) -> C64 {
        self.coeffs.get(word).map(|m| m[(0, 0)]).unwrap_or_default()
    }

    /// Largest length of a word carrying a nonzero coefficient.
    pub fn polynomial_degree(&self) -> usize {
        self.coeffs
            .iter()
            .filter(|(_, c)| !is_zero(c))
            .map(|(w, _)| w.len())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(is_zero)
    }

    fn check_word(&self, word: &Word) -> Result<()> {
        if word.n() != self.n {
            return Err(Error::GeneratorMismatch { expected: self.n, found: word.n() });
        }
        if word.len() > self.degree {
            return Err(Error::WordTooLong { len: word.len(), depth: self.degree });
        }
        Ok(())
    }

    /// Sets the coefficient of `word`, replacing any existing value.
    pub fn set(&mut self, word: Word, coeff: Mat) -> Result<()> {
        self.check_word(&word)?;
        if coeff.shape() != (self.coeff_dim, self.coeff_dim) {
            return Err(Error::Shape(format!(
                "coefficient is {}x{}, series has coeff_dim {}",
                coeff.nrows(),
                coeff.ncols(),
                self.coeff_dim
            )));
        }
        self.coeffs.insert(word, coeff);
        Ok(())
    }

    fn add_term(&mut self, word: Word, coeff: Mat) -> Result<()> {
        self.check_word(&word)?;
        match self.coeffs.get_mut(&word) {
            Some(c) => *c += coeff,
            None => {
                self.coeffs.insert(word, coeff);
            }
        }
        Ok(())
    }

    /// Adds without checks; caller guarantees word length and shape.
    fn accumulate(&mut self, word: Word, coeff: Mat) {
        match self.coeffs.get_mut(&word) {
            Some(c) => *c += coeff,
            None => {
                self.coeffs.insert(word, coeff);
            }
        }
    }

    fn check_compatible(&self, other: &FreeSeries) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GeneratorMismatch { expected: self.n, found: other.n });
        }
        if self.coeff_dim != other.coeff_dim {
            return Err(Error::Shape(format!(
                "coefficient dimensions differ: {} vs {}",
                self.coeff_dim, other.coeff_dim
            )));
        }
        Ok(())
    }

    /// Drops every word longer than `degree`.
    pub fn truncate(&self, degree: usize) -> Self {
        let degree = degree.min(self.degree);
        Self {
            n: self.n,
            degree,
            coeff_dim: self.coeff_dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| w.len() <= degree)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Same coefficients with a different truncation degree; fails if a stored word would not fit.
    pub fn with_degree(&self, degree: usize) -> Result<Self> {
        if let Some((w, _)) = self.coeffs.iter().find(|(w, c)| w.len() > degree && !is_zero(c)) {
            return Err(Error::WordTooLong { len: w.len(), depth: degree });
        }
        let mut out = self.truncate(degree);
        out.degree = degree;
        Ok(out)
    }

    pub fn add(&self, other: &FreeSeries) -> Result<Self> {
        self.check_compatible(other)?;
        let degree = self.degree.min(other.degree);
        let mut out = self.truncate(degree);
        for (w, c) in other.coeffs.iter().filter(|(w, _)| w.len() <= degree) {
            out.accumulate(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FreeSeries) -> Result<Self> {
        self.add(&other.scale(c64(-1.0)))
    }

    pub fn scale(&self, lambda: C64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= lambda;
        }
        out
    }

    /// Formal product `(FG)_α = Σ_{βγ=α} F_β G_γ`, truncated to the smaller degree.
    pub fn multiply(&self, other: &FreeSeries) -> Result<Self> {
        self.check_compatible(other)?;
        let degree = self.degree.min(other.degree);
        let mut out = Self::zero(self.n, degree, self.coeff_dim);
        for (u, a) in &self.coeffs {
            if u.len() > degree || is_zero(a) {
                continue;
            }
            for (v, b) in &other.coeffs {
                if u.len() + v.len() > degree || is_zero(b) {
                    continue;
                }
                out.accumulate(u.concat(v)?, a * b);
            }
        }
        Ok(out)
    }

    /// Coefficientwise reversal `Σ C_(α̃) Z_α`.
    pub fn reversed(&self) -> Self {
        Self {
            n: self.n,
            degree: self.degree,
            coeff_dim: self.coeff_dim,
            coeffs: self.coeffs.iter().map(|(w, c)| (w.reverse(), c.clone())).collect(),
        }
    }

    /// Formal composition `F ∘ Φ`: each monomial `Y_β` of `F` is replaced by
    /// `Φ_β = Φ_{i_1} ⋯ Φ_{i_k}`. Every `Φ_j` must have zero constant term, so
    /// the result is exact up to `min(deg F, deg Φ)`.
    ///
    /// At most one side may carry matrix coefficients.
    pub fn compose(&self, phi: &[FreeSeries]) -> Result<Self> {
        if phi.len() != self.n {
            return Err(Error::GeneratorMismatch { expected: self.n, found: phi.len() });
        }
        let first = &phi[0];
        let (n, inner_degree, inner_dim) = (first.n, first.degree, first.coeff_dim);
        for (j, p) in phi.iter().enumerate() {
            if p.n != n || p.degree != inner_degree || p.coeff_dim != inner_dim {
                return Err(Error::Composition(format!(
                    "component {} does not share letter count, degree and coefficient size with component 1",
                    j + 1
                )));
            }
            if p.coeffs.get(&Word::empty(n)).is_some_and(|c| !is_zero(c)) {
                return Err(Error::Composition(format!(
                    "component {} has a nonzero constant term",
                    j + 1
                )));
            }
        }
        if self.coeff_dim > 1 && inner_dim > 1 {
            return Err(Error::Composition(
                "outer and inner series cannot both have matrix coefficients".into(),
            ));
        }
        let degree = self.degree.min(inner_degree);
        let out_dim = self.coeff_dim.max(inner_dim);
        let mut out = Self::zero(n, degree, out_dim);

        let one = {
            let mut s = Self::zero(n, degree, inner_dim);
            s.coeffs.insert(Word::empty(n), identity(inner_dim));
            s
        };
        let phi: Vec<FreeSeries> = phi.iter().map(|p| p.truncate(degree)).collect();

        // walk F's support in lexicographic order, reusing prefix products
        let mut path: Vec<usize> = Vec::new();
        let mut stack: Vec<FreeSeries> = vec![one];
        for (beta, c) in &self.coeffs {
            if beta.len() > degree || is_zero(c) {
                continue;
            }
            let letters = beta.letters();
            let common = path.iter().zip(letters).take_while(|(a, b)| a == b).count();
            path.truncate(common);
            stack.truncate(common + 1);
            for &l in &letters[common..] {
                let next = stack.last().unwrap().multiply(&phi[l])?;
                stack.push(next);
                path.push(l);
            }
            for (alpha, p) in &stack.last().unwrap().coeffs {
                let term = if self.coeff_dim == 1 { p * c[(0, 0)] } else { c * p[(0, 0)] };
                out.accumulate(alpha.clone(), term);
            }
        }
        Ok(out)
    }

    /// `Σ_{|α| ≤ D} X_α ⊗ C_(α)`, operator factor first.
    pub fn evaluate(&self, x: &OperatorTuple) -> Result<Mat> {
        x.expect_n(self.n)?;
        let d = x.dim();
        let e = self.coeff_dim;
        let support: Vec<(&Word, &Mat)> = self.coeffs.iter().filter(|(_, c)| !is_zero(c)).collect();
        let monomials = x.monomials(support.iter().map(|(w, _)| *w));
        let mut out = zeros(d * e, d * e);
        for ((_, c), xa) in support.iter().zip(&monomials) {
            if e == 1 {
                out += xa * c[(0, 0)];
            } else {
                out += kron(xa, c);
            }
        }
        Ok(out)
    }

    /// Per-degree root test `ρ_k = ‖Σ_{|α|=k} C_(α)^* C_(α) / b_α‖^{1/2k}`.
    pub fn convergence_profile(&self, weights: &WeightTable) -> Result<ConvergenceProfile> {
        if weights.depth() < self.degree {
            return Err(Error::WeightTableShort { have: weights.depth(), need: self.degree });
        }
        if weights.n() != self.n {
            return Err(Error::GeneratorMismatch { expected: self.n, found: weights.n() });
        }
        let e = self.coeff_dim;
        let mut grade_sums = vec![zeros(e, e); self.degree + 1];
        for (w, c) in &self.coeffs {
            if w.is_empty() {
                continue;
            }
            let b = weights.get(w).expect("weight table covers the degree");
            grade_sums[w.len()] += c.adjoint() * c * c64(1.0 / b);
        }
        let rho: Vec<f64> = (1..=self.degree)
            .map(|k| op_norm(&grade_sums[k]).powf(1.0 / (2.0 * k as f64)))
            .collect();
        let tail_len = self.degree.div_ceil(3);
        let tail = rho[rho.len() - tail_len..].iter().copied().fold(0.0, f64::max);
        Ok(ConvergenceProfile { rho, tail })
    }
}

fn is_zero(m: &Mat) -> bool {
    m.iter().all(|z| *z == C64::new(0.0, 0.0))
}

/// Per-degree root-test values and the top-third maximum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceProfile {
    /// `rho[k-1] = ρ_k` for `k = 1..=D`.
    pub rho: Vec<f64>,
    pub tail: f64,
}

/// A symbol `f = Σ a_α Z_α` with `a_{g_0} = 0`, `a_{g_i} > 0` and `a_α ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveRegularFunction {
    series: FreeSeries,
    support: Vec<(Word, f64)>,
}

impl PositiveRegularFunction {
    pub fn new(series: FreeSeries) -> Result<Self> {
        if series.coeff_dim != 1 {
            return Err(Error::Regularity("symbol coefficients must be scalars".into()));
        }
        let n = series.n;
        let mut support = Vec::new();
        for (w, c) in &series.coeffs {
            let z = c[(0, 0)];
            if z.im != 0.0 {
                return Err(Error::Regularity(format!(
                    "coefficient of {} must be real (a_α ≥ 0)",
                    w.to_text()
                )));
            }
            if w.is_empty() {
                if z.re != 0.0 {
                    return Err(Error::Regularity(
                        "constant term must vanish (a_{g_0} = 0)".into(),
                    ));
                }
                continue;
            }
            if z.re < 0.0 || !z.re.is_finite() {
                return Err(Error::Regularity(format!(
                    "coefficient of {} must be a nonnegative real (a_α ≥ 0), got {}",
                    w.to_text(),
                    z.re
                )));
            }
            if z.re > 0.0 {
                support.push((w.clone(), z.re));
            }
        }
        for i in 0..n {
            let g = Word::generator(n, i);
            if !support.iter().any(|(w, _)| *w == g) {
                return Err(Error::Regularity(format!(
                    "coefficient of generator {} must be positive (a_{{g_i}} > 0 fails at i = {})",
                    i + 1,
                    i + 1
                )));
            }
        }
        support.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        Ok(Self { series, support })
    }

    /// Builds a polynomial symbol from text words, e.g. `[("1", 1.0), ("2", 1.0), ("12", 1.0)]`.
    pub fn from_terms(n: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let degree = terms.iter().map(|(w, _)| w.chars().count()).max().unwrap_or(1).max(1);
        Self::new(FreeSeries::from_real_terms(n, degree, terms)?)
    }

    /// `Z_1 + ⋯ + Z_n`.
    pub fn row_ball(n: usize) -> Self {
        let terms: Vec<(Word, C64)> = (0..n).map(|i| (Word::generator(n, i), c64(1.0))).collect();
        Self::new(FreeSeries::scalar(n, 1, terms).expect("valid words")).expect("regular")
    }

    pub fn n(&self) -> usize {
        self.series.n
    }

    /// Degree of the polynomial symbol.
    pub fn degree(&self) -> usize {
        self.support.last().map(|(w, _)| w.len()).unwrap_or(1)
    }

    pub fn series(&self) -> &FreeSeries {
        &self.series
    }

    /// Nonzero coefficients sorted by (length, word).
    pub fn support(&self) -> &[(Word, f64)] {
        &self.support
    }

    pub fn coeff(&self, word: &Word) -> f64 {
        self.series.scalar_coeff(word).re
    }

    /// `min{a_α : |α| = 1}`.
    pub fn min_linear_coeff(&self) -> f64 {
        self.support
            .iter()
            .filter(|(w, _)| w.len() == 1)
            .map(|(_, a)| *a)
            .fold(f64::INFINITY, f64::min)
    }

    /// `f̃ = Σ a_{α̃} Z_α`.
    pub fn reverse(&self) -> Self {
        Self::new(self.series.reversed()).expect("reversal preserves regularity")
    }

    /// `d_α = a_α / c^{2α}` with `c^α = Π c_{i_j}`.
    pub fn rescale(&self, c: &[f64]) -> Result<Self> {
        if c.len() != self.n() {
            return Err(Error::GeneratorMismatch { expected: self.n(), found: c.len() });
        }
        if let Some(bad) = c.iter().find(|&&v| v <= 0.0 || v.is_nan()) {
            return Err(Error::InvalidParameter(format!("rescaling factors must be positive, got {bad}")));
        }
        let mut out = self.series.clone();
        for (w, coeff) in out.coeffs.iter_mut() {
            let denom: f64 = w.letters().iter().map(|&l| c[l] * c[l]).product();
            *coeff /= c64(denom);
        }
        Self::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::weights::weights_direct;
    use approx::assert_relative_eq;

    fn w(n: usize, s: &str) -> Word {
        Word::parse(n, s).unwrap()
    }

    fn series(n: usize, degree: usize, terms: &[(&str, f64)]) -> FreeSeries {
        FreeSeries::from_real_terms(n, degree, terms).unwrap()
    }

    fn assert_series_eq(a: &FreeSeries, b: &FreeSeries) {
        let diff = a.sub(b).unwrap();
        assert!(
            diff.terms().all(|(_, c)| c.iter().all(|z| z.norm() < 1e-12)),
            "{a:?} != {b:?}"
        );
    }

    #[test]
    fn add_and_scale_examples() {
        let z1 = FreeSeries::variable(2, 3, 0);
        let z2 = FreeSeries::variable(2, 3, 1);
        assert_series_eq(&z1.add(&z2).unwrap(), &series(2, 3, &[("1", 1.0), ("2", 1.0)]));
        assert!(z1.scale(c64(0.0)).is_zero());
        assert!(z1.add(&z1.scale(c64(-1.0))).unwrap().is_zero());
        assert!(z1.add(&FreeSeries::variable(3, 3, 0)).is_err());
    }

    #[test]
    fn multiply_examples() {
        let z1 = FreeSeries::variable(2, 4, 0);
        let z2 = FreeSeries::variable(2, 4, 1);
        assert_series_eq(&z1.multiply(&z2).unwrap(), &series(2, 4, &[("12", 1.0)]));
        let a = series(2, 4, &[("", 1.0), ("1", 1.0)]);
        let b = series(2, 4, &[("", 1.0), ("1", -1.0)]);
        assert_series_eq(&a.multiply(&b).unwrap(), &series(2, 4, &[("", 1.0), ("11", -1.0)]));
        let s = z1.add(&z2).unwrap();
        assert_series_eq(
            &s.multiply(&s).unwrap(),
            &series(2, 4, &[("11", 1.0), ("12", 1.0), ("21", 1.0), ("22", 1.0)]),
        );
    }

    #[test]
    fn multiply_truncates_to_min_degree() {
        let a = series(1, 2, &[("1", 1.0)]);
        let b = series(1, 5, &[("11", 1.0)]);
        let p = a.multiply(&b).unwrap();
        assert_eq!(p.degree(), 2);
        assert!(p.is_zero());
    }

    #[test]
    fn compose_examples() {
        let f = series(1, 4, &[("11", 1.0)]);
        let phi = series(1, 4, &[("1", 1.0), ("11", 1.0)]);
        assert_series_eq(
            &f.compose(std::slice::from_ref(&phi)).unwrap(),
            &series(1, 4, &[("11", 1.0), ("111", 2.0), ("1111", 1.0)]),
        );

        let id = series(1, 4, &[("1", 1.0)]);
        assert_series_eq(&id.compose(std::slice::from_ref(&phi)).unwrap(), &phi);

        let y1y2 = series(2, 3, &[("12", 1.0)]);
        let swap = [FreeSeries::variable(2, 3, 1), FreeSeries::variable(2, 3, 0)];
        assert_series_eq(&y1y2.compose(&swap).unwrap(), &series(2, 3, &[("21", 1.0)]));
    }

    #[test]
    fn compose_rejects_constant_terms_and_bad_arity() {
        let f = series(1, 3, &[("1", 1.0)]);
        let phi = series(1, 3, &[("", 0.5), ("1", 1.0)]);
        assert!(matches!(f.compose(&[phi]), Err(Error::Composition(_))));
        let g = series(2, 3, &[("1", 1.0)]);
        assert!(matches!(
            g.compose(&[series(1, 3, &[("1", 1.0)])]),
            Err(Error::GeneratorMismatch { .. })
        ));
    }

    #[test]
    fn evaluate_examples() {
        let a = Mat::from_row_slice(2, 2, &[c64(1.0), c64(2.0), c64(0.0), c64(1.0)]);
        let b = Mat::from_row_slice(2, 2, &[c64(0.0), c64(1.0), c64(3.0), c64(0.0)]);
        let x = OperatorTuple::new(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(FreeSeries::variable(2, 2, 0).evaluate(&x).unwrap(), a);
        assert_eq!(series(2, 2, &[("12", 1.0)]).evaluate(&x).unwrap(), &a * &b);
        let x3 = OperatorTuple::zeros(2, 3);
        assert_eq!(FreeSeries::constant(2, 2, c64(1.0)).evaluate(&x3).unwrap(), identity(3));
        assert!(FreeSeries::variable(3, 2, 0).evaluate(&x).is_err());
    }

    #[test]
    fn evaluate_matrix_coefficients_uses_operator_first_ordering() {
        let mut f = FreeSeries::zero(1, 1, 2);
        let c = Mat::from_row_slice(2, 2, &[c64(0.0), c64(1.0), c64(0.0), c64(0.0)]);
        f.set(w(1, "1"), c.clone()).unwrap();
        let x = Mat::from_row_slice(2, 2, &[c64(1.0), c64(0.0), c64(0.0), c64(2.0)]);
        let out = f.evaluate(&OperatorTuple::new(vec![x.clone()]).unwrap()).unwrap();
        assert!(max_abs_diff(&out, &kron(&x, &c)) < 1e-15);
        assert_eq!(out[(0, 1)], c64(1.0));
        assert_eq!(out[(2, 3)], c64(2.0));
    }

    #[test]
    fn reverse_symbol_examples() {
        let f = PositiveRegularFunction::from_terms(2, &[("1", 1.0), ("2", 1.0), ("12", 1.0)]).unwrap();
        let g = PositiveRegularFunction::from_terms(2, &[("1", 1.0), ("2", 1.0), ("21", 1.0)]).unwrap();
        assert_eq!(f.reverse().support(), g.support());
        let s = PositiveRegularFunction::from_terms(2, &[("1", 1.0), ("2", 2.0), ("12", 1.0), ("21", 1.0)])
            .unwrap();
        assert_eq!(s.reverse().support(), s.support());
        assert!(PositiveRegularFunction::from_terms(2, &[("112", 1.0)]).is_err());
    }

    #[test]
    fn regularity_messages_name_the_condition() {
        let e = PositiveRegularFunction::from_terms(1, &[("", 0.1), ("1", 1.0)]).unwrap_err();
        assert!(e.to_string().contains("constant term must vanish"));
        let e = PositiveRegularFunction::from_terms(2, &[("1", 1.0), ("12", 1.0)]).unwrap_err();
        assert!(e.to_string().contains("a_{g_i} > 0 fails at i = 2"));
        let e = PositiveRegularFunction::from_terms(2, &[("1", 1.0), ("2", 1.0), ("12", -1.0)]).unwrap_err();
        assert!(e.to_string().contains("a_α ≥ 0"));
    }

    #[test]
    fn rescale_examples() {
        let f = PositiveRegularFunction::from_terms(2, &[("1", 1.0), ("2", 1.0)]).unwrap();
        let g = f.rescale(&[2.0, 1.0]).unwrap();
        assert_eq!(g.coeff(&w(2, "1")), 0.25);
        assert_eq!(g.coeff(&w(2, "2")), 1.0);
        assert_eq!(f.rescale(&[1.0, 1.0]).unwrap(), f);

        let f = PositiveRegularFunction::from_terms(2, &[("12", 1.0), ("1", 1.0), ("2", 1.0)]).unwrap();
        let g = f.rescale(&[2.0, 3.0]).unwrap();
        assert_relative_eq!(g.coeff(&w(2, "1")), 1.0 / 4.0);
        assert_relative_eq!(g.coeff(&w(2, "2")), 1.0 / 9.0);
        assert_relative_eq!(g.coeff(&w(2, "12")), 1.0 / 36.0);
        assert!(f.rescale(&[1.0, 0.0]).is_err());
        assert!(f.rescale(&[1.0, -2.0]).is_err());
    }

    #[test]
    fn rescale_commutes_with_reverse() {
        let f = PositiveRegularFunction::from_terms(2, &[("1", 1.0), ("2", 0.5), ("12", 0.25), ("112", 0.5)])
            .unwrap();
        let c = [1.5, 0.7];
        let a = f.reverse().rescale(&c).unwrap();
        let b = f.rescale(&c).unwrap().reverse();
        for ((wa, xa), (wb, xb)) in a.support().iter().zip(b.support()) {
            assert_eq!(wa, wb);
            assert_relative_eq!(xa, xb, max_relative = 1e-15);
        }
    }

    #[test]
    fn convergence_profile_examples() {
        let f = PositiveRegularFunction::from_terms(1, &[("1", 1.0)]).unwrap();
        let b = weights_direct(&f, 1, 6).unwrap();
        let ones: Vec<(String, f64)> = (0..=6).map(|k| ("1".repeat(k), 1.0)).collect();
        let terms: Vec<(&str, f64)> = ones.iter().map(|(s, c)| (s.as_str(), *c)).collect();
        let geom = FreeSeries::from_real_terms(1, 6, &terms).unwrap();
        let p = geom.convergence_profile(&b).unwrap();
        for r in &p.rho {
            assert_relative_eq!(*r, 1.0, epsilon = 1e-14);
        }

        let quad = FreeSeries::from_real_terms(1, 5, &[("1", 3.0), ("11", 2.0)]).unwrap();
        let p = quad.convergence_profile(&b).unwrap();
        assert!(p.rho[2..].iter().all(|&r| r == 0.0));
        assert_eq!(p.tail, 0.0);

        let pow: Vec<(String, f64)> = (0..=6).map(|k| ("1".repeat(k), 2f64.powi(k as i32))).collect();
        let terms: Vec<(&str, f64)> = pow.iter().map(|(s, c)| (s.as_str(), *c)).collect();
        let p = FreeSeries::from_real_terms(1, 6, &terms).unwrap().convergence_profile(&b).unwrap();
        for r in &p.rho {
            assert_relative_eq!(*r, 2.0, epsilon = 1e-14);
        }
        assert_relative_eq!(p.tail, 2.0, epsilon = 1e-14);

        let short = weights_direct(&f, 1, 3).unwrap();
        assert!(matches!(
            geom.convergence_profile(&short),
            Err(Error::WeightTableShort { have: 3, need: 6 })
        ));
    }
}
