//! The universal weighted-shift model compressed to words of length `<= N`.
//!
//! `V_i e_α = sqrt(b_α / b_{g_i α}) e_{g_i α}` for `|α| < N` and `V_i e_α = 0`
//! at the cut. The span of the kept basis vectors is co-invariant, so the
//! defect identity holds exactly on the truncation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c64, identity, op_norm, zeros, Mat, C64};
use crate::series::{FreeSeries, PositiveRegularFunction};
use crate::tuple::OperatorTuple;
use crate::weights::{weights_direct, WeightTable};
use crate::words::{Word, WordIndex};

/// Square matrix with at most one nonzero (real) entry per column.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftMatrix {
    /// `cols[j] = Some((i, w))` means `A e_j = w e_i`.
    cols: Vec<Option<(usize, f64)>>,
}

impl ShiftMatrix {
    pub fn identity(dim: usize) -> Self {
        Self { cols: (0..dim).map(|j| Some((j, 1.0))).collect() }
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> Option<(usize, f64)> {
        self.cols[j]
    }

    /// `self · other`.
    pub fn compose(&self, other: &ShiftMatrix) -> ShiftMatrix {
        assert_eq!(self.dim(), other.dim());
        let cols = other
            .cols
            .iter()
            .map(|c| c.and_then(|(r, w)| self.cols[r].map(|(r2, w2)| (r2, w * w2))))
            .collect();
        ShiftMatrix { cols }
    }

    pub fn to_dense(&self) -> Mat {
        let mut out = zeros(self.dim(), self.dim());
        for (j, c) in self.cols.iter().enumerate() {
            if let Some((i, w)) = c {
                out[(*i, j)] = c64(*w);
            }
        }
        out
    }

    /// `P A P^T` for the permutation `P e_j = e_{perm[j]}` (`perm` an involution).
    pub fn conjugate_by_involution(&self, perm: &[usize]) -> ShiftMatrix {
        let mut cols = vec![None; self.dim()];
        for (j, c) in self.cols.iter().enumerate() {
            cols[perm[j]] = c.map(|(i, w)| (perm[i], w));
        }
        ShiftMatrix { cols }
    }

    /// `A^* v`.
    pub fn adjoint_apply(&self, v: &[C64]) -> Vec<C64> {
        self.cols
            .iter()
            .map(|c| c.map(|(i, w)| v[i] * w).unwrap_or_default())
            .collect()
    }

    /// `A Y A^*` for a dense `Y`, given its nonzero entries.
    fn sandwich_sparse(&self, entries: &[(usize, usize, C64)], out: &mut Mat, scale: f64) {
        for &(j, l, y) in entries {
            if let (Some((i, wj)), Some((k, wl))) = (self.cols[j], self.cols[l]) {
                out[(i, k)] += y * (scale * wj * wl);
            }
        }
    }

    /// Accumulates `scale · A ⊗ C` into `out`.
    pub(crate) fn add_kron_into(&self, coeff: &Mat, scale: C64, out: &mut Mat) {
        let e = coeff.nrows();
        for (j, c) in self.cols.iter().enumerate() {
            if let Some((i, w)) = c {
                let s = scale * *w;
                for q in 0..e {
                    for p in 0..e {
                        out[(i * e + p, j * e + q)] += s * coeff[(p, q)];
                    }
                }
            }
        }
    }
}

fn nonzero_entries(y: &Mat) -> Vec<(usize, usize, C64)> {
    let mut v = Vec::new();
    for l in 0..y.ncols() {
        for j in 0..y.nrows() {
            let z = y[(j, l)];
            if z != C64::new(0.0, 0.0) {
                v.push((j, l, z));
            }
        }
    }
    v
}

/// The compressed weighted creation operators of `D_f^m` at depth `N`.
#[derive(Clone, Debug)]
pub struct TruncatedModel {
    weights: WeightTable,
    shifts: Vec<ShiftMatrix>,
    /// `V_β` for each `β` in the support of `f`, paired with `a_β`.
    symbol_terms: Vec<(f64, ShiftMatrix)>,
}

/// Builds the truncated model; `depth >= 1`.
pub fn build_model(f: &PositiveRegularFunction, m: usize, depth: usize) -> Result<TruncatedModel> {
    TruncatedModel::new(f, m, depth)
}

impl TruncatedModel {
    pub fn new(f: &PositiveRegularFunction, m: usize, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidParameter("model depth must be at least 1".into()));
        }
        let weights = weights_direct(f, m, depth)?;
        Ok(Self::from_weights(weights))
    }

    pub fn from_weights(weights: WeightTable) -> Self {
        let index = weights.index();
        let n = index.n();
        let shifts: Vec<ShiftMatrix> = (0..n)
            .map(|i| ShiftMatrix {
                cols: (0..index.dim())
                    .map(|j| {
                        index
                            .prepend(i, j)
                            .map(|t| (t, (weights.value(j) / weights.value(t)).sqrt()))
                    })
                    .collect(),
            })
            .collect();
        let mut model = Self { weights, shifts, symbol_terms: Vec::new() };
        model.symbol_terms = model
            .weights
            .symbol()
            .support()
            .iter()
            .map(|(w, a)| (*a, model.shift_monomial(w)))
            .collect();
        model
    }

    pub fn symbol(&self) -> &PositiveRegularFunction {
        self.weights.symbol()
    }

    pub fn m(&self) -> usize {
        self.weights.m()
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn depth(&self) -> usize {
        self.weights.depth()
    }

    pub fn dim(&self) -> usize {
        self.weights.index().dim()
    }

    pub fn index(&self) -> &WordIndex {
        self.weights.index()
    }

    pub fn weights(&self) -> &WeightTable {
        &self.weights
    }

    pub fn shift(&self, i: usize) -> &ShiftMatrix {
        &self.shifts[i]
    }

    pub fn generator(&self, i: usize) -> Mat {
        self.shifts[i].to_dense()
    }

    pub fn generators(&self) -> OperatorTuple {
        OperatorTuple::new(self.shifts.iter().map(ShiftMatrix::to_dense).collect())
            .expect("model components share a dimension")
    }

    /// `V_β` in sparse form; words longer than the depth give zero.
    pub fn shift_monomial(&self, beta: &Word) -> ShiftMatrix {
        beta.letters()
            .iter()
            .fold(ShiftMatrix::identity(self.dim()), |acc, &l| acc.compose(&self.shifts[l]))
    }

    /// `V_β = V_{i_1} ⋯ V_{i_k}` as a dense matrix.
    pub fn monomial(&self, beta: &Word) -> Result<Mat> {
        if beta.n() != self.n() {
            return Err(Error::GeneratorMismatch { expected: self.n(), found: beta.n() });
        }
        if beta.len() > self.depth() {
            return Err(Error::WordTooLong { len: beta.len(), depth: self.depth() });
        }
        Ok(self.shift_monomial(beta).to_dense())
    }

    /// `Φ_{f,V}(Y) = Σ a_β V_β Y V_β^*`.
    pub fn apply_phi(&self, y: &Mat) -> Mat {
        let entries = nonzero_entries(y);
        let mut out = zeros(self.dim(), self.dim());
        for (a, s) in &self.symbol_terms {
            s.sandwich_sparse(&entries, &mut out, *a);
        }
        out
    }

    /// `(id - Φ_{f,V})^m (I)`.
    pub fn defect(&self) -> Mat {
        let mut y = identity(self.dim());
        for _ in 0..self.m() {
            let phi = self.apply_phi(&y);
            y -= phi;
        }
        y
    }

    /// `Σ_{|β| ≥ 1} a_β V_β V_β^*`.
    pub fn row_contraction(&self) -> Mat {
        self.apply_phi(&identity(self.dim()))
    }

    /// `Σ_{|β| = k} b_β V_β V_β^*`.
    pub fn grade_sum(&self, k: usize) -> Result<Mat> {
        if k > self.depth() {
            return Err(Error::WordTooLong { len: k, depth: self.depth() });
        }
        let id = nonzero_entries(&identity(self.dim()));
        let mut out = zeros(self.dim(), self.dim());
        for idx in self.index().grade(k) {
            let beta = self.index().word_of(idx);
            self.shift_monomial(beta).sandwich_sparse(&id, &mut out, self.weights.value(idx));
        }
        Ok(out)
    }

    /// `Σ r^{|α|} V_α ⊗ C_(α)` over the stored coefficients of `F`.
    pub fn evaluate(&self, series: &FreeSeries, r: f64) -> Result<Mat> {
        if series.n() != self.n() {
            return Err(Error::GeneratorMismatch { expected: self.n(), found: series.n() });
        }
        let e = series.coeff_dim();
        let mut out = zeros(self.dim() * e, self.dim() * e);
        for (alpha, c) in series.terms() {
            if alpha.len() > self.depth() {
                continue;
            }
            let scale = c64(r.powi(alpha.len() as i32));
            self.shift_monomial(alpha).add_kron_into(c, scale, &mut out);
        }
        Ok(out)
    }

    /// Hereditary polynomial `Σ V_α V_β^* ⊗ C_{α,β}` on the model.
    pub fn hereditary(&self, terms: &[HereditaryTerm]) -> Result<Mat> {
        let e = hereditary_dim(terms)?;
        let dim = self.dim();
        let mut out = zeros(dim * e, dim * e);
        for t in terms {
            for w in [&t.alpha, &t.beta] {
                if w.n() != self.n() {
                    return Err(Error::GeneratorMismatch { expected: self.n(), found: w.n() });
                }
                if w.len() > self.depth() {
                    return Err(Error::WordTooLong { len: w.len(), depth: self.depth() });
                }
            }
            let va = self.shift_monomial(&t.alpha);
            let vb = self.shift_monomial(&t.beta);
            // V_α V_β^* maps e_{βγ} to weight_b * weight_a e_{αγ}
            for j in 0..dim {
                let (Some((k, wa)), Some((i, wb))) = (va.column(j), vb.column(j)) else { continue };
                let s = c64(wa * wb);
                for q in 0..e {
                    for p in 0..e {
                        out[(k * e + p, i * e + q)] += s * t.coeff[(p, q)];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One term `C_{α,β} ⊗ (α, β)` of a hereditary polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct HereditaryTerm {
    pub alpha: Word,
    pub beta: Word,
    pub coeff: Mat,
}

pub(crate) fn hereditary_dim(terms: &[HereditaryTerm]) -> Result<usize> {
    let e = terms.first().map(|t| t.coeff.nrows()).unwrap_or(1);
    for t in terms {
        if t.coeff.shape() != (e, e) {
            return Err(Error::Shape("hereditary coefficients must share a square size".into()));
        }
    }
    Ok(e)
}

/// Dense `V_β`.
pub fn model_monomial(model: &TruncatedModel, beta: &Word) -> Result<Mat> {
    model.monomial(beta)
}

/// `(id - Φ_{f,V})^m (I_M)`; equals the projection onto `e_{g_0}`.
pub fn model_defect(model: &TruncatedModel) -> Mat {
    model.defect()
}

/// `Σ r^{|α|} V_α ⊗ C_(α)`.
pub fn evaluate_on_model(series: &FreeSeries, model: &TruncatedModel, r: f64) -> Result<Mat> {
    model.evaluate(series, r)
}

/// Operator norms of `F(rV)` over a radius grid. Each value is a lower bound
/// for the Hardy norm of `F`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardyNormEstimate {
    pub radii: Vec<f64>,
    pub norms: Vec<f64>,
}

impl HardyNormEstimate {
    pub fn is_nondecreasing(&self, slack: f64) -> bool {
        self.norms.windows(2).all(|w| w[0] <= w[1] + slack)
    }
}

pub fn hardy_norm_estimate(
    series: &FreeSeries,
    f: &PositiveRegularFunction,
    m: usize,
    depth: usize,
    r_grid: &[f64],
) -> Result<HardyNormEstimate> {
    let model = TruncatedModel::new(f, m, depth)?;
    hardy_norm_on_model(series, &model, r_grid)
}

pub fn hardy_norm_on_model(
    series: &FreeSeries,
    model: &TruncatedModel,
    r_grid: &[f64],
) -> Result<HardyNormEstimate> {
    if r_grid.iter().any(|r| !(0.0..1.0).contains(r)) {
        return Err(Error::InvalidParameter("radii must lie in [0, 1)".into()));
    }
    if r_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("radius grid must be increasing".into()));
    }
    let norms = r_grid
        .iter()
        .map(|&r| model.evaluate(series, r).map(|m| op_norm(&m)))
        .collect::<Result<_>>()?;
    Ok(HardyNormEstimate { radii: r_grid.to_vec(), norms })
}
