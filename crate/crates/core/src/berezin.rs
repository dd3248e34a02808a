//! Berezin kernel and transform at a tuple `T ∈ D_f^m`, in kernel form
//! `K^*(g ⊗ I)K` and in resolvent form built from the model of the reversed
//! symbol.
//!
//! Tensor ordering is Fock factor first throughout: the block of rows
//! `α·d .. α·d + d` belongs to the basis word `e_α`.

use nalgebra::LU;
use serde::Serialize;

use crate::cp_maps::{defect_sequence, membership, spectral_radius_estimate};
use crate::error::{Error, Result};
use crate::fock_model::{HereditaryTerm, ShiftMatrix, TruncatedModel};
use crate::linalg::{c64, identity, min_eigenvalue, norm_one, psd_sqrt, zeros, Mat};
use crate::series::{FreeSeries, PositiveRegularFunction};
use crate::tuple::OperatorTuple;
use crate::weights::{weights_direct, WeightTable};
use crate::words::Word;

/// Iterates used for the spectral-radius precondition of the resolvent form.
pub const RESOLVENT_RADIUS_ITERATES: usize = 64;
/// Resolvent solves beyond this 1-norm condition number are refused.
pub const MAX_CONDITION: f64 = 1e12;

/// `K h = Σ_{|α| ≤ N} sqrt(b_α) e_α ⊗ Δ T_α^* h`.
#[derive(Clone, Debug)]
pub struct BerezinKernel {
    weights: WeightTable,
    d: usize,
    delta: Mat,
    /// `blocks[α] = sqrt(b_α) Δ T_α^*`.
    blocks: Vec<Mat>,
}

pub fn berezin_kernel(f: &PositiveRegularFunction, m: usize, t: &OperatorTuple, depth: usize, tol: f64) -> Result<BerezinKernel> {
    BerezinKernel::new(f, m, t, depth, tol)
}

/// `T_α^*` for every word of the index, built from `T_{g_i α}^* = T_α^* T_i^*`.
fn adjoint_monomials(weights: &WeightTable, t: &OperatorTuple) -> Vec<Mat> {
    let index = weights.index();
    let adj: Vec<Mat> = t.components().iter().map(|x| x.adjoint()).collect();
    let mut out: Vec<Mat> = Vec::with_capacity(index.dim());
    out.push(identity(t.dim()));
    for idx in 1..index.dim() {
        let tail = index.tail(idx).expect("nonempty word");
        let first = index.word_of(idx).letters()[0];
        out.push(&out[tail] * &adj[first]);
    }
    out
}

impl BerezinKernel {
    pub fn new(f: &PositiveRegularFunction, m: usize, t: &OperatorTuple, depth: usize, tol: f64) -> Result<Self> {
        t.expect_n(f.n())?;
        let seq = defect_sequence(f, m, t)?;
        let delta = psd_sqrt(seq.last(), tol)?;
        let weights = weights_direct(f, m, depth)?;
        let blocks = adjoint_monomials(&weights, t)
            .into_iter()
            .enumerate()
            .map(|(idx, ta)| &delta * ta * c64(weights.value(idx).sqrt()))
            .collect();
        Ok(Self { weights, d: t.dim(), delta, blocks })
    }

    pub fn depth(&self) -> usize {
        self.weights.depth()
    }

    pub fn fock_dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn space_dim(&self) -> usize {
        self.d
    }

    /// `Δ_{f,m,T}`.
    pub fn defect_root(&self) -> &Mat {
        &self.delta
    }

    /// The kernel as a `(dim_M · d) × d` matrix.
    pub fn matrix(&self) -> Mat {
        let d = self.d;
        let mut k = zeros(self.fock_dim() * d, d);
        for (a, b) in self.blocks.iter().enumerate() {
            k.view_mut((a * d, 0), (d, d)).copy_from(b);
        }
        k
    }

    /// `K^* K`.
    pub fn gram(&self) -> Mat {
        self.blocks.iter().fold(zeros(self.d, self.d), |acc, b| acc + b.adjoint() * b)
    }

    /// `K^* (g ⊗ I_d) K` for a `dim_M × dim_M` matrix `g`.
    pub fn transform(&self, g: &Mat) -> Result<Mat> {
        let dim = self.fock_dim();
        if g.shape() != (dim, dim) {
            return Err(Error::Shape(format!(
                "g is {}x{}, truncated Fock space has dimension {dim}",
                g.nrows(),
                g.ncols()
            )));
        }
        Ok(sandwich_blocks(&self.blocks, g, None))
    }

    /// Transform of the hereditary monomial `V_α V_β^*`.
    pub fn transform_monomial(&self, model: &TruncatedModel, alpha: &Word, beta: &Word) -> Result<Mat> {
        let g = model.hereditary(&[HereditaryTerm { alpha: alpha.clone(), beta: beta.clone(), coeff: identity(1) }])?;
        self.transform(&g)
    }
}

/// `Σ_{α,β} Z_α^* mid (g_{αβ} Z_β)` for `d × d` blocks `Z`.
fn sandwich_blocks(blocks: &[Mat], g: &Mat, mid: Option<&Mat>) -> Mat {
    let dim = blocks.len();
    let d = blocks.first().map(|b| b.nrows()).unwrap_or(0);
    // stack[β, p + d q] = Z_β[p, q]
    let stack = Mat::from_fn(dim, d * d, |beta, pq| blocks[beta][(pq % d, pq / d)]);
    let mixed = g * stack;
    let mut out = zeros(d, d);
    for (alpha, za) in blocks.iter().enumerate() {
        let ya = Mat::from_fn(d, d, |p, q| mixed[(alpha, p + d * q)]);
        match mid {
            Some(mm) => out += za.adjoint() * mm * ya,
            None => out += za.adjoint() * ya,
        }
    }
    out
}

pub fn berezin_transform_kernel(
    f: &PositiveRegularFunction,
    m: usize,
    t: &OperatorTuple,
    g: &Mat,
    depth: usize,
    tol: f64,
) -> Result<Mat> {
    BerezinKernel::new(f, m, t, depth, tol)?.transform(g)
}

#[derive(Clone, Debug)]
pub struct ResolventTransform {
    pub value: Mat,
    /// 1-norm condition number of `I - Σ a_{α̃} Λ_α ⊗ T_{α̃}^*`.
    pub condition: f64,
    pub spectral_radius: f64,
}

/// Resolvent form
/// `⟨(I - Σ ā Λ_α^* ⊗ T_{α̃})^{-m} (g ⊗ Δ²) (I - Σ a Λ_α ⊗ T_{α̃}^*)^{-m} (1 ⊗ x), 1 ⊗ y⟩`.
///
/// `Λ` is the depth-`N` model of the reversed symbol, carried onto the Fock
/// space of `V` by the reversal unitary `e_w ↦ e_{w̃}`; there it acts as the
/// weighted right creation operators of `f`.
pub fn berezin_transform_resolvent(
    f: &PositiveRegularFunction,
    m: usize,
    t: &OperatorTuple,
    g: &Mat,
    depth: usize,
    tol: f64,
) -> Result<ResolventTransform> {
    t.expect_n(f.n())?;
    let radius = spectral_radius_estimate(f, t, RESOLVENT_RADIUS_ITERATES)?;
    if radius.overflow_at.is_some() || radius.final_value.is_nan() || radius.final_value >= 1.0 {
        return Err(Error::SpectralRadius(radius.final_value));
    }
    let seq = defect_sequence(f, m, t)?;
    let delta_sq = seq.last().clone();
    let min = min_eigenvalue(&delta_sq);
    if min < -tol {
        return Err(Error::IndefiniteDefect { min_eigenvalue: min, tol });
    }

    let reversed = TruncatedModel::new(&f.reverse(), m, depth)?;
    let index = reversed.index();
    let dim = index.dim();
    if g.shape() != (dim, dim) {
        return Err(Error::Shape(format!(
            "g is {}x{}, truncated Fock space has dimension {dim}",
            g.nrows(),
            g.ncols()
        )));
    }
    let perm = index.reversal_permutation();
    let d = t.dim();

    // I - Σ_γ a_γ Λ_{γ̃} ⊗ T_γ^*
    let mut system = identity(dim * d);
    for (gamma, a) in f.support() {
        let lambda: ShiftMatrix = reversed.shift_monomial(&gamma.reverse()).conjugate_by_involution(&perm);
        let t_adj = t.monomial(gamma).adjoint();
        lambda.add_kron_into(&t_adj, c64(-a), &mut system);
    }
    let condition = {
        let inv = system.clone().try_inverse().ok_or(Error::Singular(f64::INFINITY))?;
        norm_one(&system) * norm_one(&inv)
    };
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::Singular(condition));
    }

    let lu = LU::new(system);
    let mut z = zeros(dim * d, d);
    z.view_mut((0, 0), (d, d)).copy_from(&identity(d));
    for _ in 0..m {
        z = lu.solve(&z).ok_or(Error::Singular(condition))?;
    }
    let blocks: Vec<Mat> = (0..dim).map(|a| z.view((a * d, 0), (d, d)).clone_owned()).collect();
    let value = sandwich_blocks(&blocks, g, Some(&delta_sq));
    Ok(ResolventTransform { value, condition, spectral_radius: radius.final_value })
}

/// `F(rT)` over a radius grid, the radial approach to the boundary transform.
pub fn radial_berezin(
    f: &PositiveRegularFunction,
    m: usize,
    t: &OperatorTuple,
    series: &FreeSeries,
    r_grid: &[f64],
    tol: f64,
) -> Result<Vec<Mat>> {
    if series.coeff_dim() != 1 {
        return Err(Error::Shape("radial Berezin evaluation needs scalar coefficients".into()));
    }
    let verdict = membership(f, m, t, tol)?;
    if !verdict.member {
        return Err(Error::NotMember { min_eigenvalue: verdict.min_eigenvalue() });
    }
    r_grid.iter().map(|&r| series.evaluate(&t.scaled(r))).collect()
}

/// Both forms and their largest entrywise difference.
#[derive(Clone, Debug, Serialize)]
pub struct FormComparison {
    pub max_abs_difference: f64,
    pub condition: f64,
    pub spectral_radius: f64,
}

pub fn compare_forms(
    f: &PositiveRegularFunction,
    m: usize,
    t: &OperatorTuple,
    g: &Mat,
    depth: usize,
    tol: f64,
) -> Result<(Mat, ResolventTransform, FormComparison)> {
    let kernel = berezin_transform_kernel(f, m, t, g, depth, tol)?;
    let resolvent = berezin_transform_resolvent(f, m, t, g, depth, tol)?;
    let cmp = FormComparison {
        max_abs_difference: crate::linalg::max_abs_diff(&kernel, &resolvent.value),
        condition: resolvent.condition,
        spectral_radius: resolvent.spectral_radius,
    };
    Ok((kernel, resolvent, cmp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_model::build_model;
    use crate::linalg::{max_abs_diff, vacuum_projection};
    use crate::sampling::{random_matrix, random_nilpotent_member, random_symbol, seeded};
    use crate::words::WordIndex;
    use approx::assert_relative_eq;

    fn z() -> PositiveRegularFunction {
        PositiveRegularFunction::from_terms(1, &[("1", 1.0)]).unwrap()
    }

    #[test]
    fn zero_tuple_kernel_embeds_into_grade_zero() {
        let f = PositiveRegularFunction::from_terms(2, &[("1", 1.0), ("2", 0.5), ("12", 1.0)]).unwrap();
        let t = OperatorTuple::zeros(2, 2);
        let k = berezin_kernel(&f, 2, &t, 3, 1e-9).unwrap();
        let mut expected = zeros(k.fock_dim() * 2, 2);
        expected.view_mut((0, 0), (2, 2)).copy_from(&identity(2));
        assert!(max_abs_diff(&k.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn nilpotent_kernel_is_isometric() {
        let t = OperatorTuple::new(vec![Mat::from_row_slice(2, 2, &[c64(0.0), c64(0.8), c64(0.0), c64(0.0)])]).unwrap();
        let k = berezin_kernel(&z(), 1, &t, 3, 1e-9).unwrap();
        let delta_sq = k.defect_root() * k.defect_root();
        assert_relative_eq!(delta_sq[(0, 0)].re, 0.36, epsilon = 1e-14);
        assert_relative_eq!(delta_sq[(1, 1)].re, 1.0, epsilon = 1e-14);
        assert!(max_abs_diff(&k.gram(), &identity(2)) < 1e-14);
    }

    #[test]
    fn scalar_kernel_is_normalized_szego_column() {
        let lambda = 0.6;
        let t = OperatorTuple::scalars(&[lambda]);
        let k = berezin_kernel(&z(), 1, &t, 40, 1e-9).unwrap();
        let kmat = k.matrix();
        let s = (1.0 - lambda * lambda).sqrt();
        for j in 0..=40 {
            assert_relative_eq!(kmat[(j, 0)].re, s * lambda.powi(j as i32), epsilon = 1e-15);
        }
        assert_relative_eq!(k.gram()[(0, 0)].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn kernel_transform_examples() {
        let t = OperatorTuple::scalars(&[0.5]);
        let out = berezin_transform_kernel(&z(), 1, &t, &identity(31), 30, 1e-9).unwrap();
        assert!((out[(0, 0)].re - 1.0).abs() < 1e-8);

        let model = build_model(&z(), 1, 30).unwrap();
        let k = berezin_kernel(&z(), 1, &t, 30, 1e-9).unwrap();
        let v = model.generator(0);
        let out = k.transform(&(&v * v.adjoint())).unwrap();
        assert!((out[(0, 0)].re - 0.25).abs() < 1e-6);
        assert!(k.transform(&identity(5)).is_err());
    }

    #[test]
    fn nilpotent_moments_are_reproduced_exactly() {
        let mut rng = seeded(11);
        let f = random_symbol(&mut rng, 2, 2);
        let depth = 4;
        for m in 1..=2 {
            let t = random_nilpotent_member(&mut rng, &f, m, depth, 1e-9).unwrap();
            let model = build_model(&f, m, depth).unwrap();
            let k = berezin_kernel(&f, m, &t, depth, 1e-9).unwrap();
            let index = WordIndex::new(2, depth).unwrap();
            for alpha in index.words().iter().filter(|w| w.len() <= 2) {
                for beta in index.words().iter().filter(|w| w.len() <= 2) {
                    let out = k.transform_monomial(&model, alpha, beta).unwrap();
                    let expected = t.monomial(alpha) * t.monomial(beta).adjoint();
                    assert!(max_abs_diff(&out, &expected) < 1e-10, "{alpha} {beta}");
                }
            }
        }
    }

    #[test]
    fn resolvent_examples() {
        let f = PositiveRegularFunction::from_terms(2, &[("1", 1.0), ("2", 0.5), ("12", 1.0)]).unwrap();
        let mut rng = seeded(12);
        let g = random_matrix(&mut rng, 7, 7);
        let r = berezin_transform_resolvent(&f, 2, &OperatorTuple::zeros(2, 2), &g, 2, 1e-9).unwrap();
        assert!(max_abs_diff(&r.value, &(identity(2) * g[(0, 0)])) < 1e-14);

        let t = OperatorTuple::scalars(&[0.5]);
        let model = build_model(&z(), 1, 30).unwrap();
        let v = model.generator(0);
        let g = &v * v.adjoint();
        let (kernel, resolvent, cmp) = compare_forms(&z(), 1, &t, &g, 30, 1e-9).unwrap();
        assert!((kernel[(0, 0)].re - 0.25).abs() < 1e-6);
        assert!((resolvent.value[(0, 0)].re - 0.25).abs() < 1e-6);
        assert!(cmp.max_abs_difference < 1e-12);
    }

    #[test]
    fn forms_agree_on_nilpotent_and_generic_tuples() {
        let mut rng = seeded(13);
        for trial in 0..6 {
            let n = 1 + trial % 2;
            let f = random_symbol(&mut rng, n, 2);
            let m = 1 + trial % 3;
            let t = random_nilpotent_member(&mut rng, &f, m, 3, 1e-9).unwrap();
            let depth = 3;
            let dim = WordIndex::new(n, depth).unwrap().dim();
            let g = random_matrix(&mut rng, dim, dim);
            let (_, _, cmp) = compare_forms(&f, m, &t, &g, depth, 1e-9).unwrap();
            assert!(cmp.max_abs_difference < 1e-8);
        }
    }

    #[test]
    fn resolvent_refuses_spectral_radius_at_one() {
        let g = identity(4);
        assert!(matches!(
            berezin_transform_resolvent(&z(), 1, &OperatorTuple::scalars(&[1.0]), &g, 3, 1e-9),
            Err(Error::SpectralRadius(_))
        ));
    }

    #[test]
    fn psd_inputs_give_psd_outputs() {
        let mut rng = seeded(14);
        let f = random_symbol(&mut rng, 2, 2);
        let t = crate::sampling::random_member(&mut rng, &f, 2, 3, 1e-9).unwrap();
        let k = berezin_kernel(&f, 2, &t, 4, 1e-9).unwrap();
        let a = random_matrix(&mut rng, k.fock_dim(), k.fock_dim());
        let g = &a * a.adjoint();
        assert!(min_eigenvalue(&k.transform(&g).unwrap()) >= -1e-10);
        assert!(min_eigenvalue(&k.transform(&vacuum_projection(k.fock_dim())).unwrap()) >= -1e-10);
    }

    #[test]
    fn radial_examples() {
        let t = OperatorTuple::scalars(&[0.5]);
        let poly = FreeSeries::from_real_terms(1, 2, &[("", 1.0), ("11", 2.0)]).unwrap();
        let vals = radial_berezin(&z(), 1, &t, &poly, &[0.5, 1.0], 1e-9).unwrap();
        assert_relative_eq!(vals[1][(0, 0)].re, 1.5, epsilon = 1e-15);

        let d = 6;
        let terms: Vec<String> = (0..=d).map(|k| "1".repeat(k)).collect();
        let t2: Vec<(&str, f64)> = terms.iter().map(|s| (s.as_str(), 1.0)).collect();
        let geo = FreeSeries::from_real_terms(1, d, &t2).unwrap();
        let grid = [0.2, 0.6, 0.9];
        let vals = radial_berezin(&z(), 1, &t, &geo, &grid, 1e-9).unwrap();
        for (r, v) in grid.iter().zip(&vals) {
            let q: f64 = r / 2.0;
            assert_relative_eq!(v[(0, 0)].re, (1.0 - q.powi(d as i32 + 1)) / (1.0 - q), epsilon = 1e-14);
        }

        let nil = OperatorTuple::new(vec![Mat::from_row_slice(2, 2, &[c64(0.0), c64(1.0), c64(0.0), c64(0.0)])]).unwrap();
        let vals = radial_berezin(&z(), 1, &nil, &geo, &[0.5, 1.0], 1e-9).unwrap();
        assert_relative_eq!(vals[1][(0, 1)].re, 1.0, epsilon = 1e-15);
        assert!(radial_berezin(&z(), 1, &OperatorTuple::scalars(&[2.0]), &geo, &[0.5], 1e-9).is_err());
    }
}
