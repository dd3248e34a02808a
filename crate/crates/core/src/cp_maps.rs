//! The completely positive map `Φ_{f,X}(Y) = Σ a_α X_α Y X_α^*` and the
//! positivity tests built on it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock_model::{hereditary_dim, HereditaryTerm, TruncatedModel};
use crate::linalg::{c64, hermitian_eigenvalues, identity, kron, max_abs_diff, min_eigenvalue, op_norm, symmetrize, zeros, Mat};
use crate::series::PositiveRegularFunction;
use crate::tuple::OperatorTuple;
use crate::words::{binomial, WordIndex};

/// `Φ_{f,X}` with the monomials `X_α` over the support of `f` precomputed.
#[derive(Clone, Debug)]
pub struct PhiMap {
    dim: usize,
    terms: Vec<(f64, Mat)>,
}

impl PhiMap {
    pub fn new(f: &PositiveRegularFunction, x: &OperatorTuple) -> Result<Self> {
        x.expect_n(f.n())?;
        let monomials = x.monomials(f.support().iter().map(|(w, _)| w));
        let terms = f.support().iter().map(|(_, a)| *a).zip(monomials).collect();
        Ok(Self { dim: x.dim(), terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, y: &Mat) -> Result<Mat> {
        if y.shape() != (self.dim, self.dim) {
            return Err(Error::Shape(format!(
                "argument is {}x{}, tuple acts on dimension {}",
                y.nrows(),
                y.ncols(),
                self.dim
            )));
        }
        let mut out = zeros(self.dim, self.dim);
        for (a, xa) in &self.terms {
            out += xa * y * xa.adjoint() * c64(*a);
        }
        Ok(out)
    }

    /// `Φ^k(I)` for `k = 1..=kmax`.
    pub fn iterates(&self, kmax: usize) -> Vec<Mat> {
        let mut out = Vec::with_capacity(kmax);
        let mut y = identity(self.dim);
        for _ in 0..kmax {
            y = self.apply(&y).expect("shape preserved");
            out.push(y.clone());
        }
        out
    }
}

pub fn apply_phi(f: &PositiveRegularFunction, x: &OperatorTuple, y: &Mat) -> Result<Mat> {
    PhiMap::new(f, x)?.apply(y)
}

/// `Δ_k = (id - Φ_{f,X})^k (I)` for `k = 0..=m`.
#[derive(Clone, Debug)]
pub struct DefectSequence {
    pub defects: Vec<Mat>,
    pub min_eigenvalues: Vec<f64>,
}

impl DefectSequence {
    pub fn last(&self) -> &Mat {
        self.defects.last().expect("Δ_0 is always present")
    }
}

pub fn defect_sequence(f: &PositiveRegularFunction, m: usize, x: &OperatorTuple) -> Result<DefectSequence> {
    let phi = PhiMap::new(f, x)?;
    defect_sequence_with(&phi, m)
}

pub(crate) fn defect_sequence_with(phi: &PhiMap, m: usize) -> Result<DefectSequence> {
    let mut defects = vec![identity(phi.dim())];
    for _ in 0..m {
        let prev = defects.last().unwrap();
        let next = symmetrize(&(prev - phi.apply(prev)?));
        defects.push(next);
    }
    let min_eigenvalues = defects.iter().map(min_eigenvalue).collect();
    Ok(DefectSequence { defects, min_eigenvalues })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub member: bool,
    /// Minimum eigenvalue of `Δ_k` for `k = 1..=m`.
    pub min_eigenvalues: Vec<f64>,
    pub tolerance: f64,
    /// `‖X_1X_1^* + ⋯ + X_nX_n^*‖`.
    pub row_norm_sq: f64,
    /// `1 / min{a_α : |α| = 1}`.
    pub norm_bound: f64,
    pub norm_bound_ok: bool,
}

impl MembershipVerdict {
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn membership(f: &PositiveRegularFunction, m: usize, x: &OperatorTuple, tol: f64) -> Result<MembershipVerdict> {
    if m == 0 {
        return Err(Error::InvalidParameter("positivity order m must be at least 1".into()));
    }
    let seq = defect_sequence(f, m, x)?;
    let min_eigenvalues = seq.min_eigenvalues[1..].to_vec();
    let member = min_eigenvalues.iter().all(|&v| v >= -tol);
    let row = x.components().iter().fold(zeros(x.dim(), x.dim()), |acc, xi| acc + xi * xi.adjoint());
    let row_norm_sq = op_norm(&row);
    let norm_bound = 1.0 / f.min_linear_coeff();
    Ok(MembershipVerdict {
        member,
        min_eigenvalues,
        tolerance: tol,
        row_norm_sq,
        norm_bound,
        norm_bound_ok: row_norm_sq <= norm_bound + tol,
    })
}

/// `r_k = ‖Φ^k(I)‖^{1/2k}` for `k = 1..=kmax`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralRadiusEstimate {
    pub values: Vec<f64>,
    pub final_value: f64,
    /// Iterate at which `‖Φ^k(I)‖` stopped being finite, if it did.
    pub overflow_at: Option<usize>,
}

pub fn spectral_radius_estimate(f: &PositiveRegularFunction, x: &OperatorTuple, kmax: usize) -> Result<SpectralRadiusEstimate> {
    if kmax == 0 {
        return Err(Error::InvalidParameter("kmax must be at least 1".into()));
    }
    let phi = PhiMap::new(f, x)?;
    let mut y = identity(phi.dim());
    let mut values = Vec::with_capacity(kmax);
    let mut overflow_at = None;
    for k in 1..=kmax {
        y = phi.apply(&y)?;
        let norm = op_norm(&y);
        if !norm.is_finite() {
            overflow_at = Some(k);
            break;
        }
        values.push(norm.powf(1.0 / (2.0 * k as f64)));
    }
    let final_value = values.last().copied().unwrap_or(f64::INFINITY);
    Ok(SpectralRadiusEstimate { values, final_value, overflow_at })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PurityDiagnostics {
    /// `‖Φ^k(I)‖` for `k = 1..=kmax`.
    pub norms: Vec<f64>,
    pub monotone: bool,
    /// Number of eigenvalues of `I - Φ(I)` above the tolerance.
    pub defect_rank: usize,
    pub tolerance: f64,
}

pub fn purity_diagnostics(f: &PositiveRegularFunction, x: &OperatorTuple, kmax: usize, tol: f64) -> Result<PurityDiagnostics> {
    if kmax == 0 {
        return Err(Error::InvalidParameter("kmax must be at least 1".into()));
    }
    let phi = PhiMap::new(f, x)?;
    let iterates = phi.iterates(kmax);
    let norms: Vec<f64> = iterates.iter().map(op_norm).collect();
    let monotone = norms.windows(2).all(|w| w[1] <= w[0] + tol);
    let gap = identity(phi.dim()) - &iterates[0];
    let defect_rank = hermitian_eigenvalues(&gap).into_iter().filter(|&v| v > tol).count();
    Ok(PurityDiagnostics { norms, monotone, defect_rank, tolerance: tol })
}

/// Max-abs difference between `(id - Φ_{q,X})^m (I)` for `q = Z_1 + ⋯ + Z_n`
/// and its binomial expansion `Σ_k (-1)^k C(m,k) Σ_{|α|=k} X_α X_α^*`.
pub fn agler_consistency(m: usize, x: &OperatorTuple) -> Result<f64> {
    let n = x.n();
    let q = PositiveRegularFunction::row_ball(n);
    let iterated = defect_sequence(&q, m, x)?;
    let index = WordIndex::new(n, m)?;
    let d = x.dim();
    let mut expansion = zeros(d, d);
    for k in 0..=m {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coef = sign * binomial(m, k).expect("small binomial") as f64;
        let words = &index.words()[index.grade(k)];
        let mut grade = zeros(d, d);
        for xa in x.monomials(words) {
            grade += &xa * xa.adjoint();
        }
        expansion += grade * c64(coef);
    }
    Ok(max_abs_diff(iterated.last(), &expansion))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VonNeumannGap {
    pub lhs: f64,
    pub rhs: f64,
    pub depth: usize,
}

/// `‖Σ X_α X_β^* ⊗ C‖` against the same hereditary polynomial on the depth-`N` model.
pub fn von_neumann_gap(
    f: &PositiveRegularFunction,
    m: usize,
    x: &OperatorTuple,
    terms: &[HereditaryTerm],
    depth: usize,
    tol: f64,
) -> Result<VonNeumannGap> {
    let verdict = membership(f, m, x, tol)?;
    if !verdict.member {
        return Err(Error::NotMember { min_eigenvalue: verdict.min_eigenvalue() });
    }
    let model = TruncatedModel::new(f, m, depth)?;
    von_neumann_gap_on_model(&model, x, terms)
}

pub fn von_neumann_gap_on_model(model: &TruncatedModel, x: &OperatorTuple, terms: &[HereditaryTerm]) -> Result<VonNeumannGap> {
    let e = hereditary_dim(terms)?;
    let d = x.dim();
    let mut lhs = zeros(d * e, d * e);
    for t in terms {
        let xa = x.monomial(&t.alpha);
        let xb = x.monomial(&t.beta);
        lhs += kron(&(xa * xb.adjoint()), &t.coeff);
    }
    let rhs = model.hereditary(terms)?;
    Ok(VonNeumannGap { lhs: op_norm(&lhs), rhs: op_norm(&rhs), depth: model.depth() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_model::build_model;
    use crate::linalg::vacuum_projection;
    use crate::sampling::{random_member, random_tuple, seeded};
    use crate::words::Word;
    use approx::assert_relative_eq;

    fn z() -> PositiveRegularFunction {
        PositiveRegularFunction::from_terms(1, &[("1", 1.0)]).unwrap()
    }

    fn scalar(v: f64) -> OperatorTuple {
        OperatorTuple::scalars(&[v])
    }

    #[test]
    fn apply_phi_examples() {
        let out = apply_phi(&z(), &scalar(0.5), &identity(1)).unwrap();
        assert_relative_eq!(out[(0, 0)].re, 0.25);

        let mut rng = seeded(1);
        let x = crate::sampling::random_strictly_upper(&mut rng, 2, 2);
        let ball = PositiveRegularFunction::row_ball(2);
        let out = apply_phi(&ball, &x, &identity(2)).unwrap();
        let expected = x.get(0) * x.get(0).adjoint() + x.get(1) * x.get(1).adjoint();
        assert!(max_abs_diff(&out, &expected) < 1e-15);

        assert_eq!(apply_phi(&ball, &x, &zeros(2, 2)).unwrap(), zeros(2, 2));
        assert!(apply_phi(&ball, &x, &zeros(3, 3)).is_err());
    }

    #[test]
    fn defect_sequence_examples() {
        let f = z();
        let seq = defect_sequence(&f, 2, &scalar(0.5)).unwrap();
        assert_relative_eq!(seq.defects[1][(0, 0)].re, 0.75, epsilon = 1e-15);
        assert_relative_eq!(seq.defects[2][(0, 0)].re, 0.5625, epsilon = 1e-15);

        let ball = PositiveRegularFunction::row_ball(2);
        let seq = defect_sequence(&ball, 3, &OperatorTuple::zeros(2, 3)).unwrap();
        assert!(seq.defects.iter().all(|d| *d == identity(3)));

        let f = PositiveRegularFunction::from_terms(2, &[("1", 1.0), ("2", 1.0), ("12", 1.0)]).unwrap();
        let model = build_model(&f, 2, 3).unwrap();
        let seq = defect_sequence(&f, 2, &model.generators()).unwrap();
        assert!(max_abs_diff(seq.last(), &vacuum_projection(model.dim())) < 1e-10);
    }

    #[test]
    fn membership_examples() {
        let v = membership(&z(), 1, &scalar(0.5), 1e-9).unwrap();
        assert!(v.member);
        assert_relative_eq!(v.min_eigenvalues[0], 0.75, epsilon = 1e-15);

        let v = membership(&z(), 1, &scalar(1.2), 1e-9).unwrap();
        assert!(!v.member);
        assert_relative_eq!(v.min_eigenvalues[0], -0.44, epsilon = 1e-12);

        let two_z = PositiveRegularFunction::from_terms(1, &[("1", 2.0)]).unwrap();
        let v = membership(&two_z, 1, &scalar(0.5f64.sqrt()), 1e-9).unwrap();
        assert!(v.member && v.norm_bound_ok);
        assert_relative_eq!(v.norm_bound, 0.5);
        let v = membership(&two_z, 1, &scalar(0.75), 1e-9).unwrap();
        assert!(!v.member && !v.norm_bound_ok);
    }

    #[test]
    fn spectral_radius_examples() {
        let est = spectral_radius_estimate(&z(), &scalar(0.5), 6).unwrap();
        assert!(est.values.iter().all(|r| (r - 0.5).abs() < 1e-14));

        let mut rng = seeded(2);
        let x = crate::sampling::random_strictly_upper(&mut rng, 2, 3);
        let ball = PositiveRegularFunction::row_ball(2);
        let est = spectral_radius_estimate(&ball, &x, 6).unwrap();
        assert!(est.values[2..].iter().all(|&r| r == 0.0));

        let a = Mat::from_element(1, 1, c64(0.7));
        let x = OperatorTuple::new(vec![a, zeros(1, 1)]).unwrap();
        let est = spectral_radius_estimate(&ball, &x, 5).unwrap();
        assert!(est.values.iter().all(|r| (r - 0.7).abs() < 1e-14));
    }

    #[test]
    fn spectral_radius_overflow_is_reported() {
        let est = spectral_radius_estimate(&z(), &scalar(1e200), 4).unwrap();
        assert_eq!(est.overflow_at, Some(1));
        assert!(est.values.is_empty());
    }

    #[test]
    fn spectral_radius_is_scale_covariant() {
        // exact covariance needs a homogeneous symbol
        let mut rng = seeded(3);
        let lin = PositiveRegularFunction::from_terms(2, &[("1", 1.0), ("2", 0.5)]).unwrap();
        let x = random_tuple(&mut rng, 2, 3);
        let s = 0.37;
        let base = spectral_radius_estimate(&lin, &x, 8).unwrap();
        let scaled = spectral_radius_estimate(&lin, &x.scaled(s), 8).unwrap();
        for (a, b) in base.values.iter().zip(&scaled.values) {
            assert_relative_eq!(a * s, *b, max_relative = 1e-12);
        }
    }

    #[test]
    fn purity_examples() {
        let ball = PositiveRegularFunction::row_ball(2);
        let p = purity_diagnostics(&ball, &OperatorTuple::zeros(2, 3), 4, 1e-9).unwrap();
        assert!(p.norms.iter().all(|&v| v == 0.0));
        assert_eq!(p.defect_rank, 3);

        let p = purity_diagnostics(&z(), &scalar(0.9), 5, 1e-12).unwrap();
        for (k, v) in p.norms.iter().enumerate() {
            assert_relative_eq!(*v, 0.81f64.powi(k as i32 + 1), max_relative = 1e-14);
        }
        assert!(p.monotone);

        let depth = 4;
        let model = build_model(&ball, 1, depth).unwrap();
        let p = purity_diagnostics(&ball, &model.generators(), depth + 2, 1e-9).unwrap();
        assert!(p.norms[depth - 1] > 0.0);
        assert_eq!(p.norms[depth], 0.0);
        assert!(p.monotone);
        assert_eq!(p.defect_rank, 1);
    }

    #[test]
    fn agler_examples() {
        assert!(agler_consistency(2, &scalar(0.5)).unwrap() < 1e-15);
        let d = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![c64(0.3), c64(-0.7), c64(0.2)]));
        let e = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![c64(0.1), c64(0.5), c64(-0.9)]));
        let x = OperatorTuple::new(vec![d, e]).unwrap();
        assert!(agler_consistency(3, &x).unwrap() < 1e-14);
        assert_eq!(agler_consistency(2, &OperatorTuple::zeros(3, 2)).unwrap(), 0.0);
    }

    #[test]
    fn von_neumann_examples() {
        let shift_term = vec![HereditaryTerm {
            alpha: Word::parse(1, "1").unwrap(),
            beta: Word::empty(1),
            coeff: identity(1),
        }];
        let gap = von_neumann_gap(&z(), 1, &scalar(0.5), &shift_term, 6, 1e-9).unwrap();
        assert_relative_eq!(gap.lhs, 0.5, epsilon = 1e-15);
        assert_relative_eq!(gap.rhs, 1.0, epsilon = 1e-15);

        let ball = PositiveRegularFunction::row_ball(2);
        let mut rng = seeded(4);
        let x = random_member(&mut rng, &ball, 1, 3, 1e-9).unwrap();
        let id_term = vec![HereditaryTerm { alpha: Word::empty(2), beta: Word::empty(2), coeff: identity(1) }];
        let gap = von_neumann_gap(&ball, 1, &x, &id_term, 4, 1e-9).unwrap();
        assert_relative_eq!(gap.lhs, 1.0, epsilon = 1e-14);
        assert_relative_eq!(gap.rhs, 1.0, epsilon = 1e-14);

        let row: Vec<HereditaryTerm> = (0..2)
            .map(|i| HereditaryTerm { alpha: Word::generator(2, i), beta: Word::generator(2, i), coeff: identity(1) })
            .collect();
        let gap = von_neumann_gap(&ball, 1, &x, &row, 4, 1e-9).unwrap();
        assert!(gap.lhs <= 1.0 + 1e-12);
        assert_relative_eq!(gap.rhs, 1.0, epsilon = 1e-14);

        assert!(matches!(
            von_neumann_gap(&z(), 1, &scalar(1.5), &shift_term, 6, 1e-9),
            Err(Error::NotMember { .. })
        ));
        let long = vec![HereditaryTerm { alpha: Word::parse(1, "111").unwrap(), beta: Word::empty(1), coeff: identity(1) }];
        assert!(matches!(
            von_neumann_gap(&z(), 1, &scalar(0.5), &long, 2, 1e-9),
            Err(Error::WordTooLong { len: 3, depth: 2 })
        ));
    }

    #[test]
    fn positivity_order_collapses_for_contractive_members() {
        let mut rng = seeded(5);
        for trial in 0..20 {
            let n = 1 + trial % 3;
            let f = crate::sampling::random_symbol(&mut rng, n, 2);
            let m = 2 + trial % 2;
            let x = random_member(&mut rng, &f, m, 3, 1e-9).unwrap();
            let seq = defect_sequence(&f, m, &x).unwrap();
            // Φ(I) ≤ I holds, so Δ_m ≥ 0 forces every intermediate defect ≥ 0
            assert!(seq.min_eigenvalues[1] >= -1e-9);
            assert!(seq.min_eigenvalues[m] >= -1e-9);
            assert!(seq.min_eigenvalues[1..].iter().all(|&v| v >= -1e-9));
        }
    }

    #[test]
    fn linear_domains_are_starlike() {
        let mut rng = seeded(6);
        let f = PositiveRegularFunction::from_terms(2, &[("1", 0.5), ("2", 1.5)]).unwrap();
        for m in 1..=3 {
            for _ in 0..5 {
                let x = random_member(&mut rng, &f, m, 3, 1e-9).unwrap();
                for k in 0..=10 {
                    let r = k as f64 / 10.0;
                    assert!(membership(&f, m, &x.scaled(r), 1e-9).unwrap().member);
                }
            }
        }
    }
}
