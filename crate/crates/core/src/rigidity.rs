//! Row actions of invertible matrices on tuples, depth-`N` linear
//! biholomorphism certificates, nilpotent image checks and the iteration
//! probe for maps tangent to the identity.
//!
//! Every verdict here is a necessary condition at the chosen depth: a failure
//! disproves, a pass is only consistent with the full statement.

use rand::Rng;
use serde::Serialize;

use crate::cp_maps::{defect_sequence, membership, MembershipVerdict};
use crate::error::{Error, Result};
use crate::fock_model::TruncatedModel;
use crate::linalg::{hermitian_eigenvalues, identity, max_abs, op_norm, zeros, Mat, C64};
use crate::sampling::random_nilpotent_member;
use crate::series::{FreeSeries, PositiveRegularFunction};
use crate::tuple::OperatorTuple;
use crate::words::{Word, WordIndex};

/// Invertible `n × n` matrix acting on tuples from the right.
#[derive(Clone, Debug)]
pub struct LinearMapCandidate {
    u: Mat,
    u_inv: Mat,
    cond: f64,
}

impl LinearMapCandidate {
    pub fn new(u: Mat) -> Result<Self> {
        if u.nrows() != u.ncols() || u.nrows() == 0 {
            return Err(Error::Shape(format!("U must be square, got {}x{}", u.nrows(), u.ncols())));
        }
        let u_inv = u.clone().try_inverse().ok_or(Error::Singular(f64::INFINITY))?;
        let cond = op_norm(&u) * op_norm(&u_inv);
        let residual = max_abs(&(&u * &u_inv - identity(u.nrows())));
        if !cond.is_finite() || residual > 1e-10 * cond {
            return Err(Error::Singular(cond));
        }
        Ok(Self { u, u_inv, cond })
    }

    pub fn diagonal(c: &[f64]) -> Result<Self> {
        let n = c.len();
        Self::new(Mat::from_fn(n, n, |i, j| if i == j { C64::new(c[i], 0.0) } else { C64::new(0.0, 0.0) }))
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn matrix(&self) -> &Mat {
        &self.u
    }

    pub fn inverse_matrix(&self) -> &Mat {
        &self.u_inv
    }

    /// Spectral condition number `‖U‖ ‖U^{-1}‖`.
    pub fn condition(&self) -> f64 {
        self.cond
    }

    pub fn inverse(&self) -> LinearMapCandidate {
        LinearMapCandidate { u: self.u_inv.clone(), u_inv: self.u.clone(), cond: self.cond }
    }

    pub fn compose(&self, other: &LinearMapCandidate) -> Result<LinearMapCandidate> {
        Self::new(&self.u * &other.u)
    }
}

/// `[X_1, …, X_n] U`: component `j` is `Σ_i U_{ij} X_i`.
pub fn apply_row(x: &OperatorTuple, u: &Mat) -> Result<OperatorTuple> {
    let n = x.n();
    if u.shape() != (n, n) {
        return Err(Error::Shape(format!("U is {}x{}, tuple has {n} components", u.nrows(), u.ncols())));
    }
    let d = x.dim();
    let comps = (0..n)
        .map(|j| (0..n).fold(zeros(d, d), |acc, i| acc + x.get(i) * u[(i, j)]))
        .collect();
    OperatorTuple::new(comps)
}

#[derive(Clone, Debug, Serialize)]
pub struct BiholoCertificate {
    /// `[W^(f)] U ∈ D_g^l` at depth `N`.
    pub forward: MembershipVerdict,
    /// `[W^(g)] U^{-1} ∈ D_f^m` at depth `N`.
    pub backward: MembershipVerdict,
    pub forward_min_eigenvalue: f64,
    pub backward_min_eigenvalue: f64,
    pub condition: f64,
    pub depth: usize,
    pub tolerance: f64,
}

impl BiholoCertificate {
    /// Both directions hold at this depth.
    pub fn passes(&self) -> bool {
        self.forward.member && self.backward.member
    }
}

pub fn check_linear_biholomorphism(
    f: &PositiveRegularFunction,
    m: usize,
    g: &PositiveRegularFunction,
    l: usize,
    u: &LinearMapCandidate,
    depth: usize,
    tol: f64,
) -> Result<BiholoCertificate> {
    if f.n() != g.n() {
        return Err(Error::GeneratorMismatch { expected: f.n(), found: g.n() });
    }
    if u.n() != f.n() {
        return Err(Error::Shape(format!("U is {0}x{0}, symbols have {1} letters", u.n(), f.n())));
    }
    let wf = TruncatedModel::new(f, m, depth)?.generators();
    let wg = TruncatedModel::new(g, l, depth)?.generators();
    let forward = membership(g, l, &apply_row(&wf, u.matrix())?, tol)?;
    let backward = membership(f, m, &apply_row(&wg, u.inverse_matrix())?, tol)?;
    Ok(BiholoCertificate {
        forward_min_eigenvalue: forward.min_eigenvalue(),
        backward_min_eigenvalue: backward.min_eigenvalue(),
        forward,
        backward,
        condition: u.condition(),
        depth,
        tolerance: tol,
    })
}

fn check_scalar_tuple(maps: &[FreeSeries], n: usize) -> Result<()> {
    if maps.len() != n {
        return Err(Error::GeneratorMismatch { expected: n, found: maps.len() });
    }
    for (i, s) in maps.iter().enumerate() {
        if s.n() != n {
            return Err(Error::GeneratorMismatch { expected: n, found: s.n() });
        }
        if s.coeff_dim() != 1 {
            return Err(Error::Shape(format!("component {} has matrix coefficients", i + 1)));
        }
    }
    Ok(())
}

/// `(F_1(X), …, F_n(X))`.
pub fn evaluate_map(maps: &[FreeSeries], x: &OperatorTuple) -> Result<OperatorTuple> {
    OperatorTuple::new(maps.iter().map(|s| s.evaluate(x)).collect::<Result<Vec<_>>>()?)
}

#[derive(Clone, Debug, Serialize)]
pub struct NilpotentImageVerdict {
    pub pass: bool,
    /// Minimum defect eigenvalue of `F` applied to the depth-`p` model.
    pub model_min_eigenvalue: f64,
    pub sample_min_eigenvalues: Vec<f64>,
    pub depth: usize,
    pub tolerance: f64,
}

/// Images under `F` of the depth-`p` model of `D_f^m` and of sampled nilpotent
/// members (dimension `p + 1`), tested for membership in `D_g^l`.
#[allow(clippy::too_many_arguments)]
pub fn nilpotent_image_check(
    maps: &[FreeSeries],
    f: &PositiveRegularFunction,
    m: usize,
    g: &PositiveRegularFunction,
    l: usize,
    p: usize,
    samples: usize,
    rng: &mut impl Rng,
    tol: f64,
) -> Result<NilpotentImageVerdict> {
    check_scalar_tuple(maps, f.n())?;
    if g.n() != f.n() {
        return Err(Error::GeneratorMismatch { expected: f.n(), found: g.n() });
    }
    for (i, s) in maps.iter().enumerate() {
        if s.scalar_coeff(&Word::empty(f.n())).norm() > 0.0 {
            return Err(Error::InvalidParameter(format!("component {} has a nonzero constant term", i + 1)));
        }
    }
    let model = TruncatedModel::new(f, m, p)?.generators();
    let model_verdict = membership(g, l, &evaluate_map(maps, &model)?, tol)?;
    let mut pass = model_verdict.member;
    let mut sample_min_eigenvalues = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = random_nilpotent_member(rng, f, m, p + 1, tol)?;
        let v = membership(g, l, &evaluate_map(maps, &x)?, tol)?;
        pass &= v.member;
        sample_min_eigenvalues.push(v.min_eigenvalue());
    }
    Ok(NilpotentImageVerdict {
        pass,
        model_min_eigenvalue: model_verdict.min_eigenvalue(),
        sample_min_eigenvalues,
        depth: p,
        tolerance: tol,
    })
}

/// The lowest-degree witness `α_0` for which `N γ` first exceeds
/// `sqrt(b_{γ_0} / b_{α_0}) + 1 / min sqrt(a_{g_i})`.
#[derive(Clone, Debug, Serialize)]
pub struct ContradictionWitness {
    pub index: usize,
    pub alpha0: String,
    pub gamma: f64,
    pub threshold: f64,
}

#[derive(Clone, Debug, Serialize)]
pub enum ProbeOutcome {
    /// Some `F^N` leaves `D_f^m` on the model or the linear growth forces a contradiction.
    Violation,
    IdentityConsistent,
    /// No violation within the iteration budget although `F` is not the identity.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct CartanProbe {
    pub outcome: ProbeOutcome,
    /// Smallest `N` with `‖Σ F^N_i(V) F^N_i(V)^*‖ > 1/min a_{g_i} + tol`.
    pub norm_violation: Option<usize>,
    pub contradiction: Option<ContradictionWitness>,
    /// Lowest degree carrying a nonzero higher-order coefficient.
    pub lowest_degree: Option<usize>,
    pub bound: f64,
    pub depth: usize,
    pub iterations: usize,
    pub tolerance: f64,
}

/// Replays the iteration argument on the depth-`p` model.
///
/// Since `V_α = 0` for `|α| > p`, the iterates `F^N(V)` are computed by nested
/// evaluation `F(F^{N-1}(V))`, which agrees with evaluating the formal
/// composition truncated at degree `p`.
pub fn cartan_iteration_probe(
    maps: &[FreeSeries],
    f: &PositiveRegularFunction,
    m: usize,
    p: usize,
    max_iterations: usize,
    tol: f64,
) -> Result<CartanProbe> {
    let n = f.n();
    check_scalar_tuple(maps, n)?;
    if p < 2 {
        return Err(Error::InvalidParameter(format!("probe depth must be at least 2, got {p}")));
    }
    let empty = Word::empty(n);
    for (i, s) in maps.iter().enumerate() {
        if s.scalar_coeff(&empty).norm() > tol {
            return Err(Error::NotTangent(format!("component {} has a constant term", i + 1)));
        }
        for j in 0..n {
            let c = s.scalar_coeff(&Word::generator(n, j));
            let expected = if i == j { 1.0 } else { 0.0 };
            if (c - C64::new(expected, 0.0)).norm() > tol {
                return Err(Error::NotTangent(format!(
                    "component {} has linear coefficient {c} on Z_{}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }

    let model = TruncatedModel::new(f, m, p)?;
    let index = model.index();
    let bound = 1.0 / f.min_linear_coeff();
    let max_high = maps
        .iter()
        .flat_map(|s| s.terms().filter(|(w, _)| w.len() >= 2 && w.len() <= p).map(|(_, c)| c[(0, 0)].norm()))
        .fold(0.0, f64::max);
    let lowest_degree = (2..=p).find(|&k| {
        maps.iter().any(|s| s.terms().any(|(w, c)| w.len() == k && c[(0, 0)].norm() > 0.0))
    });

    let contradiction = match lowest_degree {
        Some(q) => contradiction_witness(maps, &model, index, q, max_iterations)?,
        None => None,
    };

    let v = model.generators();
    let mut x = v.clone();
    let mut norm_violation = None;
    let mut iterations = 0;
    if lowest_degree.is_some() {
        for step in 1..=max_iterations {
            x = evaluate_map(maps, &x)?;
            iterations = step;
            let row = x.components().iter().fold(zeros(x.dim(), x.dim()), |acc, xi| acc + xi * xi.adjoint());
            if op_norm(&row) > bound + tol {
                norm_violation = Some(step);
                break;
            }
        }
    }

    let outcome = if norm_violation.is_some() || contradiction.is_some() {
        ProbeOutcome::Violation
    } else if max_high < tol {
        ProbeOutcome::IdentityConsistent
    } else {
        ProbeOutcome::Inconclusive
    };
    Ok(CartanProbe {
        outcome,
        norm_violation,
        contradiction,
        lowest_degree,
        bound,
        depth: p,
        iterations,
        tolerance: tol,
    })
}

fn contradiction_witness(
    maps: &[FreeSeries],
    model: &TruncatedModel,
    index: &WordIndex,
    q: usize,
    max_iterations: usize,
) -> Result<Option<ContradictionWitness>> {
    let f = model.symbol();
    let weights = model.weights();
    let v = model.generators();
    // G_q^{(i)}(V) for the homogeneous degree-q parts
    let g_q: Vec<Mat> = maps
        .iter()
        .map(|s| {
            let mut part = FreeSeries::zero(s.n(), s.degree(), 1);
            for (w, c) in s.terms().filter(|(w, _)| w.len() == q) {
                part.set(w.clone(), c.clone())?;
            }
            part.evaluate(&v)
        })
        .collect::<Result<_>>()?;
    let linear_floor = f.min_linear_coeff().sqrt().recip();
    let mut best: Option<ContradictionWitness> = None;
    for idx in index.grade(q) {
        let alpha0 = index.word_of(idx);
        let gamma = g_q
            .iter()
            .map(|gm| gm.row(idx).iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        if gamma == 0.0 {
            continue;
        }
        let gamma0 = index.tail(idx).expect("q >= 2");
        let threshold = (weights.value(gamma0) / weights.value(idx)).sqrt() + linear_floor;
        let needed = (threshold / gamma).ceil().max(1.0);
        if needed > max_iterations as f64 {
            continue;
        }
        let candidate = ContradictionWitness { index: needed as usize, alpha0: alpha0.to_text(), gamma, threshold };
        if best.as_ref().is_none_or(|b| candidate.index < b.index) {
            best = Some(candidate);
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorImageVerdict {
    pub pass: bool,
    pub radii: Vec<f64>,
    pub verdicts: Vec<MembershipVerdict>,
    /// Largest eigenvalue of `I - (id - Φ)^s(I)`, `s = 1..=m`, per radius;
    /// the chain requires these to stay `<= 1`.
    pub chain_upper: Vec<f64>,
    pub depth: usize,
    pub tolerance: f64,
}

/// `φ̃_i = φ_i(r V^(g))` on the depth-`N` model of `D_g^l`, tested for
/// membership in `D_f^m` at each radius.
#[allow(clippy::too_many_arguments)]
pub fn check_generator_images(
    f: &PositiveRegularFunction,
    m: usize,
    g: &PositiveRegularFunction,
    l: usize,
    phi: &[FreeSeries],
    depth: usize,
    radii: &[f64],
    tol: f64,
) -> Result<GeneratorImageVerdict> {
    if phi.len() != f.n() {
        return Err(Error::GeneratorMismatch { expected: f.n(), found: phi.len() });
    }
    check_scalar_tuple(phi, g.n()).or_else(|e| match e {
        Error::GeneratorMismatch { .. } if phi.iter().all(|s| s.n() == g.n() && s.coeff_dim() == 1) => Ok(()),
        other => Err(other),
    })?;
    if let Some(s) = phi.iter().find(|s| s.polynomial_degree() > depth) {
        return Err(Error::Shape(format!("component of degree {} exceeds depth {depth}", s.polynomial_degree())));
    }
    let model = TruncatedModel::new(g, l, depth)?;
    let mut pass = true;
    let mut verdicts = Vec::with_capacity(radii.len());
    let mut chain_upper = Vec::with_capacity(radii.len());
    for &r in radii {
        let images = OperatorTuple::new(phi.iter().map(|s| model.evaluate(s, r)).collect::<Result<Vec<_>>>()?)?;
        let verdict = membership(f, m, &images, tol)?;
        let seq = defect_sequence(f, m, &images)?;
        let upper = seq.defects[1..]
            .iter()
            .map(|dk| {
                let eig = hermitian_eigenvalues(&(identity(dk.nrows()) - dk));
                eig.last().copied().unwrap_or(0.0)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        pass &= verdict.member && upper <= 1.0 + tol;
        verdicts.push(verdict);
        chain_upper.push(upper);
    }
    Ok(GeneratorImageVerdict { pass, radii: radii.to_vec(), verdicts, chain_upper, depth, tolerance: tol })
}
