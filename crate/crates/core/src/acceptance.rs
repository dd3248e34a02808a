//! The acceptance suite: ten numerical criteria over seeded random grids.
//!
//! Each criterion reports its worst observed quantity next to the tolerance it
//! was judged against. Results depend only on the seed; wall time is measured
//! by callers and kept out of the results.

use rand::Rng;
use serde::Serialize;

use crate::berezin::{berezin_kernel, compare_forms};
use crate::cp_maps::{agler_consistency, membership, spectral_radius_estimate, von_neumann_gap};
use crate::error::Result;
use crate::fock_model::{build_model, hardy_norm_estimate, HereditaryTerm, TruncatedModel};
use crate::linalg::{hermitian_eigenvalues, identity, max_abs, max_abs_diff, op_norm, vacuum_projection, Mat, C64};
use crate::rigidity::{cartan_iteration_probe, check_linear_biholomorphism, LinearMapCandidate};
use crate::sampling::{
    feasible_scale, random_hereditary, random_matrix, random_member, random_nilpotent_member, random_polynomial,
    random_symbol, random_tuple, seeded, SeededRng,
};
use crate::series::{FreeSeries, PositiveRegularFunction};
use crate::tolerances::{EIGEN_TOL, EXACT_TOL, FORM_TOL, ORACLE_REL_TOL};
use crate::tuple::OperatorTuple;
use crate::weights::{binomial_constant, weights_direct, weights_oracle};
use crate::words::WordIndex;

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Grid shared by the first three criteria.
pub const GRID_N: [usize; 3] = [1, 2, 3];
pub const GRID_M: [usize; 3] = [1, 2, 3];
pub const GRID_MAX_DEPTH: usize = 6;
pub const GRID_SYMBOLS: usize = 5;
pub const GRID_SYMBOL_DEGREE: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    /// Worst observed value of the judged quantity.
    pub value: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }
}

fn rng_for(seed: u64, id: u32) -> SeededRng {
    seeded(seed ^ (id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// The grid symbols, `GRID_SYMBOLS` per letter count.
pub fn grid_symbols(seed: u64) -> Vec<PositiveRegularFunction> {
    let mut rng = rng_for(seed, 0);
    GRID_N
        .iter()
        .flat_map(|&n| (0..GRID_SYMBOLS).map(move |_| n))
        .map(|n| random_symbol(&mut rng, n, GRID_SYMBOL_DEGREE))
        .collect()
}

/// Tracks the worst value; `pass` iff every value stays within tolerance.
struct Worst {
    value: f64,
    cases: usize,
    errors: Vec<String>,
}

impl Worst {
    fn new() -> Self {
        Worst { value: 0.0, cases: 0, errors: Vec::new() }
    }

    fn see(&mut self, v: f64) {
        self.cases += 1;
        if v.is_nan() || v > self.value {
            self.value = if v.is_nan() { f64::INFINITY } else { v };
        }
    }

    fn fail(&mut self, case: String) {
        self.cases += 1;
        self.value = f64::INFINITY;
        self.errors.push(case);
    }

    fn finish(self, id: u32, name: &'static str, tolerance: f64, detail: String) -> CriterionResult {
        let detail = if self.errors.is_empty() { detail } else { format!("{detail}; errors: {}", self.errors.join(", ")) };
        CriterionResult { id, name, pass: self.value <= tolerance, value: self.value, tolerance, cases: self.cases, detail }
    }
}

pub fn weight_oracle_equivalence(seed: u64) -> Result<CriterionResult> {
    let mut worst = Worst::new();
    for f in grid_symbols(seed) {
        for &m in &GRID_M {
            for depth in 0..=GRID_MAX_DEPTH {
                let direct = weights_direct(&f, m, depth)?;
                let oracle = weights_oracle(&f, m, depth)?;
                worst.see(direct.max_rel_diff(&oracle));
            }
        }
    }
    Ok(worst.finish(1, "weight oracle equivalence", ORACLE_REL_TOL, "max relative difference".into()))
}

pub fn rank_one_defect(seed: u64) -> Result<CriterionResult> {
    let mut worst = Worst::new();
    for f in grid_symbols(seed) {
        for &m in &GRID_M {
            for depth in 1..=GRID_MAX_DEPTH {
                let model = build_model(&f, m, depth)?;
                worst.see(max_abs_diff(&model.defect(), &vacuum_projection(model.dim())));
            }
        }
    }
    Ok(worst.finish(2, "rank-one model defect", EXACT_TOL, "max entrywise distance to the vacuum projection".into()))
}

pub fn row_contraction_and_grades(seed: u64) -> Result<CriterionResult> {
    let mut worst = Worst::new();
    for f in grid_symbols(seed) {
        for &m in &GRID_M {
            for depth in 1..=GRID_MAX_DEPTH {
                let model = build_model(&f, m, depth)?;
                let top = hermitian_eigenvalues(&model.row_contraction()).last().copied().unwrap_or(0.0);
                worst.see(top - 1.0);
                for k in 0..=depth {
                    let bound = binomial_constant(k, m)? as f64;
                    worst.see(op_norm(&model.grade_sum(k)?) - bound);
                }
            }
        }
    }
    Ok(worst.finish(3, "row contraction and grade bounds", EXACT_TOL, "max excess over 1 and over C(k+m-1, m-1)".into()))
}

/// `(1 - |λ|²) ⟨g k_λ, k_λ⟩` with `k_λ = Σ_{j ≤ N} \bar λ^j e_j`.
pub fn classical_berezin(lambda: C64, g: &Mat) -> C64 {
    let k: Vec<C64> = (0..g.nrows()).map(|j| lambda.conj().powu(j as u32)).collect();
    let mut acc = C64::default();
    for (i, ki) in k.iter().enumerate() {
        for (j, kj) in k.iter().enumerate() {
            acc += ki.conj() * g[(i, j)] * kj;
        }
    }
    acc * (1.0 - lambda.norm_sqr())
}

pub fn berezin_moments(seed: u64) -> Result<CriterionResult> {
    let mut rng = rng_for(seed, 4);
    let mut exact = Worst::new();
    for n in 1..=2 {
        for m in 1..=3 {
            for depth in [3usize, 4] {
                let f = random_symbol(&mut rng, n, 2);
                let t = random_nilpotent_member(&mut rng, &f, m, depth, EIGEN_TOL)?;
                let model = build_model(&f, m, depth)?;
                let kernel = berezin_kernel(&f, m, &t, depth, EIGEN_TOL)?;
                let words = WordIndex::new(n, depth.min(3))?;
                for alpha in words.words() {
                    for beta in words.words() {
                        let out = kernel.transform_monomial(&model, alpha, beta)?;
                        exact.see(max_abs_diff(&out, &(t.monomial(alpha) * t.monomial(beta).adjoint())));
                    }
                }
            }
        }
    }

    let depth = 30;
    let disc = PositiveRegularFunction::from_terms(1, &[("1", 1.0)])?;
    let model = build_model(&disc, 1, depth)?;
    let shift = model.generator(0);
    let gs = [identity(depth + 1), &shift * shift.adjoint()];
    let mut scalar = Worst::new();
    let lambdas = [
        C64::new(0.0, 0.0),
        C64::new(0.3, 0.0),
        C64::new(-0.5, 0.2),
        C64::new(0.0, 0.8),
        C64::new(0.8, 0.0),
        C64::new(0.48, -0.64),
    ];
    for lambda in lambdas {
        let t = OperatorTuple::new(vec![Mat::from_element(1, 1, lambda)])?;
        let kernel = berezin_kernel(&disc, 1, &t, depth, EIGEN_TOL)?;
        for (g, closed) in gs.iter().zip([1.0, lambda.norm_sqr()]) {
            let value = kernel.transform(g)?[(0, 0)];
            let classical = classical_berezin(lambda, g);
            scalar.see((value - classical).norm());
            scalar.see((value - closed).norm());
        }
    }
    let detail = format!(
        "nilpotent max error {:.3e} (tolerance {EXACT_TOL:e}); disc family max error {:.3e} (tolerance {FORM_TOL:e}) against the classical formula and its closed form",
        exact.value, scalar.value
    );
    let pass = exact.value <= EXACT_TOL && scalar.value <= FORM_TOL;
    Ok(CriterionResult {
        id: 4,
        name: "Berezin moment reproduction",
        pass,
        value: exact.value.max(scalar.value),
        tolerance: FORM_TOL,
        cases: exact.cases + scalar.cases,
        detail,
    })
}

/// Random member with estimated `r_f <= 0.8`, shrinking along the ray as needed.
fn member_with_radius(rng: &mut impl Rng, f: &PositiveRegularFunction, m: usize, d: usize, radius: f64) -> Result<OperatorTuple> {
    loop {
        let mut t = random_member(rng, f, m, d, EIGEN_TOL)?;
        for _ in 0..40 {
            let est = spectral_radius_estimate(f, &t, crate::berezin::RESOLVENT_RADIUS_ITERATES)?;
            let member = membership(f, m, &t, EIGEN_TOL)?.member;
            if member && est.overflow_at.is_none() && est.final_value <= radius {
                return Ok(t);
            }
            if !member {
                break;
            }
            t = t.scaled(0.85);
        }
    }
}

pub fn berezin_form_agreement(seed: u64) -> Result<CriterionResult> {
    let mut rng = rng_for(seed, 5);
    let mut worst = Worst::new();
    let mut max_cond: f64 = 0.0;
    for case in 0..50 {
        let n = 1 + case % 2;
        let d = 1 + (case / 2) % 4;
        let m = 1 + case % 3;
        let depth = if n == 1 { 8 } else { 4 };
        let f = random_symbol(&mut rng, n, 2);
        let t = member_with_radius(&mut rng, &f, m, d, 0.8)?;
        let dim = WordIndex::new(n, depth)?.dim();
        let g = random_matrix(&mut rng, dim, dim);
        match compare_forms(&f, m, &t, &g, depth, EIGEN_TOL) {
            Ok((_, _, cmp)) => {
                max_cond = max_cond.max(cmp.condition);
                worst.see(cmp.max_abs_difference);
            }
            Err(e) => worst.fail(format!("case {case}: {e}")),
        }
    }
    Ok(worst.finish(5, "kernel and resolvent Berezin forms", FORM_TOL, format!("max resolvent condition number {max_cond:.3e}")))
}

/// One sampled pair of criterion 6 whose left side exceeds the depth-6 model norm.
#[derive(Clone, Debug, Serialize)]
pub struct VonNeumannExcess {
    pub case: usize,
    pub n: usize,
    pub m: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// Model norm of the same polynomial at `deep_depth`.
    pub deep_rhs: f64,
    pub deep_depth: usize,
}

pub const VON_NEUMANN_DEPTH: usize = 6;

/// Worst excess `lhs - rhs` over the 100 pairs, with every violating case
/// re-evaluated on a deeper model.
pub fn von_neumann_cases(seed: u64) -> Result<(f64, Vec<VonNeumannExcess>)> {
    let mut rng = rng_for(seed, 6);
    let mut worst: f64 = 0.0;
    let mut excess = Vec::new();
    for case in 0..100 {
        let n = 1 + case % 2;
        let m = 1 + (case / 2) % 3;
        let f = random_symbol(&mut rng, n, 2);
        let d = rng.random_range(1..=3);
        let x = random_member(&mut rng, &f, m, d, EIGEN_TOL)?;
        let e = rng.random_range(1..=2);
        let terms_count = rng.random_range(1..=3);
        let terms: Vec<HereditaryTerm> = random_hereditary(&mut rng, n, 2, terms_count, e);
        let gap = von_neumann_gap(&f, m, &x, &terms, VON_NEUMANN_DEPTH, EIGEN_TOL)?;
        worst = worst.max(gap.lhs - gap.rhs);
        if gap.lhs - gap.rhs > EIGEN_TOL {
            let deep_depth = if n == 1 { 24 } else { 9 };
            let deeper = von_neumann_gap(&f, m, &x, &terms, deep_depth, EIGEN_TOL)?;
            excess.push(VonNeumannExcess { case, n, m, lhs: gap.lhs, rhs: gap.rhs, deep_rhs: deeper.rhs, deep_depth });
        }
    }
    Ok((worst, excess))
}

pub fn von_neumann(seed: u64) -> Result<CriterionResult> {
    let (worst, excess) = von_neumann_cases(seed)?;
    let detail = if excess.is_empty() {
        "max excess of lhs over the depth-6 model norm".into()
    } else {
        let cases: Vec<String> = excess
            .iter()
            .map(|c| {
                format!(
                    "case {} (n={}, m={}): lhs {:.6}, rhs {:.6} at depth 6, rhs {:.6} at depth {}",
                    c.case, c.n, c.m, c.lhs, c.rhs, c.deep_rhs, c.deep_depth
                )
            })
            .collect();
        format!("{} of 100 cases exceed the depth-6 model norm: {}", excess.len(), cases.join("; "))
    };
    Ok(CriterionResult {
        id: 6,
        name: "von Neumann inequality at depth 6",
        pass: worst <= EIGEN_TOL,
        value: worst.max(0.0),
        tolerance: EIGEN_TOL,
        cases: 100,
        detail,
    })
}

pub fn hardy_monotonicity(seed: u64) -> Result<CriterionResult> {
    let mut rng = rng_for(seed, 7);
    let radii = [0.0, 0.25, 0.5, 0.75, 0.9, 0.99];
    let mut worst = Worst::new();
    for n in 1..=2 {
        for m in 1..=3 {
            let depths: Vec<usize> = if n == 1 { (1..=6).collect() } else { (1..=4).collect() };
            let f = random_symbol(&mut rng, n, 2);
            let models: Vec<TruncatedModel> = depths.iter().map(|&d| build_model(&f, m, d)).collect::<Result<_>>()?;
            for _ in 0..20 {
                let poly = random_polynomial(&mut rng, n, 3, 3, true);
                let estimates = models
                    .iter()
                    .map(|model| crate::fock_model::hardy_norm_on_model(&poly, model, &radii))
                    .collect::<Result<Vec<_>>>()?;
                for est in &estimates {
                    for w in est.norms.windows(2) {
                        worst.see(w[0] - w[1]);
                    }
                }
                for pair in estimates.windows(2) {
                    for (a, b) in pair[0].norms.iter().zip(&pair[1].norms) {
                        worst.see(a - b);
                    }
                }
            }
        }
    }
    // keep the public entry point exercised on one cell
    let f = PositiveRegularFunction::row_ball(2);
    let est = hardy_norm_estimate(&FreeSeries::variable(2, 1, 0), &f, 1, 3, &radii)?;
    worst.see(if est.is_nondecreasing(EXACT_TOL) { 0.0 } else { f64::INFINITY });
    Ok(worst.finish(7, "Hardy-norm monotonicity in depth and radius", EXACT_TOL, "max decrease along r and along N".into()))
}

pub fn composition_coherence(seed: u64) -> Result<CriterionResult> {
    let mut rng = rng_for(seed, 8);
    let mut worst = Worst::new();
    for _ in 0..100 {
        let n = rng.random_range(1..=3);
        let outer_degree = rng.random_range(1..=3);
        let inner_degree = rng.random_range(1..=2);
        let degree = outer_degree * inner_degree;
        let outer = random_polynomial(&mut rng, n, outer_degree, degree, true);
        let inner: Vec<FreeSeries> = (0..n).map(|_| random_polynomial(&mut rng, n, inner_degree, degree, false)).collect();
        let d = rng.random_range(1..=3);
        let x = random_tuple(&mut rng, n, d).scaled(0.5);
        let composed = outer.compose(&inner)?.evaluate(&x)?;
        let images = OperatorTuple::new(inner.iter().map(|p| p.evaluate(&x)).collect::<Result<Vec<_>>>()?)?;
        let nested = outer.evaluate(&images)?;
        let scale = max_abs(&nested).max(f64::MIN_POSITIVE);
        worst.see(max_abs_diff(&composed, &nested) / scale);
    }
    Ok(worst.finish(8, "composition coherence", EXACT_TOL, "max relative difference".into()))
}

pub fn rigidity_suite(seed: u64) -> Result<CriterionResult> {
    let mut rng = rng_for(seed, 9);
    let depth = 3;
    let mut notes = Vec::new();

    // (a) rescaling certificates
    let mut rescale_ok = true;
    for _ in 0..20 {
        let f = random_symbol(&mut rng, 2, 2);
        let m = rng.random_range(1..=3);
        let c = [rng.random_range(0.25..4.0), rng.random_range(0.25..4.0)];
        let g = f.rescale(&c)?;
        let cert = check_linear_biholomorphism(&f, m, &g, m, &LinearMapCandidate::diagonal(&c)?, depth, EIGEN_TOL)?;
        let own = membership(&f, m, &build_model(&f, m, depth)?.generators(), EIGEN_TOL)?.min_eigenvalue();
        rescale_ok &= cert.passes() && (cert.forward_min_eigenvalue - own).abs() <= EIGEN_TOL;
    }
    notes.push(format!("(a) rescaling {}", if rescale_ok { "pass" } else { "FAIL" }));

    // (b) doubling the row ball
    let ball = PositiveRegularFunction::row_ball(2);
    let cert = check_linear_biholomorphism(&ball, 1, &ball, 1, &LinearMapCandidate::diagonal(&[2.0, 2.0])?, depth, EIGEN_TOL)?;
    let doubling_ok = !cert.forward.member && (cert.forward_min_eigenvalue + 3.0).abs() <= EIGEN_TOL;
    notes.push(format!("(b) min eigenvalue {:.12}", cert.forward_min_eigenvalue));

    // (c) iteration probe
    let disc = PositiveRegularFunction::from_terms(1, &[("1", 1.0)])?;
    let quad = |eps: f64| FreeSeries::from_real_terms(1, 2, &[("1", 1.0), ("11", eps)]);
    let p1 = cartan_iteration_probe(&[quad(1.0)?], &disc, 1, 2, 10_001, EIGEN_TOL)?;
    let p2 = cartan_iteration_probe(&[quad(1e-3)?], &disc, 1, 2, 10_001, EIGEN_TOL)?;
    let c1 = p1.contradiction.as_ref().map(|w| w.index);
    let c2 = p2.contradiction.as_ref().map(|w| w.index);
    let probe_ok = c1 == Some(2)
        && p1.norm_violation.is_some_and(|k| k <= 2)
        && c2.is_some_and(|k| k <= 10_001)
        && p2.norm_violation.is_some_and(|k| k <= 10_001);
    notes.push(format!(
        "(c) z+z^2: norm index {:?}, contradiction index {:?}; z+1e-3 z^2: norm index {:?}, contradiction index {:?}",
        p1.norm_violation, c1, p2.norm_violation, c2
    ));

    // (d) certificate symmetry
    let omega = PositiveRegularFunction::from_terms(2, &[("1", 1.0), ("2", 1.0), ("12", 1.0)])?;
    let mut symmetric = 0;
    let mut passes = 0;
    for case in 0..20 {
        let (f, g) = if case % 2 == 0 { (&ball, &ball) } else { (&omega, &ball) };
        let raw = random_matrix(&mut rng, 2, 2);
        let scaled = match case % 4 {
            // unitaries, then slightly shrunk unitaries, then general matrices
            0 => raw.qr().q(),
            1 => raw.qr().q() * C64::new(0.9, 0.0),
            _ => raw.clone() * C64::new(rng.random_range(0.3..1.2) / op_norm(&raw), 0.0),
        };
        let u = match LinearMapCandidate::new(scaled) {
            Ok(u) => u,
            Err(_) => continue,
        };
        let a = check_linear_biholomorphism(f, 1, g, 1, &u, depth, EIGEN_TOL)?;
        let b = check_linear_biholomorphism(g, 1, f, 1, &u.inverse(), depth, EIGEN_TOL)?;
        if a.forward.member == b.backward.member && a.backward.member == b.forward.member {
            symmetric += 1;
        }
        passes += a.passes() as usize;
    }
    let symmetry_ok = symmetric == 20;
    notes.push(format!("(d) {symmetric}/20 consistent, {passes} passing"));

    let failed = [rescale_ok, doubling_ok, probe_ok, symmetry_ok].iter().filter(|&&ok| !ok).count();
    Ok(CriterionResult {
        id: 9,
        name: "rigidity suite",
        pass: failed == 0,
        value: failed as f64,
        tolerance: 0.0,
        cases: 20 + 1 + 2 + 20,
        detail: notes.join("; "),
    })
}

pub fn agler_expansion(seed: u64) -> Result<CriterionResult> {
    let mut rng = rng_for(seed, 10);
    let mut worst = Worst::new();
    for case in 0..50 {
        let n = 1 + case % 3;
        let m = 1 + (case / 3) % 3;
        let d = rng.random_range(1..=4);
        let ball = PositiveRegularFunction::row_ball(n);
        let x = random_tuple(&mut rng, n, d);
        let t = feasible_scale(&ball, m, &x, EIGEN_TOL, 20)?;
        worst.see(agler_consistency(m, &x.scaled(t))?);
    }
    Ok(worst.finish(10, "Agler expansion identity", 1e-12, "max entrywise difference".into()))
}

pub type Criterion = fn(u64) -> Result<CriterionResult>;

pub const CRITERIA: [(u32, &str, Criterion); 10] = [
    (1, "weight oracle equivalence", weight_oracle_equivalence),
    (2, "rank-one model defect", rank_one_defect),
    (3, "row contraction and grade bounds", row_contraction_and_grades),
    (4, "Berezin moment reproduction", berezin_moments),
    (5, "kernel and resolvent Berezin forms", berezin_form_agreement),
    (6, "von Neumann inequality at depth 6", von_neumann),
    (7, "Hardy-norm monotonicity in depth and radius", hardy_monotonicity),
    (8, "composition coherence", composition_coherence),
    (9, "rigidity suite", rigidity_suite),
    (10, "Agler expansion identity", agler_expansion),
];

/// Runs a criterion, turning a computation error into a failed result.
pub fn run_criterion(id: u32, name: &'static str, run: Criterion, seed: u64) -> CriterionResult {
    run(seed).unwrap_or_else(|e| CriterionResult {
        id,
        name,
        pass: false,
        value: f64::INFINITY,
        tolerance: 0.0,
        cases: 0,
        detail: format!("computation error: {e}"),
    })
}

pub fn run_suite(seed: u64) -> SuiteReport {
    let criteria = CRITERIA.iter().map(|&(id, name, run)| run_criterion(id, name, run, seed)).collect();
    SuiteReport { seed, criteria }
}
