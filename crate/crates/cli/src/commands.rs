//! Subcommand dispatch. Each command returns its results and judged checks;
//! `main` wraps them into a report.

use std::fs;
use std::path::{Path, PathBuf};

use ncdomain::acceptance::{run_suite, DEFAULT_SEED};
use ncdomain::berezin::{berezin_kernel, berezin_transform_resolvent};
use ncdomain::cp_maps::membership;
use ncdomain::fock_model::{hardy_norm_estimate, HereditaryTerm};
use ncdomain::io::{matrix_to_json, read_json, series_from_json, series_to_json, symbol_from_json, tuple_from_json, tuple_to_json, matrix_from_json};
use ncdomain::linalg::{hermitian_eigenvalues, identity, max_abs, max_abs_diff, vacuum_projection, Mat};
use ncdomain::rigidity::{cartan_iteration_probe, check_linear_biholomorphism, LinearMapCandidate, ProbeOutcome};
use ncdomain::tolerances::Tolerances;
use ncdomain::{build_model, weights_direct, weights_oracle, Error, FreeSeries, OperatorTuple, PositiveRegularFunction, Word};
use serde_json::{json, Value};

use crate::config::{parse_config, validate_depth, DomainConfig};
use crate::report::{Check, InputDigest, ReportBody};
use crate::{Cli, Command, DomainArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Settings after merging flags over the optional config file.
struct Context {
    config: Option<DomainConfig>,
    depth: Option<usize>,
    tolerances: Tolerances,
    seed: Option<u64>,
    digest: InputDigest,
    checks: Vec<Check>,
}

impl Context {
    fn new(cli: &Cli) -> CliResult<Self> {
        let mut digest = InputDigest::default();
        let config = match &cli.global.config {
            Some(p) => {
                digest.add("config", &read_bytes(p)?);
                Some(parse_config(p)?)
            }
            None => None,
        };
        let mut tolerances = config.as_ref().map(|c| c.tolerances).unwrap_or_default();
        if let Some(t) = cli.global.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!("--tol must be a finite nonnegative number, got {t}")));
            }
            tolerances.eigen = t;
        }
        let depth = cli.global.depth.or(config.as_ref().map(|c| c.depth));
        let seed = cli.global.seed.or(config.as_ref().and_then(|c| c.seed));
        digest.add("n", format!("{:?}", config.as_ref().map(|c| c.n)).as_bytes());
        digest.add("depth", format!("{depth:?}").as_bytes());
        digest.add("tolerances", format!("{tolerances:?}").as_bytes());
        digest.add("seed", format!("{seed:?}").as_bytes());
        Ok(Self { config, depth, tolerances, seed, digest, checks: Vec::new() })
    }

    fn input_file(&mut self, label: &str, path: &Path) -> CliResult<Value> {
        self.digest.add(label, &read_bytes(path)?);
        Ok(read_json(path)?)
    }

    fn param(&mut self, label: &str, value: impl std::fmt::Debug) {
        self.digest.add(label, format!("{value:?}").as_bytes());
    }

    fn symbol(&mut self, args: &DomainArgs) -> CliResult<PositiveRegularFunction> {
        match (&args.symbol, &self.config) {
            (Some(p), _) => {
                let v = self.input_file("symbol", p)?;
                Ok(symbol_from_json(&v)?)
            }
            (None, Some(c)) => Ok(c.symbol.clone()),
            (None, None) => Err(CliError::Usage("a symbol is required (--symbol or --config)".into())),
        }
    }

    fn order(&mut self, args: &DomainArgs) -> CliResult<usize> {
        let m = args
            .m
            .or(self.config.as_ref().map(|c| c.m))
            .ok_or_else(|| CliError::Usage("positivity order is required (-m or --config)".into()))?;
        if m == 0 {
            return Err(CliError::Usage("-m must be at least 1".into()));
        }
        self.param("m", m);
        Ok(m)
    }

    fn depth_for(&mut self, n: usize) -> CliResult<usize> {
        let depth = self.depth.ok_or_else(|| CliError::Usage("a truncation depth is required (--depth or --config)".into()))?;
        validate_depth(n, depth)?;
        Ok(depth)
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, value: f64, tolerance: f64) {
        self.checks.push(Check { name: name.into(), pass, value, tolerance });
    }

    /// `value <= tolerance`.
    fn check_at_most(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        self.check(name, value <= tolerance, value, tolerance);
    }

    fn eigen(&self) -> f64 {
        self.tolerances.eigen
    }
}

fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Compute(Error::Format(format!("{}: {e}", path.display()))))
}

fn read_series_files(ctx: &mut Context, label: &str, paths: &[PathBuf]) -> CliResult<Vec<FreeSeries>> {
    paths
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let v = ctx.input_file(&format!("{label}[{i}]"), p)?;
            Ok(series_from_json(&v)?)
        })
        .collect()
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Weights { .. } => "weights",
        Command::Model { .. } => "model",
        Command::Member { .. } => "member",
        Command::Norm { .. } => "norm",
        Command::Compose { .. } => "compose",
        Command::Berezin { .. } => "berezin",
        Command::Biholo { .. } => "biholo",
        Command::ProbeCartan { .. } => "probe-cartan",
        Command::Selftest => "selftest",
    }
}

pub fn run(cli: &Cli) -> CliResult<ReportBody> {
    let mut ctx = Context::new(cli)?;
    let name = command_name(&cli.command);
    ctx.param("command", name);
    let results = match &cli.command {
        Command::Weights { domain } => weights(&mut ctx, domain)?,
        Command::Model { domain, matrices } => model(&mut ctx, domain, *matrices)?,
        Command::Member { domain, tuple } => member(&mut ctx, domain, tuple)?,
        Command::Norm { domain, series, radii } => norm(&mut ctx, domain, series, radii)?,
        Command::Compose { outer, inner, at } => compose(&mut ctx, outer, inner, at.as_deref())?,
        Command::Berezin { domain, tuple, alpha, beta, g, both } => {
            berezin(&mut ctx, domain, tuple, alpha.as_deref(), beta.as_deref(), g.as_deref(), *both)?
        }
        Command::Biholo { domain, target, l, u } => biholo(&mut ctx, domain, target, *l, u)?,
        Command::ProbeCartan { domain, maps, p, max_iterations } => probe(&mut ctx, domain, maps, *p, *max_iterations)?,
        Command::Selftest => selftest(&mut ctx)?,
    };
    let Context { digest, checks, seed, .. } = ctx;
    Ok(ReportBody { command: name.to_string(), inputs_digest: digest.finish(), results, checks, seed })
}

fn weights(ctx: &mut Context, domain: &DomainArgs) -> CliResult<Value> {
    let f = ctx.symbol(domain)?;
    let m = ctx.order(domain)?;
    let depth = ctx.depth_for(f.n())?;
    let direct = weights_direct(&f, m, depth)?;
    let oracle = weights_oracle(&f, m, depth)?;
    ctx.check_at_most("oracle relative difference", direct.max_rel_diff(&oracle), ctx.tolerances.oracle_rel);
    ctx.check_at_most("chain inequality b_{g_i α} >= a_{g_i} b_α", direct.chain_violation(), ctx.tolerances.exact);
    let table = FreeSeries::scalar(
        f.n(),
        depth,
        direct.index().words().iter().zip(direct.values()).map(|(w, &b)| (w.clone(), ncdomain::linalg::c64(b))),
    )?;
    Ok(json!({ "m": m, "depth": depth, "weights": series_to_json(&table) }))
}

fn model(ctx: &mut Context, domain: &DomainArgs, matrices: bool) -> CliResult<Value> {
    let f = ctx.symbol(domain)?;
    let m = ctx.order(domain)?;
    let depth = ctx.depth_for(f.n())?;
    ctx.param("matrices", matrices);
    let model = build_model(&f, m, depth)?;
    let defect_err = max_abs_diff(&model.defect(), &vacuum_projection(model.dim()));
    ctx.check_at_most("defect equals vacuum projection", defect_err, ctx.tolerances.exact);
    let top = hermitian_eigenvalues(&model.row_contraction()).last().copied().unwrap_or(0.0);
    ctx.check_at_most("row contraction excess over I", top - 1.0, ctx.tolerances.exact);
    let mut out = json!({ "n": f.n(), "m": m, "depth": depth, "dim": model.dim() });
    if matrices {
        out["generators"] = tuple_to_json(&model.generators());
    }
    Ok(out)
}

fn member(ctx: &mut Context, domain: &DomainArgs, tuple: &Path) -> CliResult<Value> {
    let f = ctx.symbol(domain)?;
    let m = ctx.order(domain)?;
    let x = tuple_from_json(&ctx.input_file("tuple", tuple)?)?;
    let tol = ctx.eigen();
    let verdict = membership(&f, m, &x, tol)?;
    for (k, &v) in verdict.min_eigenvalues.iter().enumerate() {
        ctx.check(format!("min eigenvalue of (id - Φ)^{}(I)", k + 1), v >= -tol, v, tol);
    }
    Ok(serde_json::to_value(&verdict).expect("verdict serializes"))
}

fn norm(ctx: &mut Context, domain: &DomainArgs, series: &Path, radii: &[f64]) -> CliResult<Value> {
    let f = ctx.symbol(domain)?;
    let m = ctx.order(domain)?;
    let depth = ctx.depth_for(f.n())?;
    let s = series_from_json(&ctx.input_file("series", series)?)?;
    ctx.param("radii", radii);
    let est = hardy_norm_estimate(&s, &f, m, depth, radii)?;
    let worst_drop = est.norms.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    ctx.check_at_most("nondecreasing in r", worst_drop, ctx.tolerances.exact);
    Ok(json!({ "depth": depth, "radii": est.radii, "norms": est.norms, "note": "each value is a lower bound for the Hardy norm" }))
}

fn compose(ctx: &mut Context, outer: &Path, inner: &[PathBuf], at: Option<&Path>) -> CliResult<Value> {
    let f = series_from_json(&ctx.input_file("outer", outer)?)?;
    let phi = read_series_files(ctx, "inner", inner)?;
    let composed = f.compose(&phi)?;
    let mut out = json!({ "composed": series_to_json(&composed) });
    if let Some(path) = at {
        let x = tuple_from_json(&ctx.input_file("at", path)?)?;
        let direct = composed.evaluate(&x)?;
        let images = OperatorTuple::new(phi.iter().map(|p| p.evaluate(&x)).collect::<ncdomain::Result<Vec<_>>>()?)?;
        let nested = f.evaluate(&images)?;
        let rel = max_abs_diff(&direct, &nested) / max_abs(&nested).max(f64::MIN_POSITIVE);
        let exact_degree = f.polynomial_degree() * phi.iter().map(FreeSeries::polynomial_degree).max().unwrap_or(0);
        if composed.degree() >= exact_degree {
            ctx.check_at_most("composition matches nested evaluation (relative)", rel, ctx.tolerances.exact);
        } else {
            out["note"] = json!(format!(
                "composition truncated at degree {} below the exact degree {exact_degree}; nested evaluation differs by {rel:e} (relative)",
                composed.degree()
            ));
        }
        out["value"] = matrix_to_json(&direct);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn berezin(
    ctx: &mut Context,
    domain: &DomainArgs,
    tuple: &Path,
    alpha: Option<&str>,
    beta: Option<&str>,
    g_path: Option<&Path>,
    both: bool,
) -> CliResult<Value> {
    let f = ctx.symbol(domain)?;
    let m = ctx.order(domain)?;
    let depth = ctx.depth_for(f.n())?;
    let t = tuple_from_json(&ctx.input_file("tuple", tuple)?)?;
    let model = build_model(&f, m, depth)?;
    let g: Mat = match (g_path, alpha, beta) {
        (Some(p), _, _) => matrix_from_json(&ctx.input_file("g", p)?)?,
        (None, None, None) => return Err(CliError::Usage("give either --g or --alpha/--beta".into())),
        (None, a, b) => {
            ctx.param("alpha", a);
            ctx.param("beta", b);
            let a = Word::parse(f.n(), a.unwrap_or(""))?;
            let b = Word::parse(f.n(), b.unwrap_or(""))?;
            model.hereditary(&[HereditaryTerm { alpha: a, beta: b, coeff: identity(1) }])?
        }
    };
    ctx.param("both", both);
    let tol = ctx.eigen();
    let kernel = berezin_kernel(&f, m, &t, depth, tol)?;
    let value = kernel.transform(&g)?;
    let mut out = json!({ "depth": depth, "transform": matrix_to_json(&value) });
    if both {
        let r = berezin_transform_resolvent(&f, m, &t, &g, depth, tol)?;
        let diff = max_abs_diff(&value, &r.value);
        ctx.check_at_most("kernel and resolvent forms agree", diff, ctx.tolerances.form);
        out["resolvent"] = matrix_to_json(&r.value);
        out["difference"] = json!(diff);
        out["condition"] = json!(r.condition);
        out["spectral_radius"] = json!(r.spectral_radius);
    }
    Ok(out)
}

fn biholo(ctx: &mut Context, domain: &DomainArgs, target: &Path, l: usize, u: &Path) -> CliResult<Value> {
    let f = ctx.symbol(domain)?;
    let m = ctx.order(domain)?;
    let depth = ctx.depth_for(f.n())?;
    let g = symbol_from_json(&ctx.input_file("target", target)?)?;
    ctx.param("l", l);
    if l == 0 {
        return Err(CliError::Usage("-l must be at least 1".into()));
    }
    let u = LinearMapCandidate::new(matrix_from_json(&ctx.input_file("u", u)?)?)?;
    let tol = ctx.eigen();
    let cert = check_linear_biholomorphism(&f, m, &g, l, &u, depth, tol)?;
    ctx.check("[W^(f)]U in D_g^l", cert.forward.member, cert.forward_min_eigenvalue, tol);
    ctx.check("[W^(g)]U^-1 in D_f^m", cert.backward.member, cert.backward_min_eigenvalue, tol);
    let mut out = serde_json::to_value(&cert).expect("certificate serializes");
    out["verdict"] = json!(if cert.passes() {
        format!("consistent with a linear biholomorphism at depth {depth}")
    } else {
        format!("not a linear biholomorphism (fails at depth {depth})")
    });
    Ok(out)
}

fn probe(ctx: &mut Context, domain: &DomainArgs, maps: &[PathBuf], p: usize, max_iterations: usize) -> CliResult<Value> {
    let f = ctx.symbol(domain)?;
    let m = ctx.order(domain)?;
    validate_depth(f.n(), p)?;
    let maps = read_series_files(ctx, "map", maps)?;
    ctx.param("p", p);
    ctx.param("max_iterations", max_iterations);
    let tol = ctx.eigen();
    let probe = cartan_iteration_probe(&maps, &f, m, p, max_iterations, tol)?;
    let identity_consistent = matches!(probe.outcome, ProbeOutcome::IdentityConsistent);
    ctx.check(
        "F consistent with the identity",
        identity_consistent,
        probe.norm_violation.or(probe.contradiction.as_ref().map(|w| w.index)).unwrap_or(0) as f64,
        tol,
    );
    Ok(serde_json::to_value(&probe).expect("probe serializes"))
}

fn selftest(ctx: &mut Context) -> CliResult<Value> {
    let seed = *ctx.seed.get_or_insert(DEFAULT_SEED);
    ctx.param("suite seed", seed);
    let suite = run_suite(seed);
    for c in &suite.criteria {
        ctx.check(format!("{}. {}", c.id, c.name), c.pass, c.value, c.tolerance);
    }
    Ok(serde_json::to_value(&suite).expect("suite serializes"))
}
