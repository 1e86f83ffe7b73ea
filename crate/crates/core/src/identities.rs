//! Randomized residual checks for the g-divergence identities and
//! inequalities.
//!
//! Each check draws points uniformly from `[sample_low, sample_high]^dim`
//! with a ChaCha8 stream selected by the trial index, so `(seed, trial)`
//! fixes every sample. Identity residuals are `|lhs - rhs| / (1 + |ref|)`;
//! inequality checks report the smallest observed gap instead.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{CatalogEntry, CatalogKey};
use crate::convex_core::{
    convexity_gap, fenchel_residual, grad_check, gradient_mismatch, link_roundtrip_error,
    GDivergenceSpec, Point,
};
use crate::divergence::{
    g_bregman, g_bregman_sym, g_interpolant, g_skew_jensen, multivariate_g_jensen, SkewWeight,
    WeightVector,
};
use crate::numeric::{dot, rel_residual};
use crate::{Error, Result};

/// Gap below which an inequality counts as violated.
pub const GAP_FLOOR: f64 = -1e-12;
/// Relative tolerance of closed-form oracle comparisons.
pub const ORACLE_REL_TOL: f64 = 1e-10;
/// Skew used to approach the endpoints in the limit check.
pub const LIMIT_EPS: f64 = 1e-4;
/// Tolerance of the limit check, relative to `1 + value`.
pub const LIMIT_TOL: f64 = 1e-3;
/// Tolerance of the central-difference gradient check.
pub const GRAD_TOL: f64 = 1e-6;
/// Tolerance of `g⁻¹(g(p)) = p`.
pub const LINK_ROUNDTRIP_TOL: f64 = 1e-12;
/// Skew values swept by the Bregman-Jensen inequality check.
pub const BJ_SKEW_GRID: [f64; 7] = [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99];
/// Range of sampled skews in identity checks.
pub const SKEW_RANGE: (f64, f64) = (0.05, 0.95);
/// Consecutive failed constructions tolerated before giving up.
pub const MAX_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialConfig {
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
    pub sample_low: f64,
    pub sample_high: f64,
    pub rel_tol: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            dim: 8,
            seed: 0,
            sample_low: 0.1,
            sample_high: 10.0,
            rel_tol: 1e-9,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.trials > 0
            && self.dim > 0
            && self.sample_low > 0.0
            && self.sample_high > self.sample_low
            && self.sample_high.is_finite()
            && self.rel_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "invalid trial configuration: {self:?}"
            )))
        }
    }

    fn rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Point {
        let coords = (0..self.dim)
            .map(|_| rng.gen_range(self.sample_low..self.sample_high))
            .collect();
        Point::new(coords).expect("sample range is strictly positive")
    }

    fn sample_skew(rng: &mut ChaCha8Rng) -> SkewWeight {
        SkewWeight::new(rng.gen_range(SKEW_RANGE.0..SKEW_RANGE.1)).expect("range inside (0, 1)")
    }
}

/// Aggregated outcome of one check on one divergence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity_name: String,
    pub divergence: String,
    pub trials: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_case: Option<Value>,
    /// Smallest gap observed by an inequality check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub pass: bool,
}

impl IdentityReport {
    fn errored(identity: &str, divergence: &str, trials: usize, err: &Error) -> Self {
        Self {
            identity_name: identity.into(),
            divergence: divergence.into(),
            trials,
            max_residual: f64::NAN,
            mean_residual: f64::NAN,
            failures: 0,
            worst_case: None,
            min_gap: None,
            error: Some(err.to_string()),
            pass: false,
        }
    }
}

/// Running max/mean/failure count. `worst_case` is the first trial with the
/// largest residual, failing trials taking precedence; for inequality checks
/// it is the first trial attaining the minimum gap.
struct Tally {
    identity: &'static str,
    divergence: String,
    trials: usize,
    max: f64,
    sum: f64,
    count: usize,
    failures: usize,
    worst: Option<Value>,
    worst_key: (bool, f64),
    min_gap: Option<f64>,
}

impl Tally {
    fn new(identity: &'static str, divergence: String, trials: usize) -> Self {
        Self {
            identity,
            divergence,
            trials,
            max: 0.0,
            sum: 0.0,
            count: 0,
            failures: 0,
            worst: None,
            worst_key: (false, f64::NEG_INFINITY),
            min_gap: None,
        }
    }

    fn residual(&mut self, residual: f64, tol: f64, case: impl FnOnce() -> Value) {
        self.record(residual, residual.is_nan() || residual > tol, case);
    }

    fn record(&mut self, residual: f64, failed: bool, case: impl FnOnce() -> Value) {
        let residual = if residual.is_nan() {
            f64::INFINITY
        } else {
            residual
        };
        self.sum += residual;
        self.count += 1;
        self.max = self.max.max(residual);
        if failed {
            self.failures += 1;
        }
        let key = (failed, residual);
        if self.worst.is_none() || key > self.worst_key {
            self.worst_key = key;
            self.worst = Some(case());
        }
    }

    fn gap(&mut self, gap: f64, case: impl FnOnce() -> Value) {
        let violation = (-gap).max(0.0);
        self.sum += violation;
        self.count += 1;
        self.max = self.max.max(violation);
        if gap.is_nan() || gap < GAP_FLOOR {
            self.failures += 1;
        }
        if self.min_gap.is_none_or(|m| gap < m) {
            self.min_gap = Some(gap);
            self.worst = Some(case());
        }
    }

    fn finish(self) -> IdentityReport {
        IdentityReport {
            identity_name: self.identity.into(),
            divergence: self.divergence,
            trials: self.trials,
            max_residual: self.max,
            mean_residual: if self.count == 0 {
                0.0
            } else {
                self.sum / self.count as f64
            },
            failures: self.failures,
            worst_case: self.worst,
            min_gap: self.min_gap,
            error: None,
            pass: self.failures == 0,
        }
    }
}

fn label(spec: &GDivergenceSpec) -> String {
    format!("{} o {}", spec.generator().name(), spec.link().name())
}

fn pts(points: &[&Point]) -> Value {
    Value::Array(points.iter().map(|p| json!(p.as_slice())).collect())
}

fn grad_at(spec: &GDivergenceSpec, p: &Point) -> Result<(Vec<f64>, Vec<f64>)> {
    let y = spec.linked(p)?;
    let g = spec.generator().grad(&y);
    Ok((y, g))
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Three-point identity and its symmetric form
///
/// ```text
/// B(p,q)     = B(p,r) + B(r,q) - <g(p)-g(r), ∇F(g(q))-∇F(g(r))>
/// Bsym(p,q)  = Bsym(p,r) + Bsym(r,q) - <g(p)-g(r), ∇F(g(q))-∇F(g(r))>
///                                    - <g(q)-g(r), ∇F(g(p))-∇F(g(r))>
/// ```
///
/// Returns the larger of the two residuals, each scaled by `1 + |lhs|`.
pub fn law_of_cosines_residual(
    spec: &GDivergenceSpec,
    p: &Point,
    q: &Point,
    r: &Point,
) -> Result<f64> {
    let (gp, dp) = grad_at(spec, p)?;
    let (gq, dq) = grad_at(spec, q)?;
    let (gr, dr) = grad_at(spec, r)?;
    let cross_pq = dot(&diff(&gp, &gr), &diff(&dq, &dr));
    let cross_qp = dot(&diff(&gq, &gr), &diff(&dp, &dr));

    let lhs = g_bregman(spec, p, q)?;
    let rhs = g_bregman(spec, p, r)? + g_bregman(spec, r, q)? - cross_pq;
    let forward = rel_residual(rhs, lhs);

    let lhs_sym = g_bregman_sym(spec, p, q)?;
    let rhs_sym = g_bregman_sym(spec, p, r)? + g_bregman_sym(spec, r, q)? - cross_pq - cross_qp;
    let symmetric = rel_residual(rhs_sym, lhs_sym);
    Ok(forward.max(symmetric))
}

/// `<∇F(g(r))-∇F(g(s)), g(p)-g(q)> = B(q,r) + B(p,s) - B(p,r) - B(q,s)`,
/// scaled by `1 + max |term|`.
pub fn four_point_residual(
    spec: &GDivergenceSpec,
    p: &Point,
    q: &Point,
    r: &Point,
    s: &Point,
) -> Result<f64> {
    let (gp, _) = grad_at(spec, p)?;
    let (gq, _) = grad_at(spec, q)?;
    let (_, dr) = grad_at(spec, r)?;
    let (_, ds) = grad_at(spec, s)?;
    let lhs = dot(&diff(&dr, &ds), &diff(&gp, &gq));
    let terms = [
        g_bregman(spec, q, r)?,
        g_bregman(spec, p, s)?,
        g_bregman(spec, p, r)?,
        g_bregman(spec, q, s)?,
    ];
    let rhs = terms[0] + terms[1] - terms[2] - terms[3];
    Ok((lhs - rhs).abs() / (1.0 + max_abs(&terms).max(lhs.abs())))
}

/// `s = g⁻¹(g(p) + g(r) - g(q))`, the fourth vertex of the g-parallelogram.
pub fn parallelogram_vertex(
    spec: &GDivergenceSpec,
    p: &Point,
    q: &Point,
    r: &Point,
) -> Result<Point> {
    let (gp, gq, gr) = (spec.linked(p)?, spec.linked(q)?, spec.linked(r)?);
    let y: Vec<f64> = (0..gp.len()).map(|i| gp[i] + gr[i] - gq[i]).collect();
    let s = spec.link().invert(&y)?;
    spec.linked(&s)?;
    Ok(s)
}

fn four_sides(spec: &GDivergenceSpec, quad: [&Point; 4]) -> Result<f64> {
    let [p, q, r, s] = quad;
    Ok(g_bregman_sym(spec, p, q)?
        + g_bregman_sym(spec, q, r)?
        + g_bregman_sym(spec, r, s)?
        + g_bregman_sym(spec, s, p)?)
}

/// Sum of four sides against the two diagonals, scaled by `1 + max(sides, diagonals)`.
pub fn parallelogram_residual(spec: &GDivergenceSpec, quad: [&Point; 4]) -> Result<f64> {
    let [p, q, r, s] = quad;
    let sides = four_sides(spec, quad)?;
    let diagonals = g_bregman_sym(spec, p, r)? + g_bregman_sym(spec, q, s)?;
    Ok((sides - diagonals).abs() / (1.0 + sides.abs().max(diagonals.abs())))
}

/// Residuals of the three division identities at `r = g⁻¹((1-a) g(p) + a g(q))`:
///
/// ```text
/// B(p,q)    = B(p,r) + B(r,q) + a/(1-a) Bsym(r,q)
/// B(q,p)    = B(r,p) + B(q,r) + (1-a)/a Bsym(r,p)
/// Bsym(p,q) = Bsym(p,r)/a + Bsym(r,q)/(1-a)
/// ```
pub fn division_residuals(
    spec: &GDivergenceSpec,
    p: &Point,
    q: &Point,
    a: SkewWeight,
) -> Result<[f64; 3]> {
    let r = g_interpolant(spec, p, q, a)?;
    let (s, t) = (a.complement(), a.value());

    let fwd = [
        g_bregman(spec, p, &r)?,
        g_bregman(spec, &r, q)?,
        t / s * g_bregman_sym(spec, &r, q)?,
    ];
    let lhs_fwd = g_bregman(spec, p, q)?;
    let res_fwd = (lhs_fwd - fwd.iter().sum::<f64>()).abs() / (1.0 + max_abs(&fwd).max(lhs_fwd));

    let inv = [
        g_bregman(spec, &r, p)?,
        g_bregman(spec, q, &r)?,
        s / t * g_bregman_sym(spec, &r, p)?,
    ];
    let lhs_inv = g_bregman(spec, q, p)?;
    let res_inv = (lhs_inv - inv.iter().sum::<f64>()).abs() / (1.0 + max_abs(&inv).max(lhs_inv));

    let sym = [
        g_bregman_sym(spec, p, &r)? / t,
        g_bregman_sym(spec, &r, q)? / s,
    ];
    let lhs_sym = g_bregman_sym(spec, p, q)?;
    let res_sym = (lhs_sym - sym.iter().sum::<f64>()).abs() / (1.0 + max_abs(&sym).max(lhs_sym));

    Ok([res_fwd, res_inv, res_sym])
}

/// `Bsym^g(p,q) - sJ_a^g(p,q)`; nonnegative for every skew.
pub fn bj_gap(spec: &GDivergenceSpec, p: &Point, q: &Point, a: SkewWeight) -> Result<f64> {
    Ok(g_bregman_sym(spec, p, q)? - g_skew_jensen(spec, p, q, a)?)
}

/// `(1/8)(four g-symmetric sides) - J^g_{(¼,¼,¼,¼)}(p,q,r,s)`; nonnegative on
/// g-parallelograms.
pub fn parallelogram_bj_gap(spec: &GDivergenceSpec, quad: [&Point; 4]) -> Result<f64> {
    let sides = four_sides(spec, quad)?;
    let pts: Vec<Point> = quad.iter().map(|&p| p.clone()).collect();
    let w = WeightVector::uniform(4)?;
    Ok(sides / 8.0 - multivariate_g_jensen(spec, &pts, &w)?)
}

fn sample_parallelogram(
    spec: &GDivergenceSpec,
    cfg: &TrialConfig,
    rng: &mut ChaCha8Rng,
) -> Result<[Point; 4]> {
    for _ in 0..MAX_RESAMPLES {
        let p = cfg.sample(rng);
        let q = cfg.sample(rng);
        let r = cfg.sample(rng);
        if let Ok(s) = parallelogram_vertex(spec, &p, &q, &r) {
            return Ok([p, q, r, s]);
        }
    }
    Err(Error::ResampleExhausted {
        attempts: MAX_RESAMPLES,
    })
}

/// Worst [`gradient_mismatch`] of `F` over the linked points. The three- and
/// four-point identities hold for *any* vector field in place of `∇F`, so
/// their checks also confirm that the gradient they use is the gradient of `F`.
pub fn linked_gradient_mismatch(spec: &GDivergenceSpec, points: &[&Point]) -> Result<f64> {
    let gen = spec.generator().as_ref();
    let mut worst = 0.0f64;
    for p in points {
        worst = worst.max(gradient_mismatch(gen, &spec.linked(p)?)?);
    }
    Ok(worst)
}

pub fn check_law_of_cosines(spec: &GDivergenceSpec, cfg: &TrialConfig) -> Result<IdentityReport> {
    cfg.validate()?;
    let mut tally = Tally::new("law_of_cosines", label(spec), cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = cfg.rng(trial);
        let (p, q, r) = (
            cfg.sample(&mut rng),
            cfg.sample(&mut rng),
            cfg.sample(&mut rng),
        );
        let res = law_of_cosines_residual(spec, &p, &q, &r)?;
        let grad = linked_gradient_mismatch(spec, &[&p, &q, &r])?;
        tally.record(
            res,
            !(res <= cfg.rel_tol && grad <= GRAD_TOL),
            || json!({"trial": trial, "p": p, "q": q, "r": r, "gradient_mismatch": grad}),
        );
    }
    Ok(tally.finish())
}

pub fn check_four_point(spec: &GDivergenceSpec, cfg: &TrialConfig) -> Result<IdentityReport> {
    cfg.validate()?;
    let mut tally = Tally::new("four_point", label(spec), cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = cfg.rng(trial);
        let quad: Vec<Point> = (0..4).map(|_| cfg.sample(&mut rng)).collect();
        let refs: Vec<&Point> = quad.iter().collect();
        let res = four_point_residual(spec, refs[0], refs[1], refs[2], refs[3])?;
        let grad = linked_gradient_mismatch(spec, &refs)?;
        tally.record(
            res,
            !(res <= cfg.rel_tol && grad <= GRAD_TOL),
            || json!({"trial": trial, "pqrs": pts(&refs), "gradient_mismatch": grad}),
        );
    }
    Ok(tally.finish())
}

pub fn check_parallelogram(spec: &GDivergenceSpec, cfg: &TrialConfig) -> Result<IdentityReport> {
    cfg.validate()?;
    let mut tally = Tally::new("parallelogram", label(spec), cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = cfg.rng(trial);
        let [p, q, r, s] = sample_parallelogram(spec, cfg, &mut rng)?;
        let res = parallelogram_residual(spec, [&p, &q, &r, &s])?;
        tally.residual(
            res,
            cfg.rel_tol,
            || json!({"trial": trial, "pqrs": pts(&[&p, &q, &r, &s])}),
        );
    }
    Ok(tally.finish())
}

pub fn check_division_lemmas(spec: &GDivergenceSpec, cfg: &TrialConfig) -> Result<IdentityReport> {
    cfg.validate()?;
    let mut tally = Tally::new("division_lemmas", label(spec), cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = cfg.rng(trial);
        let (p, q) = (cfg.sample(&mut rng), cfg.sample(&mut rng));
        let a = TrialConfig::sample_skew(&mut rng);
        let res = division_residuals(spec, &p, &q, a)?;
        let worst = res.iter().fold(0.0f64, |m, &r| m.max(r));
        tally.residual(
            worst,
            cfg.rel_tol,
            || json!({"trial": trial, "p": p, "q": q, "a": a, "residuals": res}),
        );
    }
    Ok(tally.finish())
}

pub fn check_bj_inequality(spec: &GDivergenceSpec, cfg: &TrialConfig) -> Result<IdentityReport> {
    cfg.validate()?;
    let mut tally = Tally::new("bj_inequality", label(spec), cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = cfg.rng(trial);
        let (p, q) = (cfg.sample(&mut rng), cfg.sample(&mut rng));
        for a in BJ_SKEW_GRID {
            let a = SkewWeight::new(a)?;
            let gap = bj_gap(spec, &p, &q, a)?;
            tally.gap(gap, || json!({"trial": trial, "p": p, "q": q, "a": a}));
        }
    }
    Ok(tally.finish())
}

pub fn check_parallelogram_bj(spec: &GDivergenceSpec, cfg: &TrialConfig) -> Result<IdentityReport> {
    cfg.validate()?;
    let mut tally = Tally::new("parallelogram_bj", label(spec), cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = cfg.rng(trial);
        let [p, q, r, s] = sample_parallelogram(spec, cfg, &mut rng)?;
        let gap = parallelogram_bj_gap(spec, [&p, &q, &r, &s])?;
        tally.gap(
            gap,
            || json!({"trial": trial, "pqrs": pts(&[&p, &q, &r, &s])}),
        );
    }
    Ok(tally.finish())
}

/// Forward, symmetric and skew Jensen values against the entry's closed
/// forms, relative error `|x - oracle| / (oracle + 1e-300)`.
pub fn check_oracle(entry: &CatalogEntry, cfg: &TrialConfig) -> Result<IdentityReport> {
    cfg.validate()?;
    let spec = &entry.spec;
    let mut tally = Tally::new("oracle", entry.key.to_string(), cfg.trials);
    let rel = |x: f64, o: f64| (x - o).abs() / (o.abs() + 1e-300);
    for trial in 0..cfg.trials {
        let mut rng = cfg.rng(trial);
        let (p, q) = (cfg.sample(&mut rng), cfg.sample(&mut rng));
        let a = TrialConfig::sample_skew(&mut rng);
        let mut worst = 0.0f64;
        if let Some(f) = &entry.oracle_forward {
            worst = worst.max(rel(g_bregman(spec, &p, &q)?, f(&p, &q)));
        }
        if let Some(f) = &entry.oracle_symmetric {
            worst = worst.max(rel(g_bregman_sym(spec, &p, &q)?, f(&p, &q)));
        }
        if let Some(f) = &entry.oracle_skew_jensen {
            worst = worst.max(rel(g_skew_jensen(spec, &p, &q, a)?, f(&p, &q, a.value())));
        }
        tally.residual(
            worst,
            ORACLE_REL_TOL,
            || json!({"trial": trial, "p": p, "q": q, "a": a}),
        );
    }
    Ok(tally.finish())
}

/// Skew Jensen at `a = ε` and `a = 1 - ε` against `B^g(q,p)` and `B^g(p,q)`.
pub fn check_limits(spec: &GDivergenceSpec, cfg: &TrialConfig) -> Result<IdentityReport> {
    cfg.validate()?;
    let lo = SkewWeight::new(LIMIT_EPS)?;
    let hi = SkewWeight::new(1.0 - LIMIT_EPS)?;
    let mut tally = Tally::new("limits", label(spec), cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = cfg.rng(trial);
        let (p, q) = (cfg.sample(&mut rng), cfg.sample(&mut rng));
        let at_zero = rel_residual(g_skew_jensen(spec, &p, &q, lo)?, g_bregman(spec, &q, &p)?);
        let at_one = rel_residual(g_skew_jensen(spec, &p, &q, hi)?, g_bregman(spec, &p, &q)?);
        tally.residual(
            at_zero.max(at_one),
            LIMIT_TOL,
            || json!({"trial": trial, "p": p, "q": q}),
        );
    }
    Ok(tally.finish())
}

/// `B_F^g(q,p) = B_{F*}^{ĝ}(p,q)`.
pub fn check_duality(spec: &GDivergenceSpec, cfg: &TrialConfig) -> Result<IdentityReport> {
    cfg.validate()?;
    let dual = spec.dual()?;
    let mut tally = Tally::new("duality", label(spec), cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = cfg.rng(trial);
        let (p, q) = (cfg.sample(&mut rng), cfg.sample(&mut rng));
        let res = rel_residual(g_bregman(&dual, &p, &q)?, g_bregman(spec, &q, &p)?);
        tally.residual(res, cfg.rel_tol, || json!({"trial": trial, "p": p, "q": q}));
    }
    Ok(tally.finish())
}

/// Generator and link sanity: central-difference gradient, Fenchel equality
/// (when a conjugate exists), midpoint strict convexity and link round trip.
///
/// The residual of a trial is the worst of the four, each divided by its own
/// tolerance, so a trial passes when the residual is at most 1.
pub fn check_generator(spec: &GDivergenceSpec, cfg: &TrialConfig) -> Result<IdentityReport> {
    cfg.validate()?;
    let gen = spec.generator().as_ref();
    let has_conjugate = gen.conjugate().is_some();
    let mut tally = Tally::new("generator", label(spec), cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = cfg.rng(trial);
        let (x, y) = (cfg.sample(&mut rng), cfg.sample(&mut rng));
        let step = grad_step(&x);
        let grad = grad_check(gen, &x, step)? / GRAD_TOL;
        let fenchel = if has_conjugate {
            let scale = 1.0 + gen.eval(&x).abs();
            fenchel_residual(gen, &x)? / scale / cfg.rel_tol
        } else {
            0.0
        };
        let convex = if convexity_gap(gen, &x, &y)? > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let link = link_roundtrip_error(spec.link().as_ref(), &x)? / LINK_ROUNDTRIP_TOL;
        let worst = grad.max(fenchel).max(convex).max(link);
        tally.residual(
            worst,
            1.0,
            || json!({"trial": trial, "x": x, "y": y, "grad": grad * GRAD_TOL}),
        );
    }
    Ok(tally.finish())
}

/// Central-difference step for [`grad_check`]: a fixed fraction of the
/// smallest coordinate keeps every probe inside positive domains.
pub fn grad_step(x: &[f64]) -> f64 {
    1e-4 * x.iter().fold(f64::INFINITY, |m, v| m.min(v.abs())).min(1.0)
}

/// Check families selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Cosines,
    FourPoint,
    Parallelogram,
    Division,
    Bj,
    Pbj,
    Oracle,
    Limits,
    Duality,
    Generator,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Cosines,
        Suite::FourPoint,
        Suite::Parallelogram,
        Suite::Division,
        Suite::Bj,
        Suite::Pbj,
        Suite::Oracle,
        Suite::Limits,
        Suite::Duality,
        Suite::Generator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cosines => "cosines",
            Self::FourPoint => "four-point",
            Self::Parallelogram => "parallelogram",
            Self::Division => "division",
            Self::Bj => "bj",
            Self::Pbj => "pbj",
            Self::Oracle => "oracle",
            Self::Limits => "limits",
            Self::Duality => "duality",
            Self::Generator => "generator",
        }
    }

    /// The report name produced by this suite.
    pub fn identity_name(self) -> &'static str {
        match self {
            Self::Cosines => "law_of_cosines",
            Self::FourPoint => "four_point",
            Self::Parallelogram => "parallelogram",
            Self::Division => "division_lemmas",
            Self::Bj => "bj_inequality",
            Self::Pbj => "parallelogram_bj",
            Self::Oracle => "oracle",
            Self::Limits => "limits",
            Self::Duality => "duality",
            Self::Generator => "generator",
        }
    }

    pub fn run(self, entry: &CatalogEntry, cfg: &TrialConfig) -> Result<IdentityReport> {
        let spec = &entry.spec;
        let mut report = match self {
            Self::Cosines => check_law_of_cosines(spec, cfg),
            Self::FourPoint => check_four_point(spec, cfg),
            Self::Parallelogram => check_parallelogram(spec, cfg),
            Self::Division => check_division_lemmas(spec, cfg),
            Self::Bj => check_bj_inequality(spec, cfg),
            Self::Pbj => check_parallelogram_bj(spec, cfg),
            Self::Oracle => check_oracle(entry, cfg),
            Self::Limits => check_limits(spec, cfg),
            Self::Duality => check_duality(spec, cfg),
            Self::Generator => check_generator(spec, cfg),
        }?;
        report.divergence = entry.key.to_string();
        Ok(report)
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s}")))
    }
}

/// Run every requested suite over every requested entry, in entry-major
/// order. A failing check becomes a report with `error` set; siblings still run.
pub fn run_suites(keys: &[CatalogKey], suites: &[Suite], cfg: &TrialConfig) -> Vec<IdentityReport> {
    let mut reports = Vec::new();
    for &key in keys {
        let entry = match key.entry() {
            Ok(e) => e,
            Err(err) => {
                for suite in suites {
                    reports.push(IdentityReport::errored(
                        suite.identity_name(),
                        &key.to_string(),
                        cfg.trials,
                        &err,
                    ));
                }
                continue;
            }
        };
        for &suite in suites {
            reports.push(suite.run(&entry, cfg).unwrap_or_else(|err| {
                IdentityReport::errored(suite.identity_name(), &key.to_string(), cfg.trials, &err)
            }));
        }
    }
    reports
}

/// Every suite over the given entries.
pub fn run_all(keys: &[CatalogKey], cfg: &TrialConfig) -> Vec<IdentityReport> {
    run_suites(keys, &Suite::ALL, cfg)
}
