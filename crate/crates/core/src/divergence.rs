//! Bregman, symmetric Bregman and skew Jensen divergences, plain and
//! g-composed.
//!
//! Two Jensen forms live here and are kept apart by name:
//!
//! * [`skew_jensen_scaled`] / [`g_skew_jensen`]: the bivariate form carrying
//!   the `1/(a(1-a))` factor, whose limits at `a → 0, 1` are Bregman
//!   divergences.
//! * [`multivariate_g_jensen`]: the unscaled weighted form, which is the
//!   minimum of the weighted g-Bregman objective.
//!
//! Every divergence passes through a roundoff floor: values in `[-1e-12, 0)`
//! become `0`, anything lower is reported as [`Error::ConvexityViolation`].

use serde::Serialize;

use crate::convex_core::{check_domain, GDivergenceSpec, Generator, Point};
use crate::numeric::{dot, interpolate, weighted_sum};
use crate::{Error, Result};

/// Largest negative value attributed to roundoff.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

/// Tolerance on `Σ w = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Skew parameter in the open interval `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct SkewWeight(f64);

impl SkewWeight {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidParameter(format!(
                "skew weight must lie in (0, 1), got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - a`.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("weight vector is empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "weights must be finite and nonnegative, got {w}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "weights must sum to 1, got {total}"
            )));
        }
        Ok(Self(weights))
    }

    /// `1/n` repeated `n` times.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("weight vector is empty".into()));
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    /// Scale nonnegative weights to sum to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "weights must have a positive finite sum, got {total}"
            )));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn same_dim(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() == y.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        })
    }
}

pub(crate) fn floor_roundoff(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -ROUNDOFF_FLOOR {
        Ok(0.0)
    } else {
        Err(Error::ConvexityViolation(v))
    }
}

/// `F(x) - F(y) - <x - y, ∇F(y)>`.
pub fn bregman(gen: &dyn Generator, x: &[f64], y: &[f64]) -> Result<f64> {
    same_dim(x, y)?;
    check_domain(gen, x)?;
    check_domain(gen, y)?;
    floor_roundoff(bregman_unchecked(gen, x, y))
}

pub(crate) fn bregman_unchecked(gen: &dyn Generator, x: &[f64], y: &[f64]) -> f64 {
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    gen.eval(x) - gen.eval(y) - dot(&diff, &gen.grad(y))
}

/// `<x - y, ∇F(x) - ∇F(y)>`, equal to `B_F(x, y) + B_F(y, x)`.
pub fn bregman_sym(gen: &dyn Generator, x: &[f64], y: &[f64]) -> Result<f64> {
    same_dim(x, y)?;
    check_domain(gen, x)?;
    check_domain(gen, y)?;
    floor_roundoff(bregman_sym_unchecked(gen, x, y))
}

pub(crate) fn bregman_sym_unchecked(gen: &dyn Generator, x: &[f64], y: &[f64]) -> f64 {
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let gdiff: Vec<f64> = gen
        .grad(x)
        .into_iter()
        .zip(gen.grad(y))
        .map(|(a, b)| a - b)
        .collect();
    dot(&diff, &gdiff)
}

/// `(1/(a(1-a))) ((1-a)F(x) + aF(y) - F((1-a)x + ay))`.
pub fn skew_jensen_scaled(gen: &dyn Generator, x: &[f64], y: &[f64], a: SkewWeight) -> Result<f64> {
    same_dim(x, y)?;
    check_domain(gen, x)?;
    check_domain(gen, y)?;
    let mid = interpolate(x, y, a.value());
    check_domain(gen, &mid)?;
    if x == y {
        return Ok(0.0);
    }
    let (s, t) = (a.complement(), a.value());
    let raw = (s * gen.eval(x) + t * gen.eval(y) - gen.eval(&mid)) / (s * t);
    floor_roundoff(raw)
}

/// `Σ w_ν F(x_ν) - F(Σ w_ν x_ν)` on raw generator coordinates.
pub fn multivariate_jensen(gen: &dyn Generator, xs: &[Vec<f64>], w: &WeightVector) -> Result<f64> {
    if xs.len() != w.len() {
        return Err(Error::LengthMismatch {
            points: xs.len(),
            weights: w.len(),
        });
    }
    let first = xs.first().ok_or(Error::LengthMismatch {
        points: 0,
        weights: w.len(),
    })?;
    for x in xs {
        same_dim(first, x)?;
        check_domain(gen, x)?;
    }
    let mean = weighted_sum(xs, w.as_slice());
    check_domain(gen, &mean)?;
    if xs.iter().all(|x| x == first) {
        return Ok(0.0);
    }
    let avg: f64 = xs
        .iter()
        .zip(w.as_slice())
        .map(|(x, wi)| wi * gen.eval(x))
        .sum();
    floor_roundoff(avg - gen.eval(&mean))
}

/// `B_F^g(p, q) = B_F(g(p), g(q))`.
pub fn g_bregman(spec: &GDivergenceSpec, p: &Point, q: &Point) -> Result<f64> {
    same_dim(p, q)?;
    bregman(
        spec.generator().as_ref(),
        &spec.linked(p)?,
        &spec.linked(q)?,
    )
}

/// `B_F,sym^g(p, q) = B_F,sym(g(p), g(q))`.
pub fn g_bregman_sym(spec: &GDivergenceSpec, p: &Point, q: &Point) -> Result<f64> {
    same_dim(p, q)?;
    bregman_sym(
        spec.generator().as_ref(),
        &spec.linked(p)?,
        &spec.linked(q)?,
    )
}

/// `sJ_F,a^g(p, q) = sJ_F,a(g(p), g(q))`.
pub fn g_skew_jensen(spec: &GDivergenceSpec, p: &Point, q: &Point, a: SkewWeight) -> Result<f64> {
    same_dim(p, q)?;
    skew_jensen_scaled(
        spec.generator().as_ref(),
        &spec.linked(p)?,
        &spec.linked(q)?,
        a,
    )
}

/// Unscaled weighted g-Jensen divergence `Σ w_ν F(g(p_ν)) - F(Σ w_ν g(p_ν))`.
pub fn multivariate_g_jensen(
    spec: &GDivergenceSpec,
    points: &[Point],
    w: &WeightVector,
) -> Result<f64> {
    if points.len() != w.len() {
        return Err(Error::LengthMismatch {
            points: points.len(),
            weights: w.len(),
        });
    }
    let linked = points
        .iter()
        .map(|p| spec.linked(p))
        .collect::<Result<Vec<_>>>()?;
    multivariate_jensen(spec.generator().as_ref(), &linked, w)
}

/// The g-interpolant `r = g⁻¹((1-a) g(p) + a g(q))`.
pub fn g_interpolant(spec: &GDivergenceSpec, p: &Point, q: &Point, a: SkewWeight) -> Result<Point> {
    same_dim(p, q)?;
    let mid = interpolate(&spec.link().apply(p), &spec.link().apply(q), a.value());
    spec.link().invert(&mid)
}

/// Both sides of the skew Jensen / Bregman decomposition
///
/// ```text
/// sJ_a^g(p, q) = (1/(a(1-a))) ((1-a) B^g(p, r) + a B^g(q, r)),   g(r) = (1-a) g(p) + a g(q)
/// ```
///
/// returned as `(lhs, rhs)`.
pub fn jensen_bregman_decomposition(
    spec: &GDivergenceSpec,
    p: &Point,
    q: &Point,
    a: SkewWeight,
) -> Result<(f64, f64)> {
    let lhs = g_skew_jensen(spec, p, q, a)?;
    let r = g_interpolant(spec, p, q, a)?;
    let (s, t) = (a.complement(), a.value());
    let rhs = (s * g_bregman(spec, p, &r)? + t * g_bregman(spec, q, &r)?) / (s * t);
    Ok((lhs, rhs))
}
