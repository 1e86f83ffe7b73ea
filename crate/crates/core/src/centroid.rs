//! Weighted g-Bregman centroids and Lloyd-style clustering.
//!
//! The right centroid `argmin_q Σ w_ν B^g(p_ν, q)` is the quasi-arithmetic
//! mean `g⁻¹(Σ w_ν g(p_ν))`, and the minimum equals the unscaled multivariate
//! g-Jensen divergence. The left centroid `argmin_q Σ w_ν B^g(q, p_ν)` is the
//! same construction for the dual pair `(F*, ∇F ∘ g)`.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::convex_core::{GDivergenceSpec, Point};
use crate::divergence::{g_bregman, multivariate_g_jensen, same_dim, WeightVector};
use crate::numeric::weighted_sum;
use crate::{Error, Result};

/// Which argument of `B^g` holds the centroid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `B^g(x, c)`
    Right,
    /// `B^g(c, x)`
    Left,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "right" => Ok(Self::Right),
            "left" => Ok(Self::Left),
            other => Err(Error::InvalidParameter(format!(
                "side must be right or left, got {other}"
            ))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Right => "right",
            Self::Left => "left",
        })
    }
}

fn check_inputs(points: &[Point], w: &WeightVector) -> Result<()> {
    if points.is_empty() || points.len() != w.len() {
        return Err(Error::LengthMismatch {
            points: points.len(),
            weights: w.len(),
        });
    }
    for p in &points[1..] {
        same_dim(&points[0], p)?;
    }
    Ok(())
}

/// Quasi-arithmetic mean `g⁻¹(Σ w_ν g(p_ν))`.
pub fn right_centroid(spec: &GDivergenceSpec, points: &[Point], w: &WeightVector) -> Result<Point> {
    check_inputs(points, w)?;
    let linked = points
        .iter()
        .map(|p| spec.linked(p))
        .collect::<Result<Vec<_>>>()?;
    let mean = weighted_sum(&linked, w.as_slice());
    crate::convex_core::check_domain(spec.generator().as_ref(), &mean)?;
    spec.link().invert(&mean)
}

/// Quasi-arithmetic mean under `ĝ = ∇F ∘ g`. Needs a registered conjugate.
pub fn left_centroid(spec: &GDivergenceSpec, points: &[Point], w: &WeightVector) -> Result<Point> {
    right_centroid(&spec.dual()?, points, w)
}

pub fn centroid(
    spec: &GDivergenceSpec,
    points: &[Point],
    w: &WeightVector,
    side: Side,
) -> Result<Point> {
    match side {
        Side::Right => right_centroid(spec, points, w),
        Side::Left => left_centroid(spec, points, w),
    }
}

/// `Σ w_ν B^g(p_ν, q)` (right) or `Σ w_ν B^g(q, p_ν)` (left).
pub fn weighted_objective(
    spec: &GDivergenceSpec,
    points: &[Point],
    w: &WeightVector,
    q: &Point,
    side: Side,
) -> Result<f64> {
    check_inputs(points, w)?;
    let mut total = 0.0;
    for (p, &wi) in points.iter().zip(w.as_slice()) {
        let d = match side {
            Side::Right => g_bregman(spec, p, q)?,
            Side::Left => g_bregman(spec, q, p)?,
        };
        total += wi * d;
    }
    Ok(total)
}

/// The minimum of [`weighted_objective`]: the multivariate g-Jensen divergence
/// of `(F, g)` for the right side, of `(F*, ĝ)` for the left.
pub fn jensen_bound(
    spec: &GDivergenceSpec,
    points: &[Point],
    w: &WeightVector,
    side: Side,
) -> Result<f64> {
    match side {
        Side::Right => multivariate_g_jensen(spec, points, w),
        Side::Left => multivariate_g_jensen(&spec.dual()?, points, w),
    }
}

/// Parameters of [`kmeans`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterConfig {
    pub k: usize,
    pub max_iters: usize,
    /// Stop once the relative objective decrease falls to this value or below.
    pub tol: f64,
    pub seed: u64,
    pub side: Side,
}

impl ClusterConfig {
    pub const DEFAULT_MAX_ITERS: usize = 100;
    pub const DEFAULT_TOL: f64 = 1e-9;

    pub fn new(k: usize) -> Self {
        Self {
            k,
            max_iters: Self::DEFAULT_MAX_ITERS,
            tol: Self::DEFAULT_TOL,
            seed: 0,
            side: Side::Right,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Point>,
    /// Mean divergence to the assigned centroid after each update step.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl ClusterResult {
    pub fn objective(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(0.0)
    }
}

struct Lloyd<'a> {
    spec: &'a GDivergenceSpec,
    side: Side,
}

impl Lloyd<'_> {
    fn dist(&self, x: &Point, c: &Point) -> Result<f64> {
        match self.side {
            Side::Right => g_bregman(self.spec, x, c),
            Side::Left => g_bregman(self.spec, c, x),
        }
    }

    /// Nearest centroid per point; ties go to the lowest index.
    fn assign(&self, data: &[Point], centroids: &[Point]) -> Result<Vec<usize>> {
        data.iter()
            .map(|x| {
                let mut best = (0, f64::INFINITY);
                for (j, c) in centroids.iter().enumerate() {
                    let d = self.dist(x, c)?;
                    if d < best.1 {
                        best = (j, d);
                    }
                }
                Ok(best.0)
            })
            .collect()
    }

    /// Move each empty cluster's centroid onto the point farthest from its
    /// own centroid, taken from a cluster with at least two members.
    fn heal(
        &self,
        data: &[Point],
        centroids: &mut [Point],
        assignments: &mut [usize],
    ) -> Result<()> {
        loop {
            let mut counts = vec![0usize; centroids.len()];
            for &a in assignments.iter() {
                counts[a] += 1;
            }
            let Some(empty) = counts.iter().position(|&c| c == 0) else {
                return Ok(());
            };
            let mut far: Option<(usize, f64)> = None;
            for (i, x) in data.iter().enumerate() {
                if counts[assignments[i]] < 2 {
                    continue;
                }
                let d = self.dist(x, &centroids[assignments[i]])?;
                if far.is_none_or(|(_, best)| d > best) {
                    far = Some((i, d));
                }
            }
            // k ≤ n guarantees a donor cluster exists whenever one is empty.
            let (i, _) = far.expect("an empty cluster implies a cluster with two members");
            centroids[empty] = data[i].clone();
            assignments[i] = empty;
        }
    }

    fn update(&self, data: &[Point], assignments: &[usize], k: usize) -> Result<Vec<Point>> {
        (0..k)
            .map(|j| {
                let members: Vec<Point> = data
                    .iter()
                    .zip(assignments)
                    .filter(|(_, &a)| a == j)
                    .map(|(x, _)| x.clone())
                    .collect();
                let w = WeightVector::uniform(members.len())?;
                match self.side {
                    Side::Right => right_centroid(self.spec, &members, &w),
                    Side::Left => left_centroid(self.spec, &members, &w),
                }
            })
            .collect()
    }

    fn objective(&self, data: &[Point], centroids: &[Point], assignments: &[usize]) -> Result<f64> {
        let mut total = 0.0;
        for (x, &a) in data.iter().zip(assignments) {
            total += self.dist(x, &centroids[a])?;
        }
        Ok(total / data.len() as f64)
    }
}

/// Lloyd iteration under `B^g`, seeded with `k` distinct data points.
pub fn kmeans(
    spec: &GDivergenceSpec,
    data: &[Point],
    cfg: &ClusterConfig,
) -> Result<ClusterResult> {
    if cfg.k == 0 || cfg.max_iters == 0 || cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "k, max_iters and tol must be positive (k = {}, max_iters = {}, tol = {})",
            cfg.k, cfg.max_iters, cfg.tol
        )));
    }
    if data.is_empty() || cfg.k > data.len() {
        return Err(Error::TooManyClusters {
            k: cfg.k,
            n: data.len(),
        });
    }
    for x in &data[1..] {
        same_dim(&data[0], x)?;
    }
    if cfg.side == Side::Left {
        spec.dual()?;
    }

    let lloyd = Lloyd {
        spec,
        side: cfg.side,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut centroids: Vec<Point> = sample(&mut rng, data.len(), cfg.k)
        .into_iter()
        .map(|i| data[i].clone())
        .collect();

    let mut trace: Vec<f64> = Vec::new();
    let mut assignments = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        iterations += 1;
        assignments = lloyd.assign(data, &centroids)?;
        lloyd.heal(data, &mut centroids, &mut assignments)?;
        centroids = lloyd.update(data, &assignments, cfg.k)?;
        let obj = lloyd.objective(data, &centroids, &assignments)?;
        let done = obj == 0.0
            || trace
                .last()
                .is_some_and(|&prev| prev - obj <= cfg.tol * prev.abs());
        trace.push(obj);
        if done {
            converged = true;
            break;
        }
    }

    Ok(ClusterResult {
        assignments,
        centroids,
        objective_trace: trace,
        iterations,
        converged,
    })
}
