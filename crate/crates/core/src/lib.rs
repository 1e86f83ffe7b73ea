//! Generalized Bregman and skew Jensen divergences.
//!
//! A *g-divergence* composes a classical divergence generated by a strictly
//! convex function `F` with an injective elementwise link `g`:
//!
//! ```text
//! B_F^g(p, q)      = B_F(g(p), g(q))
//! B_F,sym^g(p, q)  = <g(p) - g(q), ∇F(g(p)) - ∇F(g(q))>
//! sJ_F,a^g(p, q)   = sJ_F,a(g(p), g(q))
//! ```
//!
//! With the right `(F, g)` pairs these recover several f-divergences (KL,
//! Hellinger, Pearson and Neyman χ², the α family) while keeping the
//! geometric toolkit of Bregman divergences: three-point and four-point
//! identities, the parallelogram law, and centroids that are
//! quasi-arithmetic means.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`convex_core`] | points, generators, links, dual links, gradient and Fenchel checks |
//! | [`catalog`] | the registered `(F, g)` pairs and closed-form f-divergence oracles |
//! | [`divergence`] | Bregman, symmetric Bregman, skew Jensen, multivariate Jensen |
//! | [`centroid`] | right/left centroids and Lloyd-style clustering |
//! | [`identities`] | randomized residual checks for every identity and inequality |
//! | [`cli`] | command-line front end with CSV input and JSON output |
//!
//! ```rust
//! use gdiv::catalog::get_entry;
//! use gdiv::divergence::g_bregman;
//! use gdiv::Point;
//!
//! let entry = get_entry("hellinger", None).unwrap();
//! let p = Point::new(vec![0.25]).unwrap();
//! let q = Point::new(vec![1.0]).unwrap();
//! let d = g_bregman(&entry.spec, &p, &q).unwrap();
//! assert!((d - 0.25).abs() < 1e-12);
//! ```

pub mod catalog;
pub mod centroid;
pub mod cli;
pub mod convex_core;
pub mod divergence;
mod error;
pub mod identities;
pub mod numeric;

pub use convex_core::{
    DualLink, GDivergenceSpec, Generator, Link, Point, Potential, Separable, StdLink,
};
pub use error::{Error, Result};
