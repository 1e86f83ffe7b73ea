//! Points, convex generators, injective links and their compositions.
//!
//! Everything here is an immutable value; generators and links are shared
//! behind `Arc` so a [`GDivergenceSpec`] is cheap to clone and `Send + Sync`.

mod checks;
mod generator;
mod link;
mod point;
mod spec;

pub use checks::{
    convexity_gap, fenchel_residual, grad_check, gradient_mismatch, link_roundtrip_error,
};
pub use generator::{check_domain, Generator, LinearCombination, Potential, Separable};
pub use link::{Link, StdLink};
pub use point::{validate_point, Point};
pub use spec::{dual_link, DualLink, GDivergenceSpec};
