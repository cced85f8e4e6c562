//! Kinematics of body-and-hinge chains and cycles in `R^d`.
//!
//! Hinges are codimension-two affine axes. Each axis is a point of the
//! Grassmannian `G(d-1, d+1)` through its Plücker coordinates, and the
//! singular configurations of end-point and end-frame maps, of hinged
//! cycles and of two-body platforms are exactly the configurations whose
//! axes (or bar lines) fall into a hyperplane section of that Grassmannian.
//! This crate computes those maps, their differentials and rank
//! certificates, in floating point and, where the data is rational, exactly.
//!
//! Module map:
//! - [`exterior`]: wedge products, the top-degree pairing, span ranks.
//! - [`geometry`]: axes, isometries, rotations about axes, incidence.
//! - [`chain`]: forward kinematics, Jacobians, fiber path-following.
//! - [`analysis`]: singularity verdicts for chains, cycles and platforms.
//! - [`linkage`]: canonical bar-joint linkages of generic cycles.
//! - [`scenario`]: declarative scenario descriptions and classical fixtures.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod chain;
mod combinatorics;
mod error;
pub mod exterior;
pub mod geometry;
pub mod linalg;
pub mod linkage;
pub mod scalar;
pub mod scenario;

pub use error::{Error, Result};

/// Default relative tolerance for numerical rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// `n choose k`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    combinatorics::binomial(n, k)
}
