//! Numerics for the periodic Toda lattice and its stiff deformations:
//! Flaschka variables and Lax matrices, discrete Floquet theory (discriminant,
//! Dirichlet divisor, band structure), inverse spectral reconstruction via
//! orthogonal polynomials, action integrals, and the polytope geometry on the
//! zero-sum hyperplane used to compare Lagrangian products with toric domains.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default `std`
//! feature to use it in that mode. All routines are pure functions over
//! immutable values and deterministic across runs.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod action;
pub mod billiard;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod quad;
pub mod sample;
pub mod spectral;

pub use error::{Error, Result};

/// Library version, embedded in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
