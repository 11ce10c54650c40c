//! Restricted numerical shadows of complex matrices.
//!
//! The shadow of an operator `A` is the distribution of `<psi|A|psi>` when
//! `psi` is a random pure state. Restricting `psi` to real, product, maximally
//! entangled or GHZ/W-orbit states gives distributions supported on the
//! corresponding restricted numerical range. This crate provides
//!
//! * seeded samplers for each restricted manifold ([`sampler`]),
//! * a parallel, deterministic Monte Carlo histogram engine ([`shadow`]),
//! * numerical-range boundaries and support masks ([`range`]),
//! * closed-form moments, densities and group integrals ([`analytic`]),
//! * a two-qubit noisy entangling dynamics with PPT classification ([`dynamics`]).

pub mod analytic;
pub mod catalog;
pub mod cli;
pub mod dynamics;
mod error;
pub mod io;
pub mod linalg;
pub mod range;
pub mod sampler;
pub mod shadow;
pub mod stats;
pub mod validate;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix};
pub use num_complex::Complex64;
pub use sampler::{Field, PureState, Restriction, RngStream, SchmidtSpec};
pub use shadow::{GridSpec, MomentEstimate, ShadowHistogram};
