#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

//! Adversarial perturbations of Friedkin-Johnsen opinion dynamics.
//!
//! An adversary seeds initial opinions `s` under a norm budget; the network
//! relaxes them to `z = (I+L)^-1 s` and the adversary is scored on a
//! quadratic functional of `z`. Most objectives reduce to the top of the
//! spectrum of `Σ = (I+L)^-1 f(L) (I+L)^-1`, which shares eigenvectors with
//! the Laplacian `L`.
//!
//! - [`graph`]: graphs, Laplacians, cuts, standard families.
//! - [`spectral`]: dense symmetric eigendecomposition and matrix functions.
//! - [`dynamics`]: equilibrium, iteration, disagreement and polarization.
//! - [`adversary`]: ℓ2 / ℓ∞ / ℓ1 attacks, horizon sweeps, sparsity bounds.
//! - [`defense`]: optimal node weights against an ℓ2 adversary.
//! - [`mixed`]: opinion graph and measurement graph that differ.
//! - [`cli`]: report-producing commands behind the `discord-lab` binary.

pub mod adversary;
pub mod cli;
pub mod defense;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod mixed;
pub mod sdp;
pub mod spectral;

pub use error::{Error, Result};
