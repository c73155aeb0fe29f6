//! Stochastic-geometry performance analysis for aerial-aided mmWave NOMA
//! vehicular networks.
//!
//! The crate computes outage probability (OP) and average achievable rate
//! (AAR) for a two-user NOMA downlink assisted by either a tethered flying
//! platform (NTFP) or a roadside unit (RSU), under interference from ground
//! vehicles (a Poisson line Cox process) and UAVs (a binomial point process
//! on a disk). Every closed-form metric has an independent Monte-Carlo
//! counterpart in [`montecarlo`] so the two can be cross-validated.
//!
//! Modules, bottom up:
//! - [`numerics`]: adaptive quadrature, special functions, seeded RNG streams
//! - [`config`]: scenario parameterization and validation
//! - [`geometry`]: point-process samplers and the node deployment builder
//! - [`channel`]: path loss, Nakagami-m fading, LOS models, sectored gains
//! - [`laplace`]: Laplace transforms of the interference sources
//! - [`outage`]: closed-form outage probabilities for DT/RT/HT, NOMA/OMA
//! - [`rate`]: average achievable rate integrals
//! - [`crosspoint`]: NOMA-vs-OMA cross-point values
//! - [`montecarlo`]: the link-level simulation oracle

// Validation guards use `!(x > 0.0)` so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod crosspoint;
pub mod error;
pub mod geometry;
pub mod laplace;
pub mod montecarlo;
pub mod numerics;
pub mod outage;
pub mod rate;

pub use error::{Error, Result};
