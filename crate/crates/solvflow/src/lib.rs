//! Construction and verification of one-parameter families of expanding
//! gradient Ricci solitons of cohomogeneity one over solvable Lie groups.
//!
//! The pipeline: a nilpotent Lie algebra with a nilsoliton metric is reduced
//! to dimensionless structure data ([`params::SolvsolitonParams`]); the
//! soliton equations collapse to a quadratic vector field on `(x, y, z, w)`
//! ([`flow`]); orbits are shot from the unstable manifold of the stationary
//! point `gamma_s_plus` ([`shoot`]), integrated with an embedded
//! Dormand–Prince 5(4) scheme ([`integrate`]), monitored against the
//! invariant region and capture conditions ([`monitor`]), reassembled into
//! metric coefficients ([`reconstruct`]), and checked against the predicted
//! asymptotically conical geometry ([`asymptotics`]). [`verify`] bundles the
//! whole battery per preset.

pub mod algebra;
pub mod asymptotics;
pub mod cli;
pub mod einstein;
pub mod error;
pub mod flow;
pub mod integrate;
pub mod monitor;
pub mod noscal;
pub mod params;
pub mod reconstruct;
pub mod report;
pub mod shoot;
pub mod verify;

pub use error::{Result, SolvError};
pub use flow::PhasePoint;
pub use params::SolvsolitonParams;
