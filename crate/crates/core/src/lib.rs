//! Interference alignment for RIS-assisted MIMO device-to-device networks.
//!
//! The crate detects the minimal number of channel uses `r` for which the
//! alignment conditions are feasible, jointly designing the RIS phase vector
//! and the per-pair transceivers. The rank-`r` transceiver product is searched
//! on the full-column-rank factor manifold and the phase vector on the complex
//! circle manifold, alternating the two blocks inside a rank-increase loop.
//!
//! Numeric code is generic over [`Real`] (`f32`/`f64`); the aliases below fix
//! double precision, which is what the tolerances in the tests assume.

// negated comparisons reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod ia_core;
pub mod manifolds;
pub mod netsim;
pub mod pursuit;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

#[cfg(test)]
pub(crate) mod testutil;

pub use ia_core::NetworkConfig;

pub type ChannelSet64 = ia_core::ChannelSet<f64>;
pub type PhaseVector64 = ia_core::PhaseVector<f64>;
pub type FactorPair64 = ia_core::FactorPair<f64>;
pub type AlignmentSolution64 = pursuit::AlignmentSolution<f64>;
pub type ChannelSet32 = ia_core::ChannelSet<f32>;
pub type AlignmentSolution32 = pursuit::AlignmentSolution<f32>;
