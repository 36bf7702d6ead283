//! Problem data and the linear/bilinear operators behind the alignment
//! conditions.
//!
//! Layout conventions used throughout:
//! - `vec` is column-major;
//! - blocks of the target, residual and phase system are ordered
//!   `(1,1), (1,2), …, (1,K), (2,1), …, (K,K)`;
//! - rows of `X` are grouped pair-major, then receive antenna, then stream
//!   (pair `i` owns a band of height `M_i d_i`, antenna `m` a sub-band of
//!   height `d_i`); columns likewise with `N_j`, `d_j`.

mod channels;
mod config;
pub(crate) mod operator;
pub(crate) mod phase;

pub use channels::{composite_channel, ChannelGrid, ChannelSet, PhaseVector};
pub use config::NetworkConfig;
pub use operator::{
    adjoint_a2, apply_a2, apply_a2_to_matrix, build_target, f2_value_grad, objective_f0, FactorPair, TargetVector,
};
pub use phase::{assemble_phase_system, f1_value_grad, PhaseSystem};
