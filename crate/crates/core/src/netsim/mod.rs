//! Experiment layer: geometry, path loss, Rician channel sampling, sum-rate
//! evaluation, baselines and Monte-Carlo sweeps.

mod channel_model;
mod rate;
mod sweep;

pub use channel_model::{
    path_loss, rayleigh_channels, sample_channels, ChannelModel, FadingSpec, LayoutSpec, LosModel, PowerSpec, Region,
    RicianFactor,
};
pub use rate::{sum_rate, sum_rate_interference_free};
pub use sweep::{
    random_phase_baseline, run_scheme, run_sweep, ExperimentRecord, Scenario, Scheme, SweepSpec, SweepVariable,
};
