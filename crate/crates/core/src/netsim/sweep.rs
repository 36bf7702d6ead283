use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channel_model::{
    rayleigh_channels, sample_channels, ChannelModel, FadingSpec, LayoutSpec, PowerSpec, RicianFactor,
};
use super::rate::sum_rate;
use crate::error::{Error, Result};
use crate::ia_core::{ChannelSet, NetworkConfig, PhaseVector};
use crate::pursuit::{riemannian_pursuit, riemannian_pursuit_with_phase, AlignmentSolution, PursuitOptions};
use crate::scalar::Real;

const BASELINE_STREAM: u64 = u64::MAX;

/// Everything needed to draw one channel realization and solve it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub network: NetworkConfig,
    #[serde(default)]
    pub channel_model: ChannelModel,
    #[serde(default)]
    pub layout: LayoutSpec,
    #[serde(default)]
    pub fading: FadingSpec,
    #[serde(default)]
    pub power: PowerSpec,
    #[serde(default)]
    pub pursuit: PursuitOptions,
}

impl Scenario {
    pub fn new(network: NetworkConfig) -> Self {
        Self {
            network,
            channel_model: ChannelModel::default(),
            layout: LayoutSpec::default(),
            fading: FadingSpec::default(),
            power: PowerSpec::default(),
            pursuit: PursuitOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        self.layout.validate()?;
        self.fading.validate()?;
        self.pursuit.validate()?;
        if !self.power.noise_power_db.is_finite() || !self.power.snr_db.is_finite() {
            return Err(Error::Config("power levels must be finite".into()));
        }
        Ok(())
    }

    pub fn channels<T: Real>(&self, seed: u64) -> Result<ChannelSet<T>> {
        match self.channel_model {
            ChannelModel::Geometric => sample_channels(&self.network, &self.layout, &self.fading, &self.power, seed),
            ChannelModel::Rayleigh => rayleigh_channels(&self.network, &self.power, seed),
        }
    }

    /// Copy of the scenario with one swept parameter replaced.
    pub fn with_value(&self, variable: SweepVariable, value: f64) -> Result<Self> {
        let mut out = self.clone();
        let count = |what: &str| -> Result<usize> {
            if value.is_finite() && value >= 0.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(Error::Config(format!(
                    "{what} must be a non-negative integer, got {value}"
                )))
            }
        };
        match variable {
            SweepVariable::RisElements => out.network.ris_elements = count("RIS element count")?,
            SweepVariable::Snr => out.power.snr_db = value,
            SweepVariable::RicianRt => out.fading.beta_rt = RicianFactor(value),
            SweepVariable::RxAntennas => {
                let m = count("receive antenna count")?;
                out.network.rx_antennas.iter_mut().for_each(|a| *a = m);
            }
        }
        out.validate()?;
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    RisElements,
    Snr,
    RicianRt,
    RxAntennas,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            Self::RisElements => "ris_elements",
            Self::Snr => "snr",
            Self::RicianRt => "rician_rt",
            Self::RxAntennas => "rx_antennas",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Joint optimization of phases and transceivers.
    Optimized,
    /// Phases drawn uniformly at random and held fixed.
    RandomPhase,
    /// Direct links only.
    NoRis,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Self::Optimized => "optimized",
            Self::RandomPhase => "random_phase",
            Self::NoRis => "no_ris",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: Scenario,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub trials: usize,
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub seed: u64,
    /// When false every `wall_ms` is zero, keeping output byte-reproducible.
    #[serde(default)]
    pub record_wall_time: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.values.is_empty() || self.trials == 0 || self.schemes.is_empty() {
            return Err(Error::Config("sweep needs at least one value, trial and scheme".into()));
        }
        if !self.values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("sweep values must be strictly increasing".into()));
        }
        for &v in &self.values {
            self.base.with_value(self.variable, v)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub variable: String,
    pub value: f64,
    pub scheme: Scheme,
    pub trial: usize,
    /// Detected rank, `-1` when no feasible rank was found.
    pub rank: i64,
    pub dof: f64,
    pub residual: Option<f64>,
    pub sum_rate_bps_hz: Option<f64>,
    pub wall_ms: u64,
}

/// Holds the phases at one uniform random draw and runs the rank pursuit
/// over the transceivers only.
pub fn random_phase_baseline<T: Real>(ch: &ChannelSet<T>, opts: &PursuitOptions) -> Result<AlignmentSolution<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(BASELINE_STREAM);
    let angles: Vec<T> = (0..ch.ris_elements())
        .map(|_| T::lit(rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    riemannian_pursuit_with_phase(ch, opts, PhaseVector::from_angles(&angles))
}

pub fn run_scheme<T: Real>(scheme: Scheme, ch: &ChannelSet<T>, opts: &PursuitOptions) -> Result<AlignmentSolution<T>> {
    match scheme {
        Scheme::Optimized => riemannian_pursuit(ch, opts),
        Scheme::RandomPhase => random_phase_baseline(ch, opts),
        Scheme::NoRis => riemannian_pursuit(&ch.without_ris(), opts),
    }
}

fn run_trial(spec: &SweepSpec, value_idx: usize, trial: usize) -> Vec<ExperimentRecord> {
    let value = spec.values[value_idx];
    let seed = spec.seed.wrapping_add(trial as u64);
    let scenario = spec.base.with_value(spec.variable, value).expect("validated up front");
    let opts = PursuitOptions {
        seed,
        ..scenario.pursuit.clone()
    };
    let channels = scenario.channels::<f64>(seed);

    spec.schemes
        .iter()
        .map(|&scheme| {
            let start = Instant::now();
            let solved = channels.as_ref().map_err(Clone::clone).and_then(|ch| {
                let sol = run_scheme(scheme, ch, &opts)?;
                let rate = match (sol.feasible, scheme) {
                    (false, _) => None,
                    (true, Scheme::NoRis) => sum_rate(&ch.without_ris(), &sol, scenario.power.snr_db).ok(),
                    (true, _) => sum_rate(ch, &sol, scenario.power.snr_db).ok(),
                };
                Ok((sol, rate))
            });
            let wall_ms = if spec.record_wall_time {
                start.elapsed().as_millis() as u64
            } else {
                0
            };
            let (rank, dof, residual, sum_rate_bps_hz) = match solved {
                Ok((sol, rate)) if sol.feasible => (sol.rank as i64, sol.dof.unwrap_or(0.0), Some(sol.residual), rate),
                Ok((sol, _)) => (-1, 0.0, Some(sol.residual), None),
                Err(_) => (-1, 0.0, None, None),
            };
            ExperimentRecord {
                variable: spec.variable.name().to_string(),
                value,
                scheme,
                trial,
                rank,
                dof,
                residual,
                sum_rate_bps_hz,
                wall_ms,
            }
        })
        .collect()
}

/// Runs every (value, trial) cell in parallel on the current rayon pool.
/// Records come back ordered by value, then scheme, then trial, regardless
/// of scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ExperimentRecord>> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = (0..spec.values.len())
        .flat_map(|v| (0..spec.trials).map(move |t| (v, t)))
        .collect();
    let mut records: Vec<(usize, usize, ExperimentRecord)> = jobs
        .par_iter()
        .flat_map_iter(|&(v, t)| {
            run_trial(spec, v, t)
                .into_iter()
                .enumerate()
                .map(move |(s, rec)| (v, s, rec))
        })
        .collect();
    records.sort_by_key(|(v, s, rec)| (*v, *s, rec.trial));
    Ok(records.into_iter().map(|(_, _, rec)| rec).collect())
}
