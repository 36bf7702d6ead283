//! Block-structured Riemannian pursuit: alternate the fixed-rank transceiver
//! block and the RIS phase block, increasing the rank until the alignment
//! residual falls below the outer tolerance.

mod fixed_rank;
mod rank_loop;
mod transceivers;

pub use fixed_rank::{solve_fixed_rank, AlternationHistory, FixedRankOutcome};
pub use rank_loop::{riemannian_pursuit, riemannian_pursuit_with_phase};
pub use transceivers::{kron_identity, recover_transceivers, verify_alignment, AlignmentReport, Transceivers};

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ia_core::{FactorPair, PhaseVector};
use crate::manifolds::RcgOptions;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PursuitOptions {
    /// Feasibility threshold on `f₀`.
    pub outer_tol: f64,
    /// Maximum number of X/Θ alternations per rank attempt.
    pub max_alternations: usize,
    pub r_start: usize,
    pub r_max: usize,
    pub restarts_per_rank: usize,
    pub inner: RcgOptions,
    /// Seed one restart at rank `r + 1` with the best rank-`r` iterate.
    pub warm_start_rank_increase: bool,
    pub seed: u64,
}

impl Default for PursuitOptions {
    fn default() -> Self {
        Self {
            outer_tol: 1e-4,
            max_alternations: 30,
            r_start: 1,
            r_max: 4,
            restarts_per_rank: 3,
            inner: RcgOptions::default(),
            warm_start_rank_increase: false,
            seed: 0,
        }
    }
}

impl PursuitOptions {
    pub fn validate(&self) -> Result<()> {
        self.inner.validate()?;
        if !(self.outer_tol > 0.0) {
            return Err(Error::Config("outer_tol must be positive".into()));
        }
        if self.max_alternations == 0 || self.restarts_per_rank == 0 || self.r_start == 0 {
            return Err(Error::Config(
                "max_alternations, restarts_per_rank and r_start must be >= 1".into(),
            ));
        }
        if self.r_start > self.r_max {
            return Err(Error::Config(format!(
                "r_start {} exceeds r_max {}",
                self.r_start, self.r_max
            )));
        }
        Ok(())
    }

    /// Leakage tolerance used when certifying a feasible solution: `10·√(2ϵ)`.
    pub fn verification_tol(&self) -> f64 {
        10.0 * (2.0 * self.outer_tol).sqrt()
    }
}

/// One fixed-rank attempt inside the rank loop.
#[derive(Debug, Clone, PartialEq)]
pub struct RankAttempt<T> {
    pub rank: usize,
    pub restart: usize,
    pub history: AlternationHistory<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentSolution<T: Real> {
    pub feasible: bool,
    /// Detected channel uses, or the rank of the best attempt when infeasible.
    pub rank: usize,
    /// Absent without RIS.
    pub phase: Option<PhaseVector<T>>,
    pub factors: FactorPair<T>,
    /// `U_i`, `M_i r × d_i`
    pub decoders: Vec<DMatrix<Complex<T>>>,
    /// `V_j`, `N_j r × d_j`
    pub precoders: Vec<DMatrix<Complex<T>>>,
    /// Final `f₀`.
    pub residual: T,
    /// `Σ d_i / r`, only when feasible.
    pub dof: Option<f64>,
    pub trace: Vec<RankAttempt<T>>,
}

impl<T: Real> AlignmentSolution<T> {
    pub fn phase_or_empty(&self) -> PhaseVector<T> {
        self.phase.clone().unwrap_or_else(PhaseVector::empty)
    }
}
