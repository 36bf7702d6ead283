use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::fixed_rank::{solve_fixed_rank_impl, FixedRankOutcome};
use super::{recover_transceivers, AlignmentSolution, PursuitOptions, RankAttempt};
use crate::error::Result;
use crate::ia_core::{ChannelSet, FactorPair, PhaseVector};
use crate::scalar::{cplx, Real};

fn restart_rng(seed: u64, rank: usize, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((rank as u64) << 32) | restart as u64);
    rng
}

fn gaussian_matrix<T: Real>(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> DMatrix<Complex<T>> {
    let s = scale * std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re * s), T::lit(im * s))
    })
}

fn random_phase<T: Real>(rng: &mut ChaCha8Rng, l: usize) -> PhaseVector<T> {
    let angles: Vec<T> = (0..l)
        .map(|_| T::lit(rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    PhaseVector::from_angles(&angles)
}

/// Appends one Gaussian column of Frobenius norm `1e-2 ‖Y‖` to each factor.
fn pad_factors<T: Real>(rng: &mut ChaCha8Rng, f: &FactorPair<T>) -> FactorPair<T> {
    let (m, n, r) = (f.lf.nrows(), f.rf.nrows(), f.rank());
    let mut col = gaussian_matrix::<T>(rng, m + n, 1, 1.0);
    let target = f.stacked().norm() * T::lit(1e-2);
    let cn = col.norm();
    if cn > T::zero() {
        col *= cplx(target / cn);
    }
    let mut lf =
        f.lf.clone()
            .resize_horizontally(r + 1, Complex::new(T::zero(), T::zero()));
    let mut rf =
        f.rf.clone()
            .resize_horizontally(r + 1, Complex::new(T::zero(), T::zero()));
    lf.column_mut(r).copy_from(&col.rows(0, m));
    rf.column_mut(r).copy_from(&col.rows(m, n));
    FactorPair { lf, rf }
}

/// Detects the minimal rank with jointly optimized phases.
pub fn riemannian_pursuit<T: Real>(ch: &ChannelSet<T>, opts: &PursuitOptions) -> Result<AlignmentSolution<T>> {
    pursue(ch, opts, None)
}

/// Rank pursuit with the phase block frozen at `phase`.
pub fn riemannian_pursuit_with_phase<T: Real>(
    ch: &ChannelSet<T>,
    opts: &PursuitOptions,
    phase: PhaseVector<T>,
) -> Result<AlignmentSolution<T>> {
    pursue(ch, opts, Some(phase))
}

fn pursue<T: Real>(
    ch: &ChannelSet<T>,
    opts: &PursuitOptions,
    frozen: Option<PhaseVector<T>>,
) -> Result<AlignmentSolution<T>> {
    opts.validate()?;
    let cfg = ch.config().clone();
    if let Some(v) = &frozen {
        if v.len() != cfg.ris_elements {
            return Err(crate::Error::Shape(format!(
                "frozen phase has {} entries, RIS has {}",
                v.len(),
                cfg.ris_elements
            )));
        }
    }
    // the solver works on commonly scaled channels; X absorbs the constant
    let (scaled, scale) = ch.normalized();
    let (m, n, l) = (cfg.m_total(), cfg.n_total(), cfg.ris_elements);
    let tol = T::lit(opts.outer_tol);

    let mut trace = Vec::new();
    // lowest residual over all attempts, reported when nothing is feasible
    let mut best: Option<(FixedRankOutcome<T>, usize)> = None;
    // lowest residual of the previous rank, padded for warm starts
    let mut carried: Option<FixedRankOutcome<T>> = None;
    let mut feasible = false;

    'ranks: for rank in opts.r_start..=opts.r_max {
        let mut best_here: Option<FixedRankOutcome<T>> = None;
        for restart in 0..opts.restarts_per_rank {
            let mut rng = restart_rng(opts.seed, rank, restart);
            let init_scale = 1.0 / ((rank * (m + n)) as f64).sqrt();
            let (factors, phase) = match (&carried, restart) {
                (Some(prev), 0) if opts.warm_start_rank_increase => {
                    (pad_factors(&mut rng, &prev.factors), prev.phase.clone())
                }
                _ => {
                    let f = FactorPair {
                        lf: gaussian_matrix(&mut rng, m, rank, init_scale),
                        rf: gaussian_matrix(&mut rng, n, rank, init_scale),
                    };
                    let v = match &frozen {
                        Some(v) => v.clone(),
                        None => random_phase(&mut rng, l),
                    };
                    (f, v)
                }
            };
            let outcome = solve_fixed_rank_impl(&scaled, (factors, phase), opts, frozen.is_none())?;
            trace.push(RankAttempt {
                rank,
                restart,
                history: outcome.history.clone(),
            });

            let done = outcome.residual <= tol;
            if best_here.as_ref().is_none_or(|b| outcome.residual < b.residual) {
                best_here = Some(outcome.clone());
            }
            if done || best.as_ref().is_none_or(|(b, _)| outcome.residual < b.residual) {
                best = Some((outcome, rank));
            }
            if done {
                feasible = true;
                break 'ranks;
            }
        }
        carried = best_here;
    }

    let (outcome, rank) = best.expect("at least one attempt runs");
    let FixedRankOutcome {
        factors,
        phase,
        residual,
        ..
    } = outcome;
    let raw = FactorPair {
        lf: factors.lf.unscale(scale),
        rf: factors.rf,
    };
    let (decoders, precoders) = recover_transceivers(&raw, &cfg).unwrap_or_default();
    Ok(AlignmentSolution {
        feasible,
        rank,
        phase: if l > 0 { Some(phase) } else { None },
        factors: raw,
        decoders,
        precoders,
        residual,
        dof: feasible.then(|| cfg.total_streams() as f64 / rank as f64),
        trace,
    })
}
