use nalgebra::{Complex, DMatrix, DVector};

use super::PursuitOptions;
use crate::error::Result;
use crate::ia_core::operator::f2_value;
use crate::ia_core::phase::f1_value_grad_raw;
use crate::ia_core::{
    assemble_phase_system, build_target, composite_channel, f2_value_grad, objective_f0, ChannelSet, FactorPair,
    PhaseVector,
};
use crate::manifolds::{rcg_minimize, CircleManifold, FactorManifold, Termination};
use crate::scalar::Real;

/// `f₀` after the starting point and after every block update.
#[derive(Debug, Clone, PartialEq)]
pub struct AlternationHistory<T> {
    pub objective: Vec<T>,
    pub alternations: usize,
    pub inner_iterations: usize,
    /// Inner solves that stopped on a failed line search.
    pub line_search_failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedRankOutcome<T: Real> {
    pub factors: FactorPair<T>,
    pub phase: PhaseVector<T>,
    pub residual: T,
    pub history: AlternationHistory<T>,
}

/// Alternates the transceiver block (factor manifold) and the phase block
/// (circle manifold) at fixed rank until `f₀ ≤ outer_tol` or the alternation
/// budget runs out.
pub fn solve_fixed_rank<T: Real>(
    ch: &ChannelSet<T>,
    init: (FactorPair<T>, PhaseVector<T>),
    opts: &PursuitOptions,
) -> Result<FixedRankOutcome<T>> {
    solve_fixed_rank_impl(ch, init, opts, true)
}

pub(crate) fn solve_fixed_rank_impl<T: Real>(
    ch: &ChannelSet<T>,
    init: (FactorPair<T>, PhaseVector<T>),
    opts: &PursuitOptions,
    optimize_phase: bool,
) -> Result<FixedRankOutcome<T>> {
    opts.validate()?;
    let cfg = ch.config();
    let (mut factors, mut phase) = init;
    let mut f0 = objective_f0(ch, &factors, &phase)?;
    let tol = T::lit(opts.outer_tol);
    let b = build_target::<T>(cfg);
    let m = cfg.m_total();
    let phase_block = optimize_phase && cfg.ris_elements > 0;

    let mut history = AlternationHistory {
        objective: vec![f0],
        alternations: 0,
        inner_iterations: 0,
        line_search_failures: 0,
    };

    let factor_manifold = FactorManifold::default();
    while f0 > tol && history.alternations < opts.max_alternations {
        history.alternations += 1;

        factors = balance_factors(&factors);
        let grid = composite_channel(ch, &phase)?;
        let (y, trace) = rcg_minimize(
            &factor_manifold,
            |y: &DMatrix<Complex<T>>| {
                f2_value(&grid, &FactorPair::from_stacked(y, m), &b).expect("factor shapes fixed by the network")
            },
            |y: &DMatrix<Complex<T>>| {
                f2_value_grad(&grid, &FactorPair::from_stacked(y, m), &b)
                    .expect("factor shapes fixed by the network")
                    .1
            },
            factors.stacked(),
            &opts.inner,
        )?;
        history.inner_iterations += trace.iterations;
        if trace.termination == Termination::LineSearchFail {
            history.line_search_failures += 1;
        }
        factors = FactorPair::from_stacked(&y, m);
        f0 = trace.final_objective();
        history.objective.push(f0);
        if f0 <= tol || !phase_block {
            continue;
        }

        let sys = assemble_phase_system(ch, &factors, &b)?;
        let (v, trace) = rcg_minimize(
            &CircleManifold,
            |v: &DVector<Complex<T>>| f1_value_grad_raw(&sys, v).expect("phase length fixed").0,
            |v: &DVector<Complex<T>>| f1_value_grad_raw(&sys, v).expect("phase length fixed").1,
            phase.clone().into_vector(),
            &opts.inner,
        )?;
        history.inner_iterations += trace.iterations;
        if trace.termination == Termination::LineSearchFail {
            history.line_search_failures += 1;
        }
        phase = PhaseVector::new(v)?;
        f0 = trace.final_objective();
        history.objective.push(f0);
    }

    Ok(FixedRankOutcome {
        factors,
        phase,
        residual: f0,
        history,
    })
}

/// Gauge transform `(Lf Q, Rf Q⁻ᴴ)` that leaves `X` unchanged and equalizes
/// the factors: `Lf = U Σ^½`, `Rf = W Σ^½` from the SVD of `X`. Falls back to
/// per-column norm balancing when `X` is numerically rank deficient, so `Y`
/// keeps full column rank.
pub(crate) fn balance_factors<T: Real>(f: &FactorPair<T>) -> FactorPair<T> {
    let r = f.rank();
    let svd = f.product().svd(true, true);
    let (Some(u), Some(w_h)) = (svd.u, svd.v_t) else {
        return balance_columns(f);
    };
    let sv = &svd.singular_values;
    // nalgebra does not sort singular values
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap_or(std::cmp::Ordering::Equal));
    let top = sv[order[0]];
    if order.len() < r || !(top > T::zero()) || !(sv[order[r - 1]] > top * T::lit(1e-8)) {
        return balance_columns(f);
    }
    let w = w_h.adjoint();
    let mut lf = DMatrix::zeros(f.lf.nrows(), r);
    let mut rf = DMatrix::zeros(f.rf.nrows(), r);
    for (k, &idx) in order.iter().take(r).enumerate() {
        let root = Complex::new(sv[idx].sqrt(), T::zero());
        lf.column_mut(k).copy_from(&(u.column(idx) * root));
        rf.column_mut(k).copy_from(&(w.column(idx) * root));
    }
    FactorPair { lf, rf }
}

fn balance_columns<T: Real>(f: &FactorPair<T>) -> FactorPair<T> {
    let mut out = f.clone();
    for k in 0..f.rank() {
        let (nl, nr) = (f.lf.column(k).norm(), f.rf.column(k).norm());
        if nl > T::zero() && nr > T::zero() {
            let s = (nr / nl).sqrt();
            out.lf.column_mut(k).scale_mut(s);
            out.rf.column_mut(k).unscale_mut(s);
        }
    }
    out
}
