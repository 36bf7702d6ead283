//! Riemannian conjugate gradient with Polak–Ribière+ directions and Armijo
//! backtracking.

use serde::{Deserialize, Serialize};

use super::{Ambient, Manifold};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RcgOptions {
    /// Stop once the Riemannian gradient norm drops to this value.
    pub grad_tol: f64,
    pub max_iters: usize,
    pub armijo_c1: f64,
    pub armijo_shrink: f64,
    pub armijo_max_backtracks: usize,
    /// First trial step is `initial_step / ‖grad‖`; later trials start at
    /// twice the previously accepted step.
    pub initial_step: f64,
}

impl Default for RcgOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iters: 500,
            armijo_c1: 1e-4,
            armijo_shrink: 0.5,
            armijo_max_backtracks: 50,
            initial_step: 1.0,
        }
    }
}

impl RcgOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.grad_tol > 0.0
            && self.max_iters > 0
            && self.armijo_c1 > 0.0
            && self.armijo_c1 < 1.0
            && self.armijo_shrink > 0.0
            && self.armijo_shrink < 1.0
            && self.armijo_max_backtracks > 0
            && self.initial_step > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid RCG options: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    GradTol,
    MaxIters,
    LineSearchFail,
}

/// Per-iteration history. Index 0 of the objective and gradient-norm series
/// holds the starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct RcgTrace<T> {
    pub objective_per_iter: Vec<T>,
    pub grad_norm_per_iter: Vec<T>,
    pub step_sizes: Vec<T>,
    pub iterations: usize,
    pub termination: Termination,
}

impl<T: Real> RcgTrace<T> {
    pub fn final_objective(&self) -> T {
        *self
            .objective_per_iter
            .last()
            .expect("trace holds the starting objective")
    }
}

/// Minimizes `objective` over the manifold starting at `x0`.
///
/// `euclid_grad` returns the gradient with respect to the real inner product
/// `Re⟨·,·⟩` of the ambient space; it is projected onto the tangent space here.
pub fn rcg_minimize<T, M, F, G>(
    manifold: &M,
    objective: F,
    euclid_grad: G,
    x0: M::Point,
    opts: &RcgOptions,
) -> Result<(M::Point, RcgTrace<T>)>
where
    T: Real,
    M: Manifold<T>,
    F: Fn(&M::Point) -> T,
    G: Fn(&M::Point) -> M::Point,
{
    opts.validate()?;
    let tol = T::lit(opts.grad_tol);
    let c1 = T::lit(opts.armijo_c1);
    let shrink = T::lit(opts.armijo_shrink);

    let mut x = x0;
    let mut f = objective(&x);
    let mut grad = manifold.project(&x, &euclid_grad(&x))?;
    let mut grad_sq = manifold.inner(&x, &grad, &grad);
    let mut trace = RcgTrace {
        objective_per_iter: vec![f],
        grad_norm_per_iter: vec![grad_sq.sqrt()],
        step_sizes: Vec::new(),
        iterations: 0,
        termination: Termination::MaxIters,
    };
    if grad_sq.sqrt() <= tol {
        trace.termination = Termination::GradTol;
        return Ok((x, trace));
    }

    let mut dir = grad.scaled(-T::one());
    let mut prev_step: Option<T> = None;

    for _ in 0..opts.max_iters {
        let slope = manifold.inner(&x, &grad, &dir);
        let mut alpha = match prev_step {
            Some(a) => a + a,
            None => T::lit(opts.initial_step) / grad_sq.sqrt(),
        };

        let mut accepted = None;
        for _ in 0..opts.armijo_max_backtracks {
            if let Ok(candidate) = manifold.retract(&x, &dir.scaled(alpha)) {
                let f_new = objective(&candidate);
                if f_new <= f + c1 * alpha * slope {
                    accepted = Some((candidate, f_new));
                    break;
                }
            }
            alpha *= shrink;
        }
        let Some((x_new, f_new)) = accepted else {
            trace.termination = Termination::LineSearchFail;
            return Ok((x, trace));
        };

        let grad_new = manifold.project(&x_new, &euclid_grad(&x_new))?;
        let grad_new_sq = manifold.inner(&x_new, &grad_new, &grad_new);

        trace.iterations += 1;
        trace.step_sizes.push(alpha);
        trace.objective_per_iter.push(f_new);
        trace.grad_norm_per_iter.push(grad_new_sq.sqrt());

        if grad_new_sq.sqrt() <= tol {
            trace.termination = Termination::GradTol;
            return Ok((x_new, trace));
        }

        let grad_old_moved = manifold.transport(&x_new, &grad)?;
        let dir_moved = manifold.transport(&x_new, &dir)?;
        let numer = manifold.inner(&x_new, &grad_new, &grad_new.axpy(-T::one(), &grad_old_moved));
        let beta = (numer / grad_sq).max(T::zero());
        let mut dir_new = grad_new.scaled(-T::one()).axpy(beta, &dir_moved);
        if manifold.inner(&x_new, &dir_new, &grad_new) >= T::zero() {
            dir_new = grad_new.scaled(-T::one());
        }

        x = x_new;
        f = f_new;
        grad = grad_new;
        grad_sq = grad_new_sq;
        dir = dir_new;
        prev_step = Some(alpha);
    }

    Ok((x, trace))
}
