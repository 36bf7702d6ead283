//! Full-column-rank complex matrices (`(M+N) × r`) with the ambient metric.
//!
//! The set is open in the ambient space, so projection and transport are the
//! identity and retraction is plain addition. A rank guard rejects retracted
//! points that drifted to the boundary.

use nalgebra::{Complex, DMatrix};

use super::Manifold;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct FactorManifold {
    /// Minimum admissible `σ_min / σ_max` of a retracted point.
    pub rank_guard: f64,
}

impl Default for FactorManifold {
    fn default() -> Self {
        Self { rank_guard: 1e-12 }
    }
}

impl FactorManifold {
    pub fn check_rank<T: Real>(&self, y: &DMatrix<Complex<T>>) -> Result<()> {
        let sv = y.singular_values();
        let max = sv.max();
        let min = sv.min();
        let ratio = if max > T::zero() { min / max } else { T::zero() };
        if !(ratio >= T::lit(self.rank_guard)) {
            return Err(Error::RankDeficient {
                ratio: ratio.to_f64_lossy(),
                threshold: self.rank_guard,
            });
        }
        Ok(())
    }
}

fn same_shape<T: Real>(a: &DMatrix<Complex<T>>, b: &DMatrix<Complex<T>>) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!(
            "factor point {:?} vs vector {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

impl<T: Real> Manifold<T> for FactorManifold {
    type Point = DMatrix<Complex<T>>;

    fn project(&self, x: &Self::Point, v: &Self::Point) -> Result<Self::Point> {
        same_shape(x, v)?;
        Ok(v.clone())
    }

    fn retract(&self, x: &Self::Point, step: &Self::Point) -> Result<Self::Point> {
        same_shape(x, step)?;
        let y = x + step;
        self.check_rank(&y)?;
        Ok(y)
    }

    fn transport(&self, x_next: &Self::Point, eta: &Self::Point) -> Result<Self::Point> {
        same_shape(x_next, eta)?;
        Ok(eta.clone())
    }
}
