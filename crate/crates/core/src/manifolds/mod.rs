//! Riemannian geometry for the two blocks of the alignment problem.
//!
//! Both manifolds are embedded in a complex ambient space equipped with the
//! real inner product `⟨a, b⟩ = Re tr(aᴴ b)`. Tangent vectors are stored as
//! plain ambient elements.

mod circle;
mod factor;
mod rcg;

pub use circle::{circle_project, circle_retract, circle_transport, CircleManifold};
pub use factor::FactorManifold;
pub use rcg::{rcg_minimize, RcgOptions, RcgTrace, Termination};

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::Result;
use crate::scalar::{cplx, Real};

/// Tangent vectors share the storage of their ambient space.
pub type TangentVector<T> = DVector<Complex<T>>;

/// Vector-space operations the conjugate-gradient driver needs on points and
/// tangent vectors.
pub trait Ambient<T: Real>: Clone {
    /// `Re ⟨self, other⟩`
    fn real_inner(&self, other: &Self) -> T;

    /// `self + alpha * other`
    fn axpy(&self, alpha: T, other: &Self) -> Self;

    fn scaled(&self, alpha: T) -> Self;

    fn norm(&self) -> T {
        self.real_inner(self).sqrt()
    }
}

macro_rules! impl_ambient {
    ($ty:ident) => {
        impl<T: Real> Ambient<T> for $ty<Complex<T>> {
            #[inline]
            fn real_inner(&self, other: &Self) -> T {
                self.dotc(other).re
            }

            #[inline]
            fn axpy(&self, alpha: T, other: &Self) -> Self {
                self + other * cplx(alpha)
            }

            #[inline]
            fn scaled(&self, alpha: T) -> Self {
                self * cplx(alpha)
            }
        }
    };
}

impl_ambient!(DVector);
impl_ambient!(DMatrix);

/// Geometry callbacks consumed by [`rcg_minimize`].
pub trait Manifold<T: Real> {
    type Point: Ambient<T>;

    /// Orthogonal projection of an ambient vector onto the tangent space at `x`.
    fn project(&self, x: &Self::Point, v: &Self::Point) -> Result<Self::Point>;

    fn retract(&self, x: &Self::Point, step: &Self::Point) -> Result<Self::Point>;

    /// Carry `eta` into the tangent space at `x_next`.
    fn transport(&self, x_next: &Self::Point, eta: &Self::Point) -> Result<Self::Point>;

    fn inner(&self, _x: &Self::Point, a: &Self::Point, b: &Self::Point) -> T {
        a.real_inner(b)
    }
}
