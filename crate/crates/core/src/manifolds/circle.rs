//! Product of `L` unit circles in the complex plane.

use nalgebra::{Complex, ComplexField, DVector};

use super::{Manifold, TangentVector};
use crate::error::{Error, Result};
use crate::scalar::{cplx, Real};

const MODULUS_GUARD: f64 = 1e-6;
const RETRACTION_FLOOR: f64 = 1e-14;

fn check_unit_modulus<T: Real>(v: &DVector<Complex<T>>) -> Result<()> {
    let guard = T::lit(MODULUS_GUARD);
    for z in v.iter() {
        let dev = (z.modulus() - T::one()).abs();
        // NaN must fail the guard too
        if !(dev <= guard) {
            return Err(Error::OffManifold {
                deviation: dev.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

fn check_len<T: Real>(a: &DVector<Complex<T>>, b: &DVector<Complex<T>>) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "circle point has length {}, vector has length {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// `g − Re{g ⊙ v*} ⊙ v`
pub fn circle_project<T: Real>(v: &DVector<Complex<T>>, g: &DVector<Complex<T>>) -> Result<TangentVector<T>> {
    check_len(v, g)?;
    check_unit_modulus(v)?;
    Ok(DVector::from_iterator(
        v.len(),
        v.iter().zip(g.iter()).map(|(vl, gl)| {
            let radial = (gl * vl.conj()).re;
            gl - vl * cplx(radial)
        }),
    ))
}

/// Moves along `step` and renormalizes each element back onto its circle.
pub fn circle_retract<T: Real>(v: &DVector<Complex<T>>, step: &TangentVector<T>) -> Result<DVector<Complex<T>>> {
    check_len(v, step)?;
    let floor = T::lit(RETRACTION_FLOOR);
    let mut out = DVector::zeros(v.len());
    for (index, (vl, sl)) in v.iter().zip(step.iter()).enumerate() {
        let moved = vl + sl;
        let modulus = moved.modulus();
        if !(modulus >= floor) {
            return Err(Error::DegenerateRetraction {
                index,
                modulus: modulus.to_f64_lossy(),
            });
        }
        out[index] = moved.unscale(modulus);
    }
    Ok(out)
}

/// Vector transport by projection onto the tangent space at `v_next`.
pub fn circle_transport<T: Real>(v_next: &DVector<Complex<T>>, eta: &TangentVector<T>) -> Result<TangentVector<T>> {
    circle_project(v_next, eta)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CircleManifold;

impl<T: Real> Manifold<T> for CircleManifold {
    type Point = DVector<Complex<T>>;

    fn project(&self, x: &Self::Point, v: &Self::Point) -> Result<Self::Point> {
        circle_project(x, v)
    }

    fn retract(&self, x: &Self::Point, step: &Self::Point) -> Result<Self::Point> {
        circle_retract(x, step)
    }

    fn transport(&self, x_next: &Self::Point, eta: &Self::Point) -> Result<Self::Point> {
        circle_transport(x_next, eta)
    }
}
