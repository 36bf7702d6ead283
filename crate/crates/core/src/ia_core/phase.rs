use nalgebra::{Complex, DMatrix, DVector};

use super::{ChannelSet, FactorPair, PhaseVector, TargetVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Least-squares data of the phase block: `f₁(v) = ½‖A v − c‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSystem<T: Real> {
    /// `S × L`
    pub a: DMatrix<Complex<T>>,
    pub c: DVector<Complex<T>>,
}

/// Rewrites the alignment residual as an affine function of `v` for fixed `X`.
///
/// Row block `(i, j)` of `A` is `Σ_m Σ_n vec(X_ij[m,n]) ⊗ (R_i[m,:] ⊙ T_j[:,n]ᵀ)`
/// and `c = b − e` with `e_ij = Σ_m Σ_n vec(H_ij[m,n] X_ij[m,n])`.
pub fn assemble_phase_system<T: Real>(
    ch: &ChannelSet<T>,
    xf: &FactorPair<T>,
    b: &TargetVector<T>,
) -> Result<PhaseSystem<T>> {
    let cfg = ch.config();
    let l = cfg.ris_elements;
    if l == 0 {
        return Err(Error::NoRis);
    }
    xf.check(cfg)?;
    if b.b.len() != cfg.s_total() {
        return Err(Error::Shape(format!(
            "target has length {}, expected {}",
            b.b.len(),
            cfg.s_total()
        )));
    }
    let x = xf.product();
    let k = cfg.pairs();
    let mut a = DMatrix::zeros(cfg.s_total(), l);
    let mut e = DVector::zeros(cfg.s_total());
    let mut row = vec![Complex::new(T::zero(), T::zero()); l];

    for i in 0..k {
        let (mi, di, row0) = (cfg.rx_antennas[i], cfg.streams[i], cfg.row_offset(i));
        for j in 0..k {
            let (nj, dj, col0) = (cfg.tx_antennas[j], cfg.streams[j], cfg.col_offset(j));
            let off = cfg.block_offset(i, j);
            let hij = ch.direct.get(i, j);
            for n in 0..nj {
                for m in 0..mi {
                    for (el, slot) in row.iter_mut().enumerate() {
                        *slot = ch.ris_rx[i][(m, el)] * ch.tx_ris[j][(el, n)];
                    }
                    let h = hij[(m, n)];
                    let sub = x.view((row0 + m * di, col0 + n * dj), (di, dj));
                    for c in 0..dj {
                        for r in 0..di {
                            let xs = sub[(r, c)];
                            let s = off + c * di + r;
                            e[s] += h * xs;
                            for (el, ael) in row.iter().enumerate() {
                                a[(s, el)] += xs * ael;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(PhaseSystem { a, c: &b.b - e })
}

/// `½‖A v − c‖²` and its Euclidean gradient `Aᴴ(A v − c)`.
pub fn f1_value_grad<T: Real>(sys: &PhaseSystem<T>, v: &PhaseVector<T>) -> Result<(T, DVector<Complex<T>>)> {
    f1_value_grad_raw(sys, v.as_vector())
}

pub(crate) fn f1_value_grad_raw<T: Real>(
    sys: &PhaseSystem<T>,
    v: &DVector<Complex<T>>,
) -> Result<(T, DVector<Complex<T>>)> {
    if v.len() != sys.a.ncols() {
        return Err(Error::Shape(format!(
            "v has {} entries, A has {} columns",
            v.len(),
            sys.a.ncols()
        )));
    }
    let residual = &sys.a * v - &sys.c;
    let grad = sys.a.adjoint() * &residual;
    Ok((residual.norm_squared() * T::lit(0.5), grad))
}
