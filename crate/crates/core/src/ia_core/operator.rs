use nalgebra::{Complex, DMatrix, DVector};

use super::{ChannelGrid, NetworkConfig};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Right-hand side `b` of the alignment equations: zero blocks off the
/// diagonal, `vec(I_{d_i})` on block `(i, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetVector<T: Real> {
    pub b: DVector<Complex<T>>,
}

pub fn build_target<T: Real>(cfg: &NetworkConfig) -> TargetVector<T> {
    let mut b = DVector::zeros(cfg.s_total());
    for i in 0..cfg.pairs() {
        let d = cfg.streams[i];
        let off = cfg.block_offset(i, i);
        for s in 0..d {
            b[off + s * d + s] = Complex::new(T::one(), T::zero());
        }
    }
    TargetVector { b }
}

/// Rank-`r` factorization `X = Lf Rfᴴ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair<T: Real> {
    /// `M × r`
    pub lf: DMatrix<Complex<T>>,
    /// `N × r`
    pub rf: DMatrix<Complex<T>>,
}

impl<T: Real> FactorPair<T> {
    pub fn new(lf: DMatrix<Complex<T>>, rf: DMatrix<Complex<T>>) -> Result<Self> {
        if lf.ncols() != rf.ncols() || lf.ncols() == 0 {
            return Err(Error::Shape(format!(
                "factor ranks disagree or are zero: {} vs {}",
                lf.ncols(),
                rf.ncols()
            )));
        }
        Ok(Self { lf, rf })
    }

    pub fn rank(&self) -> usize {
        self.lf.ncols()
    }

    /// `X = Lf Rfᴴ`
    pub fn product(&self) -> DMatrix<Complex<T>> {
        &self.lf * self.rf.adjoint()
    }

    /// `Y = [Lf; Rf]`
    pub fn stacked(&self) -> DMatrix<Complex<T>> {
        let (m, n, r) = (self.lf.nrows(), self.rf.nrows(), self.rank());
        let mut y = DMatrix::zeros(m + n, r);
        y.rows_mut(0, m).copy_from(&self.lf);
        y.rows_mut(m, n).copy_from(&self.rf);
        y
    }

    pub fn from_stacked(y: &DMatrix<Complex<T>>, m: usize) -> Self {
        let n = y.nrows() - m;
        Self {
            lf: y.rows(0, m).into_owned(),
            rf: y.rows(m, n).into_owned(),
        }
    }

    pub(crate) fn check(&self, cfg: &NetworkConfig) -> Result<()> {
        if self.lf.nrows() != cfg.m_total() || self.rf.nrows() != cfg.n_total() {
            return Err(Error::Shape(format!(
                "factors are {}×r and {}×r, network needs M = {} and N = {}",
                self.lf.nrows(),
                self.rf.nrows(),
                cfg.m_total(),
                cfg.n_total()
            )));
        }
        Ok(())
    }
}

/// `𝒜₂` applied to an explicit `M × N` matrix.
pub fn apply_a2_to_matrix<T: Real>(h: &ChannelGrid<T>, x: &DMatrix<Complex<T>>) -> Result<DVector<Complex<T>>> {
    let cfg = h.config();
    if x.shape() != (cfg.m_total(), cfg.n_total()) {
        return Err(Error::Shape(format!(
            "X is {:?}, expected {:?}",
            x.shape(),
            (cfg.m_total(), cfg.n_total())
        )));
    }
    let k = cfg.pairs();
    let mut out = DVector::zeros(cfg.s_total());
    for i in 0..k {
        let (mi, di, row0) = (cfg.rx_antennas[i], cfg.streams[i], cfg.row_offset(i));
        for j in 0..k {
            let (nj, dj, col0) = (cfg.tx_antennas[j], cfg.streams[j], cfg.col_offset(j));
            let hij = h.get(i, j);
            let off = cfg.block_offset(i, j);
            for n in 0..nj {
                for m in 0..mi {
                    let coef = hij[(m, n)];
                    let sub = x.view((row0 + m * di, col0 + n * dj), (di, dj));
                    for c in 0..dj {
                        for r in 0..di {
                            out[off + c * di + r] += coef * sub[(r, c)];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Left-hand sides of the alignment equations for fixed composite channels:
/// block `(i, j)` is `vec(Σ_m Σ_n H̃_ij[m,n] X_ij[m,n])`.
pub fn apply_a2<T: Real>(h: &ChannelGrid<T>, xf: &FactorPair<T>) -> Result<DVector<Complex<T>>> {
    xf.check(h.config())?;
    apply_a2_to_matrix(h, &xf.product())
}

/// Adjoint of [`apply_a2_to_matrix`] under `⟨a, b⟩ = aᴴ b`.
pub fn adjoint_a2<T: Real>(h: &ChannelGrid<T>, y: &DVector<Complex<T>>) -> Result<DMatrix<Complex<T>>> {
    let cfg = h.config();
    if y.len() != cfg.s_total() {
        return Err(Error::Shape(format!(
            "y has length {}, expected S = {}",
            y.len(),
            cfg.s_total()
        )));
    }
    let k = cfg.pairs();
    let mut g = DMatrix::zeros(cfg.m_total(), cfg.n_total());
    for i in 0..k {
        let (mi, di, row0) = (cfg.rx_antennas[i], cfg.streams[i], cfg.row_offset(i));
        for j in 0..k {
            let (nj, dj, col0) = (cfg.tx_antennas[j], cfg.streams[j], cfg.col_offset(j));
            let hij = h.get(i, j);
            let off = cfg.block_offset(i, j);
            for n in 0..nj {
                for m in 0..mi {
                    let coef = hij[(m, n)].conj();
                    let mut sub = g.view_mut((row0 + m * di, col0 + n * dj), (di, dj));
                    for c in 0..dj {
                        for r in 0..di {
                            sub[(r, c)] = coef * y[off + c * di + r];
                        }
                    }
                }
            }
        }
    }
    Ok(g)
}

/// `½‖𝒜₂(Lf Rfᴴ) − b‖²` and its gradient with respect to `Y = [Lf; Rf]`.
pub fn f2_value_grad<T: Real>(
    h: &ChannelGrid<T>,
    y: &FactorPair<T>,
    b: &TargetVector<T>,
) -> Result<(T, DMatrix<Complex<T>>)> {
    let residual = apply_a2(h, y)? - &b.b;
    let value = residual.norm_squared() * T::lit(0.5);
    let g = adjoint_a2(h, &residual)?;
    let top = &g * &y.rf;
    let bottom = g.adjoint() * &y.lf;
    let grad = FactorPair { lf: top, rf: bottom }.stacked();
    Ok((value, grad))
}

/// `f₂` alone; cheaper than [`f2_value_grad`] inside line searches.
pub(crate) fn f2_value<T: Real>(h: &ChannelGrid<T>, y: &FactorPair<T>, b: &TargetVector<T>) -> Result<T> {
    Ok((apply_a2(h, y)? - &b.b).norm_squared() * T::lit(0.5))
}

/// `f₀(X, Θ) = ½‖𝒜(X, Θ) − b‖²`
pub fn objective_f0<T: Real>(ch: &super::ChannelSet<T>, xf: &FactorPair<T>, v: &super::PhaseVector<T>) -> Result<T> {
    let grid = super::composite_channel(ch, v)?;
    f2_value(&grid, xf, &build_target(ch.config()))
}
