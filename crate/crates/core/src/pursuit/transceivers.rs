use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::ia_core::{composite_channel, ChannelSet, FactorPair, NetworkConfig, PhaseVector};
use crate::scalar::Real;

const RECOVERY_RANK_TOL: f64 = 1e-10;

/// Per-pair decoders `U_i` and precoders `V_j`.
pub type Transceivers<T> = (Vec<DMatrix<Complex<T>>>, Vec<DMatrix<Complex<T>>>);

/// Splits `Ũ = Lfᴴ` and `Ṽ = Rfᴴ` into per-pair decoders `U_i` (`M_i r × d_i`)
/// and precoders `V_j` (`N_j r × d_j`). Within a pair the per-antenna
/// `r × d` slices are stacked vertically, antenna-major, matching the row
/// order of `H̃ ⊗ I_r`.
pub fn recover_transceivers<T: Real>(y: &FactorPair<T>, cfg: &NetworkConfig) -> Result<Transceivers<T>> {
    y.check(cfg)?;
    let sv = y.stacked().singular_values();
    let (max, min) = (sv.max(), sv.min());
    let ratio = if max > T::zero() { min / max } else { T::zero() };
    if !(ratio >= T::lit(RECOVERY_RANK_TOL)) {
        return Err(Error::RankDeficient {
            ratio: ratio.to_f64_lossy(),
            threshold: RECOVERY_RANK_TOL,
        });
    }

    let r = y.rank();
    let split = |tilde: DMatrix<Complex<T>>, antennas: &[usize], offset: &dyn Fn(usize) -> usize| {
        (0..cfg.pairs())
            .map(|p| {
                let d = cfg.streams[p];
                let mut out = DMatrix::zeros(antennas[p] * r, d);
                for a in 0..antennas[p] {
                    let cols = tilde.columns(offset(p) + a * d, d);
                    out.view_mut((a * r, 0), (r, d)).copy_from(&cols);
                }
                out
            })
            .collect::<Vec<_>>()
    };
    let decoders = split(y.lf.adjoint(), &cfg.rx_antennas, &|p| cfg.row_offset(p));
    let precoders = split(y.rf.adjoint(), &cfg.tx_antennas, &|p| cfg.col_offset(p));
    Ok((decoders, precoders))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentReport {
    /// `max_{i≠j} ‖U_iᴴ (H̃_ij ⊗ I_r) V_j‖_F`
    pub max_interference_leakage: f64,
    /// `max_i ‖U_iᴴ (H̃_ii ⊗ I_r) V_i − I‖_F`
    pub max_identity_deviation: f64,
    pub pass: bool,
}

/// `H ⊗ I_r`
pub fn kron_identity<T: Real>(h: &DMatrix<Complex<T>>, r: usize) -> DMatrix<Complex<T>> {
    let mut out = DMatrix::zeros(h.nrows() * r, h.ncols() * r);
    for a in 0..h.nrows() {
        for b in 0..h.ncols() {
            for k in 0..r {
                out[(a * r + k, b * r + k)] = h[(a, b)];
            }
        }
    }
    out
}

pub(crate) fn check_transceivers<T: Real>(
    cfg: &NetworkConfig,
    decoders: &[DMatrix<Complex<T>>],
    precoders: &[DMatrix<Complex<T>>],
) -> Result<usize> {
    let k = cfg.pairs();
    if decoders.len() != k || precoders.len() != k {
        return Err(Error::Shape(format!(
            "expected {k} decoders and precoders, got {} and {}",
            decoders.len(),
            precoders.len()
        )));
    }
    let r = decoders[0].nrows() / cfg.rx_antennas[0];
    if r == 0 {
        return Err(Error::Shape("transceivers span zero channel uses".into()));
    }
    for p in 0..k {
        let du = (cfg.rx_antennas[p] * r, cfg.streams[p]);
        let dv = (cfg.tx_antennas[p] * r, cfg.streams[p]);
        if decoders[p].shape() != du || precoders[p].shape() != dv {
            return Err(Error::Shape(format!(
                "pair {p}: U is {:?} (want {du:?}), V is {:?} (want {dv:?})",
                decoders[p].shape(),
                precoders[p].shape()
            )));
        }
    }
    Ok(r)
}

/// Checks the alignment conditions directly with dense Kronecker products.
pub fn verify_alignment<T: Real>(
    ch: &ChannelSet<T>,
    v: &PhaseVector<T>,
    decoders: &[DMatrix<Complex<T>>],
    precoders: &[DMatrix<Complex<T>>],
    tol: f64,
) -> Result<AlignmentReport> {
    let cfg = ch.config();
    let r = check_transceivers(cfg, decoders, precoders)?;
    let grid = composite_channel(ch, v)?;
    let mut leak = 0.0f64;
    let mut ident = 0.0f64;
    for i in 0..cfg.pairs() {
        for j in 0..cfg.pairs() {
            let block = decoders[i].adjoint() * kron_identity(grid.get(i, j), r) * &precoders[j];
            if i == j {
                let dev = block - DMatrix::identity(cfg.streams[i], cfg.streams[i]);
                ident = ident.max(dev.norm().to_f64_lossy());
            } else {
                leak = leak.max(block.norm().to_f64_lossy());
            }
        }
    }
    Ok(AlignmentReport {
        max_interference_leakage: leak,
        max_identity_deviation: ident,
        pass: leak <= tol && ident <= tol,
    })
}
