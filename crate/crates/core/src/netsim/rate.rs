use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::ia_core::{composite_channel, ChannelSet};
use crate::pursuit::{kron_identity, AlignmentSolution};
use crate::scalar::{cplx, Real};

/// Achievable sum rate in bit/s/Hz per channel use of the symbol-extended
/// scheme, with the transmit power set to `σ² · 10^{snr_db/10}`.
pub fn sum_rate<T: Real>(ch: &ChannelSet<T>, sol: &AlignmentSolution<T>, snr_db: f64) -> Result<T> {
    rate_impl(ch, sol, snr_db, true)
}

/// Same as [`sum_rate`] with the interference terms dropped from the
/// covariance, an upper bound that isolates the useful-signal gain.
pub fn sum_rate_interference_free<T: Real>(ch: &ChannelSet<T>, sol: &AlignmentSolution<T>, snr_db: f64) -> Result<T> {
    rate_impl(ch, sol, snr_db, false)
}

fn log2_det_hpd<T: Real>(m: DMatrix<Complex<T>>) -> Option<T> {
    let chol = m.cholesky()?;
    let l = chol.l_dirty();
    let mut acc = T::zero();
    for k in 0..l.nrows() {
        acc += l[(k, k)].re.ln();
    }
    Some(acc * T::lit(2.0) / T::lit(std::f64::consts::LN_2))
}

fn rate_impl<T: Real>(ch: &ChannelSet<T>, sol: &AlignmentSolution<T>, snr_db: f64, interference: bool) -> Result<T> {
    if !sol.feasible {
        return Err(Error::Infeasible);
    }
    let cfg = ch.config();
    let k = cfg.pairs();
    let r = sol.rank;
    if sol.decoders.len() != k || sol.precoders.len() != k {
        return Err(Error::Shape("solution carries no transceivers for this network".into()));
    }
    let composite = composite_channel(ch, &sol.phase_or_empty())?;
    let sigma2 = ch.noise_power;
    let power = sigma2 * T::lit(10f64.powf(snr_db / 10.0));

    let precoders: Vec<DMatrix<Complex<T>>> = sol
        .precoders
        .iter()
        .map(|v| {
            let mut v = v.clone();
            for mut col in v.column_iter_mut() {
                let n = col.norm();
                if n > T::zero() {
                    col /= cplx(n);
                }
            }
            v
        })
        .collect();

    let mut total = T::zero();
    for i in 0..k {
        let u = &sol.decoders[i];
        let mut q = u.adjoint() * u * cplx(sigma2);
        if interference {
            for j in (0..k).filter(|&j| j != i) {
                let b = u.adjoint() * kron_identity(composite.get(i, j), r) * &precoders[j];
                q += &b * b.adjoint() * cplx(power / T::lit(cfg.streams[j] as f64));
            }
        }
        let a = u.adjoint() * kron_identity(composite.get(i, i), r) * &precoders[i];
        let s = &a * a.adjoint() * cplx(power / T::lit(cfg.streams[i] as f64));
        let min_diag = q
            .diagonal()
            .iter()
            .map(|z| z.re.to_f64_lossy())
            .fold(f64::INFINITY, f64::min);
        let singular = || Error::SingularCovariance {
            pair: i,
            diag: min_diag,
        };
        let log_q = log2_det_hpd(q.clone()).ok_or_else(singular)?;
        let log_qs = log2_det_hpd(&q + s).ok_or_else(singular)?;
        total += (log_qs - log_q) / T::lit(r as f64);
    }
    Ok(total)
}
