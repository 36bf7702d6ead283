#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use ris_align::ia_core::{composite_channel, ChannelSet, FactorPair, PhaseVector};
use ris_align::netsim::{rayleigh_channels, PowerSpec};
use ris_align::pursuit::kron_identity;
use ris_align::NetworkConfig;

pub type C = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cn(r: &mut ChaCha8Rng) -> C {
    let a: f64 = r.sample(StandardNormal);
    let b: f64 = r.sample(StandardNormal);
    C::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn cmat(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<C> {
    DMatrix::from_fn(rows, cols, |_, _| cn(r))
}

pub fn cvec(r: &mut ChaCha8Rng, n: usize) -> DVector<C> {
    DVector::from_fn(n, |_, _| cn(r))
}

pub fn random_phase(r: &mut ChaCha8Rng, l: usize) -> PhaseVector<f64> {
    let angles: Vec<f64> = (0..l).map(|_| r.random_range(0.0..std::f64::consts::TAU)).collect();
    PhaseVector::from_angles(&angles)
}

pub fn random_factors(r: &mut ChaCha8Rng, cfg: &NetworkConfig, rank: usize, scale: f64) -> FactorPair<f64> {
    let s = C::new(scale, 0.0);
    FactorPair::new(cmat(r, cfg.m_total(), rank) * s, cmat(r, cfg.n_total(), rank) * s).unwrap()
}

pub fn unit_power() -> PowerSpec {
    PowerSpec {
        noise_power_db: 0.0,
        snr_db: 0.0,
    }
}

pub fn rayleigh(cfg: &NetworkConfig, seed: u64) -> ChannelSet<f64> {
    rayleigh_channels(cfg, &unit_power(), seed).unwrap()
}

/// Per-block residuals `U_iᴴ (H̃_ij ⊗ I_r) V_j − δ_ij I` by explicit Kronecker
/// products.
pub fn dense_blocks(
    ch: &ChannelSet<f64>,
    v: &PhaseVector<f64>,
    us: &[DMatrix<C>],
    vs: &[DMatrix<C>],
    r: usize,
) -> Vec<Vec<DMatrix<C>>> {
    let cfg = ch.config();
    let grid = composite_channel(ch, v).unwrap();
    (0..cfg.pairs())
        .map(|i| {
            (0..cfg.pairs())
                .map(|j| {
                    let mut block = us[i].adjoint() * kron_identity(grid.get(i, j), r) * &vs[j];
                    if i == j {
                        block -= DMatrix::identity(cfg.streams[i], cfg.streams[i]);
                    }
                    block
                })
                .collect()
        })
        .collect()
}

pub fn dense_f0(ch: &ChannelSet<f64>, v: &PhaseVector<f64>, us: &[DMatrix<C>], vs: &[DMatrix<C>], r: usize) -> f64 {
    0.5 * dense_blocks(ch, v, us, vs, r)
        .iter()
        .flatten()
        .map(|b| b.norm_squared())
        .sum::<f64>()
}

/// Exact two-user SISO alignment over two channel uses without RIS: each
/// decoder is orthogonal to the other pair's precoder and scaled to unit gain.
pub fn two_user_time_extension(ch: &ChannelSet<f64>, r: &mut ChaCha8Rng) -> (Vec<DMatrix<C>>, Vec<DMatrix<C>>) {
    let vs = [cvec(r, 2), cvec(r, 2)];
    let us: Vec<DMatrix<C>> = (0..2)
        .map(|i| {
            let other = &vs[1 - i];
            let w = DVector::from_vec(vec![-other[1].conj(), other[0].conj()]);
            let gain = ch.direct.get(i, i)[(0, 0)] * w.dotc(&vs[i]);
            DMatrix::from_column_slice(2, 1, (w * (C::new(1.0, 0.0) / gain).conj()).as_slice())
        })
        .collect();
    let vs = vs
        .iter()
        .map(|v| DMatrix::from_column_slice(2, 1, v.as_slice()))
        .collect();
    (us, vs)
}
