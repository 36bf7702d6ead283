//! Random instances and independent reference computations for unit tests.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::ia_core::{ChannelGrid, ChannelSet, FactorPair, NetworkConfig, PhaseVector};

pub type C = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cn(rng: &mut ChaCha8Rng) -> C {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn cmat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<C> {
    DMatrix::from_fn(r, c, |_, _| cn(rng))
}

pub fn cvec(rng: &mut ChaCha8Rng, n: usize) -> DVector<C> {
    DVector::from_fn(n, |_, _| cn(rng))
}

pub fn phases(rng: &mut ChaCha8Rng, l: usize) -> PhaseVector<f64> {
    let a: Vec<f64> = (0..l).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    PhaseVector::from_angles(&a)
}

pub fn rayleigh(cfg: &NetworkConfig, seed: u64) -> ChannelSet<f64> {
    let mut r = rng(seed);
    let direct =
        ChannelGrid::from_fn(cfg.clone(), |i, j| cmat(&mut r, cfg.rx_antennas[i], cfg.tx_antennas[j])).unwrap();
    let l = cfg.ris_elements;
    let ris_rx = cfg.rx_antennas.iter().map(|&m| cmat(&mut r, m, l)).collect();
    let tx_ris = cfg.tx_antennas.iter().map(|&n| cmat(&mut r, l, n)).collect();
    ChannelSet::new(direct, ris_rx, tx_ris, 1.0, 1.0).unwrap()
}

pub fn factors(rng: &mut ChaCha8Rng, cfg: &NetworkConfig, r: usize) -> FactorPair<f64> {
    FactorPair::new(cmat(rng, cfg.m_total(), r), cmat(rng, cfg.n_total(), r)).unwrap()
}

pub fn kron_identity(h: &DMatrix<C>, r: usize) -> DMatrix<C> {
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

/// Per-pair decoder (`M_i r × d_i`) built from `Ũ = Lfᴴ` by stacking the
/// per-antenna `r × d_i` slices vertically.
pub fn stacked_transceiver(tilde: &DMatrix<C>, offset: usize, antennas: usize, d: usize) -> DMatrix<C> {
    let r = tilde.nrows();
    let mut out = DMatrix::zeros(antennas * r, d);
    for m in 0..antennas {
        for s in 0..d {
            for k in 0..r {
                out[(m * r + k, s)] = tilde[(k, offset + m * d + s)];
            }
        }
    }
    out
}

/// Independent dense evaluation of `Uᵢᴴ (H̃ᵢⱼ ⊗ I_r) Vⱼ`, vectorized and
/// stacked in block order.
pub fn dense_alignment_lhs(grid: &ChannelGrid<f64>, xf: &FactorPair<f64>) -> DVector<C> {
    let cfg = grid.config();
    let r = xf.rank();
    let ut = xf.lf.adjoint();
    let vt = xf.rf.adjoint();
    let mut out = Vec::new();
    for i in 0..cfg.pairs() {
        let ui = stacked_transceiver(&ut, cfg.row_offset(i), cfg.rx_antennas[i], cfg.streams[i]);
        for j in 0..cfg.pairs() {
            let vj = stacked_transceiver(&vt, cfg.col_offset(j), cfg.tx_antennas[j], cfg.streams[j]);
            let block = ui.adjoint() * kron_identity(grid.get(i, j), r) * vj;
            out.extend(block.iter().copied());
        }
    }
    DVector::from_vec(out)
}
