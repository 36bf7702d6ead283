use nalgebra::{Complex, ComplexField, DMatrix, DVector};

use super::NetworkConfig;
use crate::error::{Error, Result};
use crate::scalar::{cplx, Real};

/// `K × K` grid of link matrices; entry `(i, j)` is `M_i × N_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGrid<T: Real> {
    config: NetworkConfig,
    blocks: Vec<DMatrix<Complex<T>>>,
}

impl<T: Real> ChannelGrid<T> {
    pub fn new(config: NetworkConfig, blocks: Vec<DMatrix<Complex<T>>>) -> Result<Self> {
        let k = config.pairs();
        if blocks.len() != k * k {
            return Err(Error::Shape(format!(
                "expected {} link matrices, got {}",
                k * k,
                blocks.len()
            )));
        }
        for i in 0..k {
            for j in 0..k {
                let want = (config.rx_antennas[i], config.tx_antennas[j]);
                let got = blocks[i * k + j].shape();
                if got != want {
                    return Err(Error::Shape(format!("H[{i}][{j}] is {got:?}, expected {want:?}")));
                }
            }
        }
        Ok(Self { config, blocks })
    }

    pub fn from_fn(config: NetworkConfig, mut f: impl FnMut(usize, usize) -> DMatrix<Complex<T>>) -> Result<Self> {
        let k = config.pairs();
        let blocks = (0..k * k).map(|idx| f(idx / k, idx % k)).collect();
        Self::new(config, blocks)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &DMatrix<Complex<T>> {
        &self.blocks[i * self.config.pairs() + j]
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn blocks(&self) -> &[DMatrix<Complex<T>>] {
        &self.blocks
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            config: self.config.clone(),
            blocks: self.blocks.iter().map(|b| b * cplx(s)).collect(),
        }
    }
}

/// Direct links `H_ij`, RIS-to-receiver links `R_i` and transmitter-to-RIS
/// links `T_j`, together with noise and transmit power (linear scale).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet<T: Real> {
    pub direct: ChannelGrid<T>,
    /// `R_i`, `M_i × L`
    pub ris_rx: Vec<DMatrix<Complex<T>>>,
    /// `T_j`, `L × N_j`
    pub tx_ris: Vec<DMatrix<Complex<T>>>,
    pub noise_power: T,
    pub tx_power: T,
}

impl<T: Real> ChannelSet<T> {
    pub fn new(
        direct: ChannelGrid<T>,
        ris_rx: Vec<DMatrix<Complex<T>>>,
        tx_ris: Vec<DMatrix<Complex<T>>>,
        noise_power: T,
        tx_power: T,
    ) -> Result<Self> {
        let cfg = direct.config();
        let (k, l) = (cfg.pairs(), cfg.ris_elements);
        if ris_rx.len() != k || tx_ris.len() != k {
            return Err(Error::Shape(format!(
                "expected {k} RIS links per side, got {} and {}",
                ris_rx.len(),
                tx_ris.len()
            )));
        }
        for p in 0..k {
            if ris_rx[p].shape() != (cfg.rx_antennas[p], l) {
                return Err(Error::Shape(format!(
                    "R[{p}] is {:?}, expected {:?}",
                    ris_rx[p].shape(),
                    (cfg.rx_antennas[p], l)
                )));
            }
            if tx_ris[p].shape() != (l, cfg.tx_antennas[p]) {
                return Err(Error::Shape(format!(
                    "T[{p}] is {:?}, expected {:?}",
                    tx_ris[p].shape(),
                    (l, cfg.tx_antennas[p])
                )));
            }
        }
        if !(noise_power > T::zero()) || !(tx_power > T::zero()) {
            return Err(Error::Config("noise and transmit power must be positive".into()));
        }
        Ok(Self {
            direct,
            ris_rx,
            tx_ris,
            noise_power,
            tx_power,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        self.direct.config()
    }

    pub fn ris_elements(&self) -> usize {
        self.config().ris_elements
    }

    /// Drops the reflect path entirely, keeping the direct links.
    pub fn without_ris(&self) -> Self {
        let cfg = self.config().without_ris();
        Self {
            direct: ChannelGrid {
                config: cfg.clone(),
                blocks: self.direct.blocks.clone(),
            },
            ris_rx: cfg.rx_antennas.iter().map(|&m| DMatrix::zeros(m, 0)).collect(),
            tx_ris: cfg.tx_antennas.iter().map(|&n| DMatrix::zeros(0, n)).collect(),
            noise_power: self.noise_power,
            tx_power: self.tx_power,
        }
    }

    /// Median Frobenius norm over the `K²` direct links.
    pub fn median_direct_norm(&self) -> T {
        let mut norms: Vec<T> = self.direct.blocks.iter().map(|b| b.norm()).collect();
        norms.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let n = norms.len();
        if n % 2 == 1 {
            norms[n / 2]
        } else {
            (norms[n / 2 - 1] + norms[n / 2]) * T::lit(0.5)
        }
    }

    /// Scales every composite link by one common constant so the median
    /// direct-link norm becomes 1. Returns the scaled set and the divisor.
    pub fn normalized(&self) -> (Self, T) {
        let mut scale = self.median_direct_norm();
        if !(scale > T::zero()) || !scale.is_finite() {
            scale = T::one();
        }
        let inv = T::one() / scale;
        let out = Self {
            direct: self.direct.scaled(inv),
            ris_rx: self.ris_rx.iter().map(|r| r * cplx(inv)).collect(),
            tx_ris: self.tx_ris.clone(),
            noise_power: self.noise_power,
            tx_power: self.tx_power,
        };
        (out, scale)
    }
}

/// Unit-modulus RIS reflection coefficients; `Θ = diag(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector<T: Real> {
    v: DVector<Complex<T>>,
}

impl<T: Real> PhaseVector<T> {
    pub const TOLERANCE: f64 = 1e-10;

    pub fn new(v: DVector<Complex<T>>) -> Result<Self> {
        let tol = T::lit(Self::TOLERANCE);
        for z in v.iter() {
            let dev = (z.modulus() - T::one()).abs();
            if !(dev <= tol) {
                return Err(Error::OffManifold {
                    deviation: dev.to_f64_lossy(),
                });
            }
        }
        Ok(Self { v })
    }

    pub fn from_angles(angles: &[T]) -> Self {
        Self {
            v: DVector::from_iterator(angles.len(), angles.iter().map(|&a| crate::scalar::unit_phasor(a))),
        }
    }

    pub fn empty() -> Self {
        Self { v: DVector::zeros(0) }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn as_vector(&self) -> &DVector<Complex<T>> {
        &self.v
    }

    pub fn into_vector(self) -> DVector<Complex<T>> {
        self.v
    }

    pub fn angles(&self) -> Vec<T> {
        self.v.iter().map(|z| z.im.atan2(z.re)).collect()
    }
}

/// `H̃_ij = H_ij + R_i diag(v) T_j` for every pair of pairs.
pub fn composite_channel<T: Real>(ch: &ChannelSet<T>, v: &PhaseVector<T>) -> Result<ChannelGrid<T>> {
    let cfg = ch.config();
    let l = cfg.ris_elements;
    if v.len() != l {
        return Err(Error::Shape(format!(
            "phase vector has {} entries, RIS has {l}",
            v.len()
        )));
    }
    if l == 0 {
        return Ok(ch.direct.clone());
    }
    let k = cfg.pairs();
    let vv = v.as_vector();
    let blocks = (0..k * k)
        .map(|idx| {
            let (i, j) = (idx / k, idx % k);
            let mut reflected = ch.ris_rx[i].clone();
            for (col, vl) in vv.iter().enumerate() {
                reflected.column_mut(col).iter_mut().for_each(|z| *z *= *vl);
            }
            ch.direct.get(i, j) + reflected * &ch.tx_ris[j]
        })
        .collect();
    ChannelGrid::new(cfg.clone(), blocks)
}
