use std::fmt;

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ia_core::{ChannelGrid, ChannelSet, NetworkConfig};
use crate::scalar::{unit_phasor, Real};

const STREAM_POSITIONS: u64 = 0;
const STREAM_DIRECT: u64 = 1;
const STREAM_RIS: u64 = 2;

/// Axis-aligned rectangle in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Region {
    fn validate(&self, name: &str) -> Result<()> {
        let ok = self.x.iter().chain(&self.y).all(|c| c.is_finite()) && self.x[0] < self.x[1] && self.y[0] < self.y[1];
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("{name} region is degenerate: {self:?}")))
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> [f64; 2] {
        [
            rng.random_range(self.x[0]..self.x[1]),
            rng.random_range(self.y[0]..self.y[1]),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutSpec {
    pub ris_position: [f64; 2],
    pub tx_region: Region,
    pub rx_region: Region,
}

impl Default for LayoutSpec {
    fn default() -> Self {
        Self {
            ris_position: [25.0, 20.0],
            tx_region: Region {
                x: [0.0, 20.0],
                y: [0.0, 20.0],
            },
            rx_region: Region {
                x: [30.0, 50.0],
                y: [0.0, 20.0],
            },
        }
    }
}

impl LayoutSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.ris_position.iter().all(|c| c.is_finite()) {
            return Err(Error::Config("RIS position must be finite".into()));
        }
        self.tx_region.validate("transmitter")?;
        self.rx_region.validate("receiver")
    }
}

/// Rician K-factor on a linear scale; `inf` selects pure line of sight.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RicianFactor(pub f64);

impl RicianFactor {
    pub const PURE_LOS: Self = Self(f64::INFINITY);

    /// `(LoS weight, scattered weight)`
    pub fn weights(self) -> (f64, f64) {
        if self.0.is_infinite() {
            (1.0, 0.0)
        } else {
            ((self.0 / (1.0 + self.0)).sqrt(), (1.0 / (1.0 + self.0)).sqrt())
        }
    }
}

impl Serialize for RicianFactor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for RicianFactor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = RicianFactor;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-negative number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<RicianFactor, E> {
                Ok(RicianFactor(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RicianFactor, E> {
                Ok(RicianFactor(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RicianFactor, E> {
                Ok(RicianFactor(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RicianFactor, E> {
                match v {
                    "inf" | "infinity" => Ok(RicianFactor::PURE_LOS),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosModel {
    /// Rank-one outer product of uniform-linear-array responses.
    SteeringOuterProduct,
    AllOnes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FadingSpec {
    /// Path loss at the 1 m reference distance, dB.
    pub t0_db: f64,
    pub alpha_direct: f64,
    pub alpha_tx_ris: f64,
    pub alpha_ris_rx: f64,
    pub beta_rt: RicianFactor,
    pub beta_it: RicianFactor,
    pub beta_ir: RicianFactor,
    pub los_model: LosModel,
}

impl Default for FadingSpec {
    fn default() -> Self {
        Self {
            t0_db: -30.0,
            alpha_direct: 2.8,
            alpha_tx_ris: 2.0,
            alpha_ris_rx: 2.0,
            beta_rt: RicianFactor(10.0),
            beta_it: RicianFactor(10.0),
            beta_ir: RicianFactor(10.0),
            los_model: LosModel::SteeringOuterProduct,
        }
    }
}

impl FadingSpec {
    pub fn validate(&self) -> Result<()> {
        let exps = [self.alpha_direct, self.alpha_tx_ris, self.alpha_ris_rx];
        if !exps.iter().all(|a| a.is_finite() && *a > 0.0) {
            return Err(Error::Config(format!("path-loss exponents must be positive: {exps:?}")));
        }
        if ![self.beta_rt, self.beta_it, self.beta_ir].iter().all(|b| b.0 >= 0.0) {
            return Err(Error::Config("Rician factors must be non-negative".into()));
        }
        if !self.t0_db.is_finite() {
            return Err(Error::Config("t0_db must be finite".into()));
        }
        Ok(())
    }
}

/// Noise floor and operating SNR (`P = σ² · 10^{snr/10}`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerSpec {
    pub noise_power_db: f64,
    pub snr_db: f64,
}

impl Default for PowerSpec {
    fn default() -> Self {
        Self {
            noise_power_db: -120.0,
            snr_db: 120.0,
        }
    }
}

impl PowerSpec {
    pub fn noise_power(&self) -> f64 {
        10f64.powf(self.noise_power_db / 10.0)
    }

    pub fn tx_power(&self) -> f64 {
        self.noise_power() * 10f64.powf(self.snr_db / 10.0)
    }
}

/// How link matrices are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelModel {
    /// Geometry, path loss and Rician fading.
    #[default]
    Geometric,
    /// Unit-variance i.i.d. Rayleigh entries on every link.
    Rayleigh,
}

/// `10^{T0/10} · d^{−α}`
pub fn path_loss(distance: f64, alpha: f64, t0_db: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::Config(format!(
            "path loss needs a positive distance, got {distance}"
        )));
    }
    Ok(10f64.powf(t0_db / 10.0) * distance.powf(-alpha))
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn cn<T: Real>(rng: &mut ChaCha8Rng) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(T::lit(re * s), T::lit(im * s))
}

fn steering<T: Real>(n: usize, angle: f64) -> DVector<Complex<T>> {
    let s = angle.sin();
    DVector::from_fn(n, |k, _| unit_phasor(T::lit(std::f64::consts::PI * k as f64 * s)))
}

fn rician_link<T: Real>(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    gain: f64,
    beta: RicianFactor,
    los: LosModel,
) -> DMatrix<Complex<T>> {
    let arrival = rng.random_range(0.0..std::f64::consts::TAU);
    let departure = rng.random_range(0.0..std::f64::consts::TAU);
    let nlos = DMatrix::from_fn(rows, cols, |_, _| cn::<T>(rng));
    let los_part = match los {
        LosModel::SteeringOuterProduct => steering::<T>(rows, arrival) * steering::<T>(cols, departure).adjoint(),
        LosModel::AllOnes => DMatrix::from_element(rows, cols, Complex::new(T::one(), T::zero())),
    };
    let (w_los, w_nlos) = beta.weights();
    let amp = gain.sqrt();
    let mut out = nlos * Complex::new(T::lit(amp * w_nlos), T::zero());
    if w_los > 0.0 {
        out += los_part * Complex::new(T::lit(amp * w_los), T::zero());
    }
    out
}

/// Draws node positions and every link of the network. Direct links use a
/// random stream independent of the RIS size, so sweeps over `L` share them.
pub fn sample_channels<T: Real>(
    cfg: &NetworkConfig,
    layout: &LayoutSpec,
    fading: &FadingSpec,
    power: &PowerSpec,
    seed: u64,
) -> Result<ChannelSet<T>> {
    cfg.validate()?;
    layout.validate()?;
    fading.validate()?;
    let k = cfg.pairs();
    let l = cfg.ris_elements;

    let mut pos_rng = ChaCha8Rng::seed_from_u64(seed);
    pos_rng.set_stream(STREAM_POSITIONS);
    let tx: Vec<[f64; 2]> = (0..k).map(|_| layout.tx_region.sample(&mut pos_rng)).collect();
    let rx: Vec<[f64; 2]> = (0..k).map(|_| layout.rx_region.sample(&mut pos_rng)).collect();
    let ris = layout.ris_position;

    let mut direct_rng = ChaCha8Rng::seed_from_u64(seed);
    direct_rng.set_stream(STREAM_DIRECT);
    let mut blocks = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let gain = path_loss(dist(rx[i], tx[j]), fading.alpha_direct, fading.t0_db)?;
            blocks.push(rician_link(
                &mut direct_rng,
                cfg.rx_antennas[i],
                cfg.tx_antennas[j],
                gain,
                fading.beta_rt,
                fading.los_model,
            ));
        }
    }

    let mut ris_rng = ChaCha8Rng::seed_from_u64(seed);
    ris_rng.set_stream(STREAM_RIS);
    let mut ris_rx = Vec::with_capacity(k);
    for i in 0..k {
        let gain = path_loss(dist(rx[i], ris), fading.alpha_ris_rx, fading.t0_db)?;
        ris_rx.push(rician_link(
            &mut ris_rng,
            cfg.rx_antennas[i],
            l,
            gain,
            fading.beta_ir,
            fading.los_model,
        ));
    }
    let mut tx_ris = Vec::with_capacity(k);
    for j in 0..k {
        let gain = path_loss(dist(tx[j], ris), fading.alpha_tx_ris, fading.t0_db)?;
        tx_ris.push(rician_link(
            &mut ris_rng,
            l,
            cfg.tx_antennas[j],
            gain,
            fading.beta_it,
            fading.los_model,
        ));
    }

    ChannelSet::new(
        ChannelGrid::new(cfg.clone(), blocks)?,
        ris_rx,
        tx_ris,
        T::lit(power.noise_power()),
        T::lit(power.tx_power()),
    )
}

/// Unit-variance i.i.d. Rayleigh links without geometry.
pub fn rayleigh_channels<T: Real>(cfg: &NetworkConfig, power: &PowerSpec, seed: u64) -> Result<ChannelSet<T>> {
    cfg.validate()?;
    let k = cfg.pairs();
    let l = cfg.ris_elements;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(STREAM_DIRECT);
    let direct = ChannelGrid::from_fn(cfg.clone(), |i, j| {
        DMatrix::from_fn(cfg.rx_antennas[i], cfg.tx_antennas[j], |_, _| cn::<T>(&mut rng))
    })?;
    let mut ris_rng = ChaCha8Rng::seed_from_u64(seed);
    ris_rng.set_stream(STREAM_RIS);
    let ris_rx = (0..k)
        .map(|i| DMatrix::from_fn(cfg.rx_antennas[i], l, |_, _| cn::<T>(&mut ris_rng)))
        .collect();
    let tx_ris = (0..k)
        .map(|j| DMatrix::from_fn(l, cfg.tx_antennas[j], |_, _| cn::<T>(&mut ris_rng)))
        .collect();
    ChannelSet::new(
        direct,
        ris_rx,
        tx_ris,
        T::lit(power.noise_power()),
        T::lit(power.tx_power()),
    )
}
