use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use ris_align::netsim::{ChannelModel, FadingSpec, LayoutSpec, PowerSpec, Scenario, Scheme, SweepSpec, SweepVariable};
use ris_align::pursuit::PursuitOptions;
use ris_align::NetworkConfig;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// A count given once for all pairs or once per pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerPair {
    Uniform(usize),
    Each(Vec<usize>),
}

impl PerPair {
    fn expand(&self, pairs: usize, name: &str) -> Result<Vec<usize>> {
        match self {
            PerPair::Uniform(n) => Ok(vec![*n; pairs]),
            PerPair::Each(v) if v.len() == pairs => Ok(v.clone()),
            PerPair::Each(v) => bail!("network.{name} lists {} values for {pairs} pairs", v.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub pairs: usize,
    pub tx_antennas: PerPair,
    pub rx_antennas: PerPair,
    pub streams: PerPair,
    #[serde(default)]
    pub ris_elements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub trials: usize,
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub record_wall_time: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub network: NetworkSection,
    #[serde(default)]
    pub channel_model: ChannelModel,
    #[serde(default)]
    pub layout: LayoutSpec,
    #[serde(default)]
    pub fading: FadingSpec,
    #[serde(default)]
    pub power: PowerSpec,
    #[serde(default)]
    pub pursuit: PursuitOptions,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

impl RunConfig {
    /// Reads the JSON file, applies `key=value` overrides and validates every
    /// section.
    pub fn load(path: &Path, overrides: &[String], seed: Option<u64>) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut doc: Value =
            serde_json::from_str(&text).with_context(|| format!("malformed JSON in {}", path.display()))?;
        for item in overrides {
            apply_override(&mut doc, item)?;
        }
        let mut cfg: RunConfig = serde_path_to_error::deserialize(doc)
            .map_err(|e| anyhow!("invalid config {} at `{}`: {}", path.display(), e.path(), e.inner()))?;
        if let Some(seed) = seed {
            cfg.seed = seed;
        }
        cfg.scenario()?;
        if let Some(s) = &cfg.sweep_spec() {
            s.validate().context("invalid sweep section")?;
        }
        Ok(cfg)
    }

    pub fn network(&self) -> Result<NetworkConfig> {
        let n = &self.network;
        let cfg = NetworkConfig::new(
            n.tx_antennas.expand(n.pairs, "tx_antennas")?,
            n.rx_antennas.expand(n.pairs, "rx_antennas")?,
            n.streams.expand(n.pairs, "streams")?,
            n.ris_elements,
        )
        .context("invalid network section")?;
        Ok(cfg)
    }

    /// The solver-facing view, with the run seed copied into the pursuit.
    pub fn scenario(&self) -> Result<Scenario> {
        let scenario = Scenario {
            network: self.network()?,
            channel_model: self.channel_model,
            layout: self.layout,
            fading: self.fading,
            power: self.power,
            pursuit: PursuitOptions {
                seed: self.seed,
                ..self.pursuit.clone()
            },
        };
        scenario.validate().context("invalid config")?;
        Ok(scenario)
    }

    pub fn sweep_spec(&self) -> Option<SweepSpec> {
        let s = self.sweep.as_ref()?;
        Some(SweepSpec {
            base: self.scenario().ok()?,
            variable: s.variable,
            values: s.values.clone(),
            trials: s.trials,
            schemes: s.schemes.clone(),
            seed: self.seed,
            record_wall_time: s.record_wall_time,
        })
    }
}

/// `a.b.c=value`; the value is parsed as JSON and falls back to a string.
pub fn apply_override(doc: &mut Value, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| anyhow!("override `{item}` is not KEY=VALUE"))?;
    if key.is_empty() || key.split('.').any(str::is_empty) {
        bail!("override key `{key}` has an empty segment");
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let mut parts = key.split('.').peekable();
    while let Some(part) = parts.next() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| anyhow!("override `{key}`: `{part}` is not inside an object"))?;
        if parts.peek().is_none() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj.entry(part).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split yields at least one segment")
}
