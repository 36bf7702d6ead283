use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::{Complex, DMatrix};
use ris_align::pursuit::{AlignmentSolution, Transceivers};
use ris_align::{NetworkConfig, PhaseVector64};
use serde::{Deserialize, Serialize};

type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    pub tx_antennas: Vec<usize>,
    pub rx_antennas: Vec<usize>,
    pub streams: Vec<usize>,
    pub ris_elements: usize,
}

impl From<&NetworkConfig> for Dims {
    fn from(c: &NetworkConfig) -> Self {
        Self {
            tx_antennas: c.tx_antennas.clone(),
            rx_antennas: c.rx_antennas.clone(),
            streams: c.streams.clone(),
            ris_elements: c.ris_elements,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEntry {
    pub rank: usize,
    pub restart: usize,
    pub objective: Vec<f64>,
    pub alternations: usize,
    pub inner_iterations: usize,
    pub line_search_failures: usize,
}

/// On-disk form of a pursuit result. Complex numbers are `[re, im]` pairs and
/// matrices are lists of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub seed: u64,
    pub dims: Dims,
    pub feasible: bool,
    pub rank: usize,
    pub residual: f64,
    pub dof: Option<f64>,
    pub v: Vec<Pair>,
    pub decoders: Vec<Vec<Vec<Pair>>>,
    pub precoders: Vec<Vec<Vec<Pair>>>,
    pub trace: Vec<TraceEntry>,
}

fn pair(z: &Complex<f64>) -> Pair {
    [z.re, z.im]
}

fn rows(m: &DMatrix<Complex<f64>>) -> Vec<Vec<Pair>> {
    m.row_iter().map(|r| r.iter().map(pair).collect()).collect()
}

fn matrix(rows: &[Vec<Pair>], what: &str) -> Result<DMatrix<Complex<f64>>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        bail!("{what} has ragged rows");
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| {
        Complex::new(rows[i][j][0], rows[i][j][1])
    }))
}

impl SolutionFile {
    pub fn from_solution(seed: u64, cfg: &NetworkConfig, sol: &AlignmentSolution<f64>) -> Self {
        Self {
            seed,
            dims: cfg.into(),
            feasible: sol.feasible,
            rank: sol.rank,
            residual: sol.residual,
            dof: sol.dof,
            v: sol.phase_or_empty().as_vector().iter().map(pair).collect(),
            decoders: sol.decoders.iter().map(rows).collect(),
            precoders: sol.precoders.iter().map(rows).collect(),
            trace: sol
                .trace
                .iter()
                .map(|a| TraceEntry {
                    rank: a.rank,
                    restart: a.restart,
                    objective: a.history.objective.clone(),
                    alternations: a.history.alternations,
                    inner_iterations: a.history.inner_iterations,
                    line_search_failures: a.history.line_search_failures,
                })
                .collect(),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read solution {}", path.display()))?;
        serde_path_to_error::deserialize(&mut serde_json::Deserializer::from_str(&text))
            .map_err(|e| anyhow::anyhow!("invalid solution {} at `{}`: {}", path.display(), e.path(), e.inner()))
    }

    pub fn phase(&self) -> Result<PhaseVector64> {
        let v = nalgebra::DVector::from_iterator(self.v.len(), self.v.iter().map(|p| Complex::new(p[0], p[1])));
        PhaseVector64::new(v).context("solution phase vector is off the unit circle")
    }

    pub fn transceivers(&self) -> Result<Transceivers<f64>> {
        let u = self
            .decoders
            .iter()
            .map(|m| matrix(m, "decoder"))
            .collect::<Result<_>>()?;
        let v = self
            .precoders
            .iter()
            .map(|m| matrix(m, "precoder"))
            .collect::<Result<_>>()?;
        Ok((u, v))
    }
}

/// Writes through a temporary file in the destination directory and renames
/// it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
