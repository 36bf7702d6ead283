use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Antenna and stream layout of a `K`-pair network with an `L`-element RIS.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// `N_k`
    pub tx_antennas: Vec<usize>,
    /// `M_k`
    pub rx_antennas: Vec<usize>,
    /// `d_k`
    pub streams: Vec<usize>,
    /// `L`; zero means no RIS.
    pub ris_elements: usize,
}

impl NetworkConfig {
    pub fn new(
        tx_antennas: Vec<usize>,
        rx_antennas: Vec<usize>,
        streams: Vec<usize>,
        ris_elements: usize,
    ) -> Result<Self> {
        let cfg = Self {
            tx_antennas,
            rx_antennas,
            streams,
            ris_elements,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same antennas and streams for every pair.
    pub fn symmetric(pairs: usize, tx: usize, rx: usize, streams: usize, ris_elements: usize) -> Result<Self> {
        Self::new(vec![tx; pairs], vec![rx; pairs], vec![streams; pairs], ris_elements)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.tx_antennas.len();
        if k == 0 {
            return Err(Error::Config("network needs at least one pair".into()));
        }
        if self.rx_antennas.len() != k || self.streams.len() != k {
            return Err(Error::Config(format!(
                "per-pair lists disagree in length: tx {}, rx {}, streams {}",
                k,
                self.rx_antennas.len(),
                self.streams.len()
            )));
        }
        for p in 0..k {
            let (n, m, d) = (self.tx_antennas[p], self.rx_antennas[p], self.streams[p]);
            if n == 0 || m == 0 || d == 0 {
                return Err(Error::Config(format!(
                    "pair {p}: antenna and stream counts must be >= 1"
                )));
            }
            if d > n.min(m) {
                return Err(Error::Config(format!(
                    "pair {p}: {d} streams exceed min(tx {n}, rx {m}) antennas"
                )));
            }
        }
        Ok(())
    }

    pub fn pairs(&self) -> usize {
        self.tx_antennas.len()
    }

    /// `M = Σ M_i d_i`
    pub fn m_total(&self) -> usize {
        self.rx_antennas.iter().zip(&self.streams).map(|(m, d)| m * d).sum()
    }

    /// `N = Σ N_j d_j`
    pub fn n_total(&self) -> usize {
        self.tx_antennas.iter().zip(&self.streams).map(|(n, d)| n * d).sum()
    }

    /// `S = Σ_i Σ_j d_i d_j`
    pub fn s_total(&self) -> usize {
        let total: usize = self.streams.iter().sum();
        total * total
    }

    pub fn total_streams(&self) -> usize {
        self.streams.iter().sum()
    }

    /// First row of pair `i`'s band in `X`.
    pub fn row_offset(&self, i: usize) -> usize {
        (0..i).map(|k| self.rx_antennas[k] * self.streams[k]).sum()
    }

    /// First column of pair `j`'s band in `X`.
    pub fn col_offset(&self, j: usize) -> usize {
        (0..j).map(|k| self.tx_antennas[k] * self.streams[k]).sum()
    }

    /// Offset of block `(i, j)` in the length-`S` target/residual vectors.
    pub fn block_offset(&self, i: usize, j: usize) -> usize {
        let k = self.pairs();
        let mut off = 0;
        for a in 0..k {
            for b in 0..k {
                if (a, b) == (i, j) {
                    return off;
                }
                off += self.streams[a] * self.streams[b];
            }
        }
        off
    }

    pub fn without_ris(&self) -> Self {
        Self {
            ris_elements: 0,
            ..self.clone()
        }
    }
}
