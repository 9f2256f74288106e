use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shortest distance between nodes `l` and `m` on a ring of `n` nodes.
pub fn ring_distance(l: usize, m: usize, n: usize) -> usize {
    let diff = l.abs_diff(m) % n;
    diff.min(n - diff)
}

/// Nonlocal ring coupling `K[l][m] = V/(2d)` for `0 < dist(l, m) <= d`.
///
/// The dense matrix is kept for inspection and export; the dynamics use the
/// precomputed circulant offsets, which hold each coupled neighbour once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingCoupling {
    strength: f64,
    range: usize,
    n_nodes: usize,
    #[serde(skip)]
    offsets: Vec<usize>,
}

impl RingCoupling {
    pub fn new(n_nodes: usize, range: usize, strength: f64) -> Result<Self> {
        if n_nodes < 2 {
            return Err(Error::TooFewNodes(n_nodes));
        }
        if range < 1 || range > n_nodes / 2 {
            return Err(Error::OutOfRange {
                what: "coupling range d",
                value: range as f64,
                min: 1.0,
                max: (n_nodes / 2) as f64,
            });
        }
        if !(strength >= 0.0 && strength.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "coupling strength V",
                reason: format!("must be finite and nonnegative, got {strength}"),
            });
        }
        let mut offsets: Vec<usize> = (1..=range)
            .flat_map(|r| [r % n_nodes, (n_nodes - r) % n_nodes])
            .collect();
        offsets.sort_unstable();
        offsets.dedup();
        Ok(Self {
            strength,
            range,
            n_nodes,
            offsets,
        })
    }

    /// A single node with no neighbours, for single-site reference solvers.
    pub fn isolated() -> Self {
        Self {
            strength: 0.0,
            range: 0,
            n_nodes: 1,
            offsets: Vec::new(),
        }
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Coupling constant shared by every coupled pair, `V / (2d)`.
    pub fn weight(&self) -> f64 {
        self.strength / (2.0 * self.range as f64)
    }

    /// Ring offsets `r` such that node `l` couples to `(l + r) mod N`.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Coupled neighbours of node `l` (0-based), each listed once.
    pub fn neighbours(&self, l: usize) -> impl Iterator<Item = usize> + '_ {
        self.offsets.iter().map(move |r| (l + r) % self.n_nodes)
    }

    pub fn entry(&self, l: usize, m: usize) -> f64 {
        let dist = ring_distance(l, m, self.n_nodes);
        if dist != 0 && dist <= self.range {
            self.weight()
        } else {
            0.0
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n_nodes, self.n_nodes, |l, m| self.entry(l, m))
    }

    /// Rebuilds the offset table after deserialization.
    pub fn rebuilt(&self) -> Result<Self> {
        if self.n_nodes == 1 && self.range == 0 {
            return Ok(Self::isolated());
        }
        Self::new(self.n_nodes, self.range, self.strength)
    }
}

/// Builds the ring coupling for `n_nodes` nodes with range `d` and strength `V`.
pub fn build_coupling(n_nodes: usize, d: usize, strength: f64) -> Result<RingCoupling> {
    RingCoupling::new(n_nodes, d, strength)
}
