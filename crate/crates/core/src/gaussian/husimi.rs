use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CovarianceState;
use crate::error::{Error, Result};

/// Cell-centred square lattice over the `(q, p)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HusimiGrid {
    pub center: [f64; 2],
    /// Half-widths along q and p.
    pub extent: [f64; 2],
    /// Points per axis.
    pub resolution: usize,
}

impl HusimiGrid {
    pub fn cell_size(&self) -> [f64; 2] {
        let r = self.resolution as f64;
        [2.0 * self.extent[0] / r, 2.0 * self.extent[1] / r]
    }

    pub fn cell_area(&self) -> f64 {
        let [dq, dp] = self.cell_size();
        dq * dp
    }

    pub fn q(&self, i: usize) -> f64 {
        self.center[0] - self.extent[0] + (i as f64 + 0.5) * self.cell_size()[0]
    }

    pub fn p(&self, j: usize) -> f64 {
        self.center[1] - self.extent[1] + (j as f64 + 0.5) * self.cell_size()[1]
    }
}

/// Husimi density of one node sampled on a grid; `values[j * resolution + i]`
/// is the density at `(q(i), p(j))`.
///
/// Normalized as a probability density over `(q, p)`. The density over the
/// complex amplitude `z = (q + i p)/sqrt(2 hbar)` is this times `2 hbar`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HusimiField {
    pub grid: HusimiGrid,
    pub node: usize,
    pub mean: [f64; 2],
    pub covariance: [[f64; 2]; 2],
    pub values: Vec<f64>,
}

impl HusimiField {
    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.resolution + i]
    }
}

/// Gaussian Husimi function of the reduced state of 1-based `node`: mean
/// `sqrt(2 hbar) (Re alpha, Im alpha)` and covariance `C_node + (hbar/2) I`.
pub fn husimi_node(
    c: &CovarianceState,
    alpha: Complex64,
    node: usize,
    grid: &HusimiGrid,
    hbar: f64,
) -> Result<HusimiField> {
    if node < 1 || node > c.n_nodes() {
        return Err(Error::OutOfRange {
            what: "node",
            value: node as f64,
            min: 1.0,
            max: c.n_nodes() as f64,
        });
    }
    if grid.resolution == 0 || !(grid.extent[0] > 0.0 && grid.extent[1] > 0.0) {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "resolution and extents must be positive".into(),
        });
    }
    let [[a, b], [_, d]] = c.node_block(node - 1);
    let (a, d) = (a + 0.5 * hbar, d + 0.5 * hbar);
    let det = a * d - b * b;
    if !(a > 0.0 && det > 0.0) {
        return Err(Error::InvalidState(format!(
            "smoothed covariance of node {node} is not positive definite (det {det:.3e})"
        )));
    }
    let scale = (2.0 * hbar).sqrt();
    let mean = [scale * alpha.re, scale * alpha.im];
    let norm = 1.0 / (2.0 * PI * det.sqrt());
    let (ia, ib, id) = (d / det, -b / det, a / det);
    let n = grid.resolution;
    let mut values = Vec::with_capacity(n * n);
    for j in 0..n {
        let y = grid.p(j) - mean[1];
        for i in 0..n {
            let x = grid.q(i) - mean[0];
            let quad = ia * x * x + 2.0 * ib * x * y + id * y * y;
            values.push(norm * (-0.5 * quad).exp());
        }
    }
    Ok(HusimiField {
        grid: *grid,
        node,
        mean,
        covariance: [[a, b], [b, d]],
        values,
    })
}

/// Grid centred on the node's Husimi mean spanning `n_sigma` standard
/// deviations of its widest axis.
pub fn covering_grid(
    c: &CovarianceState,
    alpha: Complex64,
    node: usize,
    hbar: f64,
    n_sigma: f64,
    resolution: usize,
) -> HusimiGrid {
    let [[a, _], [_, d]] = c.node_block(node.saturating_sub(1).min(c.n_nodes() - 1));
    let sigma = (a.max(d) + 0.5 * hbar).sqrt();
    let scale = (2.0 * hbar).sqrt();
    HusimiGrid {
        center: [scale * alpha.re, scale * alpha.im],
        extent: [n_sigma * sigma, n_sigma * sigma],
        resolution,
    }
}
