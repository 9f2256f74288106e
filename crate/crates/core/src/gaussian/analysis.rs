use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::CovarianceState;
use crate::error::{shape_err, Error, Result};
use crate::ring::RingCoupling;

/// Coupling-weighted momentum correlations around each node,
/// `Psi_l = sum_{m != l} K_{l,m} C_{p_l, p_m}`.
pub fn weighted_correlation(c: &CovarianceState, coupling: &RingCoupling) -> Result<Vec<f64>> {
    let n = coupling.n_nodes();
    if c.n_nodes() != n {
        return Err(shape_err(format!("{n} nodes"), c.n_nodes()));
    }
    let w = coupling.weight();
    Ok((0..n)
        .map(|l| {
            w * coupling
                .neighbours(l)
                .map(|m| c.matrix[(2 * l + 1, 2 * m + 1)])
                .sum::<f64>()
        })
        .collect())
}

/// Principal axes of one node's quadrature covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingAxes {
    /// Direction of the minor axis in the `(q, p)` plane, in `[0, pi)`.
    pub angle: f64,
    pub minor: f64,
    pub major: f64,
    pub isotropic: bool,
}

/// Eigen-decomposition of the 2x2 block of 1-based `node`.
pub fn squeezing_axes(c: &CovarianceState, node: usize) -> Result<SqueezingAxes> {
    if node < 1 || node > c.n_nodes() {
        return Err(Error::OutOfRange {
            what: "node",
            value: node as f64,
            min: 1.0,
            max: c.n_nodes() as f64,
        });
    }
    let [[a, b], [_, d]] = c.node_block(node - 1);
    let b = 0.5 * (b + c.matrix[(2 * node - 1, 2 * node - 2)]);
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let (minor, major) = (mean - half_gap, mean + half_gap);
    if half_gap <= 1e-12 * mean.abs().max(f64::MIN_POSITIVE) {
        return Ok(SqueezingAxes {
            angle: 0.0,
            minor: mean,
            major: mean,
            isotropic: true,
        });
    }
    // major axis at 0.5 atan2(2b, a - d); the minor axis is perpendicular
    let major_angle = 0.5 * (2.0 * b).atan2(a - d);
    let angle = (major_angle + 0.5 * PI).rem_euclid(PI);
    Ok(SqueezingAxes {
        angle: if angle >= PI { 0.0 } else { angle },
        minor,
        major,
        isotropic: false,
    })
}

/// Circular standard deviation of axial angles (defined modulo `pi`).
pub fn axial_circular_std(angles: &[f64]) -> f64 {
    if angles.is_empty() {
        return 0.0;
    }
    let (s, c) = angles
        .iter()
        .fold((0.0, 0.0), |(s, c), a| (s + (2.0 * a).sin(), c + (2.0 * a).cos()));
    let r = (s * s + c * c).sqrt() / angles.len() as f64;
    0.5 * (-2.0 * r.max(1e-300).ln()).sqrt()
}
