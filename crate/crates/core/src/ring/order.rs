use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MeanFieldState, MeanFieldTrajectory};
use crate::error::{Error, Result};

/// Windowed phase coherence around each node,
/// `R_l = |(1/2w) sum_{0<|m-l|<=w} exp(i phi_m)|`, indices taken on the ring.
pub fn local_order_parameter(state: &MeanFieldState, window: usize) -> Result<Vec<f64>> {
    let n = state.n_nodes();
    if window < 1 || window > n / 2 {
        return Err(Error::OutOfRange {
            what: "order-parameter window",
            value: window as f64,
            min: 1.0,
            max: (n / 2) as f64,
        });
    }
    let unit: Vec<Complex64> = state
        .alpha
        .iter()
        .map(|a| {
            let r = a.norm();
            if r > 0.0 {
                a / r
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .collect();
    let norm = 1.0 / (2 * window) as f64;
    Ok((0..n)
        .map(|l| {
            let sum: Complex64 = (1..=window)
                .map(|r| unit[(l + r) % n] + unit[(l + n - r) % n])
                .sum();
            (sum * norm).norm()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Synchronized,
    Desynchronized,
    Chimera,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Synchronized => "synchronized",
            Regime::Desynchronized => "desynchronized",
            Regime::Chimera => "chimera",
        })
    }
}

/// Coherence thresholds: a node is coherent above `high`, incoherent below `low`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub high: f64,
    pub low: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            high: 0.85,
            low: 0.6,
        }
    }
}

/// Window used for regime classification unless configured otherwise.
pub const DEFAULT_CLASSIFY_WINDOW: usize = 4;

/// Minimum fraction of nodes on each side of the thresholds for a chimera.
pub const CHIMERA_MIN_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub regime: Regime,
    /// Set when neither pure label nor the chimera rule matched and the
    /// nearest pure label was reported instead.
    pub low_confidence: bool,
    /// Time-averaged `R_l` over the analysed window.
    pub mean_order: Vec<f64>,
    pub fraction_coherent: f64,
    pub fraction_incoherent: f64,
}

/// Labels a trajectory from `R_l` averaged over its final 20% in time.
pub fn classify_regime(
    traj: &MeanFieldTrajectory,
    window: usize,
    thresholds: Thresholds,
) -> Result<Classification> {
    if traj.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "classification needs at least 10 samples, got {}",
            traj.len()
        )));
    }
    if !(thresholds.low <= thresholds.high) {
        return Err(Error::InvalidParameter {
            name: "thresholds",
            reason: format!("low {} exceeds high {}", thresholds.low, thresholds.high),
        });
    }
    let t0 = traj.times[0];
    let t1 = *traj.times.last().unwrap();
    let cut = t0 + 0.8 * (t1 - t0);
    let tail: Vec<&MeanFieldState> = traj
        .states
        .iter()
        .zip(&traj.times)
        .filter(|(_, &t)| t >= cut - 1e-12)
        .map(|(s, _)| s)
        .collect();

    let n = traj.last().n_nodes();
    let mut mean_order = vec![0.0; n];
    for s in &tail {
        for (acc, r) in mean_order.iter_mut().zip(local_order_parameter(s, window)?) {
            *acc += r;
        }
    }
    mean_order.iter_mut().for_each(|r| *r /= tail.len() as f64);

    let coherent = mean_order.iter().filter(|&&r| r > thresholds.high).count();
    let incoherent = mean_order.iter().filter(|&&r| r < thresholds.low).count();
    let fraction_coherent = coherent as f64 / n as f64;
    let fraction_incoherent = incoherent as f64 / n as f64;

    let (regime, low_confidence) = if coherent == n {
        (Regime::Synchronized, false)
    } else if incoherent == n {
        (Regime::Desynchronized, false)
    } else if fraction_coherent >= CHIMERA_MIN_FRACTION
        && fraction_incoherent >= CHIMERA_MIN_FRACTION
    {
        (Regime::Chimera, false)
    } else {
        let mean = mean_order.iter().sum::<f64>() / n as f64;
        let pure = if mean >= 0.5 * (thresholds.high + thresholds.low) {
            Regime::Synchronized
        } else {
            Regime::Desynchronized
        };
        (pure, true)
    };

    Ok(Classification {
        regime,
        low_confidence,
        mean_order,
        fraction_coherent,
        fraction_incoherent,
    })
}
