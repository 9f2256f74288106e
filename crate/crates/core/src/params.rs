use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the oscillator network. Rates are in units of
/// `kappa1`, which is 1 by default; times are then in units of `1/kappa1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    /// One-photon gain rate.
    pub kappa1: f64,
    /// Two-photon loss rate.
    pub kappa2: f64,
    pub hbar: f64,
    pub n_nodes: usize,
}

impl NetworkParams {
    pub fn new(kappa1: f64, kappa2: f64, hbar: f64, n_nodes: usize) -> Result<Self> {
        let params = Self {
            kappa1,
            kappa2,
            hbar,
            n_nodes,
        };
        params.validate()?;
        Ok(params)
    }

    /// `kappa1 = hbar = 1`, `kappa2 = 0.2`.
    pub fn standard(n_nodes: usize) -> Self {
        Self {
            kappa1: 1.0,
            kappa2: 0.2,
            hbar: 1.0,
            n_nodes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_rates()?;
        if self.n_nodes < 2 {
            return Err(Error::TooFewNodes(self.n_nodes));
        }
        Ok(())
    }

    /// Checks the rates and `hbar` only; single-site solvers ignore `n_nodes`.
    pub fn validate_rates(&self) -> Result<()> {
        for (name, value) in [
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("hbar", self.hbar),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {value}"),
                });
            }
        }
        Ok(())
    }

    /// Radius of the uncoupled limit cycle, `sqrt(kappa1 / (2 kappa2))`.
    pub fn limit_cycle_radius(&self) -> f64 {
        (self.kappa1 / (2.0 * self.kappa2)).sqrt()
    }
}
