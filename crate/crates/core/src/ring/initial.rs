use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MeanFieldState;
use crate::error::{Error, Result};
use crate::params::NetworkParams;

/// Name of the generator behind every seeded draw in this crate.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

/// Equal-amplitude start with a Gaussian-in-space random phase profile
/// `phi_l = theta_l / (sqrt(2 pi) sigma) * exp(-(l - mu)^2 / (2 sigma^2))`,
/// where each `theta_l` is drawn independently and uniformly from
/// `(-theta_range, theta_range)`. Node indices `l` and `mu` are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialConditionSpec {
    pub amplitude: f64,
    pub sigma: f64,
    pub mu: f64,
    pub theta_range: f64,
    pub seed: u64,
}

impl InitialConditionSpec {
    /// Limit-cycle amplitude, `sigma = 9`, `mu = N/2`, `theta_range = 24 pi`.
    pub fn standard(params: &NetworkParams, seed: u64) -> Self {
        Self {
            amplitude: params.limit_cycle_radius(),
            sigma: 9.0,
            mu: params.n_nodes as f64 / 2.0,
            theta_range: 24.0 * PI,
            seed,
        }
    }

    pub fn validate(&self, n_nodes: usize) -> Result<()> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "ic.amplitude",
                reason: format!("must be positive, got {}", self.amplitude),
            });
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "ic.sigma",
                reason: format!("must be positive, got {}", self.sigma),
            });
        }
        if !(self.mu >= 1.0 && self.mu <= n_nodes as f64) {
            return Err(Error::OutOfRange {
                what: "ic.mu",
                value: self.mu,
                min: 1.0,
                max: n_nodes as f64,
            });
        }
        if !(self.theta_range >= 0.0 && self.theta_range.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "ic.theta_range",
                reason: format!("must be finite and nonnegative, got {}", self.theta_range),
            });
        }
        Ok(())
    }

    /// Phase envelope at 1-based node `l` for unit `theta`.
    pub fn envelope(&self, l: usize) -> f64 {
        let x = l as f64 - self.mu;
        (-(x * x) / (2.0 * self.sigma * self.sigma)).exp() / ((2.0 * PI).sqrt() * self.sigma)
    }
}

/// Draws the per-node random amplitudes `theta_l` for the given seed.
pub fn draw_thetas(spec: &InitialConditionSpec, n_nodes: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..n_nodes)
        .map(|_| {
            if spec.theta_range == 0.0 {
                // keep the stream position identical
                let _: f64 = rng.gen();
                0.0
            } else {
                rng.gen_range(-spec.theta_range..spec.theta_range)
            }
        })
        .collect()
}

pub fn initial_conditions(
    spec: &InitialConditionSpec,
    params: &NetworkParams,
) -> Result<MeanFieldState> {
    params.validate()?;
    spec.validate(params.n_nodes)?;
    let thetas = draw_thetas(spec, params.n_nodes);
    let alpha = thetas
        .iter()
        .enumerate()
        .map(|(i, theta)| Complex64::from_polar(spec.amplitude, theta * spec.envelope(i + 1)))
        .collect();
    Ok(MeanFieldState { t: 0.0, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitudes_sit_on_limit_cycle() {
        let params = NetworkParams::standard(50);
        let spec = InitialConditionSpec::standard(&params, 7);
        let state = initial_conditions(&spec, &params).unwrap();
        assert_eq!(state.alpha.len(), 50);
        for a in &state.alpha {
            assert!((a.norm() - 1.5811388300841898).abs() < 1e-12);
        }
        assert!((spec.amplitude - 1.58).abs() < 0.002);
    }

    #[test]
    fn phase_at_center_is_theta_over_gaussian_norm() {
        let params = NetworkParams::standard(50);
        let spec = InitialConditionSpec::standard(&params, 3);
        let thetas = draw_thetas(&spec, 50);
        let state = initial_conditions(&spec, &params).unwrap();
        // mu = 25 (1-based) is index 24
        let expected = thetas[24] / ((2.0 * PI).sqrt() * 9.0);
        assert!((state.alpha[24].arg() - expected).abs() < 1e-12);
        assert!(thetas.iter().all(|t| t.abs() < 24.0 * PI));
    }

    #[test]
    fn same_seed_same_state() {
        let params = NetworkParams::standard(20);
        let spec = InitialConditionSpec::standard(&params, 42);
        let a = initial_conditions(&spec, &params).unwrap();
        let b = initial_conditions(&spec, &params).unwrap();
        assert_eq!(a, b);
        let other = InitialConditionSpec { seed: 43, ..spec };
        assert_ne!(a, initial_conditions(&other, &params).unwrap());
    }

    #[test]
    fn thetas_are_drawn_per_node() {
        let params = NetworkParams::standard(50);
        let thetas = draw_thetas(&InitialConditionSpec::standard(&params, 0), 50);
        let distinct = thetas
            .windows(2)
            .filter(|w| (w[0] - w[1]).abs() > 1e-9)
            .count();
        assert_eq!(distinct, 49);
    }

    #[test]
    fn invalid_specs_rejected() {
        let params = NetworkParams::standard(10);
        let good = InitialConditionSpec::standard(&params, 0);
        for bad in [
            InitialConditionSpec { amplitude: 0.0, ..good },
            InitialConditionSpec { sigma: -1.0, ..good },
            InitialConditionSpec { mu: 0.5, ..good },
            InitialConditionSpec { mu: 10.5, ..good },
        ] {
            assert!(initial_conditions(&bad, &params).is_err());
        }
    }
}
