use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::params::NetworkParams;

/// Steady-state occupation probabilities of the single-site chain with gain
/// `n -> n+1` at rate `2 kappa1 (n+1)` (for `n < n_t`) and two-photon loss
/// `n -> n-2` at rate `2 kappa2 n (n-1)`.
pub fn birth_death_steady_state(params: &NetworkParams, n_t: usize) -> Result<Vec<f64>> {
    params.validate_rates()?;
    if n_t < 2 {
        return Err(Error::InvalidParameter {
            name: "n_t",
            reason: "two-photon loss needs at least three levels".into(),
        });
    }
    let d = n_t + 1;
    let mut q = DMatrix::<f64>::zeros(d, d);
    for n in 0..d {
        if n < n_t {
            let g = 2.0 * params.kappa1 * (n + 1) as f64;
            q[(n + 1, n)] += g;
            q[(n, n)] -= g;
        }
        if n >= 2 {
            let l = 2.0 * params.kappa2 * (n * (n - 1)) as f64;
            q[(n - 2, n)] += l;
            q[(n, n)] -= l;
        }
    }
    // replace one balance equation by the normalization
    q.row_mut(0).fill(1.0);
    let mut rhs = DVector::zeros(d);
    rhs[0] = 1.0;
    let p = q
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Conditioning("birth-death generator is singular".into()))?;
    Ok(p.iter().copied().collect())
}

/// Steady `<a^dagger a>` of the birth-death chain.
pub fn steady_occupation(params: &NetworkParams, n_t: usize) -> Result<f64> {
    Ok(birth_death_steady_state(params, n_t)?
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum())
}
