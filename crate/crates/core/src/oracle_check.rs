//! Certification suite: cross-checks the Gaussian layer against the
//! truncated-Fock and moment oracles. Backs the `oracle-check` subcommand.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::fock::{
    evolve_full_lindblad, gutzwiller_evolve, linearized_fock_evolve, linearized_moment_oracle,
    steady_occupation, coherent_site, FockDensityFull, FockDensitySites, MomentSample,
    TruncationConfig,
};
use crate::gaussian::{drift_matrix, propagate_frozen, CovarianceState};
use crate::info::renyi2_entropy;
use crate::params::NetworkParams;
use crate::ring::{build_coupling, mean_field_rhs, MeanFieldState, RingCoupling};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

/// Central-difference Jacobian of the mean-field right-hand side in
/// `(Re alpha_1, Im alpha_1, ...)` coordinates.
pub fn finite_difference_jacobian(
    state: &MeanFieldState,
    coupling: &RingCoupling,
    params: &NetworkParams,
    h: f64,
) -> Result<DMatrix<f64>> {
    let n = state.n_nodes();
    let mut jac = DMatrix::zeros(2 * n, 2 * n);
    for col in 0..2 * n {
        let dir = if col % 2 == 0 { Complex64::new(h, 0.0) } else { Complex64::new(0.0, h) };
        let mut plus = state.clone();
        let mut minus = state.clone();
        plus.alpha[col / 2] += dir;
        minus.alpha[col / 2] -= dir;
        let fp = mean_field_rhs(&plus, coupling, params)?;
        let fm = mean_field_rhs(&minus, coupling, params)?;
        for l in 0..n {
            let d = (fp[l] - fm[l]) / (2.0 * h);
            jac[(2 * l, col)] = d.re;
            jac[(2 * l + 1, col)] = d.im;
        }
    }
    Ok(jac)
}

/// Largest entry of `|a - b|` divided by the largest entry of `|b|`.
pub fn relative_error(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax()
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckOutcome {
    match f() {
        Ok((passed, detail)) => CheckOutcome { name, passed, detail },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn limit_cycle_pair(params: &NetworkParams) -> Vec<Complex64> {
    let r0 = params.limit_cycle_radius();
    vec![Complex64::from_polar(r0, 0.3), Complex64::from_polar(r0, 1.9)]
}

pub fn check_linearization() -> CheckOutcome {
    check("drift vs finite-difference Jacobian", || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let n = rng.gen_range(2..=10);
            let params = NetworkParams::standard(n);
            let coupling = build_coupling(n, rng.gen_range(1..=n / 2), rng.gen_range(0.0..2.0))?;
            let alpha = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let state = MeanFieldState::new(0.0, alpha);
            let a = drift_matrix(&state, &coupling, &params)?;
            let j = finite_difference_jacobian(&state, &coupling, &params, 1e-6)?;
            worst = worst.max((&a.entries - j).amax());
        }
        Ok((worst <= 1e-6, format!("max abs error {worst:.2e} over 100 states (tol 1e-6)")))
    })
}

pub fn check_closed_form() -> CheckOutcome {
    check("frozen limit cycle closed form", || {
        let params = NetworkParams::standard(2);
        let coupling = build_coupling(2, 1, 0.0)?;
        let r0 = params.limit_cycle_radius();
        let frozen = MeanFieldState::new(0.0, vec![Complex64::new(r0, 0.0); 2]);
        let hbar = params.hbar;
        let out = propagate_frozen(&CovarianceState::coherent(2, hbar, 0.0), &frozen, &coupling, &params, 0.5, 1e-3, 10)?;
        let worst = out
            .iter()
            .map(|c| {
                let qq = 0.75 * hbar - 0.25 * hbar * (-4.0 * params.kappa1 * c.t).exp();
                let pp = 0.5 * hbar + 3.0 * hbar * params.kappa1 * c.t;
                (c.matrix[(0, 0)] - qq).abs().max((c.matrix[(1, 1)] - pp).abs())
            })
            .fold(0.0, f64::max);
        Ok((worst <= 1e-6, format!("max abs error {worst:.2e} (tol 1e-6)")))
    })
}

pub fn check_moment_oracle() -> CheckOutcome {
    check("covariance vs moment equations (N=2)", || {
        let params = NetworkParams::standard(2);
        let coupling = build_coupling(2, 1, 1.2)?;
        let alpha = limit_cycle_pair(&params);
        let frozen = MeanFieldState::new(0.0, alpha.clone());
        let gauss = propagate_frozen(
            &CovarianceState::coherent(2, params.hbar, 0.0),
            &frozen,
            &coupling,
            &params,
            0.5,
            1e-3,
            50,
        )?;
        let moments = linearized_moment_oracle(&alpha, &coupling, &params, 0.5, 1e-3, 50)?;
        let worst = gauss
            .iter()
            .zip(&moments)
            .map(|(g, m)| relative_error(&g.matrix, &m.covariance(params.hbar).matrix))
            .fold(0.0, f64::max);
        Ok((worst <= 1e-3, format!("max relative error {worst:.2e} (tol 1e-3)")))
    })
}

pub fn check_linearized_fock() -> CheckOutcome {
    check("covariance vs linearized Fock master equation (N=2)", || {
        let params = NetworkParams::standard(2);
        let coupling = build_coupling(2, 1, 1.2)?;
        let alpha = limit_cycle_pair(&params);
        let frozen = MeanFieldState::new(0.0, alpha.clone());
        let dt = 2e-3;
        let gauss = propagate_frozen(
            &CovarianceState::coherent(2, params.hbar, 0.0),
            &frozen,
            &coupling,
            &params,
            0.5,
            dt,
            50,
        )?;
        let trunc = TruncationConfig::new(18)?;
        let fock = linearized_fock_evolve(&alpha, &coupling, &params, &trunc, 0.5, dt, 50)?;
        let worst = gauss
            .iter()
            .zip(&fock)
            .map(|(g, f)| relative_error(&g.matrix, &MomentSample::from_fock(f).covariance(params.hbar).matrix))
            .fold(0.0, f64::max);
        Ok((worst <= 1e-3, format!("max relative error {worst:.2e} (tol 1e-3)")))
    })
}

pub fn check_purity() -> CheckOutcome {
    check("Gaussian S2 vs Fock purity (single node, t=0.25)", || {
        let params = NetworkParams::standard(2);
        let single = build_coupling(2, 1, 0.0)?;
        let r0 = params.limit_cycle_radius();
        let frozen = MeanFieldState::new(0.0, vec![Complex64::new(r0, 0.0); 2]);
        let c = propagate_frozen(&CovarianceState::coherent(2, params.hbar, 0.0), &frozen, &single, &params, 0.25, 1e-3, 250)?;
        let block = c.last().unwrap().matrix.view((0, 0), (2, 2)).into_owned();
        let s2 = renyi2_entropy(&block, params.hbar)?;
        let lone = RingCoupling::isolated();
        let trunc = TruncationConfig::new(25)?;
        let fock = linearized_fock_evolve(&[Complex64::new(r0, 0.0)], &lone, &params, &trunc, 0.25, 1e-3, 250)?;
        let s2_fock = -fock.last().unwrap().purity().ln();
        let err = (s2 - s2_fock).abs();
        Ok((err <= 1e-3, format!("S2 {s2:.6} vs -ln tr(rho^2) {s2_fock:.6} (tol 1e-3)")))
    })
}

/// Steady `<a^dagger a>` of a single site from the full solver.
pub fn full_steady_occupation(params: &NetworkParams, n_t: usize, t_end: f64, dt: f64) -> Result<f64> {
    let trunc = TruncationConfig::new(n_t)?;
    let rho0 = FockDensityFull::coherent(&[Complex64::new(0.5, 0.0)], n_t)?;
    let steps = (t_end / dt).round() as usize;
    let out = evolve_full_lindblad(&rho0, &RingCoupling::isolated(), params, &trunc, t_end, dt, steps)?;
    Ok(out.last().unwrap().occupation(0))
}

pub fn check_steady_state() -> CheckOutcome {
    check("single-site steady state vs birth-death chain (n_t=20)", || {
        let params = NetworkParams::standard(2);
        let full = full_steady_occupation(&params, 20, 40.0, 5e-3)?;
        let chain = steady_occupation(&params, 20)?;
        let err = (full - chain).abs();
        Ok((err <= 1e-6, format!("<n> {full:.9} vs {chain:.9}, diff {err:.2e} (tol 1e-6)")))
    })
}

pub fn check_gutzwiller_decoupled() -> CheckOutcome {
    check("Gutzwiller at V=0 vs single-site full solver", || {
        let params = NetworkParams::standard(3);
        let n_t = 10;
        let trunc = TruncationConfig::new(n_t)?;
        let starts = [Complex64::new(0.5, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.2, 0.4)];
        let sites = FockDensitySites::new(0.0, n_t, starts.iter().map(|&a| coherent_site(a, n_t)).collect())?;
        let gw = gutzwiller_evolve(&sites, &build_coupling(3, 1, 0.0)?, &params, &trunc, 1.0, 1e-3, 100)?;
        let mut worst = 0.0f64;
        for (l, &a) in starts.iter().enumerate() {
            let rho0 = FockDensityFull::coherent(&[a], n_t)?;
            let full = evolve_full_lindblad(&rho0, &RingCoupling::isolated(), &params, &trunc, 1.0, 1e-3, 100)?;
            for (g, f) in gw.iter().zip(&full) {
                worst = worst.max((&g.rhos[l] - &f.rho).iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        Ok((worst <= 1e-8, format!("max density-matrix deviation {worst:.2e} (tol 1e-8)")))
    })
}

pub fn check_gutzwiller_coupled() -> CheckOutcome {
    check("Gutzwiller vs full solver (N=2, V=0.2, t<=0.5)", || {
        let params = NetworkParams::standard(2);
        let n_t = 12;
        let trunc = TruncationConfig::new(n_t)?;
        let coupling = build_coupling(2, 1, 0.2)?;
        let starts = [Complex64::new(1.2, 0.0), Complex64::new(0.0, 0.9)];
        let sites = FockDensitySites::new(0.0, n_t, starts.iter().map(|&a| coherent_site(a, n_t)).collect())?;
        let gw = gutzwiller_evolve(&sites, &coupling, &params, &trunc, 0.5, 1e-3, 50)?;
        let full = evolve_full_lindblad(&FockDensityFull::coherent(&starts, n_t)?, &coupling, &params, &trunc, 0.5, 1e-3, 50)?;
        let mut worst = 0.0f64;
        for (g, f) in gw.iter().zip(&full) {
            for (l, ag) in g.mean_amplitudes().into_iter().enumerate() {
                let af = f.mean_amplitude(l);
                worst = worst.max((ag - af).norm() / af.norm());
            }
        }
        Ok((worst <= 0.05, format!("max relative deviation of <a_l> {worst:.2e} (tol 5e-2)")))
    })
}

pub fn check_trace() -> CheckOutcome {
    check("trace preservation of the full solver", || {
        let params = NetworkParams::standard(2);
        let trunc = TruncationConfig::new(6)?;
        let rho0 = FockDensityFull::coherent(&[Complex64::new(0.7, -0.4), Complex64::new(0.1, 0.9)], 6)?;
        let out = evolve_full_lindblad(&rho0, &build_coupling(2, 1, 1.0)?, &params, &trunc, 0.2, 1e-3, 1)?;
        let worst = out.iter().map(|s| s.trace_drift.abs()).fold(0.0, f64::max);
        Ok((worst <= 1e-10, format!("max |tr(rho) - 1| {worst:.2e} (tol 1e-10)")))
    })
}

/// Runs every certification check in a fixed order.
pub fn run_oracle_checks() -> Vec<CheckOutcome> {
    vec![
        check_linearization(),
        check_closed_form(),
        check_moment_oracle(),
        check_linearized_fock(),
        check_purity(),
        check_trace(),
        check_steady_state(),
        check_gutzwiller_decoupled(),
        check_gutzwiller_coupled(),
    ]
}
