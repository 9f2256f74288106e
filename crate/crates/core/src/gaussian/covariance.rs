use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::drift::{fill_diffusion, fill_drift};
use crate::error::{shape_err, Error, Result};
use crate::params::NetworkParams;
use crate::ring::{MeanFieldState, MeanFieldTrajectory, RingCoupling};
use crate::rk4;

/// Tolerated asymmetry of a covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Tolerated negative eigenvalue of `C + i (hbar/2) Omega`.
pub const UNCERTAINTY_TOL: f64 = 1e-8;

/// Symmetrized second moments of the quadrature fluctuations, ordered
/// `(q_1, p_1, ..., q_N, p_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    pub t: f64,
    pub matrix: DMatrix<f64>,
}

impl CovarianceState {
    pub fn new(t: f64, matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || !matrix.nrows().is_multiple_of(2) {
            return Err(shape_err(
                "square matrix of even dimension",
                format!("{}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        Ok(Self { t, matrix })
    }

    /// Product of coherent states: `C = (hbar/2) I`.
    pub fn coherent(n_nodes: usize, hbar: f64, t: f64) -> Self {
        Self {
            t,
            matrix: DMatrix::identity(2 * n_nodes, 2 * n_nodes) * (0.5 * hbar),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// 2x2 block `[[C_qq, C_qp], [C_pq, C_pp]]` of 0-based node `l`.
    pub fn node_block(&self, l: usize) -> [[f64; 2]; 2] {
        let m = &self.matrix;
        [
            [m[(2 * l, 2 * l)], m[(2 * l, 2 * l + 1)]],
            [m[(2 * l + 1, 2 * l)], m[(2 * l + 1, 2 * l + 1)]],
        ]
    }

    pub fn max_asymmetry(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    /// Checks symmetry, positive diagonal and the uncertainty relation.
    pub fn validate(&self, hbar: f64) -> Result<()> {
        let asym = self.max_asymmetry();
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidState(format!(
                "covariance asymmetric by {asym:.3e}"
            )));
        }
        if let Some(i) = (0..self.matrix.nrows()).find(|&i| !(self.matrix[(i, i)] > 0.0)) {
            return Err(Error::InvalidState(format!(
                "diagonal entry {i} is {} (must be positive)",
                self.matrix[(i, i)]
            )));
        }
        let min = min_uncertainty_eigenvalue(&self.matrix, hbar);
        if min < -UNCERTAINTY_TOL {
            return Err(Error::InvalidState(format!(
                "uncertainty relation violated: min eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }
}

/// Symplectic form for the interleaved ordering, `Omega_{q_l, p_l} = 1`.
pub fn symplectic_form(n_nodes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_nodes, 2 * n_nodes);
    for l in 0..n_nodes {
        omega[(2 * l, 2 * l + 1)] = 1.0;
        omega[(2 * l + 1, 2 * l)] = -1.0;
    }
    omega
}

/// Smallest eigenvalue of the Hermitian matrix `C + i (hbar/2) Omega`.
/// Physical states have it nonnegative.
pub fn min_uncertainty_eigenvalue(c: &DMatrix<f64>, hbar: f64) -> f64 {
    let n = c.nrows() / 2;
    let omega = symplectic_form(n);
    let h = DMatrix::from_fn(c.nrows(), c.ncols(), |i, j| {
        let sym = 0.5 * (c[(i, j)] + c[(j, i)]);
        Complex64::new(sym, 0.5 * hbar * omega[(i, j)])
    });
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Drift `A` and diffusion `B` at one time.
pub type Coefficients = (DMatrix<f64>, DMatrix<f64>);

/// Integrates `dC/dt = A C + C A^T + B` with fixed RK4 steps, symmetrizing
/// after every step. `coefficients(t)` is queried at `t`, `t + dt/2`, `t + dt`.
///
/// Returns the initial state and every `sample_every`-th state (plus the
/// final one); each returned state is checked against the uncertainty
/// relation.
pub fn propagate_lyapunov<F>(
    c0: &CovarianceState,
    hbar: f64,
    dt: f64,
    steps: usize,
    sample_every: usize,
    mut coefficients: F,
) -> Result<Vec<CovarianceState>>
where
    F: FnMut(f64) -> Result<Coefficients>,
{
    if !(dt > 0.0) || sample_every == 0 {
        return Err(Error::InvalidParameter {
            name: "dt/sample_every",
            reason: format!("need dt > 0 and sample_every >= 1, got {dt}, {sample_every}"),
        });
    }
    let check = |state: &CovarianceState| -> Result<()> {
        let min = min_uncertainty_eigenvalue(&state.matrix, hbar);
        if min < -UNCERTAINTY_TOL || !min.is_finite() {
            return Err(Error::NumericalInstability {
                t: state.t,
                min_eigenvalue: min,
            });
        }
        Ok(())
    };
    check(c0)?;

    let mut out = vec![c0.clone()];
    let mut c = c0.matrix.clone();
    let t0 = c0.t;
    for i in 1..=steps {
        let t = t0 + (i - 1) as f64 * dt;
        let next = rk4::step(t, &c, dt, |t, c: &DMatrix<f64>| {
            let (a, b) = coefficients(t)?;
            let ac = &a * c;
            Ok::<_, Error>(&ac + ac.transpose() + b)
        })?;
        c = (&next + next.transpose()) * 0.5;
        if i % sample_every == 0 || i == steps {
            let state = CovarianceState {
                t: t0 + i as f64 * dt,
                matrix: c.clone(),
            };
            check(&state)?;
            out.push(state);
        }
    }
    Ok(out)
}

fn coefficients_at(
    state: &MeanFieldState,
    coupling: &RingCoupling,
    params: &NetworkParams,
) -> Coefficients {
    let dim = 2 * state.n_nodes();
    let mut a = DMatrix::zeros(dim, dim);
    let mut b = DMatrix::zeros(dim, dim);
    fill_drift(&mut a, state, coupling, params);
    fill_diffusion(&mut b, state, params);
    (a, b)
}

/// Propagates `c0` along a mean-field trajectory.
///
/// The trajectory must hold a sample at every half step `dt/2` from `c0.t`
/// to its end: RK4 stages then read the drift and diffusion directly from
/// stored states, with no interpolation.
pub fn propagate_covariance(
    c0: &CovarianceState,
    traj: &MeanFieldTrajectory,
    coupling: &RingCoupling,
    params: &NetworkParams,
    dt: f64,
    sample_every: usize,
) -> Result<Vec<CovarianceState>> {
    if c0.n_nodes() != coupling.n_nodes() || traj.last().n_nodes() != coupling.n_nodes() {
        return Err(shape_err(
            format!("{} nodes", coupling.n_nodes()),
            format!("covariance {} / trajectory {}", c0.n_nodes(), traj.last().n_nodes()),
        ));
    }
    c0.validate(params.hbar)?;
    let t_end = *traj.times.last().unwrap();
    let steps = ((t_end - c0.t) / dt).round();
    if steps < 1.0 || (c0.t + steps * dt - t_end).abs() > 1e-9 * t_end.abs().max(1.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!(
                "trajectory span [{}, {t_end}] is not a whole number of steps of {dt}",
                c0.t
            ),
        });
    }
    let tol = 1e-6 * dt;
    propagate_lyapunov(c0, params.hbar, dt, steps as usize, sample_every, |t| {
        let state = traj.sample_at(t, tol).ok_or_else(|| Error::InsufficientData(format!(
            "no mean-field sample at t = {t}; sample the trajectory every dt/2 = {}",
            dt / 2.0
        )))?;
        Ok(coefficients_at(state, coupling, params))
    })
}

/// Propagates `c0` for `span` with the mean field held fixed at `frozen`.
pub fn propagate_frozen(
    c0: &CovarianceState,
    frozen: &MeanFieldState,
    coupling: &RingCoupling,
    params: &NetworkParams,
    span: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Vec<CovarianceState>> {
    if c0.n_nodes() != frozen.n_nodes() || frozen.n_nodes() != coupling.n_nodes() {
        return Err(shape_err(
            format!("{} nodes", coupling.n_nodes()),
            format!("covariance {} / state {}", c0.n_nodes(), frozen.n_nodes()),
        ));
    }
    let coeffs = coefficients_at(frozen, coupling, params);
    propagate_lyapunov(
        c0,
        params.hbar,
        dt,
        rk4::step_count(span, dt),
        sample_every,
        |_| Ok(coeffs.clone()),
    )
}
