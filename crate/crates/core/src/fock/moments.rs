use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::lindblad::{check_schedule, FockDensityFull, Lindbladian, TruncationConfig};
use super::ops::SparseOp;
use crate::error::{shape_err, Error, Result};
use crate::gaussian::CovarianceState;
use crate::params::NetworkParams;
use crate::ring::RingCoupling;
use crate::rk4;

/// First and second moments of the fluctuation operators at one time:
/// `mean_l = <a_l>`, `pair_{l,m} = <a_l a_m>`, `number_{l,m} = <a_l^dagger a_m>`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSample {
    pub t: f64,
    pub mean: DVector<Complex64>,
    pub pair: DMatrix<Complex64>,
    pub number: DMatrix<Complex64>,
}

impl MomentSample {
    pub fn vacuum(n_nodes: usize, t: f64) -> Self {
        Self {
            t,
            mean: DVector::zeros(n_nodes),
            pair: DMatrix::zeros(n_nodes, n_nodes),
            number: DMatrix::zeros(n_nodes, n_nodes),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.mean.len()
    }

    pub fn from_fock(state: &FockDensityFull) -> Self {
        let n = state.n_sites;
        let ops: Vec<SparseOp> = (0..n)
            .map(|l| SparseOp::annihilation(state.n_t).embed(l, n))
            .collect();
        let daggers: Vec<SparseOp> = ops.iter().map(SparseOp::dagger).collect();
        Self {
            t: state.t,
            mean: DVector::from_fn(n, |l, _| state.expect(&ops[l])),
            pair: DMatrix::from_fn(n, n, |l, m| state.expect(&ops[l].mul(&ops[m]))),
            number: DMatrix::from_fn(n, n, |l, m| state.expect(&daggers[l].mul(&ops[m]))),
        }
    }

    /// Symmetrized quadrature covariance of the centred fluctuations with
    /// `q = sqrt(hbar/2)(a + a^dagger)`, `p = -i sqrt(hbar/2)(a - a^dagger)`.
    pub fn covariance(&self, hbar: f64) -> CovarianceState {
        let n = self.n_nodes();
        let m = &self.mean;
        let mut c = DMatrix::zeros(2 * n, 2 * n);
        for l in 0..n {
            for k in 0..n {
                let p = self.pair[(l, k)] - m[l] * m[k];
                let nn = self.number[(l, k)] - m[l].conj() * m[k];
                let delta = if l == k { 0.5 } else { 0.0 };
                c[(2 * l, 2 * k)] = hbar * (p.re + nn.re + delta);
                c[(2 * l + 1, 2 * k + 1)] = hbar * (nn.re - p.re + delta);
                c[(2 * l, 2 * k + 1)] = hbar * (p.im + nn.im);
                c[(2 * k + 1, 2 * l)] = c[(2 * l, 2 * k + 1)];
            }
        }
        CovarianceState { t: self.t, matrix: c }
    }
}

type MomentState = ((DVector<Complex64>, DMatrix<Complex64>), DMatrix<Complex64>);

/// Integrates the closed moment equations of the master equation linearized
/// about a frozen mean field `alpha`: gain `2 kappa1` on `a^dagger`, loss
/// `8 kappa2 |alpha|^2` on `a`, hopping `K` and the squeezing Hamiltonian
/// `i kappa2 (conj(alpha)^2 a^2 - alpha^2 a^dagger^2)`.
pub fn propagate_moments(
    initial: &MomentSample,
    alpha: &[Complex64],
    coupling: &RingCoupling,
    params: &NetworkParams,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Vec<MomentSample>> {
    params.validate_rates()?;
    let n = coupling.n_nodes();
    if alpha.len() != n || initial.n_nodes() != n {
        return Err(shape_err(
            format!("{n} nodes"),
            format!("alpha {} / moments {}", alpha.len(), initial.n_nodes()),
        ));
    }
    check_schedule(initial.t, t_end, dt, sample_every)?;
    let i = Complex64::new(0.0, 1.0);
    let gain = 2.0 * params.kappa1;
    let mut m = DMatrix::from_fn(n, n, |l, k| -i * coupling.entry(l, k));
    for l in 0..n {
        m[(l, l)] += 0.5 * (gain - 8.0 * params.kappa2 * alpha[l].norm_sqr());
    }
    let s = DMatrix::from_fn(n, n, |l, k| {
        if l == k {
            alpha[l] * alpha[l] * (-2.0 * params.kappa2)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let s_bar = s.map(|z| z.conj());
    let m_bar = m.map(|z| z.conj());
    let m_t = m.transpose();
    let g = DMatrix::from_diagonal_element(n, n, Complex64::new(gain, 0.0));

    let rhs = |y: &MomentState| -> MomentState {
        let ((mean, p), nn) = y;
        let dmean = &m * mean + &s * mean.map(|z| z.conj());
        let sn = &s * nn;
        let dp = &m * p + p * &m_t + &sn + sn.transpose() + &s;
        let dn = &m_bar * nn + nn * &m_t + &s_bar * p + p.map(|z| z.conj()) * &s + &g;
        ((dmean, dp), dn)
    };

    let steps = rk4::step_count(t_end - initial.t, dt);
    let mut y: MomentState = ((initial.mean.clone(), initial.pair.clone()), initial.number.clone());
    let mut out = vec![initial.clone()];
    for step in 1..=steps {
        let t = initial.t + (step - 1) as f64 * dt;
        y = rk4::step(t, &y, dt, |_, y: &MomentState| Ok::<_, Error>(rhs(y)))?;
        if step % sample_every == 0 || step == steps {
            let ((mean, pair), number) = &y;
            out.push(MomentSample {
                t: initial.t + step as f64 * dt,
                mean: mean.clone(),
                pair: pair.clone(),
                number: number.clone(),
            });
        }
    }
    Ok(out)
}

/// Moment oracle from vacuum fluctuations at `t = 0`.
pub fn linearized_moment_oracle(
    alpha: &[Complex64],
    coupling: &RingCoupling,
    params: &NetworkParams,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Vec<MomentSample>> {
    let initial = MomentSample::vacuum(alpha.len(), 0.0);
    propagate_moments(&initial, alpha, coupling, params, t_end, dt, sample_every)
}

/// The same linearized master equation integrated directly on a truncated
/// Fock space of the fluctuation modes, from vacuum at `t = 0`.
pub fn linearized_fock_evolve(
    alpha: &[Complex64],
    coupling: &RingCoupling,
    params: &NetworkParams,
    trunc: &TruncationConfig,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Vec<FockDensityFull>> {
    params.validate_rates()?;
    let n = coupling.n_nodes();
    if alpha.len() != n {
        return Err(shape_err(format!("{n} amplitudes"), alpha.len()));
    }
    let dim = trunc.full_dim(n)?;
    let ops: Vec<SparseOp> = (0..n)
        .map(|l| SparseOp::annihilation(trunc.n_t).embed(l, n))
        .collect();
    let mut h = SparseOp::zero(dim);
    let mut jumps = Vec::with_capacity(2 * n);
    for l in 0..n {
        for k in coupling.neighbours(l) {
            let w = Complex64::new(coupling.entry(l, k), 0.0);
            h = h.add(&ops[l].dagger().mul(&ops[k]).scale(w));
        }
        let a2 = ops[l].mul(&ops[l]);
        let sq = Complex64::new(0.0, params.kappa2);
        let a2_sq = alpha[l] * alpha[l];
        h = h
            .add(&a2.scale(sq * a2_sq.conj()))
            .add(&a2.dagger().scale(-sq * a2_sq));
        jumps.push(ops[l].dagger().scale(Complex64::new((2.0 * params.kappa1).sqrt(), 0.0)));
        let loss = (8.0 * params.kappa2).sqrt() * alpha[l].norm();
        jumps.push(ops[l].scale(Complex64::new(loss, 0.0)));
    }
    let mut vac = DMatrix::zeros(dim, dim);
    vac[(0, 0)] = Complex64::new(1.0, 0.0);
    let rho0 = FockDensityFull::new(0.0, n, trunc.n_t, vac)?;
    Lindbladian::new(&h, jumps).evolve(&rho0, t_end, dt, sample_every)
}
