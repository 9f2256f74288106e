use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::RingCoupling;
use crate::error::{shape_err, Error, Result};
use crate::params::NetworkParams;
use crate::rk4;

/// Amplitudes above this magnitude abort integration.
pub const DIVERGENCE_BOUND: f64 = 1e3;

/// Default step, in units of `1/kappa1`.
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldState {
    pub t: f64,
    pub alpha: Vec<Complex64>,
}

impl MeanFieldState {
    pub fn new(t: f64, alpha: Vec<Complex64>) -> Self {
        Self { t, alpha }
    }

    pub fn n_nodes(&self) -> usize {
        self.alpha.len()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.alpha.iter().map(|a| a.arg()).collect()
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.alpha.iter().map(|a| a.norm()).collect()
    }

    /// The same state rotated by `shift` nodes: node `l` takes the value of `l - shift`.
    pub fn rotated(&self, shift: usize) -> Self {
        let n = self.alpha.len();
        let alpha = (0..n).map(|l| self.alpha[(l + n - shift % n) % n]).collect();
        Self { t: self.t, alpha }
    }
}

/// Provenance of a trajectory, written next to it as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetadata {
    pub params: NetworkParams,
    pub coupling_strength: f64,
    pub coupling_range: usize,
    pub dt: f64,
    pub sample_every: usize,
    pub seed: Option<u64>,
    pub rng: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<MeanFieldState>,
    pub metadata: TrajectoryMetadata,
}

impl MeanFieldTrajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &MeanFieldState {
        self.states.last().expect("trajectory always holds its initial state")
    }

    /// Sample whose time is within `tol` of `t`, if any.
    pub fn sample_at(&self, t: f64, tol: f64) -> Option<&MeanFieldState> {
        let idx = self.times.partition_point(|&s| s < t - tol);
        self.states
            .get(idx)
            .filter(|s| (s.t - t).abs() <= tol)
    }

    /// Appends `other`, skipping its first sample when it repeats our last time.
    pub fn extend(&mut self, other: MeanFieldTrajectory) {
        let last = self.times.last().copied();
        for (t, s) in other.times.into_iter().zip(other.states) {
            if last.is_some_and(|lt| t <= lt) {
                continue;
            }
            self.times.push(t);
            self.states.push(s);
        }
    }
}

fn check_dims(n: usize, coupling: &RingCoupling, params: &NetworkParams) -> Result<()> {
    if coupling.n_nodes() != n {
        return Err(shape_err(
            format!("{} amplitudes (coupling size)", coupling.n_nodes()),
            n,
        ));
    }
    if params.n_nodes != n {
        return Err(shape_err(format!("{} amplitudes (params.n_nodes)", params.n_nodes), n));
    }
    Ok(())
}

/// Right-hand side evaluator with scratch space for the ring wrap.
#[derive(Debug, Clone)]
pub(crate) struct MeanFieldRhs<'a> {
    coupling: &'a RingCoupling,
    kappa1: f64,
    kappa2: f64,
    padded: Vec<Complex64>,
}

impl<'a> MeanFieldRhs<'a> {
    pub(crate) fn new(coupling: &'a RingCoupling, params: &NetworkParams) -> Self {
        Self {
            coupling,
            kappa1: params.kappa1,
            kappa2: params.kappa2,
            padded: Vec::with_capacity(2 * coupling.n_nodes()),
        }
    }

    pub(crate) fn eval(&mut self, alpha: &[Complex64], out: &mut [Complex64]) {
        let n = alpha.len();
        self.padded.clear();
        self.padded.extend_from_slice(alpha);
        self.padded.extend_from_slice(alpha);
        let w = self.coupling.weight();
        let offsets = self.coupling.offsets();
        for l in 0..n {
            let a = alpha[l];
            let mut hop = Complex64::new(0.0, 0.0);
            for &r in offsets {
                hop += self.padded[l + r];
            }
            let gain = self.kappa1 - 2.0 * self.kappa2 * a.norm_sqr();
            // -i * w * hop
            out[l] = a * gain + Complex64::new(w * hop.im, -w * hop.re);
        }
    }
}

/// `d alpha_l/dt = alpha_l (kappa1 - 2 kappa2 |alpha_l|^2) - i sum_{s != l} K_{l,s} alpha_s`.
pub fn mean_field_rhs(
    state: &MeanFieldState,
    coupling: &RingCoupling,
    params: &NetworkParams,
) -> Result<Vec<Complex64>> {
    check_dims(state.alpha.len(), coupling, params)?;
    let mut out = vec![Complex64::new(0.0, 0.0); state.alpha.len()];
    MeanFieldRhs::new(coupling, params).eval(&state.alpha, &mut out);
    Ok(out)
}

/// In-place RK4 stepper for the mean-field equations.
pub struct MeanFieldStepper<'a> {
    rhs: MeanFieldRhs<'a>,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl<'a> MeanFieldStepper<'a> {
    pub fn new(coupling: &'a RingCoupling, params: &NetworkParams) -> Self {
        let n = coupling.n_nodes();
        let zero = vec![Complex64::new(0.0, 0.0); n];
        Self {
            rhs: MeanFieldRhs::new(coupling, params),
            k: [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
            tmp: zero,
        }
    }

    pub fn step(&mut self, alpha: &mut [Complex64], dt: f64) {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        self.rhs.eval(alpha, k1);
        for i in 0..alpha.len() {
            tmp[i] = alpha[i] + k1[i] * (0.5 * dt);
        }
        self.rhs.eval(tmp, k2);
        for i in 0..alpha.len() {
            tmp[i] = alpha[i] + k2[i] * (0.5 * dt);
        }
        self.rhs.eval(tmp, k3);
        for i in 0..alpha.len() {
            tmp[i] = alpha[i] + k3[i] * dt;
        }
        self.rhs.eval(tmp, k4);
        for i in 0..alpha.len() {
            alpha[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
}

fn check_divergence(alpha: &[Complex64], t: f64) -> Result<()> {
    for (node, a) in alpha.iter().enumerate() {
        let magnitude = a.norm();
        if !(magnitude <= DIVERGENCE_BOUND) {
            return Err(Error::Divergence {
                t,
                node: node + 1,
                magnitude,
            });
        }
    }
    Ok(())
}

/// Integrates the mean-field equations from `state0` to `t_end` with fixed
/// RK4 steps of size `dt`, keeping every `sample_every`-th state plus the
/// initial and final ones.
pub fn integrate_mean_field(
    state0: &MeanFieldState,
    coupling: &RingCoupling,
    params: &NetworkParams,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<MeanFieldTrajectory> {
    check_dims(state0.alpha.len(), coupling, params)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be positive, got {dt}"),
        });
    }
    if !(t_end > state0.t) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: format!("must exceed the start time {}, got {t_end}", state0.t),
        });
    }
    if sample_every == 0 {
        return Err(Error::InvalidParameter {
            name: "sample_every",
            reason: "must be at least 1".into(),
        });
    }
    check_divergence(&state0.alpha, state0.t)?;

    let steps = rk4::step_count(t_end - state0.t, dt);
    let mut stepper = MeanFieldStepper::new(coupling, params);
    let mut alpha = state0.alpha.clone();
    let mut times = vec![state0.t];
    let mut states = vec![state0.clone()];
    for i in 1..=steps {
        stepper.step(&mut alpha, dt);
        let t = state0.t + i as f64 * dt;
        check_divergence(&alpha, t)?;
        if i % sample_every == 0 || i == steps {
            times.push(t);
            states.push(MeanFieldState::new(t, alpha.clone()));
        }
    }
    Ok(MeanFieldTrajectory {
        times,
        states,
        metadata: TrajectoryMetadata {
            params: *params,
            coupling_strength: coupling.strength(),
            coupling_range: coupling.range(),
            dt,
            sample_every,
            seed: None,
            rng: None,
        },
    })
}

/// Advances `state` to `t_end` without storing intermediate samples.
pub fn advance_mean_field(
    state: &MeanFieldState,
    coupling: &RingCoupling,
    params: &NetworkParams,
    t_end: f64,
    dt: f64,
) -> Result<MeanFieldState> {
    let steps = rk4::step_count(t_end - state.t, dt);
    integrate_mean_field(state, coupling, params, t_end, dt, steps).map(|traj| traj.last().clone())
}
