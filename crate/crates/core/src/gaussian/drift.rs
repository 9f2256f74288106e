use nalgebra::DMatrix;

use crate::error::{shape_err, Result};
use crate::params::NetworkParams;
use crate::ring::{MeanFieldState, RingCoupling};

/// Drift matrix of the linearized fluctuations in the quadrature ordering
/// `(q_1, p_1, ..., q_N, p_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    pub t: f64,
    pub entries: DMatrix<f64>,
}

/// Diffusion matrix matching [`DriftMatrix`]; block diagonal and isotropic per node.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionMatrix {
    pub t: f64,
    pub entries: DMatrix<f64>,
}

fn check(state: &MeanFieldState, n: usize) -> Result<()> {
    if state.n_nodes() != n {
        return Err(shape_err(format!("{n} nodes"), state.n_nodes()));
    }
    Ok(())
}

/// Linearization of the mean-field equations about `state`.
///
/// With `u + i v = alpha_l^2` the node block is
/// `(kappa1 - 4 kappa2 |alpha_l|^2) I - 2 kappa2 [[u, v], [v, -u]]`
/// and the block coupling nodes `l, s` is `K_{l,s} [[0, 1], [-1, 0]]`.
pub fn drift_matrix(
    state: &MeanFieldState,
    coupling: &RingCoupling,
    params: &NetworkParams,
) -> Result<DriftMatrix> {
    let n = coupling.n_nodes();
    check(state, n)?;
    check(state, params.n_nodes)?;
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    fill_drift(&mut a, state, coupling, params);
    Ok(DriftMatrix {
        t: state.t,
        entries: a,
    })
}

pub(crate) fn fill_drift(
    a: &mut DMatrix<f64>,
    state: &MeanFieldState,
    coupling: &RingCoupling,
    params: &NetworkParams,
) {
    a.fill(0.0);
    let w = coupling.weight();
    for (l, alpha) in state.alpha.iter().enumerate() {
        let sq = alpha * alpha;
        let g = params.kappa1 - 4.0 * params.kappa2 * alpha.norm_sqr();
        let (u, v) = (sq.re, sq.im);
        let (q, p) = (2 * l, 2 * l + 1);
        a[(q, q)] = g - 2.0 * params.kappa2 * u;
        a[(q, p)] = -2.0 * params.kappa2 * v;
        a[(p, q)] = -2.0 * params.kappa2 * v;
        a[(p, p)] = g + 2.0 * params.kappa2 * u;
        for s in coupling.neighbours(l) {
            a[(q, 2 * s + 1)] = w;
            a[(p, 2 * s)] = -w;
        }
    }
}

/// Node blocks `hbar (kappa1 + 4 kappa2 |alpha_l|^2) I`.
pub fn diffusion_matrix(state: &MeanFieldState, params: &NetworkParams) -> Result<DiffusionMatrix> {
    check(state, params.n_nodes)?;
    let n = state.n_nodes();
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    fill_diffusion(&mut b, state, params);
    Ok(DiffusionMatrix {
        t: state.t,
        entries: b,
    })
}

pub(crate) fn fill_diffusion(b: &mut DMatrix<f64>, state: &MeanFieldState, params: &NetworkParams) {
    b.fill(0.0);
    for (l, alpha) in state.alpha.iter().enumerate() {
        let d = params.hbar * (params.kappa1 + 4.0 * params.kappa2 * alpha.norm_sqr());
        b[(2 * l, 2 * l)] = d;
        b[(2 * l + 1, 2 * l + 1)] = d;
    }
}
