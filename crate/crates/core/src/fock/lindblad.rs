use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ops::SparseOp;
use crate::error::{shape_err, Error, Result};
use crate::params::NetworkParams;
use crate::ring::RingCoupling;
use crate::rk4;

/// Largest network handled by the full solver.
pub const MAX_FULL_SITES: usize = 3;
/// Default cap on the full Hilbert-space dimension.
pub const DEFAULT_BUDGET: usize = 512;
/// Default per-site cutoff.
pub const DEFAULT_N_T: usize = 15;
/// Most negative density-matrix eigenvalue tolerated before the cutoff is
/// declared too small.
pub const POSITIVITY_TOL: f64 = 1e-4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationConfig {
    /// Highest occupation kept per site.
    pub n_t: usize,
    /// Cap on the full-network dimension `(n_t + 1)^N`.
    pub budget: usize,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            n_t: DEFAULT_N_T,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl TruncationConfig {
    pub fn new(n_t: usize) -> Result<Self> {
        let t = Self {
            n_t,
            ..Self::default()
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_t < 1 {
            return Err(Error::InvalidParameter {
                name: "n_t",
                reason: "truncation must keep at least levels 0 and 1".into(),
            });
        }
        Ok(())
    }

    pub fn site_dim(&self) -> usize {
        self.n_t + 1
    }

    /// Full-network dimension, checked against the site cap and the budget.
    pub fn full_dim(&self, n_sites: usize) -> Result<usize> {
        self.validate()?;
        let dim = (self.site_dim() as u64).checked_pow(n_sites as u32);
        match dim {
            Some(d) if n_sites <= MAX_FULL_SITES && d <= self.budget as u64 => Ok(d as usize),
            _ => Err(Error::Capacity {
                dim: dim.map_or(usize::MAX, |d| d.min(usize::MAX as u64) as usize),
                budget: self.budget,
            }
            .context(format!(
                "full Lindblad solver is limited to {MAX_FULL_SITES} sites, got {n_sites}"
            ))),
        }
    }
}

/// Density matrix of the whole network on `(n_t + 1)^N` levels.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityFull {
    pub t: f64,
    pub n_sites: usize,
    pub n_t: usize,
    pub rho: DMatrix<Complex64>,
    /// `tr(rho) - 1` of the raw integrated state; `rho` itself is
    /// renormalized.
    pub trace_drift: f64,
}

/// Truncated coherent state `|alpha>` on levels `0..=n_t`, renormalized.
pub fn coherent_ket(alpha: Complex64, n_t: usize) -> Vec<Complex64> {
    let mut ket = Vec::with_capacity(n_t + 1);
    let mut c = Complex64::new(1.0, 0.0);
    for n in 0..=n_t {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        ket.push(c);
    }
    let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    ket.iter().map(|z| z / norm).collect()
}

fn projector(ket: &[Complex64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(ket.len(), ket.len(), |i, j| ket[i] * ket[j].conj())
}

/// Single-site density matrix of a truncated coherent state.
pub fn coherent_site(alpha: Complex64, n_t: usize) -> DMatrix<Complex64> {
    projector(&coherent_ket(alpha, n_t))
}

impl FockDensityFull {
    pub fn new(t: f64, n_sites: usize, n_t: usize, rho: DMatrix<Complex64>) -> Result<Self> {
        let dim = (n_t + 1).pow(n_sites as u32);
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(shape_err(format!("{dim}x{dim}"), format!("{}x{}", rho.nrows(), rho.ncols())));
        }
        Ok(Self {
            t,
            n_sites,
            n_t,
            rho,
            trace_drift: 0.0,
        })
    }

    /// Tensor product of single-site states.
    pub fn product(t: f64, sites: &[DMatrix<Complex64>]) -> Result<Self> {
        let first = sites
            .first()
            .ok_or_else(|| Error::InvalidParameter {
                name: "sites",
                reason: "need at least one site".into(),
            })?;
        let d = first.nrows();
        if d < 2 || sites.iter().any(|s| s.nrows() != d || s.ncols() != d) {
            return Err(shape_err("square site matrices of equal size >= 2".to_string(), d));
        }
        let rho = sites[1..].iter().fold(first.clone(), |acc, s| acc.kronecker(s));
        Self::new(t, sites.len(), d - 1, rho)
    }

    /// Product of truncated coherent states.
    pub fn coherent(alphas: &[Complex64], n_t: usize) -> Result<Self> {
        let sites: Vec<_> = alphas.iter().map(|&a| coherent_site(a, n_t)).collect();
        Self::product(0.0, &sites)
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn purity(&self) -> f64 {
        // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_anti_hermiticity(&self) -> f64 {
        (&self.rho - self.rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn expect(&self, op: &SparseOp) -> Complex64 {
        op.expectation(&self.rho)
    }

    fn site_op(&self, site: usize) -> SparseOp {
        SparseOp::annihilation(self.n_t).embed(site, self.n_sites)
    }

    /// `<a_site>` (0-based site).
    pub fn mean_amplitude(&self, site: usize) -> Complex64 {
        self.expect(&self.site_op(site))
    }

    /// `<a_site^dagger a_site>`.
    pub fn occupation(&self, site: usize) -> f64 {
        let a = self.site_op(site);
        self.expect(&a.dagger().mul(&a)).re
    }

    /// Reduced density matrix of one site.
    pub fn site_marginal(&self, site: usize) -> DMatrix<Complex64> {
        let d = self.n_t + 1;
        let stride = d.pow((self.n_sites - 1 - site) as u32);
        let mut out = DMatrix::zeros(d, d);
        for i in 0..self.dim() {
            let ni = (i / stride) % d;
            let rest_i = i - ni * stride;
            for nj in 0..d {
                let j = rest_i + nj * stride;
                out[(ni, nj)] += self.rho[(i, j)];
            }
        }
        out
    }
}

/// Generator `rho' = K rho + rho K^dagger + sum_k L_k rho L_k^dagger` with
/// `K = -i H - (1/2) sum_k L_k^dagger L_k` (H in units of hbar).
#[derive(Debug, Clone)]
pub struct Lindbladian {
    k: SparseOp,
    jumps: Vec<SparseOp>,
}

impl Lindbladian {
    pub fn new(h: &SparseOp, jumps: Vec<SparseOp>) -> Self {
        let mut k = h.scale(-I);
        for l in &jumps {
            k = k.add(&l.dagger().mul(l).scale(Complex64::new(-0.5, 0.0)));
        }
        Self { k, jumps }
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    pub fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = rho.nrows();
        let mut out = DMatrix::from_element(n, n, ZERO);
        self.k.mul_left_into(rho, &mut out);
        self.k.mul_right_dagger_into(rho, &mut out);
        let mut tmp = DMatrix::from_element(n, n, ZERO);
        for l in &self.jumps {
            tmp.fill(ZERO);
            l.mul_left_into(rho, &mut tmp);
            l.mul_right_dagger_into(&tmp, &mut out);
        }
        out
    }

    /// Fixed-step RK4 from `rho0` over `t_end - rho0.t`, Hermitian-projected
    /// each step. Returns `rho0` and every `sample_every`-th state (plus the
    /// last), renormalized with the raw trace drift recorded.
    pub fn evolve(
        &self,
        rho0: &FockDensityFull,
        t_end: f64,
        dt: f64,
        sample_every: usize,
    ) -> Result<Vec<FockDensityFull>> {
        if rho0.dim() != self.dim() {
            return Err(shape_err(self.dim(), rho0.dim()));
        }
        check_schedule(rho0.t, t_end, dt, sample_every)?;
        let steps = rk4::step_count(t_end - rho0.t, dt);
        let report = |t: f64, rho: &DMatrix<Complex64>| -> Result<FockDensityFull> {
            let tr = rho.trace();
            let mut s = FockDensityFull {
                t,
                n_sites: rho0.n_sites,
                n_t: rho0.n_t,
                rho: rho / tr,
                trace_drift: tr.re - 1.0,
            };
            s.rho = (&s.rho + s.rho.adjoint()) * Complex64::new(0.5, 0.0);
            check_positive(s.min_eigenvalue(), t)?;
            Ok(s)
        };
        let mut out = vec![report(rho0.t, &rho0.rho)?];
        let mut rho = rho0.rho.clone();
        for i in 1..=steps {
            let t = rho0.t + (i - 1) as f64 * dt;
            let next = rk4::step(t, &rho, dt, |_, r: &DMatrix<Complex64>| {
                Ok::<_, Error>(self.apply(r))
            })?;
            rho = (&next + next.adjoint()) * Complex64::new(0.5, 0.0);
            if i % sample_every == 0 || i == steps {
                out.push(report(rho0.t + i as f64 * dt, &rho)?);
            }
        }
        Ok(out)
    }
}

pub(crate) fn check_schedule(t0: f64, t_end: f64, dt: f64, sample_every: usize) -> Result<()> {
    if !(dt > 0.0) || !(t_end >= t0) || sample_every == 0 {
        return Err(Error::InvalidParameter {
            name: "schedule",
            reason: format!(
                "need dt > 0, t_end >= t0 and sample_every >= 1 (dt {dt}, span [{t0}, {t_end}], sample_every {sample_every})"
            ),
        });
    }
    Ok(())
}

pub(crate) fn check_positive(min_eigenvalue: f64, t: f64) -> Result<()> {
    if min_eigenvalue < -POSITIVITY_TOL || !min_eigenvalue.is_finite() {
        return Err(Error::TruncationTooSmall { t, min_eigenvalue });
    }
    Ok(())
}

/// Local dissipators `sqrt(2 kappa1) a^dagger` and `sqrt(2 kappa2) a^2` for
/// one site of an `n_sites` register.
pub(crate) fn site_jumps(params: &NetworkParams, n_t: usize, site: usize, n_sites: usize) -> [SparseOp; 2] {
    let a = SparseOp::annihilation(n_t);
    let gain = a.dagger().scale(Complex64::new((2.0 * params.kappa1).sqrt(), 0.0));
    let loss = a.mul(&a).scale(Complex64::new((2.0 * params.kappa2).sqrt(), 0.0));
    [gain.embed(site, n_sites), loss.embed(site, n_sites)]
}

/// Generator of the full network: hopping `sum_{l != m} K_{l,m} a_l^dagger a_m`
/// plus one-photon gain and two-photon loss on every site.
pub fn network_lindbladian(
    coupling: &RingCoupling,
    params: &NetworkParams,
    trunc: &TruncationConfig,
) -> Result<Lindbladian> {
    let n = coupling.n_nodes();
    let dim = trunc.full_dim(n)?;
    let ops: Vec<SparseOp> = (0..n)
        .map(|l| SparseOp::annihilation(trunc.n_t).embed(l, n))
        .collect();
    let mut h = SparseOp::zero(dim);
    for l in 0..n {
        for m in coupling.neighbours(l) {
            let w = Complex64::new(coupling.entry(l, m), 0.0);
            h = h.add(&ops[l].dagger().mul(&ops[m]).scale(w));
        }
    }
    let jumps = (0..n).flat_map(|l| site_jumps(params, trunc.n_t, l, n)).collect();
    Ok(Lindbladian::new(&h, jumps))
}

/// Integrates the full network master equation.
pub fn evolve_full_lindblad(
    rho0: &FockDensityFull,
    coupling: &RingCoupling,
    params: &NetworkParams,
    trunc: &TruncationConfig,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Vec<FockDensityFull>> {
    params.validate_rates()?;
    if rho0.n_sites != coupling.n_nodes() || rho0.n_t != trunc.n_t {
        return Err(shape_err(
            format!("{} sites with n_t = {}", coupling.n_nodes(), trunc.n_t),
            format!("{} sites with n_t = {}", rho0.n_sites, rho0.n_t),
        ));
    }
    network_lindbladian(coupling, params, trunc)?.evolve(rho0, t_end, dt, sample_every)
}
