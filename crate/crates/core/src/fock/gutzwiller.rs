use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::lindblad::{check_positive, check_schedule, TruncationConfig};
use super::ops::SparseOp;
use crate::error::{shape_err, Error, Result};
use crate::params::NetworkParams;
use crate::ring::RingCoupling;
use crate::rk4;

/// Product-state ansatz: one density matrix per site.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensitySites {
    pub t: f64,
    pub n_t: usize,
    pub rhos: Vec<DMatrix<Complex64>>,
}

impl FockDensitySites {
    pub fn new(t: f64, n_t: usize, rhos: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if rhos.is_empty() || rhos.iter().any(|r| r.nrows() != n_t + 1 || r.ncols() != n_t + 1) {
            return Err(shape_err(
                format!("non-empty list of {0}x{0} matrices", n_t + 1),
                format!("{} matrices", rhos.len()),
            ));
        }
        Ok(Self { t, n_t, rhos })
    }

    pub fn n_sites(&self) -> usize {
        self.rhos.len()
    }

    pub fn mean_amplitudes(&self) -> Vec<Complex64> {
        let a = SparseOp::annihilation(self.n_t);
        self.rhos.iter().map(|r| a.expectation(r)).collect()
    }

    pub fn occupations(&self) -> Vec<f64> {
        self.rhos
            .iter()
            .map(|r| (0..=self.n_t).map(|n| n as f64 * r[(n, n)].re).sum())
            .collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rhos
            .iter()
            .map(|r| {
                let h = (r + r.adjoint()) * Complex64::new(0.5, 0.0);
                SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

struct SiteGenerator {
    a: DMatrix<Complex64>,
    ad: DMatrix<Complex64>,
    /// `-(1/2) sum_k L_k^dagger L_k`
    k0: DMatrix<Complex64>,
    jumps: Vec<DMatrix<Complex64>>,
}

impl SiteGenerator {
    fn new(params: &NetworkParams, n_t: usize) -> Self {
        let a = SparseOp::annihilation(n_t);
        let gain = a.dagger().scale(Complex64::new((2.0 * params.kappa1).sqrt(), 0.0));
        let loss = a.mul(&a).scale(Complex64::new((2.0 * params.kappa2).sqrt(), 0.0));
        let jumps: Vec<_> = [gain, loss].iter().map(SparseOp::to_dense).collect();
        let k0 = jumps
            .iter()
            .map(|l| l.adjoint() * l)
            .fold(DMatrix::zeros(n_t + 1, n_t + 1), |acc, m| acc + m)
            * Complex64::new(-0.5, 0.0);
        Self {
            a: a.to_dense(),
            ad: a.dagger().to_dense(),
            k0,
            jumps,
        }
    }

    /// Site generator with `H = Gamma a^dagger + conj(Gamma) a` (units of hbar).
    fn apply(&self, gamma: Complex64, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        let k = &self.k0 - (&self.ad * (i * gamma) + &self.a * (i * gamma.conj()));
        let kr = &k * rho;
        let mut out = &kr + kr.adjoint();
        for l in &self.jumps {
            out += l * rho * l.adjoint();
        }
        out
    }
}

/// Integrates the factorized equations; every site sees the field
/// `Gamma_l = sum_{m != l} K_{l,m} <a_m>` recomputed at every RK stage.
pub fn gutzwiller_evolve(
    rhos0: &FockDensitySites,
    coupling: &RingCoupling,
    params: &NetworkParams,
    trunc: &TruncationConfig,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Vec<FockDensitySites>> {
    params.validate_rates()?;
    trunc.validate()?;
    if rhos0.n_sites() != coupling.n_nodes() || rhos0.n_t != trunc.n_t {
        return Err(shape_err(
            format!("{} sites with n_t = {}", coupling.n_nodes(), trunc.n_t),
            format!("{} sites with n_t = {}", rhos0.n_sites(), rhos0.n_t),
        ));
    }
    check_schedule(rhos0.t, t_end, dt, sample_every)?;
    let gen = SiteGenerator::new(params, trunc.n_t);
    let a = SparseOp::annihilation(trunc.n_t);
    let n = coupling.n_nodes();
    let rhs = |rhos: &Vec<DMatrix<Complex64>>| -> Vec<DMatrix<Complex64>> {
        let means: Vec<Complex64> = rhos.iter().map(|r| a.expectation(r)).collect();
        (0..n)
            .map(|l| {
                let gamma: Complex64 = coupling
                    .neighbours(l)
                    .map(|m| means[m] * coupling.entry(l, m))
                    .sum();
                gen.apply(gamma, &rhos[l])
            })
            .collect()
    };

    let sample = |t: f64, rhos: &Vec<DMatrix<Complex64>>| -> Result<FockDensitySites> {
        let s = FockDensitySites {
            t,
            n_t: trunc.n_t,
            rhos: rhos.clone(),
        };
        check_positive(s.min_eigenvalue(), t)?;
        Ok(s)
    };
    let steps = rk4::step_count(t_end - rhos0.t, dt);
    let mut out = vec![sample(rhos0.t, &rhos0.rhos)?];
    let mut rhos = rhos0.rhos.clone();
    for i in 1..=steps {
        let t = rhos0.t + (i - 1) as f64 * dt;
        let next = rk4::step(t, &rhos, dt, |_, r: &Vec<DMatrix<Complex64>>| Ok::<_, Error>(rhs(r)))?;
        rhos = next
            .iter()
            .map(|r| (r + r.adjoint()) * Complex64::new(0.5, 0.0))
            .collect();
        if i % sample_every == 0 || i == steps {
            out.push(sample(rhos0.t + i as f64 * dt, &rhos)?);
        }
    }
    Ok(out)
}
