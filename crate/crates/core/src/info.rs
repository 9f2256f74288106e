//! Rényi-2 entropies and mutual information of Gaussian states, computed
//! from quadrature covariance matrices.

use nalgebra::{Cholesky, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Error, Result};
use crate::gaussian::CovarianceState;

/// Relative slack on `det(2C/hbar) >= 1` before a state is rejected as impure
/// beyond the physical bound.
pub const PURITY_TOL: f64 = 1e-6;
/// Mutual information down to this negative value is clipped to zero.
pub const NEGATIVE_MI_TOL: f64 = 1e-8;

/// `ln det` of a symmetric positive definite matrix via Cholesky.
pub fn log_det_spd(m: &DMatrix<f64>) -> Result<f64> {
    let chol = Cholesky::new(m.clone()).ok_or_else(|| {
        Error::Conditioning(format!(
            "{}x{} matrix is not positive definite",
            m.nrows(),
            m.ncols()
        ))
    })?;
    Ok(2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// `S_2 = (1/2) ln det(2C/hbar)`; zero for pure states.
pub fn renyi2_entropy(c: &DMatrix<f64>, hbar: f64) -> Result<f64> {
    if !c.is_square() || !c.nrows().is_multiple_of(2) || c.nrows() == 0 {
        return Err(shape_err(
            "non-empty square matrix of even dimension",
            format!("{}x{}", c.nrows(), c.ncols()),
        ));
    }
    let ld = log_det_spd(&(c * (2.0 / hbar)))?;
    if ld < (1.0 - PURITY_TOL).ln() {
        return Err(Error::InvalidState(format!(
            "det(2C/hbar) = {:.6e} is below 1: not a physical covariance",
            ld.exp()
        )));
    }
    Ok(0.5 * ld)
}

/// A split of the ring into subsystem `A` (listed nodes, 0-based) and its
/// complement `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    n_nodes: usize,
    a: Vec<usize>,
    b: Vec<usize>,
}

impl Bipartition {
    /// Nodes `1..=l` against `l+1..=n` (1-based).
    pub fn leading(l: usize, n_nodes: usize) -> Result<Self> {
        if l < 1 || l >= n_nodes {
            return Err(Error::OutOfRange {
                what: "bipartition size L",
                value: l as f64,
                min: 1.0,
                max: n_nodes.saturating_sub(1) as f64,
            });
        }
        Self::from_nodes((0..l).collect(), n_nodes)
    }

    /// Arbitrary subset `A` of 0-based nodes; both sides must be non-empty.
    pub fn from_nodes(mut a: Vec<usize>, n_nodes: usize) -> Result<Self> {
        a.sort_unstable();
        a.dedup();
        if a.is_empty() || a.len() >= n_nodes || a.iter().any(|&x| x >= n_nodes) {
            return Err(Error::InvalidParameter {
                name: "bipartition",
                reason: format!("subset {a:?} must be a proper non-empty subset of 0..{n_nodes}"),
            });
        }
        let b = (0..n_nodes).filter(|x| a.binary_search(x).is_err()).collect();
        Ok(Self { n_nodes, a, b })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }
}

fn sub_block(c: &DMatrix<f64>, nodes: &[usize]) -> DMatrix<f64> {
    let idx: Vec<usize> = nodes.iter().flat_map(|&l| [2 * l, 2 * l + 1]).collect();
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| c[(idx[i], idx[j])])
}

/// Entropies of both sides and the whole, with `I_2 = S_A + S_B - S_AB`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutualInformation {
    pub i2: f64,
    pub s2_a: f64,
    pub s2_b: f64,
    pub s2_ab: f64,
    /// Set when a slightly negative round-off value was clipped to zero.
    pub clipped: bool,
}

/// Rényi-2 mutual information across `part`.
///
/// Uses log-determinants directly, so the result is invariant under a global
/// rescaling of `C` and no purity bound is imposed on the input.
pub fn mutual_information(
    c: &CovarianceState,
    part: &Bipartition,
    hbar: f64,
) -> Result<MutualInformation> {
    if c.n_nodes() != part.n_nodes {
        return Err(shape_err(format!("{} nodes", part.n_nodes), c.n_nodes()));
    }
    let scaled = &c.matrix * (2.0 / hbar);
    let s2_a = 0.5 * log_det_spd(&sub_block(&scaled, &part.a))?;
    let s2_b = 0.5 * log_det_spd(&sub_block(&scaled, &part.b))?;
    let s2_ab = 0.5 * log_det_spd(&scaled)?;
    let raw = s2_a + s2_b - s2_ab;
    let (i2, clipped) = if raw >= 0.0 {
        (raw, false)
    } else if raw > -NEGATIVE_MI_TOL {
        (0.0, true)
    } else {
        return Err(Error::Conditioning(format!(
            "mutual information {raw:.3e} is negative beyond round-off"
        )));
    };
    Ok(MutualInformation {
        i2,
        s2_a,
        s2_b,
        s2_ab,
        clipped,
    })
}

/// Mutual information for every leading bipartition `L = 1..N-1`.
pub fn mi_scan(c: &CovarianceState, hbar: f64) -> Result<Vec<(usize, MutualInformation)>> {
    let n = c.n_nodes();
    (1..n)
        .map(|l| Ok((l, mutual_information(c, &Bipartition::leading(l, n)?, hbar)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_mode(a: f64, c: f64) -> DMatrix<f64> {
        // symmetric two-mode squeezed-like block: diag(a) with q1q2 = c, p1p2 = -c
        let mut m = DMatrix::identity(4, 4) * a;
        m[(0, 2)] = c;
        m[(2, 0)] = c;
        m[(1, 3)] = -c;
        m[(3, 1)] = -c;
        m
    }

    #[test]
    fn vacuum_and_thermal_entropies() {
        assert!(renyi2_entropy(&(DMatrix::identity(4, 4) * 0.5), 1.0).unwrap().abs() < 1e-15);
        let s = renyi2_entropy(&DMatrix::identity(2, 2), 1.0).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-14);
        assert!(renyi2_entropy(&(DMatrix::identity(2, 2) * 0.3), 1.0).is_err());
        assert!(renyi2_entropy(&DMatrix::identity(3, 3), 1.0).is_err());
    }

    #[test]
    fn two_mode_closed_form() {
        for &(a, c) in &[(0.5f64, 0.0f64), (1.0, 0.5), (2.0, 1.9), (0.8, 0.3)] {
            let cov = CovarianceState::new(0.0, two_mode(a, c)).unwrap();
            let mi = mutual_information(&cov, &Bipartition::leading(1, 2).unwrap(), 1.0).unwrap();
            // each marginal: det = a^2 per side, joint det = (a^2 - c^2)^2
            let expected = (a * a / (a * a - c * c)).ln();
            assert!((mi.i2 - expected).abs() < 1e-12, "{a} {c}: {} vs {expected}", mi.i2);
        }
    }

    #[test]
    fn product_states_share_no_information() {
        let mut m = DMatrix::identity(6, 6) * 0.7;
        m[(0, 1)] = 0.2;
        m[(1, 0)] = 0.2;
        m[(4, 5)] = -0.1;
        m[(5, 4)] = -0.1;
        let c = CovarianceState::new(0.0, m).unwrap();
        for (_, mi) in mi_scan(&c, 1.0).unwrap() {
            assert!(mi.i2.abs() < 1e-14);
        }
    }

    #[test]
    fn scale_invariance() {
        let c = CovarianceState::new(0.0, two_mode(1.3, 0.7)).unwrap();
        let part = Bipartition::leading(1, 2).unwrap();
        let base = mutual_information(&c, &part, 1.0).unwrap().i2;
        for &lambda in &[1e-3, 0.5, 7.0, 1e4] {
            let scaled = CovarianceState::new(0.0, &c.matrix * lambda).unwrap();
            let mi = mutual_information(&scaled, &part, 1.0).unwrap().i2;
            assert!((mi - base).abs() < 1e-10);
        }
    }

    #[test]
    fn entropy_is_additive_over_products() {
        let a = two_mode(1.0, 0.4);
        let b = DMatrix::identity(2, 2) * 1.5;
        let mut joint = DMatrix::zeros(6, 6);
        joint.view_mut((0, 0), (4, 4)).copy_from(&a);
        joint.view_mut((4, 4), (2, 2)).copy_from(&b);
        let sum = renyi2_entropy(&a, 1.0).unwrap() + renyi2_entropy(&b, 1.0).unwrap();
        assert!((renyi2_entropy(&joint, 1.0).unwrap() - sum).abs() < 1e-13);
    }

    #[test]
    fn bipartition_validation() {
        assert!(Bipartition::leading(0, 4).is_err());
        assert!(Bipartition::leading(4, 4).is_err());
        let p = Bipartition::from_nodes(vec![3, 1, 1], 5).unwrap();
        assert_eq!(p.a(), &[1, 3]);
        assert_eq!(p.b(), &[0, 2, 4]);
        assert!(Bipartition::from_nodes(vec![5], 5).is_err());
    }

    #[test]
    fn indefinite_matrix_is_a_conditioning_error() {
        let mut m = DMatrix::identity(4, 4);
        m[(0, 0)] = -1.0;
        let c = CovarianceState::new(0.0, m).unwrap();
        assert!(matches!(
            mutual_information(&c, &Bipartition::leading(1, 2).unwrap(), 1.0),
            Err(Error::Conditioning(_))
        ));
    }

    proptest! {
        #[test]
        fn mutual_information_is_nonnegative(
            entries in proptest::collection::vec(-1.0f64..1.0, 36),
            split in 1usize..3,
        ) {
            // G G^T + (1/2) I is a valid covariance for any G
            let g = DMatrix::from_vec(6, 6, entries);
            let m = &g * g.transpose() + DMatrix::identity(6, 6) * 0.5;
            let c = CovarianceState::new(0.0, m).unwrap();
            let mi = mutual_information(&c, &Bipartition::leading(split, 3).unwrap(), 1.0).unwrap();
            prop_assert!(mi.i2 >= 0.0);
        }
    }
}
