use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Sparse operator on a truncated Fock space, stored as `(row, col, value)`
/// triplets with unique positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOp {
    fn from_map(dim: usize, map: BTreeMap<(usize, usize), Complex64>) -> Self {
        Self {
            dim,
            entries: map
                .into_iter()
                .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
                .map(|((i, j), v)| (i, j, v))
                .collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            entries: (0..dim).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect(),
        }
    }

    /// Annihilation operator on levels `0..=n_t`.
    pub fn annihilation(n_t: usize) -> Self {
        Self {
            dim: n_t + 1,
            entries: (1..=n_t)
                .map(|n| (n - 1, n, Complex64::new((n as f64).sqrt(), 0.0)))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn dagger(&self) -> Self {
        let map = self.entries.iter().map(|&(i, j, v)| ((j, i), v.conj())).collect();
        Self::from_map(self.dim, map)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, j, v)| (i, j, v * s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        let mut map = BTreeMap::new();
        for &(i, j, v) in self.entries.iter().chain(&other.entries) {
            *map.entry((i, j)).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        Self::from_map(self.dim, map)
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        let mut by_row: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); other.dim];
        for &(k, j, v) in &other.entries {
            by_row[k].push((j, v));
        }
        let mut map = BTreeMap::new();
        for &(i, k, a) in &self.entries {
            for &(j, b) in &by_row[k] {
                *map.entry((i, j)).or_insert(Complex64::new(0.0, 0.0)) += a * b;
            }
        }
        Self::from_map(self.dim, map)
    }

    /// Embeds a single-site operator at `site` of an `n_sites` register of
    /// identical sites; site 0 is the most significant digit of the index.
    pub fn embed(&self, site: usize, n_sites: usize) -> Self {
        let d = self.dim;
        let full = d.pow(n_sites as u32);
        let stride = d.pow((n_sites - 1 - site) as u32);
        let mut by_col: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); d];
        for &(i, j, v) in &self.entries {
            by_col[j].push((i, v));
        }
        let mut entries = Vec::with_capacity(self.entries.len() * full / d);
        for k in 0..full {
            let n = (k / stride) % d;
            for &(i, v) in &by_col[n] {
                entries.push((k + i * stride - n * stride, k, v));
            }
        }
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        Self { dim: full, entries }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    /// `out += self * x`.
    pub fn mul_left_into(&self, x: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
        let n = x.ncols();
        for &(i, j, v) in &self.entries {
            for k in 0..n {
                out[(i, k)] += v * x[(j, k)];
            }
        }
    }

    /// `out += x * self^dagger`.
    pub fn mul_right_dagger_into(&self, x: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
        let n = x.nrows();
        for &(i, j, v) in &self.entries {
            let vc = v.conj();
            let (src, dst) = (x.column(j), i);
            for k in 0..n {
                out[(k, dst)] += src[k] * vc;
            }
        }
    }

    /// `tr(self * rho)`.
    pub fn expectation(&self, rho: &DMatrix<Complex64>) -> Complex64 {
        self.entries.iter().map(|&(i, j, v)| v * rho[(j, i)]).sum()
    }
}
