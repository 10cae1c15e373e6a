use std::sync::OnceLock;

use nalgebra::DMatrix;

use super::basis::{MultiIndexBasis, MAX_DIM};
use crate::error::{Error, Result};

/// A symmetric positive-definite inner product on an `n`-dimensional tangent
/// space, with its inverse and volume density `sqrt(det g)` cached.
#[derive(Debug, Clone)]
pub struct PointMetric {
    g: DMatrix<f64>,
    g_inv: DMatrix<f64>,
    sqrt_det: f64,
    // compound matrices of g_inv, one per degree, built on first use
    compound: [OnceLock<DMatrix<f64>>; MAX_DIM + 1],
}

impl PointMetric {
    pub fn new(g: DMatrix<f64>) -> Result<Self> {
        let n = g.nrows();
        if g.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.ncols(),
            });
        }
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::DimensionCap(n));
        }
        let scale = g.amax();
        if !scale.is_finite() || scale == 0.0 {
            return Err(Error::MetricNotSpd);
        }
        for i in 0..n {
            for j in 0..i {
                if (g[(i, j)] - g[(j, i)]).abs() > 1e-14 * scale {
                    return Err(Error::MetricNotSpd);
                }
            }
        }
        let g = (&g + g.transpose()) * 0.5;
        let chol = g.clone().cholesky().ok_or(Error::MetricNotSpd)?;
        let sqrt_det = chol.l_dirty().diagonal().iter().product::<f64>().abs();
        if !(sqrt_det > 0.0) {
            return Err(Error::MetricNotSpd);
        }
        let mut g_inv = chol.inverse();
        g_inv = (&g_inv + g_inv.transpose()) * 0.5;
        Ok(PointMetric {
            g,
            g_inv,
            sqrt_det,
            compound: Default::default(),
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.g_inv
    }

    /// Volume density: `mu_g = sqrt_det * dx^1 ^ ... ^ dx^n`.
    pub fn sqrt_det(&self) -> f64 {
        self.sqrt_det
    }

    /// Gram matrix of the degree-`k` coordinate basis under this metric: the
    /// entry `(I, J)` is `det(g_inv[I, J])`.
    ///
    /// Evaluated through complementary minors of `g` itself,
    /// `det(g_inv[I, J]) = (-1)^{|I|+|J|} det(g[J^c, I^c]) / det(g)`, which
    /// keeps full accuracy when `g` has a small eigenvalue.
    pub fn compound_inverse(&self, k: usize) -> &DMatrix<f64> {
        self.compound[k].get_or_init(|| {
            let n = self.dim();
            let basis = MultiIndexBasis::get(n, k);
            let m = basis.len();
            let full = ((1u32 << n) - 1) as u16;
            let comp: Vec<Vec<usize>> = (0..m)
                .map(|p| super::basis::mask_indices(full & !basis.mask(p)))
                .collect();
            let parity: Vec<usize> = (0..m).map(|p| basis.indices(p).iter().sum()).collect();
            let det = self.sqrt_det * self.sqrt_det;
            let r = n - k;
            let mut c = DMatrix::from_element(m, m, 1.0 / det);
            if r == 0 {
                return c;
            }
            for a in 0..m {
                for b in a..m {
                    let sub = DMatrix::from_fn(r, r, |i, j| self.g[(comp[b][i], comp[a][j])]);
                    let sign = if (parity[a] + parity[b]).is_multiple_of(2) {
                        1.0
                    } else {
                        -1.0
                    };
                    let val = sign * sub.determinant() / det;
                    c[(a, b)] = val;
                    c[(b, a)] = val;
                }
            }
            c
        })
    }
}
