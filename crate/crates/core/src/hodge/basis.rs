use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::assembly::{BoundaryCondition, Discretization, OperatorSet};
use crate::error::{Error, Result};

/// Relative singular-value cut for kernel extraction.
pub const RANK_TOLERANCE: f64 = 1e-8;
/// Required ratio between the smallest retained and largest discarded
/// singular value.
pub const MIN_GAP: f64 = 1e3;

/// Mv-orthonormal basis of discrete harmonic fields of one degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicBasis {
    pub degree: usize,
    pub bc: BoundaryCondition,
    pub dimension: usize,
    /// Smallest singular value counted in the rank of the constraint matrix.
    pub smallest_retained: Option<f64>,
    /// Largest singular value treated as zero.
    pub largest_discarded: Option<f64>,
    pub gap_ratio: f64,
    /// Largest `||D_k h||` over the basis.
    pub d_residual: f64,
    /// Largest `||weak delta_v h||_{Mv}` over the basis.
    pub delta_residual: f64,
    /// `max |<h_i, h_j>_{Mv} - delta_ij|`.
    pub orthonormality_error: f64,
    /// Basis cochains on the full DOF space (zero on removed DOFs).
    pub basis: Vec<Vec<f64>>,
}

impl HarmonicBasis {
    pub fn vectors(&self) -> Vec<DVector<f64>> {
        self.basis
            .iter()
            .map(|b| DVector::from_column_slice(b))
            .collect()
    }

    /// Columns are the basis vectors.
    pub fn matrix(&self, dofs: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dofs, self.dimension);
        for (j, b) in self.basis.iter().enumerate() {
            m.set_column(j, &DVector::from_column_slice(b));
        }
        m
    }
}

/// Split of ascending or unordered singular values at `tau * sigma_max`.
pub(crate) struct RankCut {
    pub smallest_retained: Option<f64>,
    pub largest_discarded: Option<f64>,
    pub gap_ratio: f64,
}

pub(crate) fn rank_cut(sv: &[f64], tau: f64) -> RankCut {
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let count = |t: f64| sv.iter().filter(|&&s| s > t * smax).count();
    let rank = count(tau);
    let retained = sv
        .iter()
        .cloned()
        .filter(|&s| s > tau * smax)
        .fold(None, |m: Option<f64>, s| Some(m.map_or(s, |m| m.min(s))));
    let discarded = sv
        .iter()
        .cloned()
        .filter(|&s| s <= tau * smax)
        .fold(None, |m: Option<f64>, s| Some(m.map_or(s, |m| m.max(s))));
    let stable = count(tau * 10.0) == rank && count(tau / 10.0) == rank;
    let floor = f64::EPSILON * smax;
    let gap_ratio = match retained {
        Some(r) if stable => r / discarded.unwrap_or(0.0).max(floor),
        Some(_) => 1.0,
        None => f64::MAX,
    };
    RankCut {
        smallest_retained: retained,
        largest_discarded: discarded,
        gap_ratio,
    }
}

/// Harmonic fields `ker D_k ∩ ker D_{k-1}^T Mv_k` on the free DOFs of `ops`.
pub fn harmonic_basis(ops: &OperatorSet) -> Result<HarmonicBasis> {
    harmonic_basis_with_tolerance(ops, RANK_TOLERANCE)
}

pub fn harmonic_basis_with_tolerance(ops: &OperatorSet, tau: f64) -> Result<HarmonicBasis> {
    let n = ops.len();
    if n == 0 {
        return Ok(HarmonicBasis {
            degree: ops.degree,
            bc: ops.bc,
            dimension: 0,
            smallest_retained: None,
            largest_discarded: None,
            gap_ratio: f64::MAX,
            d_residual: 0.0,
            delta_residual: 0.0,
            orthonormality_error: 0.0,
            basis: Vec::new(),
        });
    }
    let up = ops.d_up();
    let down_t = ops.d_down().transpose() * ops.mass();
    let scale = |m: &DMatrix<f64>| {
        let a = m.amax();
        if a > 0.0 {
            1.0 / a
        } else {
            1.0
        }
    };
    let (su, sd) = (scale(up), scale(&down_t));
    let rows = (up.nrows() + down_t.nrows()).max(n);
    let mut c = DMatrix::zeros(rows, n);
    c.view_mut((0, 0), (up.nrows(), n)).copy_from(&(up * su));
    c.view_mut((up.nrows(), 0), (down_t.nrows(), n))
        .copy_from(&(&down_t * sd));

    let svd = c.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors");
    let sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let cut = rank_cut(&sv, tau);
    if cut.gap_ratio < MIN_GAP {
        return Err(Error::RankAmbiguous { gap: cut.gap_ratio });
    }
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let kernel: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] <= tau * smax).collect();
    let mut k = DMatrix::zeros(n, kernel.len());
    for (j, &i) in kernel.iter().enumerate() {
        k.set_column(j, &v_t.row(i).transpose());
    }
    let h = if kernel.is_empty() {
        k
    } else {
        mv_orthonormalize(&k, ops.mass())?
    };

    let mut d_res = 0.0f64;
    let mut delta_res = 0.0f64;
    let mut basis = Vec::with_capacity(h.ncols());
    for j in 0..h.ncols() {
        let col = h.column(j).into_owned();
        d_res = d_res.max((up * &col).norm());
        let delta = ops.codifferential(&col)?;
        if let Some(m) = ops.lower_mass() {
            delta_res = delta_res.max(delta.dot(&(m * &delta)).max(0.0).sqrt());
        }
        basis.push(ops.extend(&col).iter().cloned().collect());
    }
    let gram = h.transpose() * ops.mass() * &h;
    let orth = (gram - DMatrix::identity(h.ncols(), h.ncols())).amax();

    Ok(HarmonicBasis {
        degree: ops.degree,
        bc: ops.bc,
        dimension: h.ncols(),
        smallest_retained: cut.smallest_retained,
        largest_discarded: cut.largest_discarded,
        gap_ratio: cut.gap_ratio,
        d_residual: d_res,
        delta_residual: delta_res,
        orthonormality_error: if h.ncols() == 0 { 0.0 } else { orth },
        basis,
    })
}

/// Mv-orthonormal basis of the column span of `k`, each column signed so
/// that its first non-negligible entry is positive.
pub(crate) fn mv_orthonormalize(k: &DMatrix<f64>, mass: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let gram = k.transpose() * mass * k;
    let gram = (&gram + gram.transpose()) * 0.5;
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Solver("kernel Gram matrix not SPD".into()))?;
    // H = K L^{-T}, i.e. L H^T = K^T
    let ht = chol
        .l()
        .solve_lower_triangular(&k.transpose())
        .ok_or_else(|| Error::Solver("singular kernel Gram factor".into()))?;
    let mut h = ht.transpose();
    for mut col in h.column_iter_mut() {
        let m = col.amax();
        if let Some(first) = col.iter().find(|c| c.abs() > 1e-8 * m).cloned() {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }
    Ok(h)
}

/// Dimensions of the harmonic spaces for each degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarmonicDimensions {
    pub closed: Option<[usize; 3]>,
    pub tangential: Option<[usize; 3]>,
    pub normal: Option<[usize; 3]>,
}

/// Harmonic dimensions under every boundary condition that applies.
pub fn harmonic_dimensions(disc: &Discretization) -> Result<HarmonicDimensions> {
    let dims = |bc| -> Result<[usize; 3]> {
        let mut out = [0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = harmonic_basis(&disc.operators(k, bc)?)?.dimension;
        }
        Ok(out)
    };
    if disc.has_boundary() {
        Ok(HarmonicDimensions {
            closed: None,
            tangential: Some(dims(BoundaryCondition::Tangential)?),
            normal: Some(dims(BoundaryCondition::Normal)?),
        })
    } else {
        Ok(HarmonicDimensions {
            closed: Some(dims(BoundaryCondition::Closed)?),
            tangential: None,
            normal: None,
        })
    }
}

/// Outcome of the dimension check `dim H^k_t = dim H^{2-k}_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityTable {
    pub tangential: [usize; 3],
    pub normal: [usize; 3],
    pub passed: bool,
}

pub fn duality_dimensions(disc: &Discretization) -> Result<DualityTable> {
    let d = harmonic_dimensions(disc)?;
    let (t, n) = match d.closed {
        Some(c) => (c, c),
        None => (d.tangential.expect("dims"), d.normal.expect("dims")),
    };
    let passed = (0..3).all(|k| t[k] == n[2 - k]);
    Ok(DualityTable {
        tangential: t,
        normal: n,
        passed,
    })
}
