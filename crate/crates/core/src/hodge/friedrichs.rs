use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::basis::harmonic_basis;
use super::decompose::{HodgeSolver, PinvSolver};
use crate::assembly::{select_block, BoundaryCondition, Discretization};
use crate::error::{Error, Result};

/// Harmonicity threshold for inputs to [`friedrichs_split`].
pub const HARMONIC_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// Zero-trace harmonic part plus a coexact remainder.
    Normal,
    /// v-tangential harmonic part plus an exact remainder.
    Tangential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedrichsSplit {
    pub degree: usize,
    pub mode: SplitMode,
    pub boundary_part: Vec<f64>,
    pub remainder: Vec<f64>,
    /// Potential certifying the remainder (degree `k+1` for the normal mode,
    /// `k-1` for the tangential mode).
    pub potential: Vec<f64>,
    /// `|<boundary_part, remainder>_{Mv}| / ||h||^2_{Mv}`.
    pub orthogonality: f64,
    /// Relative residual of the potential solve.
    pub certification_residual: f64,
    /// Harmonicity residual of the input.
    pub input_harmonicity: f64,
}

/// Splits a harmonic field into its part in the boundary-condition harmonic
/// space and a remainder certified coexact (normal mode) or exact
/// (tangential mode).
pub fn friedrichs_split(
    disc: &Discretization,
    h: &DVector<f64>,
    k: usize,
    mode: SplitMode,
) -> Result<FriedrichsSplit> {
    let solver = HodgeSolver::new(disc, k)?;
    let n = disc.num_dofs(k);
    if h.len() != n {
        return Err(Error::SizeMismatch {
            what: "harmonic field",
            expected: n,
            got: h.len(),
        });
    }
    let mass = disc.mass(k);
    let hn2 = h.dot(&(mass * h));
    let hn = hn2.sqrt();
    let (hd, hs) = solver.harmonicity(h);
    let harm = if hn > 0.0 { hd.max(hs) / hn } else { 0.0 };
    if harm > HARMONIC_TOLERANCE {
        return Err(Error::NotHarmonic(harm));
    }
    let v = |x: &DVector<f64>| x.iter().cloned().collect::<Vec<f64>>();

    if !disc.has_boundary() {
        return Ok(FriedrichsSplit {
            degree: k,
            mode,
            boundary_part: v(h),
            remainder: vec![0.0; n],
            potential: Vec::new(),
            orthogonality: 0.0,
            certification_residual: 0.0,
            input_harmonicity: harm,
        });
    }

    let bc = match mode {
        SplitMode::Normal => BoundaryCondition::Normal,
        SplitMode::Tangential => BoundaryCondition::Tangential,
    };
    let basis = harmonic_basis(&disc.operators(k, bc)?)?.matrix(n);
    let coeffs = basis.transpose() * (mass * h);
    let part = &basis * coeffs;
    let r = h - &part;
    let orthogonality = if hn2 > 0.0 {
        part.dot(&(mass * &r)).abs() / hn2
    } else {
        0.0
    };

    let (potential, residual) = match mode {
        SplitMode::Normal => certify_coexact(disc, k, &r, &(mass * h))?,
        SplitMode::Tangential => certify_exact(disc, k, &r, hn)?,
    };

    Ok(FriedrichsSplit {
        degree: k,
        mode,
        boundary_part: v(&part),
        remainder: v(&r),
        potential: v(&potential),
        orthogonality,
        certification_residual: residual,
        input_harmonicity: harm,
    })
}

/// Weak `r = delta_v gamma` tested against zero-trace `k`-cochains:
/// `(r, phi)_{Mv} = (gamma, D phi)_{Mv}` for all such `phi`.
fn certify_coexact(
    disc: &Discretization,
    k: usize,
    r: &DVector<f64>,
    mass_h: &DVector<f64>,
) -> Result<(DVector<f64>, f64)> {
    let int = disc.free_dofs(k, BoundaryCondition::Normal);
    let b = DVector::from_iterator(int.len(), int.iter().map(|&i| (disc.mass(k) * r)[i]));
    let scale = DVector::from_iterator(int.len(), int.iter().map(|&i| mass_h[i])).norm();
    let rel = |x: f64| if scale > 0.0 { x / scale } else { x };
    if k == 2 {
        return Ok((DVector::zeros(0), rel(b.norm())));
    }
    let all: Vec<usize> = (0..disc.num_dofs(k + 1)).collect();
    let d = select_block(disc.incidence(k), &all, &int);
    let a: DMatrix<f64> = d.transpose() * disc.mass(k + 1);
    let gamma = PinvSolver::new(a.clone())?.solve(&b)?;
    Ok((gamma.clone(), rel((a * gamma - b).norm())))
}

/// `r = D_{k-1} alpha` in the Mv least-squares sense.
fn certify_exact(
    disc: &Discretization,
    k: usize,
    r: &DVector<f64>,
    hn: f64,
) -> Result<(DVector<f64>, f64)> {
    let mass = disc.mass(k);
    let rel = |x: f64| if hn > 0.0 { x / hn } else { x };
    if k == 0 {
        return Ok((DVector::zeros(0), rel(r.dot(&(mass * r)).max(0.0).sqrt())));
    }
    let chol = Cholesky::new(mass.clone()).ok_or(Error::MassNotSpd(k))?;
    let lt = chol.l().transpose();
    let d = disc.incidence(k - 1);
    let alpha = PinvSolver::new(&lt * d)?.solve(&(&lt * r))?;
    let e = r - d * &alpha;
    Ok((alpha, rel(e.dot(&(mass * &e)).max(0.0).sqrt())))
}
