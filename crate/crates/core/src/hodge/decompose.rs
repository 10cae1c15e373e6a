use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::assembly::{select_block, BoundaryCondition, Discretization};
use crate::error::{Error, Result};

/// Relative singular-value cut of the pseudo-inverse solves.
pub const PINV_TOLERANCE: f64 = 1e-10;

const REFINEMENT_STEPS: usize = 2;

/// Minimum-norm least-squares solver for a fixed matrix.
///
/// Uses the symmetric eigendecomposition of `[[0, A], [A^T, 0]]`, whose
/// eigenpairs are `(+-s_i, [u_i; +-v_i] / sqrt 2)`, followed by iterative
/// refinement on the normal-equation residual `A^T (b - A x)`.
#[derive(Debug, Clone)]
pub(crate) struct PinvSolver {
    a: DMatrix<f64>,
    /// Eigenvalues above the cut and their eigenvectors (as columns).
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    rows: usize,
    cols: usize,
    pub condition: f64,
}

impl PinvSolver {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = a.shape();
        let empty = |a, condition| PinvSolver {
            a,
            values: Vec::new(),
            vectors: DMatrix::zeros(rows + cols, 0),
            rows,
            cols,
            condition,
        };
        if rows == 0 || cols == 0 {
            return Ok(empty(a, 1.0));
        }
        let n = rows + cols;
        let mut j = DMatrix::zeros(n, n);
        j.view_mut((0, rows), (rows, cols)).copy_from(&a);
        j.view_mut((rows, 0), (cols, rows))
            .copy_from(&a.transpose());
        let eig = SymmetricEigen::try_new(j, f64::EPSILON, 100_000).ok_or_else(|| {
            Error::Solver(format!(
                "eigensolver did not converge on a {rows}x{cols} system"
            ))
        })?;
        let smax = eig.eigenvalues.amax();
        if smax == 0.0 {
            return Ok(empty(a, 1.0));
        }
        let keep: Vec<usize> = (0..n)
            .filter(|&i| eig.eigenvalues[i].abs() > PINV_TOLERANCE * smax)
            .collect();
        let values: Vec<f64> = keep.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = eig.eigenvectors.select_columns(&keep);
        let smin = values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        Ok(PinvSolver {
            a,
            values,
            vectors,
            rows,
            cols,
            condition: smax / smin,
        })
    }

    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        if b.len() != self.rows {
            return Err(Error::SizeMismatch {
                what: "right-hand side",
                expected: self.rows,
                got: b.len(),
            });
        }
        let mut x = self.apply(b);
        for _ in 0..REFINEMENT_STEPS {
            let g = self.a.transpose() * (b - &self.a * &x);
            x += self.apply(&self.apply_transpose(&g));
        }
        Ok(x)
    }

    /// `pinv(A) y`: lower block of `pinv(J) [y; 0]`.
    fn apply(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut c = self.vectors.rows(0, self.rows).transpose() * y;
        c.iter_mut().zip(&self.values).for_each(|(c, v)| *c /= v);
        self.vectors.rows(self.rows, self.cols) * c
    }

    /// `pinv(A)^T z`: upper block of `pinv(J) [0; z]`.
    fn apply_transpose(&self, z: &DVector<f64>) -> DVector<f64> {
        let mut c = self.vectors.rows(self.rows, self.cols).transpose() * z;
        c.iter_mut().zip(&self.values).for_each(|(c, v)| *c /= v);
        self.vectors.rows(0, self.rows) * c
    }
}

/// `L^{-1} a` for a Cholesky factor `L`.
pub(crate) fn lower_solve(chol: &Cholesky<f64, Dyn>, a: &DMatrix<f64>) -> DMatrix<f64> {
    chol.l()
        .solve_lower_triangular(a)
        .expect("Cholesky factor is nonsingular")
}

/// `L^{-T} y`.
pub(crate) fn upper_solve(chol: &Cholesky<f64, Dyn>, y: &DVector<f64>) -> DVector<f64> {
    chol.l()
        .transpose()
        .solve_upper_triangular(y)
        .expect("Cholesky factor is nonsingular")
}

/// Residual measures of a decomposition, each relative to `||omega||_{Mv}`
/// (or its square for inner products).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResiduals {
    pub omega_norm: f64,
    pub reconstruction: f64,
    pub exact_coexact: f64,
    pub exact_harmonic: f64,
    pub coexact_harmonic: f64,
    /// `||D_k h||_{Mv}`.
    pub harmonic_d: f64,
    /// `||weak delta_v h||_{Mv}` on zero-trace test cochains.
    pub harmonic_delta: f64,
    /// Condition numbers of the two potential solves.
    pub exact_condition: f64,
    pub coexact_condition: f64,
}

impl DecompositionResiduals {
    pub fn max_orthogonality(&self) -> f64 {
        self.exact_coexact
            .max(self.exact_harmonic)
            .max(self.coexact_harmonic)
    }

    pub fn max_harmonicity(&self) -> f64 {
        self.harmonic_d.max(self.harmonic_delta)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.reconstruction <= tol
            && self.max_orthogonality() <= tol
            && self.max_harmonicity() <= tol
    }
}

/// `omega = d alpha + delta_v beta + h` with gauged potentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HodgeDecomposition {
    pub degree: usize,
    pub omega: Vec<f64>,
    pub exact: Vec<f64>,
    pub coexact: Vec<f64>,
    pub harmonic: Vec<f64>,
    /// Zero-trace potential of the exact part (degree `k-1`).
    pub alpha: Vec<f64>,
    /// Potential of the coexact part (degree `k+1`).
    pub beta: Vec<f64>,
    pub residuals: DecompositionResiduals,
}

impl HodgeDecomposition {
    pub fn part(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v)
    }
}

/// Precomputed potential solves for decompositions of one degree.
///
/// The exact part uses zero-trace potentials; the coexact part uses the weak
/// codifferential on the full space, so the harmonic remainder is the space of
/// harmonic fields without boundary condition.
pub struct HodgeSolver<'a> {
    disc: &'a Discretization,
    degree: usize,
    chol: Cholesky<f64, Dyn>,
    d_int: DMatrix<f64>,
    lower_dofs: Vec<usize>,
    exact: Option<PinvSolver>,
    coexact: Option<(PinvSolver, Cholesky<f64, Dyn>)>,
    lower_int_chol: Option<Cholesky<f64, Dyn>>,
    lower_int_mass: DMatrix<f64>,
}

impl<'a> HodgeSolver<'a> {
    pub fn new(disc: &'a Discretization, degree: usize) -> Result<Self> {
        if degree > 2 {
            return Err(Error::DegreeExceedsDimension { degree, dim: 2 });
        }
        let k = degree;
        let mass = disc.mass(k);
        let chol = Cholesky::new(mass.clone()).ok_or(Error::MassNotSpd(k))?;

        let mut lower_int_mass = DMatrix::zeros(0, 0);
        let (d_int, lower_dofs, exact, lower_int_chol) = if k == 0 {
            (DMatrix::zeros(disc.num_dofs(0), 0), Vec::new(), None, None)
        } else {
            let ld = disc.free_dofs(k - 1, BoundaryCondition::Normal);
            let all: Vec<usize> = (0..disc.num_dofs(k)).collect();
            let d = select_block(disc.incidence(k - 1), &all, &ld);
            let lm = select_block(disc.mass(k - 1), &ld, &ld);
            lower_int_mass = lm.clone();
            if ld.is_empty() {
                (d, ld, None, None)
            } else {
                let lc = Cholesky::new(lm).ok_or(Error::MassNotSpd(k - 1))?;
                // L^T D L_a^{-T} = (L_a^{-1} (L^T D)^T)^T
                let ltd = chol.l().transpose() * &d;
                let a = lower_solve(&lc, &ltd.transpose()).transpose();
                let solver = PinvSolver::new(a)?;
                (d, ld, Some(solver), Some(lc))
            }
        };

        let coexact = if k == 2 {
            None
        } else {
            let um = disc.mass(k + 1);
            let uc = Cholesky::new(um.clone()).ok_or(Error::MassNotSpd(k + 1))?;
            // L^{-1} D_k^T L_b
            let a = lower_solve(&chol, &(disc.incidence(k).transpose() * uc.l()));
            Some((PinvSolver::new(a)?, uc))
        };

        Ok(HodgeSolver {
            disc,
            degree,
            chol,
            d_int,
            lower_dofs,
            exact,
            coexact,
            lower_int_chol,
            lower_int_mass,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(self.disc.mass(self.degree) * b))
    }

    /// `||D_k h||_{Mv}` and the zero-trace weak codifferential norm of `h`.
    pub fn harmonicity(&self, h: &DVector<f64>) -> (f64, f64) {
        let k = self.degree;
        let dn = if k < 2 {
            let dh = self.disc.incidence(k) * h;
            dh.dot(&(self.disc.mass(k + 1) * &dh)).max(0.0).sqrt()
        } else {
            0.0
        };
        let sn = match &self.lower_int_chol {
            Some(lc) => {
                let s = lc.solve(&(self.d_int.transpose() * (self.disc.mass(k) * h)));
                s.dot(&(&self.lower_int_mass * &s)).max(0.0).sqrt()
            }
            None => 0.0,
        };
        (dn, sn)
    }

    pub fn decompose(&self, omega: &DVector<f64>) -> Result<HodgeDecomposition> {
        let k = self.degree;
        let n = self.disc.num_dofs(k);
        if omega.len() != n {
            return Err(Error::SizeMismatch {
                what: "cochain",
                expected: n,
                got: omega.len(),
            });
        }
        let lt_omega = self.chol.l().transpose() * omega;

        let (exact, alpha, exact_cond) = match (&self.exact, &self.lower_int_chol) {
            (Some(solver), Some(lc)) => {
                let y = solver.solve(&lt_omega)?;
                let a = upper_solve(lc, &y);
                let mut full = DVector::zeros(self.disc.num_dofs(k - 1));
                for (i, &d) in self.lower_dofs.iter().enumerate() {
                    full[d] = a[i];
                }
                (&self.d_int * &a, full, solver.condition)
            }
            _ => {
                let len = if k == 0 { 0 } else { self.disc.num_dofs(k - 1) };
                (DVector::zeros(n), DVector::zeros(len), 1.0)
            }
        };

        let (coexact, beta, coexact_cond) = match &self.coexact {
            Some((solver, uc)) => {
                let y = solver.solve(&lt_omega)?;
                let b = upper_solve(uc, &y);
                let rhs = self.disc.incidence(k).transpose() * (self.disc.mass(k + 1) * &b);
                (self.chol.solve(&rhs), b, solver.condition)
            }
            None => (DVector::zeros(n), DVector::zeros(0), 1.0),
        };

        let harmonic = omega - &exact - &coexact;
        let on2 = self.inner(omega, omega);
        let on = on2.sqrt();
        let rel = |x: f64, d: f64| if d > 0.0 { x / d } else { x };
        let recon = omega - (&exact + &coexact + &harmonic);
        let (hd, hs) = self.harmonicity(&harmonic);
        let residuals = DecompositionResiduals {
            omega_norm: on,
            reconstruction: rel(self.inner(&recon, &recon).max(0.0).sqrt(), on),
            exact_coexact: rel(self.inner(&exact, &coexact).abs(), on2),
            exact_harmonic: rel(self.inner(&exact, &harmonic).abs(), on2),
            coexact_harmonic: rel(self.inner(&coexact, &harmonic).abs(), on2),
            harmonic_d: rel(hd, on),
            harmonic_delta: rel(hs, on),
            exact_condition: exact_cond,
            coexact_condition: coexact_cond,
        };
        let v = |x: &DVector<f64>| x.iter().cloned().collect::<Vec<f64>>();
        Ok(HodgeDecomposition {
            degree: k,
            omega: v(omega),
            exact: v(&exact),
            coexact: v(&coexact),
            harmonic: v(&harmonic),
            alpha: v(&alpha),
            beta: v(&beta),
            residuals,
        })
    }
}

/// Decomposes a `k`-cochain given on the full DOF space.
pub fn decompose(
    disc: &Discretization,
    omega: &DVector<f64>,
    k: usize,
) -> Result<HodgeDecomposition> {
    HodgeSolver::new(disc, k)?.decompose(omega)
}
