use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::{assemble_mass, reference, to_dense};
use crate::error::{Error, Result};
use crate::mesh::{DiscreteField, SimplicialComplex};

/// Boundary condition under which an operator set is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// No boundary; all DOFs are free.
    Closed,
    /// Zero trace, imposed essentially by removing boundary DOFs.
    Normal,
    /// The v-tangential condition, imposed naturally on the full DOF space.
    #[serde(alias = "v-tangential")]
    Tangential,
}

impl BoundaryCondition {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::Closed => "closed",
            BoundaryCondition::Normal => "normal",
            BoundaryCondition::Tangential => "tangential",
        }
    }

    /// The condition that applies to a mesh: `Closed` without boundary.
    pub fn resolve(self, has_boundary: bool) -> BoundaryCondition {
        if has_boundary {
            self
        } else {
            BoundaryCondition::Closed
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(BoundaryCondition::Closed),
            "normal" | "n" => Ok(BoundaryCondition::Normal),
            "tangential" | "v-tangential" | "t" => Ok(BoundaryCondition::Tangential),
            _ => Err(Error::InvalidArgument(format!(
                "unknown boundary condition '{s}'"
            ))),
        }
    }
}

/// Incidence matrices, v-induced masses and boundary data of a mesh.
#[derive(Debug, Clone)]
pub struct Discretization {
    incidence: [DMatrix<f64>; 2],
    mass: [DMatrix<f64>; 3],
    interior: [Vec<usize>; 3],
    has_boundary: bool,
}

impl Discretization {
    /// Assembles the v-induced masses of `field`.
    pub fn new(complex: &SimplicialComplex, field: &DiscreteField) -> Result<Self> {
        let mass =
            [0, 1, 2].map(|k| assemble_mass(complex, field, k).map(|m| to_dense(&m.induced)));
        let [m0, m1, m2] = mass;
        Self::from_masses(complex, [m0?, m1?, m2?])
    }

    /// The standard (zero-field) discretization built from the closed-form
    /// element matrices.
    pub fn standard(complex: &SimplicialComplex) -> Result<Self> {
        Self::from_masses(
            complex,
            reference::mass_matrices(complex, &DiscreteField::zero(complex))?,
        )
    }

    pub fn from_masses(complex: &SimplicialComplex, mass: [DMatrix<f64>; 3]) -> Result<Self> {
        for (k, m) in mass.iter().enumerate() {
            let n = complex.num_simplices(k);
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::SizeMismatch {
                    what: "mass matrix",
                    expected: n,
                    got: m.nrows(),
                });
            }
        }
        Ok(Discretization {
            incidence: [
                complex.incidence(0).to_dense(),
                complex.incidence(1).to_dense(),
            ],
            mass,
            interior: [0, 1, 2].map(|k| complex.interior_simplices(k)),
            has_boundary: complex.has_boundary(),
        })
    }

    pub fn num_dofs(&self, k: usize) -> usize {
        self.mass[k].nrows()
    }

    pub fn mass(&self, k: usize) -> &DMatrix<f64> {
        &self.mass[k]
    }

    /// `D_k`, mapping `k`-cochains to `k+1`-cochains.
    pub fn incidence(&self, k: usize) -> &DMatrix<f64> {
        &self.incidence[k]
    }

    pub fn interior(&self, k: usize) -> &[usize] {
        &self.interior[k]
    }

    pub fn has_boundary(&self) -> bool {
        self.has_boundary
    }

    /// DOFs that stay free under `bc`.
    pub fn free_dofs(&self, k: usize, bc: BoundaryCondition) -> Vec<usize> {
        match bc {
            BoundaryCondition::Normal => self.interior[k].clone(),
            _ => (0..self.num_dofs(k)).collect(),
        }
    }

    /// Operators of degree `k` under `bc`.
    pub fn operators(&self, k: usize, bc: BoundaryCondition) -> Result<OperatorSet> {
        if k > 2 {
            return Err(Error::DegreeExceedsDimension { degree: k, dim: 2 });
        }
        if bc == BoundaryCondition::Closed && self.has_boundary {
            return Err(Error::InvalidArgument(
                "closed boundary condition requested on a mesh with boundary".into(),
            ));
        }
        let bc = bc.resolve(self.has_boundary);
        let dofs = self.free_dofs(k, bc);
        let mass = select(&self.mass[k], &dofs, &dofs);
        let chol = Cholesky::new(mass.clone()).ok_or(Error::MassNotSpd(k))?;

        let (lower_dofs, d_down, lower) = if k == 0 {
            (Vec::new(), DMatrix::zeros(dofs.len(), 0), None)
        } else {
            let ld = self.free_dofs(k - 1, bc);
            let d = select(&self.incidence[k - 1], &dofs, &ld);
            let lm = select(&self.mass[k - 1], &ld, &ld);
            let lc = Cholesky::new(lm.clone()).ok_or(Error::MassNotSpd(k - 1))?;
            (ld, d, Some((lm, lc)))
        };

        let (d_up, upper_mass) = if k == 2 {
            (DMatrix::zeros(0, dofs.len()), DMatrix::zeros(0, 0))
        } else {
            let all: Vec<usize> = (0..self.num_dofs(k + 1)).collect();
            (
                select(&self.incidence[k], &all, &dofs),
                self.mass[k + 1].clone(),
            )
        };

        Ok(OperatorSet {
            degree: k,
            bc,
            total_dofs: self.num_dofs(k),
            dofs,
            lower_dofs,
            mass,
            chol,
            lower,
            d_down,
            d_up,
            upper_mass,
        })
    }

    /// Weak codifferential on the full (naturally tangential) DOF space:
    /// `Mv_{k-1}^{-1} D_{k-1}^T Mv_k x`.
    pub fn weak_codifferential(&self, k: usize, x: &DVector<f64>) -> Result<DVector<f64>> {
        if k == 0 || k > 2 {
            return Err(Error::InvalidArgument(format!(
                "no codifferential of degree {k}"
            )));
        }
        let lc = Cholesky::new(self.mass[k - 1].clone()).ok_or(Error::MassNotSpd(k - 1))?;
        let rhs = self.incidence[k - 1].transpose() * (&self.mass[k] * x);
        Ok(lc.solve(&rhs))
    }
}

pub(crate) fn select(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Discrete operators of one degree under one boundary condition, on the
/// free DOF space of that condition.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub degree: usize,
    pub bc: BoundaryCondition,
    total_dofs: usize,
    dofs: Vec<usize>,
    lower_dofs: Vec<usize>,
    mass: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    lower: Option<(DMatrix<f64>, Cholesky<f64, Dyn>)>,
    d_down: DMatrix<f64>,
    d_up: DMatrix<f64>,
    upper_mass: DMatrix<f64>,
}

impl OperatorSet {
    /// Global indices of the free DOFs.
    pub fn dofs(&self) -> &[usize] {
        &self.dofs
    }

    pub fn lower_dofs(&self) -> &[usize] {
        &self.lower_dofs
    }

    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }

    pub fn total_dofs(&self) -> usize {
        self.total_dofs
    }

    /// Restricted `Mv_k`.
    pub fn mass(&self) -> &DMatrix<f64> {
        &self.mass
    }

    pub fn mass_factor(&self) -> &Cholesky<f64, Dyn> {
        &self.chol
    }

    /// Restricted `Mv_{k-1}` (empty at `k = 0`).
    pub fn lower_mass(&self) -> Option<&DMatrix<f64>> {
        self.lower.as_ref().map(|(m, _)| m)
    }

    pub fn lower_factor(&self) -> Option<&Cholesky<f64, Dyn>> {
        self.lower.as_ref().map(|(_, c)| c)
    }

    /// `D_k` on the free DOFs (all `k+1` rows).
    pub fn d_up(&self) -> &DMatrix<f64> {
        &self.d_up
    }

    /// `D_{k-1}` between the free DOFs of degrees `k-1` and `k`.
    pub fn d_down(&self) -> &DMatrix<f64> {
        &self.d_down
    }

    /// Full `Mv_{k+1}` (empty at `k = 2`).
    pub fn upper_mass(&self) -> &DMatrix<f64> {
        &self.upper_mass
    }

    /// `A_k = D_k^T Mv_{k+1} D_k`.
    pub fn a_block(&self) -> DMatrix<f64> {
        self.d_up.transpose() * &self.upper_mass * &self.d_up
    }

    /// `B_k = Mv_k D_{k-1} Mv_{k-1}^{-1} D_{k-1}^T Mv_k`, through a factorized
    /// solve.
    pub fn b_block(&self) -> DMatrix<f64> {
        match &self.lower {
            None => DMatrix::zeros(self.len(), self.len()),
            Some((_, lc)) => {
                let c = self.d_down.transpose() * &self.mass;
                let s = lc.solve(&c);
                let b = c.transpose() * s;
                (&b + b.transpose()) * 0.5
            }
        }
    }

    /// `L_k = A_k + B_k`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let l = self.a_block() + self.b_block();
        (&l + l.transpose()) * 0.5
    }

    /// `Mv_{k-1}^{-1} D_{k-1}^T Mv_k x` on the free DOFs.
    pub fn codifferential(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(x)?;
        match &self.lower {
            None => Ok(DVector::zeros(0)),
            Some((_, lc)) => Ok(lc.solve(&(self.d_down.transpose() * (&self.mass * x)))),
        }
    }

    /// `D_k x`.
    pub fn differential(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(x)?;
        Ok(&self.d_up * x)
    }

    /// `Mv_k`-inner product.
    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(&self.mass * b))
    }

    pub fn norm(&self, a: &DVector<f64>) -> f64 {
        self.inner(a, a).max(0.0).sqrt()
    }

    /// Extends a free-DOF vector by zeros to the full space.
    pub fn extend(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.total_dofs);
        for (i, &d) in self.dofs.iter().enumerate() {
            out[d] = x[i];
        }
        out
    }

    /// Restricts a full-space vector to the free DOFs.
    pub fn restrict(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.dofs.len(), self.dofs.iter().map(|&d| x[d]))
    }

    fn check_len(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::SizeMismatch {
                what: "cochain",
                expected: self.len(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// Operators of degree `k` on the zero-trace subspace.
pub fn restrict_normal(disc: &Discretization, k: usize) -> Result<OperatorSet> {
    disc.operators(k, BoundaryCondition::Normal)
}

/// Applies the weak codifferential of `ops` to `x`.
pub fn weak_codifferential_apply(ops: &OperatorSet, x: &DVector<f64>) -> Result<DVector<f64>> {
    ops.codifferential(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, realize_field, FieldSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
    }

    fn disc(c: &SimplicialComplex, seed: u64) -> Discretization {
        let f = realize_field(
            c,
            &FieldSpec::Random {
                seed,
                amplitude: 1.0,
            },
        )
        .unwrap();
        Discretization::new(c, &f).unwrap()
    }

    #[test]
    fn discrete_adjointness() {
        let c = generate::torus(8, 6, 2.0, 0.7).unwrap();
        let d = disc(&c, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 1..3 {
            let ops = d.operators(k, BoundaryCondition::Closed).unwrap();
            for _ in 0..10 {
                let a = random_vec(&mut rng, d.num_dofs(k - 1));
                let b = random_vec(&mut rng, d.num_dofs(k));
                let lhs = (d.incidence(k - 1) * &a).dot(&(d.mass(k) * &b));
                let delta = ops.codifferential(&b).unwrap();
                let rhs = a.dot(&(d.mass(k - 1) * delta));
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                    "{lhs} {rhs}"
                );
            }
        }
    }

    #[test]
    fn codifferential_squares_to_zero() {
        let c = generate::annulus(3, 14, 0.5, 1.0).unwrap();
        let d = disc(&c, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for bc in [BoundaryCondition::Tangential, BoundaryCondition::Normal] {
            let o2 = d.operators(2, bc).unwrap();
            let o1 = d.operators(1, bc).unwrap();
            let x = random_vec(&mut rng, o2.len());
            let y = o2.codifferential(&x).unwrap();
            let z = o1.codifferential(&y).unwrap();
            assert!(z.amax() <= 1e-10 * y.amax(), "{bc:?}: {}", z.amax());
        }
    }

    #[test]
    fn energy_identity() {
        let c = generate::icosphere(1).unwrap();
        let d = disc(&c, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..3 {
            let ops = d.operators(k, BoundaryCondition::Closed).unwrap();
            let l = ops.laplacian();
            assert!((&l - l.transpose()).amax() == 0.0);
            let x = random_vec(&mut rng, ops.len());
            let q = x.dot(&(&l * &x));
            let dx = ops.differential(&x).unwrap();
            let dpart = dx.dot(&(ops.upper_mass() * &dx));
            let spart = match ops.lower_mass() {
                Some(m) => {
                    let s = ops.codifferential(&x).unwrap();
                    s.dot(&(m * &s))
                }
                None => 0.0,
            };
            assert!((q - dpart - spart).abs() <= 1e-12 * q.abs(), "k={k}");
        }
    }

    #[test]
    fn constant_field_kills_codifferential_of_dx() {
        let c = generate::flat_torus(8, 8).unwrap();
        let f = realize_field(
            &c,
            &FieldSpec::Constant {
                vector: vec![0.8, 0.0],
            },
        )
        .unwrap();
        let d = Discretization::new(&c, &f).unwrap();
        let x = DVector::from_iterator(
            c.num_edges(),
            (0..c.num_edges()).map(|e| c.edge_vector(e)[0]),
        );
        let y = d.weak_codifferential(1, &x).unwrap();
        assert!(y.amax() <= 1e-10, "{}", y.amax());
    }

    #[test]
    fn normal_restriction_dimensions() {
        let t = generate::flat_torus(4, 4).unwrap();
        let dt = Discretization::standard(&t).unwrap();
        let o = restrict_normal(&dt, 1).unwrap();
        assert_eq!(o.bc, BoundaryCondition::Closed);
        assert_eq!(o.len(), t.num_edges());

        let disk = generate::disk(3, 12, 1.0).unwrap();
        let dd = Discretization::standard(&disk).unwrap();
        let o = restrict_normal(&dd, 0).unwrap();
        assert_eq!(
            o.len(),
            disk.num_vertices() - disk.boundary_vertices().len()
        );

        let ann = generate::annulus(3, 12, 0.5, 1.0).unwrap();
        let da = Discretization::standard(&ann).unwrap();
        let o = restrict_normal(&da, 1).unwrap();
        assert_eq!(o.len(), ann.num_edges() - ann.boundary_edges().len());
        assert!(da.operators(1, BoundaryCondition::Closed).is_err());
    }

    #[test]
    fn zero_field_matches_standard_operators() {
        let c = generate::annulus(3, 10, 0.5, 1.0).unwrap();
        let a = Discretization::new(&c, &DiscreteField::zero(&c)).unwrap();
        let b = Discretization::standard(&c).unwrap();
        for k in 0..3 {
            for bc in [BoundaryCondition::Normal, BoundaryCondition::Tangential] {
                let la = a.operators(k, bc).unwrap().laplacian();
                let lb = b.operators(k, bc).unwrap().laplacian();
                assert!((&la - &lb).amax() <= 1e-12 * lb.amax());
            }
        }
    }

    #[test]
    fn field_direction_monotonicity() {
        let c = generate::flat_torus(6, 6).unwrap();
        let f = realize_field(
            &c,
            &FieldSpec::Constant {
                vector: vec![0.6, 0.0],
            },
        )
        .unwrap();
        let d = Discretization::new(&c, &f).unwrap();
        let s = Discretization::standard(&c).unwrap();
        let along = |axis: usize| {
            DVector::from_iterator(
                c.num_edges(),
                (0..c.num_edges()).map(|e| c.edge_vector(e)[axis]),
            )
        };
        let (x, y) = (along(0), along(1));
        let q = |m: &DMatrix<f64>, v: &DVector<f64>| v.dot(&(m * v));
        assert!(q(d.mass(1), &x) > q(s.mass(1), &x) * 1.3);
        assert!((q(d.mass(1), &y) - q(s.mass(1), &y)).abs() <= 1e-12 * q(s.mass(1), &y));
    }
}
