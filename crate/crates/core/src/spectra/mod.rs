//! Generalized eigenproblems of the v-Hodge Laplacian and the rigid-motion
//! invariance experiment.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assembly::{BoundaryCondition, Discretization, OperatorSet};
use crate::error::{Error, Result};
use crate::mesh::{realize_field, DiscreteField, FieldSpec, SimplicialComplex};

/// Eigenvalues below `ZERO_EIGENVALUE * lambda_max` count as zero.
pub const ZERO_EIGENVALUE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub degree: usize,
    pub bc: BoundaryCondition,
    pub dofs: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `||L x - lambda Mv x|| / ||Mv x||` per pair.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Largest eigenvalue of the full pencil.
    pub lambda_max: f64,
    /// Number of reported eigenvalues that count as zero.
    pub zero_multiplicity: usize,
    /// Mv-orthonormal eigencochains on the full DOF space.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eigenvectors: Vec<Vec<f64>>,
}

/// Full solution of the pencil `(L, Mv)` on the free DOFs of `ops`.
struct Pencil {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

fn solve_pencil(ops: &OperatorSet) -> Result<Pencil> {
    let n = ops.len();
    if n == 0 {
        return Ok(Pencil {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let lap = ops.laplacian();
    let l = ops.mass_factor().l();
    // C = L^{-1} Lap L^{-T}
    let y = l
        .solve_lower_triangular(&lap)
        .ok_or_else(|| Error::Solver("singular mass factor".into()))?;
    let c = l
        .solve_lower_triangular(&y.transpose())
        .ok_or_else(|| Error::Solver("singular mass factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(c, f64::EPSILON, 100_000).ok_or_else(|| {
        Error::Solver(format!(
            "symmetric eigensolver did not converge on {n} DOFs"
        ))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lt = l.transpose();
    let mut vectors = DMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (j, &i) in order.iter().enumerate() {
        let x = lt
            .solve_upper_triangular(&eig.eigenvectors.column(i).into_owned())
            .ok_or_else(|| Error::Solver("singular mass factor".into()))?;
        let m = x.amax();
        let flip = x
            .iter()
            .find(|c| c.abs() > 1e-8 * m)
            .is_some_and(|c| *c < 0.0);
        vectors.set_column(j, &if flip { -x } else { x });
        values.push(eig.eigenvalues[i]);
    }
    Ok(Pencil { values, vectors })
}

/// The smallest `count` eigenpairs of `(A_k + B_k, Mv_k)`.
pub fn eigen(ops: &OperatorSet, count: usize) -> Result<SpectrumReport> {
    eigen_with_vectors(ops, count, false)
}

pub fn eigen_with_vectors(
    ops: &OperatorSet,
    count: usize,
    keep_vectors: bool,
) -> Result<SpectrumReport> {
    if count > ops.len() {
        return Err(Error::InvalidArgument(format!(
            "requested {count} eigenvalues but the problem has {} DOFs",
            ops.len()
        )));
    }
    let p = solve_pencil(ops)?;
    let lambda_max = p.values.last().cloned().unwrap_or(0.0);
    let lap = ops.laplacian();
    let mut residuals = Vec::with_capacity(count);
    let mut eigenvectors = Vec::new();
    for j in 0..count {
        let x = p.vectors.column(j).into_owned();
        let mx = ops.mass() * &x;
        let r = &lap * &x - &mx * p.values[j];
        residuals.push(r.norm() / mx.norm());
        if keep_vectors {
            eigenvectors.push(ops.extend(&x).iter().cloned().collect());
        }
    }
    let eigenvalues: Vec<f64> = p.values[..count].to_vec();
    let zero_multiplicity = eigenvalues
        .iter()
        .filter(|&&l| l.abs() <= ZERO_EIGENVALUE * lambda_max)
        .count();
    Ok(SpectrumReport {
        degree: ops.degree,
        bc: ops.bc,
        dofs: ops.len(),
        max_residual: residuals.iter().cloned().fold(0.0, f64::max),
        eigenvalues,
        residuals,
        lambda_max,
        zero_multiplicity,
        eigenvectors,
    })
}

/// A proper rotation and a translation of the ambient space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidMotion {
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

impl RigidMotion {
    pub fn identity() -> Self {
        RigidMotion {
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: [0.0; 3],
        }
    }

    /// Rotation from a uniformly random unit quaternion plus a random
    /// translation in `[-1, 1]^3`.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = loop {
            let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let n = q.iter().map(|x| x * x).sum::<f64>();
            if n > 1e-3 && n <= 1.0 {
                let s = n.sqrt();
                break q.map(|x| x / s);
            }
        };
        let [w, x, y, z] = q;
        let rotation = [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ];
        let translation = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        RigidMotion {
            rotation,
            translation,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let r = DMatrix::from_fn(3, 3, |i, j| self.rotation[i][j]);
        let orth = (r.transpose() * &r - DMatrix::identity(3, 3)).amax();
        if orth > 1e-12 || (r.determinant() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(
                "rotation must be orthogonal with determinant +1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometryReport {
    pub degree: usize,
    pub bc: BoundaryCondition,
    pub push_forward: bool,
    pub original: Vec<f64>,
    pub moved: Vec<f64>,
    /// `max_i |lambda_i - lambda'_i| / |lambda_i|`, with `lambda_max` in place of
    /// `|lambda_i|` for eigenvalues that count as zero.
    pub max_relative_discrepancy: f64,
    /// Largest sine of the Mv-angle between paired eigenvectors of simple
    /// eigenvalues.
    pub max_principal_angle: f64,
    pub simple_eigenvalues: usize,
    pub bitwise_equal: bool,
}

/// Compares the spectra of `(complex, field)` and its image under `motion`.
/// With `push_forward` the field is rotated along; otherwise the same
/// ambient vectors are re-projected onto the moved mesh.
pub fn isometry_test(
    complex: &SimplicialComplex,
    field: &DiscreteField,
    motion: &RigidMotion,
    k: usize,
    bc: BoundaryCondition,
    count: usize,
    push_forward: bool,
) -> Result<IsometryReport> {
    motion.validate()?;
    let moved = complex.transformed(&motion.rotation, motion.translation)?;
    let moved_field = if push_forward {
        field.rotated(&motion.rotation)
    } else {
        let vectors = field.vectors().iter().map(|v| v.to_vec()).collect();
        realize_field(&moved, &FieldSpec::Explicit { vectors })?
    };
    let bc = bc.resolve(complex.has_boundary());
    let da = Discretization::new(complex, field)?;
    let db = Discretization::new(&moved, &moved_field)?;
    let oa = da.operators(k, bc)?;
    let ob = db.operators(k, bc)?;
    if count > oa.len() {
        return Err(Error::InvalidArgument(format!(
            "requested {count} eigenvalues of {}",
            oa.len()
        )));
    }
    let pa = solve_pencil(&oa)?;
    let pb = solve_pencil(&ob)?;
    let lmax = pa.values.last().cloned().unwrap_or(0.0);

    let mut disc = 0.0f64;
    for i in 0..count {
        let (a, b) = (pa.values[i], pb.values[i]);
        let denom = if a.abs() < ZERO_EIGENVALUE * lmax {
            lmax
        } else {
            a.abs()
        };
        if denom > 0.0 {
            disc = disc.max((a - b).abs() / denom);
        }
    }

    let mut angle = 0.0f64;
    let mut simple = 0;
    let n = pa.values.len();
    for i in 0..count {
        let gap = |j: usize| (pa.values[i] - pa.values[j]).abs() / lmax.max(f64::MIN_POSITIVE);
        let below = i == 0 || gap(i - 1) > 1e-6;
        let above = i + 1 >= n || gap(i + 1) > 1e-6;
        if !(below && above) {
            continue;
        }
        simple += 1;
        let x = pa.vectors.column(i).into_owned();
        let y = pb.vectors.column(i).into_owned();
        let c = x.dot(&(oa.mass() * &y)).abs().min(1.0);
        angle = angle.max((1.0 - c * c).max(0.0).sqrt());
    }

    Ok(IsometryReport {
        degree: k,
        bc,
        push_forward,
        bitwise_equal: pa.values[..count] == pb.values[..count],
        original: pa.values[..count].to_vec(),
        moved: pb.values[..count].to_vec(),
        max_relative_discrepancy: disc,
        max_principal_angle: angle,
        simple_eigenvalues: simple,
    })
}

/// Eigenvector columns of the pencil as full-space cochains; used by tests
/// and exports.
pub fn eigencochains(ops: &OperatorSet, count: usize) -> Result<Vec<DVector<f64>>> {
    let p = solve_pencil(ops)?;
    Ok((0..count.min(p.values.len()))
        .map(|j| ops.extend(&p.vectors.column(j).into_owned()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hodge::harmonic_basis;
    use crate::mesh::generate;

    #[test]
    fn flat_torus_low_spectrum() {
        let mut prev_err = f64::INFINITY;
        for n in [8, 16] {
            let c = generate::flat_torus(n, n).unwrap();
            let d = Discretization::standard(&c).unwrap();
            let r = eigen(&d.operators(0, BoundaryCondition::Closed).unwrap(), 9).unwrap();
            assert!(r.eigenvalues[0].abs() < 1e-10);
            assert_eq!(r.zero_multiplicity, 1);
            let err = r.eigenvalues[1..5]
                .iter()
                .map(|l| (l - 1.0).abs())
                .fold(0.0, f64::max);
            assert!(err < 0.1, "n={n}: {:?}", r.eigenvalues);
            assert!(err < prev_err / 3.0);
            prev_err = err;
            assert!(r.max_residual <= 1e-8);
        }
    }

    #[test]
    fn torus_one_forms_kernel_matches_harmonic_dimension() {
        let c = generate::torus(10, 7, 2.0, 0.7).unwrap();
        let f = realize_field(
            &c,
            &FieldSpec::Random {
                seed: 2,
                amplitude: 1.0,
            },
        )
        .unwrap();
        let d = Discretization::new(&c, &f).unwrap();
        let ops = d.operators(1, BoundaryCondition::Closed).unwrap();
        let r = eigen(&ops, 10).unwrap();
        assert_eq!(r.zero_multiplicity, harmonic_basis(&ops).unwrap().dimension);
        assert_eq!(r.zero_multiplicity, 2);
        assert!(r.eigenvalues.iter().all(|&l| l >= -1e-10 * r.lambda_max));
        assert!(r.max_residual <= 1e-8);
    }

    #[test]
    fn sign_flip_is_bitwise_invariant() {
        let c = generate::annulus(3, 12, 0.5, 1.0).unwrap();
        let f = realize_field(
            &c,
            &FieldSpec::Random {
                seed: 4,
                amplitude: 1.0,
            },
        )
        .unwrap();
        let a = Discretization::new(&c, &f).unwrap();
        let b = Discretization::new(&c, &f.negated()).unwrap();
        for k in 0..3 {
            assert_eq!(a.mass(k), b.mass(k));
            let ra = eigen(&a.operators(k, BoundaryCondition::Normal).unwrap(), 5).unwrap();
            let rb = eigen(&b.operators(k, BoundaryCondition::Normal).unwrap(), 5).unwrap();
            assert_eq!(ra.eigenvalues, rb.eigenvalues);
        }
    }

    #[test]
    fn isometry_invariance() {
        let c = generate::torus(9, 6, 2.0, 0.7).unwrap();
        let f = realize_field(
            &c,
            &FieldSpec::Random {
                seed: 5,
                amplitude: 1.0,
            },
        )
        .unwrap();
        let m = RigidMotion::random(3);
        let r = isometry_test(&c, &f, &m, 1, BoundaryCondition::Closed, 20, true).unwrap();
        assert!(
            r.max_relative_discrepancy <= 1e-9,
            "{}",
            r.max_relative_discrepancy
        );
        let id = isometry_test(
            &c,
            &f,
            &RigidMotion::identity(),
            1,
            BoundaryCondition::Closed,
            20,
            true,
        )
        .unwrap();
        assert!(id.bitwise_equal);
        let bad = isometry_test(&c, &f, &m, 1, BoundaryCondition::Closed, 20, false).unwrap();
        assert!(bad.max_relative_discrepancy > 1e-6);
    }

    #[test]
    fn invalid_rotation_rejected() {
        let c = generate::octahedron();
        let mut m = RigidMotion::identity();
        m.rotation[0][0] = -1.0;
        let f = DiscreteField::zero(&c);
        assert!(isometry_test(&c, &f, &m, 0, BoundaryCondition::Closed, 2, true).is_err());
    }
}
