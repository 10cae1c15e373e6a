//! Lowest-order Whitney discretization of the v-induced inner products.

mod boundary;
mod operators;
pub mod reference;

use nalgebra::DMatrix;
use nalgebra_sparse::{convert::serial::convert_csr_dense, CooMatrix, CsrMatrix};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extalg::{inner_gv, KFormValue, PointMetric, TangentVector};
use crate::mesh::{DiscreteField, SimplicialComplex};

pub use boundary::{
    bc_compare, bc_compare_with_tolerance, BcCounterexample, BcHypothesis, BcReport, BC_TOLERANCE,
};
pub(crate) use operators::select as select_block;
pub use operators::{
    restrict_normal, weak_codifferential_apply, BoundaryCondition, Discretization, OperatorSet,
};

/// Local edges of a triangle, in the order used for element matrices.
pub(crate) const LOCAL_EDGES: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

/// Gradients of the barycentric coordinates in the chart `x = p0 + s e1 + t e2`.
const GRAD_LAMBDA: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

/// Edge-midpoint rule on the reference triangle; exact for quadratics.
const QUAD_POINTS: [[f64; 3]; 3] = [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]];
const QUAD_WEIGHT: f64 = 1.0 / 6.0;

pub(crate) fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Pullback metric of a triangle: the Gram matrix of the edge vectors
/// `p1 - p0`, `p2 - p0`. `index` is only used in the error.
pub fn element_metric(corners: &[[f64; 3]; 3], index: usize) -> Result<PointMetric> {
    let (e1, e2) = (sub3(corners[1], corners[0]), sub3(corners[2], corners[0]));
    let mut scale = 0.0f64;
    for d in 0..3 {
        let lo = corners.iter().map(|c| c[d]).fold(f64::INFINITY, f64::min);
        let hi = corners
            .iter()
            .map(|c| c[d])
            .fold(f64::NEG_INFINITY, f64::max);
        scale = scale.max(hi - lo);
    }
    let n = cross3(e1, e2);
    let area = 0.5 * dot3(n, n).sqrt();
    if !(area >= 1e-14 * scale * scale) || scale == 0.0 {
        return Err(Error::DegenerateElement(index));
    }
    let g = DMatrix::from_row_slice(
        2,
        2,
        &[dot3(e1, e1), dot3(e1, e2), dot3(e1, e2), dot3(e2, e2)],
    );
    PointMetric::new(g).map_err(|_| Error::DegenerateElement(index))
}

/// One triangle expressed in its local affine chart.
#[derive(Debug, Clone)]
pub struct Element {
    pub metric: PointMetric,
    frame: [[f64; 3]; 2],
}

impl Element {
    pub fn new(complex: &SimplicialComplex, t: usize) -> Result<Self> {
        let c = complex.triangle_corners(t);
        Ok(Element {
            metric: element_metric(&c, t)?,
            frame: [sub3(c[1], c[0]), sub3(c[2], c[0])],
        })
    }

    pub fn area(&self) -> f64 {
        0.5 * self.metric.sqrt_det()
    }

    /// Chart components of an ambient vector (its in-plane part).
    pub fn local_vector(&self, v: [f64; 3]) -> TangentVector {
        let b = [dot3(v, self.frame[0]), dot3(v, self.frame[1])];
        let gi = self.metric.inverse();
        TangentVector::new(vec![
            gi[(0, 0)] * b[0] + gi[(0, 1)] * b[1],
            gi[(1, 0)] * b[0] + gi[(1, 1)] * b[1],
        ])
    }

    /// Ambient vector with the given chart components.
    pub fn ambient_vector(&self, v: &TangentVector) -> [f64; 3] {
        let c = v.components();
        std::array::from_fn(|d| c[0] * self.frame[0][d] + c[1] * self.frame[1][d])
    }
}

/// `lambda_i d lambda_j - lambda_j d lambda_i` at barycentric point `lam`.
pub(crate) fn whitney_edge(lam: &[f64; 3], i: usize, j: usize) -> KFormValue {
    let c = std::array::from_fn::<f64, 2, _>(|d| {
        lam[i] * GRAD_LAMBDA[j][d] - lam[j] * GRAD_LAMBDA[i][d]
    });
    KFormValue::from_coeffs(2, 1, c.to_vec()).expect("valid 1-form")
}

/// Local vertex pair of the Whitney form for local edge `r`, ordered so that
/// it matches the global orientation (smaller global index first).
pub(crate) fn oriented_local_edge(tri: &[usize; 3], r: usize) -> (usize, usize) {
    let (a, b) = LOCAL_EDGES[r];
    if tri[a] < tri[b] {
        (a, b)
    } else {
        (b, a)
    }
}

/// Local Whitney basis of degree `k` at a barycentric point.
fn local_basis(k: usize, tri: &[usize; 3], lam: &[f64; 3]) -> Vec<KFormValue> {
    match k {
        0 => lam
            .iter()
            .map(|&l| KFormValue::scalar(2, l).unwrap())
            .collect(),
        1 => (0..3)
            .map(|r| {
                let (i, j) = oriented_local_edge(tri, r);
                whitney_edge(lam, i, j)
            })
            .collect(),
        _ => vec![KFormValue::top(2, 2.0).unwrap()],
    }
}

/// Global DOF indices of the local basis of degree `k` on triangle `t`.
pub(crate) fn local_dofs(complex: &SimplicialComplex, t: usize, k: usize) -> Vec<usize> {
    let tri = complex.triangles()[t];
    match k {
        0 => tri.to_vec(),
        1 => LOCAL_EDGES
            .iter()
            .map(|&(a, b)| {
                complex
                    .edge_index(tri[a], tri[b])
                    .expect("edge of triangle")
            })
            .collect(),
        _ => vec![t],
    }
}

/// Standard and v-induced element matrices (row-major, symmetric).
fn element_matrices(
    elem: &Element,
    tri: &[usize; 3],
    v: &TangentVector,
    k: usize,
) -> (Vec<f64>, Vec<f64>) {
    let zero = TangentVector::zeros(2);
    let n = if k == 2 { 1 } else { 3 };
    let mut std_m = vec![0.0; n * n];
    let mut ind_m = vec![0.0; n * n];
    let w = QUAD_WEIGHT * elem.metric.sqrt_det();
    for lam in &QUAD_POINTS {
        let basis = local_basis(k, tri, lam);
        for a in 0..n {
            for b in a..n {
                std_m[a * n + b] += w * inner_gv(&basis[a], &basis[b], &zero, &elem.metric);
                ind_m[a * n + b] += w * inner_gv(&basis[a], &basis[b], v, &elem.metric);
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            std_m[a * n + b] = std_m[b * n + a];
            ind_m[a * n + b] = ind_m[b * n + a];
        }
    }
    (std_m, ind_m)
}

/// Standard mass matrix `M_k` and v-induced mass matrix `Mv_k` of one degree.
#[derive(Debug, Clone)]
pub struct MassMatrices {
    pub degree: usize,
    pub standard: CsrMatrix<f64>,
    pub induced: CsrMatrix<f64>,
}

impl MassMatrices {
    pub fn standard_dense(&self) -> DMatrix<f64> {
        convert_csr_dense(&self.standard)
    }

    pub fn induced_dense(&self) -> DMatrix<f64> {
        convert_csr_dense(&self.induced)
    }
}

fn check_field(complex: &SimplicialComplex, field: &DiscreteField) -> Result<()> {
    if field.len() != complex.num_triangles() {
        return Err(Error::SizeMismatch {
            what: "field",
            expected: complex.num_triangles(),
            got: field.len(),
        });
    }
    Ok(())
}

/// Assembles `M_k` and `Mv_k` for `k` in `0..=2`.
///
/// Element matrices are computed in parallel; the global sum is accumulated
/// in triangle order, so the result does not depend on the thread count.
pub fn assemble_mass(
    complex: &SimplicialComplex,
    field: &DiscreteField,
    k: usize,
) -> Result<MassMatrices> {
    if k > 2 {
        return Err(Error::DegreeExceedsDimension { degree: k, dim: 2 });
    }
    check_field(complex, field)?;
    let locals: Vec<(Vec<usize>, Vec<f64>, Vec<f64>)> = (0..complex.num_triangles())
        .into_par_iter()
        .map(|t| {
            let elem = Element::new(complex, t)?;
            let v = elem.local_vector(field.vector(t));
            let (s, i) = element_matrices(&elem, &complex.triangles()[t], &v, k);
            Ok((local_dofs(complex, t, k), s, i))
        })
        .collect::<Result<_>>()?;

    let n = complex.num_simplices(k);
    let mut std_coo = CooMatrix::new(n, n);
    let mut ind_coo = CooMatrix::new(n, n);
    for (dofs, s, i) in &locals {
        let m = dofs.len();
        for a in 0..m {
            for b in 0..m {
                std_coo.push(dofs[a], dofs[b], s[a * m + b]);
                ind_coo.push(dofs[a], dofs[b], i[a * m + b]);
            }
        }
    }
    Ok(MassMatrices {
        degree: k,
        standard: CsrMatrix::from(&std_coo),
        induced: CsrMatrix::from(&ind_coo),
    })
}

/// Dense copy of a sparse matrix.
pub fn to_dense(m: &CsrMatrix<f64>) -> DMatrix<f64> {
    convert_csr_dense(m)
}

/// Sparse copy of a dense matrix, dropping exact zeros.
pub fn to_sparse(m: &DMatrix<f64>) -> CsrMatrix<f64> {
    let mut coo = CooMatrix::new(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)] != 0.0 {
                coo.push(i, j, m[(i, j)]);
            }
        }
    }
    CsrMatrix::from(&coo)
}

/// MatrixMarket coordinate text of a sparse matrix.
pub fn matrix_market(m: &CsrMatrix<f64>) -> String {
    nalgebra_sparse::io::save_to_matrix_market_str(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, realize_field, FieldSpec};
    use approx::assert_relative_eq;

    #[test]
    fn metric_of_reference_triangles() {
        let g = element_metric(&[[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 0).unwrap();
        assert_eq!(g.matrix(), &DMatrix::identity(2, 2));
        assert_relative_eq!(g.sqrt_det(), 1.0, epsilon = 1e-15);

        let h = 3f64.sqrt() / 2.0;
        let g = element_metric(&[[0.0; 3], [1.0, 0.0, 0.0], [0.5, h, 0.0]], 0).unwrap();
        assert_relative_eq!(g.matrix()[(0, 0)], 1.0, epsilon = 1e-15);
        assert_relative_eq!(g.matrix()[(0, 1)], 0.5, epsilon = 1e-15);
        assert_relative_eq!(g.matrix()[(1, 1)], 1.0, epsilon = 1e-15);
        assert_relative_eq!(g.sqrt_det(), 2.0 * (h / 2.0), epsilon = 1e-15);
    }

    #[test]
    fn collinear_triangle_is_degenerate() {
        let err = element_metric(&[[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]], 4).unwrap_err();
        assert!(err.to_string().contains("degenerate element"));
        let err = element_metric(&[[0.0; 3], [1.0, 0.0, 0.0], [2.0, 1e-9, 0.0]], 4).unwrap_err();
        assert!(matches!(err, Error::DegenerateElement(4)));
    }

    #[test]
    fn unit_triangle_vertex_mass() {
        let c = generate::single_triangle();
        let m = assemble_mass(&c, &DiscreteField::zero(&c), 0).unwrap();
        let expect =
            DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 2.0]) / 24.0;
        assert_relative_eq!(m.standard_dense(), expect, epsilon = 1e-15);
        assert_eq!(m.standard_dense(), m.induced_dense());
    }

    #[test]
    fn zero_field_gives_standard_mass() {
        let c = generate::torus(6, 5, 2.0, 0.7).unwrap();
        let f = DiscreteField::zero(&c);
        for k in 0..3 {
            let m = assemble_mass(&c, &f, k).unwrap();
            assert_eq!(m.standard_dense(), m.induced_dense());
        }
    }

    #[test]
    fn constant_field_scales_top_mass() {
        let c = generate::rectangle(4, 3, 1.0, 1.0).unwrap();
        let a = 0.7;
        let f = realize_field(
            &c,
            &FieldSpec::Constant {
                vector: vec![a, 0.0],
            },
        )
        .unwrap();
        let m = assemble_mass(&c, &f, 2).unwrap();
        assert_relative_eq!(
            m.induced_dense(),
            m.standard_dense() * (1.0 + a * a),
            max_relative = 1e-14
        );
    }

    #[test]
    fn induced_mass_dominates_standard() {
        let c = generate::annulus(3, 12, 0.5, 1.0).unwrap();
        let f = realize_field(
            &c,
            &FieldSpec::Random {
                seed: 3,
                amplitude: 1.5,
            },
        )
        .unwrap();
        let m = assemble_mass(&c, &f, 1).unwrap();
        let diff = m.induced_dense() - m.standard_dense();
        let eig = diff.symmetric_eigenvalues();
        assert!(eig.min() > -1e-13 * eig.max());
    }

    #[test]
    fn assembly_is_thread_count_independent() {
        let c = generate::icosphere(2).unwrap();
        let f = realize_field(
            &c,
            &FieldSpec::Random {
                seed: 1,
                amplitude: 1.0,
            },
        )
        .unwrap();
        let a = assemble_mass(&c, &f, 1).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| assemble_mass(&c, &f, 1).unwrap());
        assert_eq!(a.induced.values(), b.induced.values());
        assert_eq!(a.induced.col_indices(), b.induced.col_indices());
    }

    #[test]
    fn matrix_market_header() {
        let c = generate::single_triangle();
        let m = assemble_mass(&c, &DiscreteField::zero(&c), 2).unwrap();
        let s = matrix_market(&m.induced);
        assert!(s.starts_with("%%matrixmarket matrix coordinate real general"));
        assert!(s.contains("1 1 1"));
    }
}
