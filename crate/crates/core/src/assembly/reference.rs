//! Closed-form Whitney mass matrices, written directly in ambient vector
//! calculus without the pointwise exterior-algebra kernel.
//!
//! For 1-forms `<T_v a, b> = a . b + (a . v)(b . v)` and for 2-forms
//! `T_v` is multiplication by `1 + |v|^2`; both are integrated exactly with
//! `int lambda_i lambda_j = area (1 + delta_ij) / 12`.

use nalgebra::DMatrix;

use super::{cross3, dot3, local_dofs, oriented_local_edge, sub3};
use crate::error::{Error, Result};
use crate::mesh::{DiscreteField, SimplicialComplex};

fn lambda_gradients(c: &[[f64; 3]; 3]) -> Result<([[f64; 3]; 3], f64)> {
    let n = cross3(sub3(c[1], c[0]), sub3(c[2], c[0]));
    let twice_area = dot3(n, n).sqrt();
    if !(twice_area > 0.0) {
        return Err(Error::DegenerateElement(0));
    }
    let unit = n.map(|x| x / twice_area);
    let grads = std::array::from_fn(|i| {
        let opp = sub3(c[(i + 2) % 3], c[(i + 1) % 3]);
        cross3(unit, opp).map(|x| x / twice_area)
    });
    Ok((grads, 0.5 * twice_area))
}

fn int_ll(area: f64, i: usize, j: usize) -> f64 {
    area * if i == j { 2.0 } else { 1.0 } / 12.0
}

/// Dense Whitney mass matrices `[M_0, M_1, M_2]` for the v-induced inner
/// product; pass a zero field for the standard ones.
pub fn mass_matrices(
    complex: &SimplicialComplex,
    field: &DiscreteField,
) -> Result<[DMatrix<f64>; 3]> {
    let mut out = [0, 1, 2].map(|k| {
        let n = complex.num_simplices(k);
        DMatrix::<f64>::zeros(n, n)
    });
    for t in 0..complex.num_triangles() {
        let c = complex.triangle_corners(t);
        let (grad, area) = lambda_gradients(&c).map_err(|_| Error::DegenerateElement(t))?;
        let v = field.vector(t);
        let bil = |x: [f64; 3], y: [f64; 3]| dot3(x, y) + dot3(x, v) * dot3(y, v);
        let tri = complex.triangles()[t];

        let d0 = local_dofs(complex, t, 0);
        for a in 0..3 {
            for b in 0..3 {
                out[0][(d0[a], d0[b])] += int_ll(area, a, b);
            }
        }

        let d1 = local_dofs(complex, t, 1);
        for r in 0..3 {
            let (i, j) = oriented_local_edge(&tri, r);
            for s in 0..3 {
                let (k, l) = oriented_local_edge(&tri, s);
                let val = int_ll(area, i, k) * bil(grad[j], grad[l])
                    - int_ll(area, i, l) * bil(grad[j], grad[k])
                    - int_ll(area, j, k) * bil(grad[i], grad[l])
                    + int_ll(area, j, l) * bil(grad[i], grad[k]);
                out[1][(d1[r], d1[s])] += val;
            }
        }

        out[2][(t, t)] += (1.0 + dot3(v, v)) / area;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble_mass;
    use crate::mesh::{generate, realize_field, FieldSpec};

    fn max_rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).amax() / a.amax()
    }

    #[test]
    fn kernel_assembly_matches_closed_form() {
        let meshes = [
            generate::torus(7, 5, 2.0, 0.6).unwrap(),
            generate::annulus(3, 10, 0.4, 1.0).unwrap(),
            generate::flat_torus(5, 4).unwrap(),
        ];
        for c in &meshes {
            for spec in [
                FieldSpec::Zero,
                FieldSpec::Random {
                    seed: 11,
                    amplitude: 2.0,
                },
            ] {
                let f = realize_field(c, &spec).unwrap();
                let r = mass_matrices(c, &f).unwrap();
                for k in 0..3 {
                    let m = assemble_mass(c, &f, k).unwrap().induced_dense();
                    assert!(max_rel(&r[k], &m) < 1e-13, "k={k}: {}", max_rel(&r[k], &m));
                }
            }
        }
    }

    #[test]
    fn right_triangle_edge_mass() {
        // classical lowest-order Nedelec mass on the unit right triangle
        let c = generate::single_triangle();
        let m = mass_matrices(&c, &DiscreteField::zero(&c)).unwrap();
        let e = |a, b| c.edge_index(a, b).unwrap();
        let (e01, e02, e12) = (e(0, 1), e(0, 2), e(1, 2));
        assert!((m[1][(e01, e01)] - 1.0 / 3.0).abs() < 1e-15);
        assert!((m[1][(e12, e12)] - 1.0 / 6.0).abs() < 1e-15);
        assert!((m[1][(e01, e02)] - 1.0 / 6.0).abs() < 1e-15);
        assert!((m[2][(0, 0)] - 2.0).abs() < 1e-15);
    }
}
