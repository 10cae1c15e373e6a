use std::fs;
use std::path::Path;

use nalgebra::DVector;

use crate::assembly::{assemble_mass, dot3, local_dofs, matrix_market, oriented_local_edge, sub3};
use crate::error::Result;
use crate::mesh::{DiscreteField, SimplicialComplex, VtkAttribute};

fn ambient_gradients(corners: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let e1 = sub3(corners[1], corners[0]);
    let e2 = sub3(corners[2], corners[0]);
    let (a, b, c) = (dot3(e1, e1), dot3(e1, e2), dot3(e2, e2));
    let det = a * c - b * b;
    let gs: [f64; 3] = std::array::from_fn(|d| (c * e1[d] - b * e2[d]) / det);
    let gt: [f64; 3] = std::array::from_fn(|d| (a * e2[d] - b * e1[d]) / det);
    [std::array::from_fn(|d| -gs[d] - gt[d]), gs, gt]
}

/// Vector proxy of a Whitney 1-cochain at each triangle centroid.
pub fn one_form_proxy(complex: &SimplicialComplex, x: &[f64]) -> Vec<[f64; 3]> {
    (0..complex.num_triangles())
        .map(|t| {
            let tri = complex.triangles()[t];
            let g = ambient_gradients(&complex.triangle_corners(t));
            let dofs = local_dofs(complex, t, 1);
            let mut out = [0.0; 3];
            for (r, &e) in dofs.iter().enumerate() {
                let (i, j) = oriented_local_edge(&tri, r);
                for d in 0..3 {
                    out[d] += x[e] * (g[j][d] - g[i][d]) / 3.0;
                }
            }
            out
        })
        .collect()
}

/// VTK attribute for a `k`-cochain: point values, centroid vectors, or
/// densities per unit area.
pub fn cochain_attribute(
    complex: &SimplicialComplex,
    k: usize,
    name: &str,
    x: &[f64],
) -> VtkAttribute {
    match k {
        0 => VtkAttribute::PointScalars(name.into(), x.to_vec()),
        1 => VtkAttribute::CellVectors(name.into(), one_form_proxy(complex, x)),
        _ => VtkAttribute::CellScalars(
            name.into(),
            (0..complex.num_triangles())
                .map(|t| {
                    let c = complex.triangle_corners(t);
                    let n = crate::assembly::cross3(sub3(c[1], c[0]), sub3(c[2], c[0]));
                    x[t] / (0.5 * dot3(n, n).sqrt())
                })
                .collect(),
        ),
    }
}

pub fn write_vtk(
    path: &Path,
    complex: &SimplicialComplex,
    field: &DiscreteField,
    k: usize,
    cochains: &[(&str, &DVector<f64>)],
) -> Result<()> {
    let mut attrs = vec![VtkAttribute::CellVectors(
        "field".into(),
        field.vectors().to_vec(),
    )];
    attrs.extend(
        cochains
            .iter()
            .map(|(n, x)| cochain_attribute(complex, k, n, x.as_slice())),
    );
    fs::write(path, crate::mesh::write_vtk(complex, &attrs)?)?;
    Ok(())
}

/// Writes `M{k}.mtx`, `Mv{k}.mtx` and `D{k}.mtx` into `dir`.
pub fn write_matrices(
    dir: &Path,
    complex: &SimplicialComplex,
    field: &DiscreteField,
) -> Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut put = |name: String, text: String| -> Result<()> {
        fs::write(dir.join(&name), text)?;
        files.push(name);
        Ok(())
    };
    for k in 0..3 {
        let m = assemble_mass(complex, field, k)?;
        put(format!("M{k}.mtx"), matrix_market(&m.standard))?;
        put(format!("Mv{k}.mtx"), matrix_market(&m.induced))?;
    }
    for k in 0..2 {
        put(
            format!("D{k}.mtx"),
            matrix_market(&complex.incidence(k).to_csr()),
        )?;
    }
    Ok(files)
}
