//! Oriented triangle meshes, their skeletons and signed incidence matrices.

mod field;
pub mod generate;
mod io;

use std::collections::HashMap;

use nalgebra::DMatrix;
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::error::{Error, Result};

pub use field::{realize_field, DiscreteField, FieldSpec};
pub use io::{parse_obj, parse_off, write_off, write_vtk, VtkAttribute};

/// Sparse signed incidence matrix with entries in `{-1, 0, +1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incidence {
    ncols: usize,
    rows: Vec<Vec<(usize, i8)>>,
}

impl Incidence {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[(usize, i8)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.rows[i]
            .iter()
            .find(|(c, _)| *c == j)
            .map_or(0, |(_, s)| *s)
    }

    /// Integer product `self * rhs`, as row lists without explicit zeros.
    pub fn compose(&self, rhs: &Incidence) -> Vec<Vec<(usize, i64)>> {
        assert_eq!(self.ncols, rhs.nrows());
        self.rows
            .iter()
            .map(|row| {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for &(k, a) in row {
                    for &(j, b) in rhs.row(k) {
                        *acc.entry(j).or_default() += a as i64 * b as i64;
                    }
                }
                let mut out: Vec<_> = acc.into_iter().filter(|(_, v)| *v != 0).collect();
                out.sort_unstable();
                out
            })
            .collect()
    }

    pub fn to_csr(&self) -> CsrMatrix<f64> {
        let mut coo = CooMatrix::new(self.nrows(), self.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, s) in row {
                coo.push(i, j, s as f64);
            }
        }
        CsrMatrix::from(&coo)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows(), self.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, s) in row {
                m[(i, j)] = s as f64;
            }
        }
        m
    }
}

/// An oriented simplicial surface.
///
/// Edges are the sorted vertex pairs in lexicographic order; the `k`-th
/// incidence matrix maps `k`-cochains to `(k+1)`-cochains. A flat torus is
/// represented by vertex positions in its fundamental domain together with
/// the period, and element geometry is unwrapped by minimal image.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    vertices: Vec<[f64; 3]>,
    ambient_dim: usize,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_lookup: HashMap<[usize; 2], usize>,
    edge_triangles: Vec<Vec<usize>>,
    d0: Incidence,
    d1: Incidence,
    boundary_edges: Vec<usize>,
    boundary_vertices: Vec<usize>,
    period: Option<[f64; 2]>,
}

/// Boundary polylines of a complex plus the maps placing boundary DOFs in
/// the global numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundary {
    /// Closed vertex cycles, each listed once without repeating the start.
    pub loops: Vec<Vec<usize>>,
    /// Global indices of boundary vertices (trace map for 0-forms).
    pub vertices: Vec<usize>,
    /// Global indices of boundary edges (trace map for 1-forms).
    pub edges: Vec<usize>,
}

impl Boundary {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

impl SimplicialComplex {
    /// Builds a complex from positions (2D or 3D) and oriented triangles.
    pub fn new(vertices: Vec<Vec<f64>>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let ambient_dim = vertices.first().map_or(3, |v| v.len());
        if !(2..=3).contains(&ambient_dim) {
            return Err(Error::InvalidArgument(format!(
                "vertex coordinates must be 2D or 3D, got {ambient_dim}"
            )));
        }
        let mut pos = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != ambient_dim {
                return Err(Error::InvalidArgument(format!(
                    "vertex {i} has {} coordinates",
                    v.len()
                )));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidArgument(format!("vertex {i} is not finite")));
            }
            pos.push([v[0], v[1], if ambient_dim == 3 { v[2] } else { 0.0 }]);
        }
        Self::build(pos, ambient_dim, triangles, None)
    }

    /// A flat torus `[0, px) x [0, py)` with the given vertex positions and
    /// triangles; triangles may straddle the seam.
    pub fn new_periodic(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        period: [f64; 2],
    ) -> Result<Self> {
        let pos = vertices.iter().map(|p| [p[0], p[1], 0.0]).collect();
        Self::build(pos, 2, triangles, Some(period))
    }

    fn build(
        vertices: Vec<[f64; 3]>,
        ambient_dim: usize,
        triangles: Vec<[usize; 3]>,
        period: Option<[f64; 2]>,
    ) -> Result<Self> {
        let nv = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= nv) {
                return Err(Error::InvalidArgument(format!(
                    "triangle {t} references a missing vertex"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::DegenerateElement(t));
            }
        }

        let mut pairs: Vec<[usize; 2]> = triangles
            .iter()
            .flat_map(|t| {
                [[t[0], t[1]], [t[1], t[2]], [t[2], t[0]]].map(|[a, b]| [a.min(b), a.max(b)])
            })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let edges = pairs;
        let edge_lookup: HashMap<[usize; 2], usize> =
            edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();

        let d0 = Incidence {
            ncols: nv,
            rows: edges.iter().map(|&[i, j]| vec![(i, -1), (j, 1)]).collect(),
        };

        let mut edge_triangles = vec![Vec::new(); edges.len()];
        // orientation each triangle induces on its edges
        let mut edge_signs: Vec<Vec<i8>> = vec![Vec::new(); edges.len()];
        let mut d1_rows = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut row = Vec::with_capacity(3);
            for [a, b] in [[tri[0], tri[1]], [tri[1], tri[2]], [tri[2], tri[0]]] {
                let key = [a.min(b), a.max(b)];
                let e = edge_lookup[&key];
                let s: i8 = if a < b { 1 } else { -1 };
                row.push((e, s));
                edge_triangles[e].push(t);
                edge_signs[e].push(s);
            }
            row.sort_unstable();
            d1_rows.push(row);
        }
        for (e, tris) in edge_triangles.iter().enumerate() {
            let [a, b] = edges[e];
            match tris.len() {
                1 => {}
                2 => {
                    if edge_signs[e][0] == edge_signs[e][1] {
                        return Err(Error::NotOrientable(a, b));
                    }
                }
                n => return Err(Error::NonManifoldEdge(a, b, n)),
            }
        }
        let d1 = Incidence {
            ncols: edges.len(),
            rows: d1_rows,
        };

        let boundary_edges: Vec<usize> = (0..edges.len())
            .filter(|&e| edge_triangles[e].len() == 1)
            .collect();
        let mut boundary_vertices: Vec<usize> =
            boundary_edges.iter().flat_map(|&e| edges[e]).collect();
        boundary_vertices.sort_unstable();
        boundary_vertices.dedup();

        Ok(SimplicialComplex {
            vertices,
            ambient_dim,
            triangles,
            edges,
            edge_lookup,
            edge_triangles,
            d0,
            d1,
            boundary_edges,
            boundary_vertices,
            period,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Number of `k`-simplices.
    pub fn num_simplices(&self, k: usize) -> usize {
        match k {
            0 => self.num_vertices(),
            1 => self.num_edges(),
            2 => self.num_triangles(),
            _ => 0,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn period(&self) -> Option<[f64; 2]> {
        self.period
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&[a.min(b), a.max(b)]).copied()
    }

    pub fn edge_triangles(&self, e: usize) -> &[usize] {
        &self.edge_triangles[e]
    }

    /// Incidence matrix `D_k` (`k = 0`: vertices to edges, `k = 1`: edges to
    /// triangles).
    pub fn incidence(&self, k: usize) -> &Incidence {
        match k {
            0 => &self.d0,
            1 => &self.d1,
            _ => panic!("no incidence matrix of degree {k} on a surface"),
        }
    }

    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary_edges
    }

    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary_vertices
    }

    pub fn has_boundary(&self) -> bool {
        !self.boundary_edges.is_empty()
    }

    /// Indices of `k`-simplices not contained in the boundary.
    pub fn interior_simplices(&self, k: usize) -> Vec<usize> {
        let n = self.num_simplices(k);
        let on_boundary = match k {
            0 => &self.boundary_vertices,
            1 => &self.boundary_edges,
            _ => return (0..n).collect(),
        };
        let mut mask = vec![false; n];
        for &i in on_boundary {
            mask[i] = true;
        }
        (0..n).filter(|&i| !mask[i]).collect()
    }

    /// Corner positions of triangle `t`, unwrapped across the period of a
    /// flat torus so that they form a genuine planar triangle.
    pub fn triangle_corners(&self, t: usize) -> [[f64; 3]; 3] {
        let tri = self.triangles[t];
        let p0 = self.vertices[tri[0]];
        let mut out = [p0, self.vertices[tri[1]], self.vertices[tri[2]]];
        if let Some(per) = self.period {
            for c in out.iter_mut().skip(1) {
                for d in 0..2 {
                    let mut delta = c[d] - p0[d];
                    delta -= per[d] * (delta / per[d]).round();
                    c[d] = p0[d] + delta;
                }
            }
        }
        out
    }

    /// Oriented edge vector `p_j - p_i` of edge `e = (i, j)`, unwrapped on a
    /// flat torus.
    pub fn edge_vector(&self, e: usize) -> [f64; 3] {
        let [i, j] = self.edges[e];
        let (a, b) = (self.vertices[i], self.vertices[j]);
        let mut d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        if let Some(per) = self.period {
            for k in 0..2 {
                d[k] -= per[k] * (d[k] / per[k]).round();
            }
        }
        d
    }

    /// Centroid of triangle `t` (computed from unwrapped corners).
    pub fn centroid(&self, t: usize) -> [f64; 3] {
        let c = self.triangle_corners(t);
        std::array::from_fn(|d| (c[0][d] + c[1][d] + c[2][d]) / 3.0)
    }

    /// Returns the boundary loops and trace maps.
    pub fn boundary_extract(&self) -> Boundary {
        let mut next: HashMap<usize, usize> = HashMap::new();
        for &e in &self.boundary_edges {
            // walk each loop with the orientation induced by its triangle
            let t = self.edge_triangles[e][0];
            let tri = self.triangles[t];
            let [i, j] = self.edges[e];
            let forward = (0..3).any(|r| tri[r] == i && tri[(r + 1) % 3] == j);
            let (a, b) = if forward { (i, j) } else { (j, i) };
            next.insert(a, b);
        }
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        let mut seen = vec![false; self.num_vertices()];
        let mut loops = Vec::new();
        for s in starts {
            if seen[s] {
                continue;
            }
            let mut cycle = vec![s];
            seen[s] = true;
            let mut cur = next[&s];
            while cur != s {
                if seen[cur] {
                    // pinched boundary; stop this walk
                    break;
                }
                seen[cur] = true;
                cycle.push(cur);
                cur = match next.get(&cur) {
                    Some(&n) => n,
                    None => break,
                };
            }
            loops.push(cycle);
        }
        Boundary {
            loops,
            vertices: self.boundary_vertices.clone(),
            edges: self.boundary_edges.clone(),
        }
    }

    /// Applies a rigid motion `x -> R x + t` to every vertex (3D ambient).
    pub fn transformed(&self, rotation: &[[f64; 3]; 3], translation: [f64; 3]) -> Result<Self> {
        if self.period.is_some() {
            return Err(Error::InvalidArgument(
                "cannot move a periodic flat torus".into(),
            ));
        }
        let moved = self
            .vertices
            .iter()
            .map(|p| {
                let q: [f64; 3] = std::array::from_fn(|r| {
                    rotation[r][0] * p[0]
                        + rotation[r][1] * p[1]
                        + rotation[r][2] * p[2]
                        + translation[r]
                });
                q
            })
            .collect();
        Self::build(moved, 3, self.triangles.clone(), None)
    }
}
