use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimplicialComplex;
use crate::error::{Error, Result};

/// Description of a tangent vector field, serialized as JSON tagged by
/// `"kind"`.
///
/// Analytic kinds (`constant`, `rotational`, `radial`) are sampled once per
/// triangle: at the centroid for interior triangles and at the midpoint of
/// the boundary edge for triangles touching the boundary, so that a field
/// tangent (or normal) to a polygonal boundary stays exactly so.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldSpec {
    Constant {
        vector: Vec<f64>,
    },
    /// `rate * axis x (x - center)`.
    Rotational {
        #[serde(default = "origin")]
        center: Vec<f64>,
        #[serde(default = "z_axis")]
        axis: Vec<f64>,
        #[serde(default = "one")]
        rate: f64,
    },
    /// `rate * (x - center)`.
    Radial {
        #[serde(default = "origin")]
        center: Vec<f64>,
        #[serde(default = "one")]
        rate: f64,
    },
    /// Piecewise-linear gradient of per-vertex samples.
    Gradient {
        samples: Vec<f64>,
    },
    /// One ambient vector per triangle.
    Explicit {
        vectors: Vec<Vec<f64>>,
    },
    /// Seeded per-triangle vectors with entries uniform in
    /// `[-amplitude, amplitude]`.
    Random {
        seed: u64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    Zero,
}

fn origin() -> Vec<f64> {
    vec![0.0, 0.0, 0.0]
}

fn z_axis() -> Vec<f64> {
    vec![0.0, 0.0, 1.0]
}

fn one() -> f64 {
    1.0
}

/// Per-triangle tangent vectors in ambient coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteField {
    vectors: Vec<[f64; 3]>,
    /// Largest relative out-of-plane component removed by projection.
    pub projection_residual: f64,
}

impl DiscreteField {
    pub fn zero(complex: &SimplicialComplex) -> Self {
        DiscreteField {
            vectors: vec![[0.0; 3]; complex.num_triangles()],
            projection_residual: 0.0,
        }
    }

    pub fn vectors(&self) -> &[[f64; 3]] {
        &self.vectors
    }

    pub fn vector(&self, t: usize) -> [f64; 3] {
        self.vectors[t]
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.vectors.iter().all(|v| v.iter().all(|c| *c == 0.0))
    }

    pub fn negated(&self) -> Self {
        DiscreteField {
            vectors: self.vectors.iter().map(|v| v.map(|c| -c)).collect(),
            projection_residual: self.projection_residual,
        }
    }

    /// Field pushed forward by a rotation (the translation part of a rigid
    /// motion does not act on vectors).
    pub fn rotated(&self, rotation: &[[f64; 3]; 3]) -> Self {
        DiscreteField {
            vectors: self
                .vectors
                .iter()
                .map(|v| std::array::from_fn(|r| (0..3).map(|c| rotation[r][c] * v[c]).sum()))
                .collect(),
            projection_residual: self.projection_residual,
        }
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn to3(v: &[f64], what: &'static str) -> Result<[f64; 3]> {
    match v.len() {
        2 => Ok([v[0], v[1], 0.0]),
        3 => Ok([v[0], v[1], v[2]]),
        n => Err(Error::SizeMismatch {
            what,
            expected: 3,
            got: n,
        }),
    }
}

/// Point at which triangle `t` samples an analytic field.
pub(crate) fn sample_point(complex: &SimplicialComplex, t: usize) -> [f64; 3] {
    let tri = complex.triangles()[t];
    let corners = complex.triangle_corners(t);
    for r in 0..3 {
        let (a, b) = (tri[r], tri[(r + 1) % 3]);
        if let Some(e) = complex.edge_index(a, b) {
            if complex.edge_triangles(e).len() == 1 {
                let (p, q) = (corners[r], corners[(r + 1) % 3]);
                return std::array::from_fn(|d| 0.5 * (p[d] + q[d]));
            }
        }
    }
    complex.centroid(t)
}

/// Realizes `spec` as one in-plane vector per triangle.
pub fn realize_field(complex: &SimplicialComplex, spec: &FieldSpec) -> Result<DiscreteField> {
    let nt = complex.num_triangles();
    let raw: Vec<[f64; 3]> = match spec {
        FieldSpec::Zero => vec![[0.0; 3]; nt],
        FieldSpec::Constant { vector } => vec![to3(vector, "constant vector")?; nt],
        FieldSpec::Rotational { center, axis, rate } => {
            let (c, a) = (to3(center, "center")?, to3(axis, "axis")?);
            (0..nt)
                .map(|t| cross(a, sub(sample_point(complex, t), c)).map(|x| rate * x))
                .collect()
        }
        FieldSpec::Radial { center, rate } => {
            let c = to3(center, "center")?;
            (0..nt)
                .map(|t| sub(sample_point(complex, t), c).map(|x| rate * x))
                .collect()
        }
        FieldSpec::Explicit { vectors } => {
            if vectors.len() != nt {
                return Err(Error::SizeMismatch {
                    what: "explicit field",
                    expected: nt,
                    got: vectors.len(),
                });
            }
            vectors
                .iter()
                .map(|v| to3(v, "explicit vector"))
                .collect::<Result<_>>()?
        }
        FieldSpec::Random { seed, amplitude } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let dims = complex.ambient_dim();
            (0..nt)
                .map(|_| {
                    std::array::from_fn(|d| {
                        if d < dims {
                            amplitude * rng.random_range(-1.0..=1.0)
                        } else {
                            0.0
                        }
                    })
                })
                .collect()
        }
        FieldSpec::Gradient { samples } => {
            if samples.len() != complex.num_vertices() {
                return Err(Error::SizeMismatch {
                    what: "gradient samples",
                    expected: complex.num_vertices(),
                    got: samples.len(),
                });
            }
            (0..nt)
                .map(|t| pl_gradient(complex, t, samples))
                .collect::<Result<_>>()?
        }
    };

    let mut residual = 0.0f64;
    let mut vectors = Vec::with_capacity(nt);
    for (t, v) in raw.into_iter().enumerate() {
        let c = complex.triangle_corners(t);
        let n = cross(sub(c[1], c[0]), sub(c[2], c[0]));
        let nn = dot(n, n);
        if !(nn > 0.0) {
            return Err(Error::DegenerateElement(t));
        }
        let along = dot(v, n) / nn;
        let p = [
            v[0] - along * n[0],
            v[1] - along * n[1],
            v[2] - along * n[2],
        ];
        let vn = dot(v, v).sqrt();
        if vn > 0.0 {
            residual = residual.max(along.abs() * nn.sqrt() / vn);
        }
        vectors.push(p);
    }
    Ok(DiscreteField {
        vectors,
        projection_residual: residual,
    })
}

fn pl_gradient(complex: &SimplicialComplex, t: usize, f: &[f64]) -> Result<[f64; 3]> {
    let tri = complex.triangles()[t];
    let c = complex.triangle_corners(t);
    let (e1, e2) = (sub(c[1], c[0]), sub(c[2], c[0]));
    let (g11, g12, g22) = (dot(e1, e1), dot(e1, e2), dot(e2, e2));
    let det = g11 * g22 - g12 * g12;
    if !(det > 0.0) {
        return Err(Error::DegenerateElement(t));
    }
    let (d1, d2) = (f[tri[1]] - f[tri[0]], f[tri[2]] - f[tri[0]]);
    // local components of the gradient: g^{-1} (df(e1), df(e2))
    let a = (g22 * d1 - g12 * d2) / det;
    let b = (-g12 * d1 + g11 * d2) / det;
    Ok(std::array::from_fn(|d| a * e1[d] + b * e2[d]))
}
