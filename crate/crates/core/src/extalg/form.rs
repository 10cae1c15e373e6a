use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::basis::{binomial, merge_sign, MultiIndexBasis, MAX_DIM};
use super::metric::PointMetric;
use crate::error::{Error, Result};

/// A degree-`k` alternating tensor at a point, stored as dense coefficients
/// over the lexicographic multi-index basis of dimension `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KFormValue {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

/// Components of a tangent vector in the coordinate frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector(pub Vec<f64>);

impl TangentVector {
    pub fn new(components: Vec<f64>) -> Self {
        TangentVector(components)
    }

    pub fn zeros(n: usize) -> Self {
        TangentVector(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    /// `|v|_g^2 = g(v, v)`.
    pub fn norm_squared(&self, g: &PointMetric) -> f64 {
        let m = g.matrix();
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.0[i] * m[(i, j)] * self.0[j];
            }
        }
        s
    }
}

impl KFormValue {
    pub fn zeros(dim: usize, degree: usize) -> Result<Self> {
        check_dim(dim)?;
        if degree > dim {
            return Err(Error::DegreeExceedsDimension { degree, dim });
        }
        Ok(KFormValue {
            dim,
            degree,
            coeffs: vec![0.0; binomial(dim, degree)],
        })
    }

    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        let z = Self::zeros(dim, degree)?;
        if coeffs.len() != z.coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: z.coeffs.len(),
                got: coeffs.len(),
            });
        }
        Ok(KFormValue { coeffs, ..z })
    }

    pub fn scalar(dim: usize, value: f64) -> Result<Self> {
        Self::from_coeffs(dim, 0, vec![value])
    }

    /// The coordinate form `dx^{i_1} ^ ... ^ dx^{i_k}` for zero-based,
    /// strictly increasing `indices`.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        let mut f = Self::zeros(dim, indices.len())?;
        if !indices.windows(2).all(|w| w[0] < w[1]) || indices.iter().any(|&i| i >= dim) {
            return Err(Error::InvalidArgument(format!(
                "bad multi-index {indices:?}"
            )));
        }
        let mask = indices.iter().fold(0u16, |m, &i| m | (1 << i));
        let pos = MultiIndexBasis::get(dim, indices.len())
            .position(mask)
            .expect("validated multi-index");
        f.coeffs[pos] = 1.0;
        Ok(f)
    }

    /// `i`-th basis element of the degree-`k` space.
    pub fn unit(dim: usize, degree: usize, pos: usize) -> Result<Self> {
        let mut f = Self::zeros(dim, degree)?;
        f.coeffs[pos] = 1.0;
        Ok(f)
    }

    /// The top form `dx^1 ^ ... ^ dx^n` scaled by `value`.
    pub fn top(dim: usize, value: f64) -> Result<Self> {
        Self::from_coeffs(dim, dim, vec![value])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, pos: usize) -> f64 {
        self.coeffs[pos]
    }

    pub fn basis_set(&self) -> &'static MultiIndexBasis {
        MultiIndexBasis::get(self.dim, self.degree)
    }

    pub fn scale(&self, s: f64) -> Self {
        KFormValue {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            ..self.clone()
        }
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Euclidean norm of the coefficient vector (metric independent).
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Value on `k` tangent vectors, `w(u_1, ..., u_k)`.
    pub fn evaluate(&self, vectors: &[TangentVector]) -> f64 {
        assert_eq!(vectors.len(), self.degree, "need one vector per slot");
        let basis = self.basis_set();
        let k = self.degree;
        let mut total = 0.0;
        for (p, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let idx = basis.indices(p);
            let m = nalgebra::DMatrix::from_fn(k, k, |r, s| vectors[s].0[idx[r]]);
            total += c * m.determinant();
        }
        if k == 0 {
            self.coeffs[0]
        } else {
            total
        }
    }

    fn same_shape(&self, other: &Self) {
        assert_eq!(
            (self.dim, self.degree),
            (other.dim, other.degree),
            "mismatched form shapes"
        );
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim > MAX_DIM || dim == 0 {
        return Err(Error::DimensionCap(dim));
    }
    Ok(())
}

impl Add for &KFormValue {
    type Output = KFormValue;
    fn add(self, rhs: &KFormValue) -> KFormValue {
        self.same_shape(rhs);
        KFormValue {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        }
    }
}

impl Sub for &KFormValue {
    type Output = KFormValue;
    fn sub(self, rhs: &KFormValue) -> KFormValue {
        self.same_shape(rhs);
        KFormValue {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            ..self.clone()
        }
    }
}

impl Neg for &KFormValue {
    type Output = KFormValue;
    fn neg(self) -> KFormValue {
        self.scale(-1.0)
    }
}

impl Mul<&KFormValue> for f64 {
    type Output = KFormValue;
    fn mul(self, rhs: &KFormValue) -> KFormValue {
        rhs.scale(self)
    }
}

/// Exterior product `a ^ b`.
pub fn wedge(a: &KFormValue, b: &KFormValue) -> Result<KFormValue> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: b.dim,
        });
    }
    let degree = a.degree + b.degree;
    if degree > a.dim {
        return Err(Error::DegreeExceedsDimension { degree, dim: a.dim });
    }
    Ok(wedge_unchecked(a, b))
}

pub(crate) fn wedge_unchecked(a: &KFormValue, b: &KFormValue) -> KFormValue {
    let n = a.dim;
    let degree = a.degree + b.degree;
    let (ba, bb, out) = (
        a.basis_set(),
        b.basis_set(),
        MultiIndexBasis::get(n, degree),
    );
    let mut coeffs = vec![0.0; out.len()];
    for (i, &ca) in a.coeffs.iter().enumerate() {
        if ca == 0.0 {
            continue;
        }
        let mi = ba.mask(i);
        for (j, &cb) in b.coeffs.iter().enumerate() {
            let mj = bb.mask(j);
            if mi & mj != 0 || cb == 0.0 {
                continue;
            }
            let pos = out.position(mi | mj).expect("union has the summed degree");
            coeffs[pos] += merge_sign(mi, mj) * ca * cb;
        }
    }
    KFormValue {
        dim: n,
        degree,
        coeffs,
    }
}

/// Interior product `i_v w`, inserting `v` in the first slot. On 0-forms this
/// returns the zero scalar.
pub fn interior(v: &TangentVector, w: &KFormValue) -> KFormValue {
    assert_eq!(v.dim(), w.dim, "vector/form dimension mismatch");
    let n = w.dim;
    if w.degree == 0 {
        return KFormValue {
            dim: n,
            degree: 0,
            coeffs: vec![0.0],
        };
    }
    let (bw, out) = (w.basis_set(), MultiIndexBasis::get(n, w.degree - 1));
    let mut coeffs = vec![0.0; out.len()];
    for (p, &c) in w.coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let mask = bw.mask(p);
        for (r, i) in bw.indices(p).into_iter().enumerate() {
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            let pos = out.position(mask & !(1 << i)).expect("removed one index");
            coeffs[pos] += sign * v.0[i] * c;
        }
    }
    KFormValue {
        dim: n,
        degree: w.degree - 1,
        coeffs,
    }
}

/// `v^flat = g(v, .)`.
pub fn flat(v: &TangentVector, g: &PointMetric) -> KFormValue {
    assert_eq!(v.dim(), g.dim());
    let coeffs = (g.matrix() * nalgebra::DVector::from_column_slice(&v.0))
        .iter()
        .copied()
        .collect();
    KFormValue {
        dim: g.dim(),
        degree: 1,
        coeffs,
    }
}

/// Inverse of [`flat`].
pub fn sharp(w: &KFormValue, g: &PointMetric) -> TangentVector {
    assert_eq!(w.degree, 1, "sharp needs a 1-form");
    assert_eq!(w.dim, g.dim());
    TangentVector(
        (g.inverse() * nalgebra::DVector::from_column_slice(&w.coeffs))
            .iter()
            .copied()
            .collect(),
    )
}

/// Pointwise inner product induced by `g` on `k`-forms.
pub fn inner_g(a: &KFormValue, b: &KFormValue, g: &PointMetric) -> f64 {
    a.same_shape(b);
    assert_eq!(a.dim, g.dim());
    let c = g.compound_inverse(a.degree);
    let mut s = 0.0;
    for (i, &ai) in a.coeffs.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.coeffs.iter().enumerate() {
            s += ai * c[(i, j)] * bj;
        }
    }
    s
}

pub fn norm_g(a: &KFormValue, g: &PointMetric) -> f64 {
    inner_g(a, a, g).max(0.0).sqrt()
}

/// Hodge star for the standard orientation, defined by
/// `a ^ *b = <a, b>_g mu_g`.
pub fn hodge_star(w: &KFormValue, g: &PointMetric) -> KFormValue {
    assert_eq!(w.dim, g.dim());
    let n = w.dim;
    let k = w.degree;
    let (bk, out) = (w.basis_set(), MultiIndexBasis::get(n, n - k));
    let full: u16 = ((1u32 << n) - 1) as u16;
    let c = g.compound_inverse(k);
    let mut coeffs = vec![0.0; out.len()];
    for i in 0..bk.len() {
        let mi = bk.mask(i);
        let comp = full & !mi;
        let inner: f64 = (0..bk.len()).map(|j| c[(i, j)] * w.coeffs[j]).sum();
        if inner == 0.0 {
            continue;
        }
        let pos = out.position(comp).expect("complement has degree n-k");
        coeffs[pos] += merge_sign(mi, comp) * g.sqrt_det() * inner;
    }
    KFormValue {
        dim: n,
        degree: n - k,
        coeffs,
    }
}

/// Inverse Hodge star; on a `p`-form it is `(-1)^{p(n-p)} *`.
pub fn hodge_star_inv(w: &KFormValue, g: &PointMetric) -> KFormValue {
    let p = w.degree;
    let s = hodge_star(w, g);
    if (p * (w.dim - p)).is_multiple_of(2) {
        s
    } else {
        -&s
    }
}

/// `T_v = id + v^flat ^ i_v`.
pub fn t_v(w: &KFormValue, v: &TangentVector, g: &PointMetric) -> KFormValue {
    if w.degree == 0 {
        return w.clone();
    }
    let corr = wedge_unchecked(&flat(v, g), &interior(v, w));
    w + &corr
}

/// `T_v^{-1} = id - v^flat ^ i_v / (1 + |v|_g^2)`.
pub fn t_v_inv(w: &KFormValue, v: &TangentVector, g: &PointMetric) -> KFormValue {
    if w.degree == 0 {
        return w.clone();
    }
    let corr = wedge_unchecked(&flat(v, g), &interior(v, w));
    w - &corr.scale(1.0 / (1.0 + v.norm_squared(g)))
}

/// `*_v = * T_v`.
pub fn star_v(w: &KFormValue, v: &TangentVector, g: &PointMetric) -> KFormValue {
    hodge_star(&t_v(w, v, g), g)
}

/// `*_v^{-1} = T_v^{-1} *^{-1}`.
pub fn star_v_inv(w: &KFormValue, v: &TangentVector, g: &PointMetric) -> KFormValue {
    t_v_inv(&hodge_star_inv(w, g), v, g)
}

/// The v-induced pointwise inner product `<T_v a, b>_g`.
pub fn inner_gv(a: &KFormValue, b: &KFormValue, v: &TangentVector, g: &PointMetric) -> f64 {
    inner_g(&t_v(a, v, g), b, g)
}
