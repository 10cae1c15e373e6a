use std::f64::consts::PI;

use nalgebra::DVector;
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::formulas::{
    analytic_vlap, coordinate_vlap, finite_difference_vlap, gradient_case_vlap, AnalyticCase,
    Domain, Velocity,
};
use crate::assembly::assemble_mass;
use crate::error::{Error, Result};
use crate::mesh::{generate, realize_field, DiscreteField, FieldSpec, SimplicialComplex};

/// Step of the finite-difference oracle and its required agreement.
pub const FD_STEP: f64 = 1e-4;
pub const FD_AGREEMENT: f64 = 1e-6;
/// Required agreement between the two closed-form expressions.
pub const FORMULA_AGREEMENT: f64 = 1e-12;

/// Pointwise validation of a manufactured right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhsValidation {
    pub samples: usize,
    /// Largest relative gap between the expansion and the coordinate form.
    pub formula_gap: f64,
    /// Largest absolute gap to the finite-difference oracle.
    pub fd_gap: f64,
    pub valid: bool,
}

/// Checks the right-hand side of `case` at seeded points of its domain.
pub fn validate_rhs(case: &AnalyticCase, samples: usize, seed: u64) -> RhsValidation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = match case.domain {
        Domain::Torus => 2.0 * PI,
        Domain::Rectangle => PI,
    };
    let mut formula_gap = 0.0f64;
    let mut fd_gap = 0.0f64;
    for _ in 0..samples {
        let p = [rng.random_range(0.0..side), rng.random_range(0.0..side)];
        let a = analytic_vlap(case, p);
        formula_gap = formula_gap.max((a - coordinate_vlap(case, p)).abs() / a.abs().max(1.0));
        fd_gap = fd_gap.max((a - finite_difference_vlap(case, p, FD_STEP)).abs());
    }
    RhsValidation {
        samples,
        formula_gap,
        fd_gap,
        valid: formula_gap <= FORMULA_AGREEMENT && fd_gap <= FD_AGREEMENT,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub n: usize,
    pub h: f64,
    pub dofs: usize,
    /// `sqrt(e^T M_0 e)` against the vertex interpolant of the exact solution.
    pub error: f64,
    pub cg_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub case: AnalyticCase,
    pub validation: RhsValidation,
    pub levels: Vec<LevelResult>,
    /// Observed orders between consecutive levels.
    pub orders: Vec<f64>,
    pub min_order: f64,
    pub max_order: f64,
    /// Errors decrease strictly with refinement.
    pub monotone: bool,
}

impl ConvergenceReport {
    pub fn order_within(&self, lo: f64, hi: f64) -> bool {
        self.min_order >= lo && self.max_order <= hi
    }

    /// Comma-separated table for plotting.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,h,dofs,error,order\n");
        for (i, l) in self.levels.iter().enumerate() {
            let o = if i == 0 {
                String::new()
            } else {
                format!("{:?}", self.orders[i - 1])
            };
            s.push_str(&format!(
                "{},{:?},{},{:?},{}\n",
                l.n, l.h, l.dofs, l.error, o
            ));
        }
        s
    }
}

/// How the discrete field of a level is built.
#[derive(Debug, Clone, Copy, PartialEq)]
enum FieldSource {
    Analytic,
    /// PL gradient of the vertex samples of `a x + b y`.
    LinearGradient([f64; 2]),
}

fn level_mesh(domain: Domain, n: usize) -> Result<SimplicialComplex> {
    match domain {
        Domain::Torus => generate::flat_torus(n, n),
        Domain::Rectangle => generate::rectangle(n, n, PI, PI),
    }
}

fn level_field(
    c: &SimplicialComplex,
    case: &AnalyticCase,
    source: FieldSource,
) -> Result<DiscreteField> {
    let spec = match (source, case.velocity) {
        (FieldSource::LinearGradient(g), _) => FieldSpec::Gradient {
            samples: c
                .vertices()
                .iter()
                .map(|p| g[0] * p[0] + g[1] * p[1])
                .collect(),
        },
        (FieldSource::Analytic, Velocity::Constant { a, b }) => {
            FieldSpec::Constant { vector: vec![a, b] }
        }
        (FieldSource::Analytic, vel) => FieldSpec::Explicit {
            vectors: (0..c.num_triangles())
                .map(|t| {
                    let p = c.centroid(t);
                    vel.value([p[0], p[1]]).to_vec()
                })
                .collect(),
        },
    };
    realize_field(c, &spec)
}

fn spmv(a: &CsrMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(
        a.nrows(),
        a.row_iter().map(|r| {
            r.col_indices()
                .iter()
                .zip(r.values())
                .map(|(&j, v)| v * x[j])
                .sum()
        }),
    )
}

/// Sparse `D_0^T Mv_1 D_0`.
fn stiffness(
    c: &SimplicialComplex,
    field: &DiscreteField,
) -> Result<(CsrMatrix<f64>, CsrMatrix<f64>)> {
    let d0 = c.incidence(0).to_csr();
    let m0 = assemble_mass(c, field, 0)?.standard;
    let mv1 = assemble_mass(c, field, 1)?.induced;
    let l = &d0.transpose() * &(&mv1 * &d0);
    Ok((l, m0))
}

fn restrict(a: &CsrMatrix<f64>, keep: &[usize]) -> CsrMatrix<f64> {
    let mut map = vec![usize::MAX; a.nrows()];
    for (i, &k) in keep.iter().enumerate() {
        map[k] = i;
    }
    let mut coo = CooMatrix::new(keep.len(), keep.len());
    for &i in keep {
        let row = a.row(i);
        for (&j, &v) in row.col_indices().iter().zip(row.values()) {
            if map[j] != usize::MAX {
                coo.push(map[i], map[j], v);
            }
        }
    }
    CsrMatrix::from(&coo)
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// (semi)definite system with consistent right-hand side.
pub fn conjugate_gradient(
    a: &CsrMatrix<f64>,
    b: &DVector<f64>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<(DVector<f64>, usize)> {
    let n = b.len();
    let mut diag = DVector::from_element(n, 1.0);
    for (i, row) in a.row_iter().enumerate() {
        for (&j, &v) in row.col_indices().iter().zip(row.values()) {
            if i == j && v > 0.0 {
                diag[i] = v;
            }
        }
    }
    let mut x = DVector::zeros(n);
    let mut r = b.clone();
    let bn = b.norm();
    if bn == 0.0 {
        return Ok((x, 0));
    }
    let mut z = r.component_div(&diag);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    for it in 1..=max_iter {
        let ap = spmv(a, &p);
        let alpha = rz / p.dot(&ap);
        x += &p * alpha;
        r -= &ap * alpha;
        if r.norm() <= rel_tol * bn {
            return Ok((x, it));
        }
        z = r.component_div(&diag);
        let rz_new = r.dot(&z);
        p = &z + &p * (rz_new / rz);
        rz = rz_new;
    }
    Err(Error::Solver(format!(
        "conjugate gradients stalled after {max_iter} iterations (relative residual {:e})",
        r.norm() / bn
    )))
}

fn solve_level(
    case: &AnalyticCase,
    n: usize,
    source: FieldSource,
    rhs: &dyn Fn([f64; 2]) -> f64,
) -> Result<LevelResult> {
    let c = level_mesh(case.domain, n)?;
    let field = level_field(&c, case, source)?;
    let (l, m0) = stiffness(&c, &field)?;
    let pts: Vec<[f64; 2]> = c.vertices().iter().map(|p| [p[0], p[1]]).collect();
    let f = DVector::from_iterator(pts.len(), pts.iter().map(|&p| rhs(p)));
    let exact = DVector::from_iterator(pts.len(), pts.iter().map(|&p| case.u(p)));
    let mut b = spmv(&m0, &f);
    let nv = c.num_vertices();
    let tol = 1e-13;
    let (u, iters, exact) = match case.domain {
        Domain::Torus => {
            let w = spmv(&m0, &DVector::from_element(nv, 1.0));
            let wsum = w.sum();
            b -= &w * (b.sum() / wsum);
            let (mut u, it) = conjugate_gradient(&l, &b, tol, 20 * nv)?;
            u.add_scalar_mut(-w.dot(&u) / wsum);
            let ex = exact.add_scalar(-w.dot(&exact) / wsum);
            (u, it, ex)
        }
        Domain::Rectangle => {
            let interior = c.interior_simplices(0);
            let li = restrict(&l, &interior);
            let bi = DVector::from_iterator(interior.len(), interior.iter().map(|&i| b[i]));
            let (ui, it) = conjugate_gradient(&li, &bi, tol, 20 * nv)?;
            let mut u = DVector::zeros(nv);
            for (k, &i) in interior.iter().enumerate() {
                u[i] = ui[k];
            }
            let mut ex = exact;
            for &i in c.boundary_vertices() {
                ex[i] = 0.0;
            }
            (u, it, ex)
        }
    };
    let e = u - exact;
    let side = match case.domain {
        Domain::Torus => 2.0 * PI,
        Domain::Rectangle => PI,
    };
    Ok(LevelResult {
        n,
        h: side / n as f64,
        dofs: nv,
        error: spmv(&m0, &e).dot(&e).sqrt(),
        cg_iterations: iters,
    })
}

fn report(
    case: &AnalyticCase,
    validation: RhsValidation,
    levels: Vec<LevelResult>,
) -> ConvergenceReport {
    let orders: Vec<f64> = levels
        .windows(2)
        .map(|w| (w[0].error / w[1].error).ln() / (w[0].h / w[1].h).ln())
        .collect();
    let monotone = levels.windows(2).all(|w| w[1].error < w[0].error);
    ConvergenceReport {
        case: case.clone(),
        validation,
        min_order: orders.iter().cloned().fold(f64::INFINITY, f64::min),
        max_order: orders.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        orders,
        levels,
        monotone,
    }
}

fn check_levels(levels: &[usize]) -> Result<()> {
    if levels.len() < 2 {
        return Err(Error::InvalidArgument("need ≥ 2 levels".into()));
    }
    if levels.iter().any(|&n| n < 3) {
        return Err(Error::InvalidArgument(
            "levels must have at least 3 cells per side".into(),
        ));
    }
    Ok(())
}

/// Manufactured-solution study `L_0 u_h = M_0 f` over structured meshes with
/// `levels[i]` cells per side.
pub fn convergence_study(case: &AnalyticCase, levels: &[usize]) -> Result<ConvergenceReport> {
    check_levels(levels)?;
    let validation = validate_rhs(case, 32, 0);
    let rhs = |p: [f64; 2]| analytic_vlap(case, p);
    let results = levels
        .iter()
        .map(|&n| solve_level(case, n, FieldSource::Analytic, &rhs))
        .collect::<Result<Vec<_>>>()?;
    Ok(report(case, validation, results))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientCaseReport {
    pub gradient: [f64; 2],
    /// Largest gap between the simplified gradient-case formula and the
    /// general expansion.
    pub simplified_gap: f64,
    pub study: ConvergenceReport,
}

/// Gradient case `v = grad f` for the linear `f = a x + b y` on the
/// rectangle: the field is the PL gradient of the vertex samples of `f`, and
/// the right-hand side uses the simplified formula.
pub fn gradient_case_check(gradient: [f64; 2], levels: &[usize]) -> Result<GradientCaseReport> {
    check_levels(levels)?;
    let case = AnalyticCase::new(
        format!("gradient({},{})", gradient[0], gradient[1]),
        Domain::Rectangle,
        Velocity::Constant {
            a: gradient[0],
            b: gradient[1],
        },
    );
    let validation = validate_rhs(&case, 32, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut gap = 0.0f64;
    for _ in 0..32 {
        let p = [rng.random_range(0.0..PI), rng.random_range(0.0..PI)];
        gap = gap.max((gradient_case_vlap(&case, gradient, p) - analytic_vlap(&case, p)).abs());
    }
    let rhs = |p: [f64; 2]| gradient_case_vlap(&case, gradient, p);
    let results = levels
        .iter()
        .map(|&n| solve_level(&case, n, FieldSource::LinearGradient(gradient), &rhs))
        .collect::<Result<Vec<_>>>()?;
    Ok(GradientCaseReport {
        gradient,
        simplified_gap: gap,
        study: report(&case, validation, results),
    })
}
