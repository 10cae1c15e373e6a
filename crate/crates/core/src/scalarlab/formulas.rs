use serde::{Deserialize, Serialize};

/// Flat domain of an analytic case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// Periodic `[0, 2pi)^2`.
    Torus,
    /// `[0, pi]^2` with zero boundary values.
    Rectangle,
}

/// Closed-form vector field on the plane with its Jacobian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Velocity {
    Constant {
        a: f64,
        b: f64,
    },
    /// `(amplitude sin y, 0)`: divergence free, not constant.
    Shear {
        amplitude: f64,
    },
    /// `amplitude (sin x, sin y)`: nonzero divergence.
    Source {
        amplitude: f64,
    },
}

impl Velocity {
    pub fn value(&self, p: [f64; 2]) -> [f64; 2] {
        match *self {
            Velocity::Constant { a, b } => [a, b],
            Velocity::Shear { amplitude } => [amplitude * p[1].sin(), 0.0],
            Velocity::Source { amplitude } => [amplitude * p[0].sin(), amplitude * p[1].sin()],
        }
    }

    /// `jac[i][j] = d v^i / d x^j`.
    pub fn jacobian(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        match *self {
            Velocity::Constant { .. } => [[0.0; 2]; 2],
            Velocity::Shear { amplitude } => [[0.0, amplitude * p[1].cos()], [0.0, 0.0]],
            Velocity::Source { amplitude } => {
                [[amplitude * p[0].cos(), 0.0], [0.0, amplitude * p[1].cos()]]
            }
        }
    }

    pub fn divergence(&self, p: [f64; 2]) -> f64 {
        let j = self.jacobian(p);
        j[0][0] + j[1][1]
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Velocity::Constant { .. })
    }
}

/// A manufactured problem for the v-induced Laplacian on 0-forms with exact
/// solution `u = sin x sin y`, which is periodic on the torus and vanishes on the
/// boundary of the rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticCase {
    pub name: String,
    pub domain: Domain,
    pub velocity: Velocity,
}

impl AnalyticCase {
    pub fn new(name: impl Into<String>, domain: Domain, velocity: Velocity) -> Self {
        AnalyticCase {
            name: name.into(),
            domain,
            velocity,
        }
    }

    pub fn constant(domain: Domain, a: f64, b: f64) -> Self {
        Self::new(
            format!("constant({a},{b})"),
            domain,
            Velocity::Constant { a, b },
        )
    }

    pub fn u(&self, p: [f64; 2]) -> f64 {
        p[0].sin() * p[1].sin()
    }

    pub fn grad_u(&self, p: [f64; 2]) -> [f64; 2] {
        [p[0].cos() * p[1].sin(), p[0].sin() * p[1].cos()]
    }

    pub fn hess_u(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        let (sx, cx, sy, cy) = (p[0].sin(), p[0].cos(), p[1].sin(), p[1].cos());
        [[-sx * sy, cx * cy], [cx * cy, -sx * sy]]
    }
}

/// `Delta u + v(u) delta v^flat - v(v(u))` on a flat domain, with
/// `Delta = delta d = -(u_xx + u_yy)` and `delta v^flat = -div v`.
pub fn analytic_vlap(case: &AnalyticCase, p: [f64; 2]) -> f64 {
    let v = case.velocity.value(p);
    let jac = case.velocity.jacobian(p);
    let g = case.grad_u(p);
    let h = case.hess_u(p);
    let lap = -(h[0][0] + h[1][1]);
    let vu = v[0] * g[0] + v[1] * g[1];
    let delta_flat = -case.velocity.divergence(p);
    // v(v(u)) = v^i d_i (v^j d_j u) = v^T H v + (J v) . grad u
    let vhv = (0..2)
        .map(|i| (0..2).map(|j| v[i] * h[i][j] * v[j]).sum::<f64>())
        .sum::<f64>();
    let jv = [
        jac[0][0] * v[0] + jac[0][1] * v[1],
        jac[1][0] * v[0] + jac[1][1] * v[1],
    ];
    let vvu = vhv + jv[0] * g[0] + jv[1] * g[1];
    lap + vu * delta_flat - vvu
}

/// Coordinate (divergence) form `-d_i((delta^ij + v^i v^j) d_j u)` expanded
/// with the product rule.
pub fn coordinate_vlap(case: &AnalyticCase, p: [f64; 2]) -> f64 {
    let v = case.velocity.value(p);
    let jac = case.velocity.jacobian(p);
    let g = case.grad_u(p);
    let h = case.hess_u(p);
    let mut out = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let a = if i == j { 1.0 } else { 0.0 } + v[i] * v[j];
            // d_i a^ij = (d_i v^i) v^j + v^i d_i v^j
            let da = jac[i][i] * v[j] + v[i] * jac[j][i];
            out -= a * h[i][j] + da * g[j];
        }
    }
    out
}

/// The gradient-case simplification `Delta u - Hess u(grad f, grad f)` for a
/// harmonic `f` with constant `|grad f|`; here `grad f` is the constant velocity.
pub fn gradient_case_vlap(case: &AnalyticCase, grad_f: [f64; 2], p: [f64; 2]) -> f64 {
    let h = case.hess_u(p);
    let lap = -(h[0][0] + h[1][1]);
    let hff = (0..2)
        .map(|i| (0..2).map(|j| grad_f[i] * h[i][j] * grad_f[j]).sum::<f64>())
        .sum::<f64>();
    lap - hff
}

/// Nested central differences of the flux `(I + v v^T) grad u`, using only
/// point values of `u` and `v`.
pub fn finite_difference_vlap(case: &AnalyticCase, p: [f64; 2], h: f64) -> f64 {
    let flux = |q: [f64; 2]| -> [f64; 2] {
        let du = [
            (case.u([q[0] + h, q[1]]) - case.u([q[0] - h, q[1]])) / (2.0 * h),
            (case.u([q[0], q[1] + h]) - case.u([q[0], q[1] - h])) / (2.0 * h),
        ];
        let v = case.velocity.value(q);
        let vd = v[0] * du[0] + v[1] * du[1];
        [du[0] + v[0] * vd, du[1] + v[1] * vd]
    };
    let fx = (flux([p[0] + h, p[1]])[0] - flux([p[0] - h, p[1]])[0]) / (2.0 * h);
    let fy = (flux([p[0], p[1] + h])[1] - flux([p[0], p[1] - h])[1]) / (2.0 * h);
    -(fx + fy)
}
