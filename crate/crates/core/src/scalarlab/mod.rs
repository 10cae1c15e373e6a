//! Closed-form and manufactured-solution checks on 0-forms and the
//! harmonicity of `v^flat` for constant-norm fields.
//!
//! Sign convention: `Delta = delta d` is positive, so on the flat plane
//! `Delta u = -(u_xx + u_yy)`.

mod formulas;
mod study;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use formulas::{
    analytic_vlap, coordinate_vlap, finite_difference_vlap, gradient_case_vlap, AnalyticCase,
    Domain, Velocity,
};
pub use study::{
    conjugate_gradient, convergence_study, gradient_case_check, validate_rhs, ConvergenceReport,
    GradientCaseReport, LevelResult, RhsValidation, FD_AGREEMENT, FD_STEP, FORMULA_AGREEMENT,
};

use crate::assembly::Discretization;
use crate::error::Result;
use crate::mesh::{DiscreteField, SimplicialComplex};

pub const HARMONICITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicityReport {
    /// `||D_1 h||_{Mv}` of the cochain `h_e = int_e v^flat`.
    pub d_residual: f64,
    /// `||weak delta_v h||_{Mv}` on the full DOF space.
    pub delta_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// The 1-cochain integrating `v^flat` over each edge, using the average of
/// the per-triangle vectors on the triangles sharing the edge.
pub fn flat_cochain(complex: &SimplicialComplex, field: &DiscreteField) -> DVector<f64> {
    DVector::from_iterator(
        complex.num_edges(),
        (0..complex.num_edges()).map(|e| {
            let ts = complex.edge_triangles(e);
            let ev = complex.edge_vector(e);
            ts.iter()
                .map(|&t| {
                    let v = field.vector(t);
                    v[0] * ev[0] + v[1] * ev[1] + v[2] * ev[2]
                })
                .sum::<f64>()
                / ts.len() as f64
        }),
    )
}

/// Checks that `v^flat` is closed and v-coclosed.
pub fn harmonicity_check(
    complex: &SimplicialComplex,
    field: &DiscreteField,
) -> Result<HarmonicityReport> {
    let disc = Discretization::new(complex, field)?;
    let h = flat_cochain(complex, field);
    let dh = disc.incidence(1) * &h;
    let d_residual = dh.dot(&(disc.mass(2) * &dh)).max(0.0).sqrt();
    let s = disc.weak_codifferential(1, &h)?;
    let delta_residual = s.dot(&(disc.mass(0) * &s)).max(0.0).sqrt();
    Ok(HarmonicityReport {
        d_residual,
        delta_residual,
        tolerance: HARMONICITY_TOLERANCE,
        passed: d_residual <= HARMONICITY_TOLERANCE && delta_residual <= HARMONICITY_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, realize_field, FieldSpec};

    #[test]
    fn constant_field_on_flat_torus() {
        let c = generate::flat_torus(12, 12).unwrap();
        let f = realize_field(
            &c,
            &FieldSpec::Constant {
                vector: vec![1.0, 0.0],
            },
        )
        .unwrap();
        let r = harmonicity_check(&c, &f).unwrap();
        assert!(r.passed, "{r:?}");
        let z = harmonicity_check(&c, &DiscreteField::zero(&c)).unwrap();
        assert_eq!((z.d_residual, z.delta_residual), (0.0, 0.0));
    }

    #[test]
    fn rotational_field_on_annulus_fails() {
        let c = generate::annulus(3, 24, 0.5, 1.0).unwrap();
        let f = realize_field(
            &c,
            &FieldSpec::Rotational {
                center: vec![0.0; 3],
                axis: vec![0.0, 0.0, 1.0],
                rate: 1.0,
            },
        )
        .unwrap();
        let r = harmonicity_check(&c, &f).unwrap();
        assert!(!r.passed);
        assert!(r.d_residual > 1e-3);
    }
}
