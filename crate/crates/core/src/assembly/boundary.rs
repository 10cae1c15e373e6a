use serde::{Deserialize, Serialize};

use super::{cross3, dot3, oriented_local_edge, whitney_edge, Element, LOCAL_EDGES};
use crate::error::Result;
use crate::extalg::{hodge_star, star_v, TangentVector};
use crate::mesh::{DiscreteField, SimplicialComplex};

pub const BC_TOLERANCE: f64 = 1e-10;

/// Relation of the field to the boundary, as measured on boundary triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcHypothesis {
    Zero,
    Tangent,
    Normal,
    None,
}

/// A boundary sample where the two trace conditions disagree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcCounterexample {
    /// Global edge carrying the Whitney form.
    pub form_edge: usize,
    /// Boundary edge and triangle where the trace is evaluated.
    pub boundary_edge: usize,
    pub triangle: usize,
    pub point: [f64; 3],
    pub standard_trace: f64,
    pub induced_trace: f64,
}

/// Comparison of the traces `j*(*w)` and `j*(*_v w)` on boundary-supported
/// Whitney 1-forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcReport {
    pub hypothesis: BcHypothesis,
    /// Largest `|sin|` of the angle between field and boundary edge.
    pub tangency_defect: f64,
    /// Largest `|cos|` of that angle.
    pub normality_defect: f64,
    /// `max |j*(*_v w) - j*(*w)| / max |j*(*w)|` over all samples.
    pub trace_discrepancy: f64,
    /// Largest sine of the angle between the two trace functionals at a
    /// sample point; zero when the two conditions define the same subspace.
    pub condition_mismatch: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub holds: bool,
    pub counterexample: Option<BcCounterexample>,
}

const CHART: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

pub fn bc_compare(complex: &SimplicialComplex, field: &DiscreteField) -> Result<BcReport> {
    bc_compare_with_tolerance(complex, field, BC_TOLERANCE)
}

pub fn bc_compare_with_tolerance(
    complex: &SimplicialComplex,
    field: &DiscreteField,
    tolerance: f64,
) -> Result<BcReport> {
    let mut tangency = 0.0f64;
    let mut normality = 0.0f64;
    let mut all_zero = true;
    let mut max_std = 0.0f64;
    let mut max_diff = 0.0f64;
    let mut mismatch = 0.0f64;
    let mut samples = 0;
    let mut worst: Option<BcCounterexample> = None;

    for &e in complex.boundary_edges() {
        let t = complex.edge_triangles(e)[0];
        let tri = complex.triangles()[t];
        let [ea, eb] = complex.edges()[e];
        let elem = Element::new(complex, t)?;
        let corners = complex.triangle_corners(t);

        let vamb = field.vector(t);
        let ev = complex.edge_vector(e);
        let (vn, en) = (dot3(vamb, vamb).sqrt(), dot3(ev, ev).sqrt());
        if vn > 0.0 {
            all_zero = false;
            let c = cross3(vamb, ev);
            tangency = tangency.max(dot3(c, c).sqrt() / (vn * en));
            normality = normality.max(dot3(vamb, ev).abs() / (vn * en));
        }

        let r = LOCAL_EDGES
            .iter()
            .position(|&(a, b)| (tri[a], tri[b]) == (ea, eb) || (tri[a], tri[b]) == (eb, ea))
            .expect("boundary edge lies in its triangle");
        let (a, b) = LOCAL_EDGES[r];
        let u = TangentVector::new(vec![CHART[b][0] - CHART[a][0], CHART[b][1] - CHART[a][1]]);
        let v = elem.local_vector(vamb);

        for s in [0.0, 0.5, 1.0] {
            let mut lam = [0.0; 3];
            lam[a] = 1.0 - s;
            lam[b] = s;
            let point = std::array::from_fn(|d| (1.0 - s) * corners[a][d] + s * corners[b][d]);
            let mut std_tr = [0.0; 3];
            let mut ind_tr = [0.0; 3];
            for q in 0..3 {
                let (i, j) = oriented_local_edge(&tri, q);
                let w = whitney_edge(&lam, i, j);
                std_tr[q] = hodge_star(&w, &elem.metric).evaluate(std::slice::from_ref(&u));
                ind_tr[q] = star_v(&w, &v, &elem.metric).evaluate(std::slice::from_ref(&u));
                samples += 1;
                max_std = max_std.max(std_tr[q].abs());
                let diff = (ind_tr[q] - std_tr[q]).abs();
                if diff > max_diff {
                    max_diff = diff;
                    let (la, lb) = LOCAL_EDGES[q];
                    worst = Some(BcCounterexample {
                        form_edge: complex.edge_index(tri[la], tri[lb]).expect("edge"),
                        boundary_edge: e,
                        triangle: t,
                        point,
                        standard_trace: std_tr[q],
                        induced_trace: ind_tr[q],
                    });
                }
            }
            mismatch = mismatch.max(functional_angle(&std_tr, &ind_tr));
        }
    }

    let trace_discrepancy = if max_std > 0.0 {
        max_diff / max_std
    } else {
        max_diff
    };
    let hypothesis = if all_zero {
        BcHypothesis::Zero
    } else if tangency <= tolerance {
        BcHypothesis::Tangent
    } else if normality <= tolerance {
        BcHypothesis::Normal
    } else {
        BcHypothesis::None
    };
    let holds = trace_discrepancy <= tolerance;
    Ok(BcReport {
        hypothesis,
        tangency_defect: tangency,
        normality_defect: normality,
        trace_discrepancy,
        condition_mismatch: mismatch,
        samples,
        tolerance,
        holds,
        counterexample: if holds { None } else { worst },
    })
}

/// Sine of the angle between two coefficient vectors of linear functionals.
fn functional_angle(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let (na, nb) = (dot3(*a, *a).sqrt(), dot3(*b, *b).sqrt());
    match (na > 0.0, nb > 0.0) {
        (false, false) => 0.0,
        (true, true) => {
            let c = cross3(*a, *b);
            (dot3(c, c).sqrt() / (na * nb)).min(1.0)
        }
        _ => 1.0,
    }
}
