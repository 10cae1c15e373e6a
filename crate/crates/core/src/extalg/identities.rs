//! Randomized residual checks of the pointwise identities satisfied by
//! `T_v`, the interior product and the Hodge star.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::basis::{binomial, MAX_DIM};
use super::form::*;
use super::metric::PointMetric;
use crate::error::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Ridge added to `A^T A` when drawing random metrics.
pub const METRIC_RIDGE: f64 = 1e-3;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentityStats {
    pub trials: usize,
    pub max_abs: f64,
    pub max_rel: f64,
}

impl IdentityStats {
    fn record(&mut self, abs: f64, scale: f64) {
        self.trials += 1;
        let rel = if scale > 0.0 { abs / scale } else { abs };
        self.max_abs = self.max_abs.max(abs);
        self.max_rel = self.max_rel.max(rel);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub schema_version: u32,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub identities: BTreeMap<String, IdentityStats>,
}

impl IdentityReport {
    /// Largest relative residual across all identities.
    pub fn max_rel(&self) -> f64 {
        self.identities.values().fold(0.0, |m, s| m.max(s.max_rel))
    }

    /// Identities whose relative residual exceeds `threshold`.
    pub fn failures(&self, threshold: f64) -> Vec<(&str, &IdentityStats)> {
        self.identities
            .iter()
            .filter(|(_, s)| !(s.max_rel <= threshold))
            .map(|(k, s)| (k.as_str(), s))
            .collect()
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-1.0..=1.0)
}

pub fn random_form(rng: &mut ChaCha8Rng, n: usize, k: usize) -> KFormValue {
    let coeffs = (0..binomial(n, k)).map(|_| uniform(rng)).collect();
    KFormValue::from_coeffs(n, k, coeffs).expect("valid shape")
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> TangentVector {
    TangentVector::new((0..n).map(|_| uniform(rng)).collect())
}

/// `A^T A + METRIC_RIDGE * I` with entries of `A` uniform in `[-1, 1]`.
pub fn random_metric(rng: &mut ChaCha8Rng, n: usize) -> PointMetric {
    let a = DMatrix::from_fn(n, n, |_, _| uniform(rng));
    let mut g = a.transpose() * &a;
    for i in 0..n {
        g[(i, i)] += METRIC_RIDGE;
    }
    let g = (&g + g.transpose()) * 0.5;
    PointMetric::new(g).expect("ridge keeps the metric SPD")
}

fn diff(a: &KFormValue, b: &KFormValue) -> f64 {
    (a - b).max_abs()
}

fn scale_of(forms: &[&KFormValue]) -> f64 {
    forms.iter().fold(0.0, |m, f| m.max(f.max_abs()))
}

fn sign(e: usize) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Checks every pointwise identity over `trials` random draws per degree.
///
/// Relative residuals are measured against the largest coefficient among the
/// terms of each identity (for scalar identities, against the Cauchy-Schwarz
/// bound of each side).
pub fn verify_identities(n: usize, trials: usize, seed: u64) -> Result<IdentityReport> {
    if !(2..=MAX_DIM).contains(&n) {
        return Err(Error::DimensionCap(n));
    }
    if trials == 0 {
        return Err(Error::TrialsMustBePositive);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats: BTreeMap<String, IdentityStats> = BTreeMap::new();
    let mut rec = |name: &str, abs: f64, scale: f64| {
        stats
            .entry(name.to_string())
            .or_default()
            .record(abs, scale);
    };

    for _ in 0..trials {
        let g = random_metric(&mut rng, n);
        let v = random_vector(&mut rng, n);
        let vflat = flat(&v, &g);
        let nv = v.norm_squared(&g);
        for k in 0..=n {
            let a = random_form(&mut rng, n, k);
            let b = random_form(&mut rng, n, k);
            let na = norm_g(&a, &g);
            let nb = norm_g(&b, &g);

            // flat/sharp round trip
            if k == 1 {
                let back = sharp(&flat(&v, &g), &g);
                let abs = back
                    .0
                    .iter()
                    .zip(&v.0)
                    .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
                let sc = v.0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                rec("flat_sharp_round_trip", abs, sc);
            }

            // <v^flat ^ zeta, eta> = <zeta, i_v eta>
            if k >= 1 {
                let zeta = random_form(&mut rng, n, k - 1);
                let w = wedge_unchecked(&vflat, &zeta);
                let iv = interior(&v, &b);
                let lhs = inner_g(&w, &b, &g);
                let rhs = inner_g(&zeta, &iv, &g);
                let sc = norm_g(&w, &g) * nb + norm_g(&zeta, &g) * norm_g(&iv, &g);
                rec("wedge_interior_adjoint", (lhs - rhs).abs(), sc);

                // *(v^flat ^ zeta) = (-1)^{k-1} i_v(*zeta)
                let lhs = hodge_star(&w, &g);
                let rhs = interior(&v, &hodge_star(&zeta, &g)).scale(sign(k - 1));
                rec(
                    "star_of_flat_wedge",
                    diff(&lhs, &rhs),
                    scale_of(&[&lhs, &rhs]),
                );

                // * i_v w = (-1)^{k-1} v^flat ^ *w
                let lhs = hodge_star(&interior(&v, &a), &g);
                let rhs = wedge_unchecked(&vflat, &hodge_star(&a, &g)).scale(sign(k - 1));
                rec(
                    "star_of_interior",
                    diff(&lhs, &rhs),
                    scale_of(&[&lhs, &rhs]),
                );

                // i_v i_v = 0
                if k >= 2 {
                    let ii = interior(&v, &interior(&v, &a));
                    let sc = v.0.iter().map(|x| x * x).sum::<f64>() * a.max_abs();
                    rec("interior_nilpotent", ii.max_abs(), sc);
                }
            }

            // self-adjointness and the positive expansion of <T_v a, b>
            let ta = t_v(&a, &v, &g);
            let tb = t_v(&b, &v, &g);
            let lhs = inner_g(&ta, &b, &g);
            let rhs = inner_g(&a, &tb, &g);
            let sc = norm_g(&ta, &g) * nb + na * norm_g(&tb, &g);
            rec("t_v_self_adjoint", (lhs - rhs).abs(), sc);
            let expansion = inner_g(&a, &b, &g) + inner_g(&interior(&v, &a), &interior(&v, &b), &g);
            rec("t_v_inner_expansion", (lhs - expansion).abs(), sc);
            let taa = inner_g(&ta, &a, &g);
            rec("t_v_positive_definite", (na * na - taa).max(0.0), na * na);

            // inverse round trips
            let back = t_v_inv(&ta, &v, &g);
            rec("t_v_inverse_left", diff(&back, &a), scale_of(&[&a, &ta]));
            let fwd = t_v(&t_v_inv(&a, &v, &g), &v, &g);
            rec("t_v_inverse_right", diff(&fwd, &a), scale_of(&[&a, &ta]));

            // * T_v = (1 + |v|^2) T_v^{-1} *
            let lhs = hodge_star(&ta, &g);
            let rhs = t_v_inv(&hodge_star(&a, &g), &v, &g).scale(1.0 + nv);
            rec("star_t_v", diff(&lhs, &rhs), scale_of(&[&lhs, &rhs]));

            // *_v *_v = (-1)^{k(n-k)} (1 + |v|^2)
            let lhs = star_v(&star_v(&a, &v, &g), &v, &g);
            let rhs = a.scale(sign(k * (n - k)) * (1.0 + nv));
            rec("star_v_star_v", diff(&lhs, &rhs), scale_of(&[&lhs, &rhs]));

            // ** = (-1)^{k(n-k)}
            let lhs = hodge_star(&hodge_star(&a, &g), &g);
            let rhs = a.scale(sign(k * (n - k)));
            rec("star_star", diff(&lhs, &rhs), scale_of(&[&lhs, &rhs]));

            // a ^ *b = <a, b> mu_g
            let lhs = wedge_unchecked(&a, &hodge_star(&b, &g)).coeff(0);
            let rhs = inner_g(&a, &b, &g) * g.sqrt_det();
            rec(
                "star_defining_relation",
                (lhs - rhs).abs(),
                na * nb * g.sqrt_det(),
            );

            // T_v on top forms is scaling by 1 + |v|^2
            if k == n {
                let rhs = a.scale(1.0 + nv);
                rec("t_v_top_scaling", diff(&ta, &rhs), scale_of(&[&ta, &rhs]));
            }
        }
    }

    Ok(IdentityReport {
        schema_version: REPORT_SCHEMA_VERSION,
        dim: n,
        trials,
        seed,
        identities: stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_identities_hold_in_low_dimension() {
        for n in [2, 4] {
            let r = verify_identities(n, 100, 7).unwrap();
            assert!(
                r.failures(1e-10).is_empty(),
                "n={n}: {:?}",
                r.failures(1e-10)
            );
        }
    }

    #[test]
    fn report_is_deterministic() {
        let a = serde_json::to_string(&verify_identities(3, 20, 11).unwrap()).unwrap();
        let b = serde_json::to_string(&verify_identities(3, 20, 11).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn argument_validation() {
        assert!(matches!(
            verify_identities(3, 0, 1),
            Err(Error::TrialsMustBePositive)
        ));
        assert!(matches!(
            verify_identities(9, 1, 1),
            Err(Error::DimensionCap(9))
        ));
        assert!(matches!(
            verify_identities(1, 1, 1),
            Err(Error::DimensionCap(1))
        ));
    }
}
