//! Exact pointwise exterior algebra over an inner-product space.
//!
//! Forms are dense coefficient vectors over the lexicographic basis
//! `dx^{i_1} ^ ... ^ dx^{i_k}`, `i_1 < ... < i_k`. The same kernel backs the
//! element integrals in [`crate::assembly`] and the randomized identity
//! checks in [`identities`].

mod basis;
mod form;
pub mod identities;
mod metric;

pub use basis::{binomial, MultiIndexBasis, MAX_DIM};
pub use form::{
    flat, hodge_star, hodge_star_inv, inner_g, inner_gv, interior, norm_g, sharp, star_v,
    star_v_inv, t_v, t_v_inv, wedge, KFormValue, TangentVector,
};
pub use identities::{verify_identities, IdentityReport, IdentityStats};
pub use metric::PointMetric;
