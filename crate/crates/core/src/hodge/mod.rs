//! Discrete v-harmonic fields and the v-induced Hodge decomposition.

mod basis;
mod decompose;
mod friedrichs;

pub use basis::{
    duality_dimensions, harmonic_basis, harmonic_basis_with_tolerance, harmonic_dimensions,
    DualityTable, HarmonicBasis, HarmonicDimensions, MIN_GAP, RANK_TOLERANCE,
};
pub use decompose::{
    decompose, DecompositionResiduals, HodgeDecomposition, HodgeSolver, PINV_TOLERANCE,
};
pub use friedrichs::{friedrichs_split, FriedrichsSplit, SplitMode, HARMONIC_TOLERANCE};
