#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod cli;
pub mod error;
pub mod extalg;
pub mod hodge;
pub mod mesh;
pub mod scalarlab;
pub mod spectra;

pub use error::{Error, Result};
