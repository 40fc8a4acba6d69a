#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments, clippy::excessive_precision)]

pub mod assumptions;
pub mod cli;
pub mod error;
pub mod kacrice;
pub mod oracle;
pub mod quad;
pub mod rmt;
pub mod rng;
pub mod special;
pub mod stats;
pub mod structure_fn;
pub mod verify;

pub use error::{Error, Result};
pub use structure_fn::StructureFunction;
