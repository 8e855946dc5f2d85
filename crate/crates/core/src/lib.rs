#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod bargmann;
pub mod cli;
pub mod completeness;
pub mod error;
pub mod family;
pub mod growth;
pub mod numeric;
pub mod quad;
pub mod sequences;
pub mod specfun;

pub use error::{Error, Result};
