//! Multiparameter quantum metrology for su(2)-encoded unitary families.
//!
//! The crate computes quantum Fisher information and Uhlmann matrices for
//! pure probes evolved by `exp(−it B n·J)`, and from them the SLD and Holevo
//! Cramér–Rao bounds and the asymptotic incompatibility measure.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod encoding;
pub mod error;
pub mod linalg;
pub mod metrology;
pub mod models;
pub mod spin;

pub use error::{Error, Result};
