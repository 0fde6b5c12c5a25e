#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod density;
pub mod error;
pub mod parallel;
pub mod quad;
pub mod simulate;
pub mod specfun;
pub mod stats;
pub mod validate;

pub use error::{Error, Result};
