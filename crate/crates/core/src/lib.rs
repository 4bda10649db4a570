// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod error;
pub mod forms;
pub mod lfun;
pub mod numeric;
pub mod pretentious;
pub mod report;
pub mod sums;
pub mod verify;

pub use error::{Error, Result};
