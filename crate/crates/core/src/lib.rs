// Index loops mirror the matrix formulas; negated comparisons also reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod dict_analysis;
pub mod error;
pub mod experiment;
pub mod matops;
pub mod random_dict;
pub mod recover;
pub mod rng;
pub mod tight_example;

pub use error::{Error, Result};
