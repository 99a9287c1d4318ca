//! Spectral measures of discrete Schrödinger operators and estimates of their
//! Hausdorff and packing dimensional properties.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod kernels;
pub mod local_dims;
pub mod measures;
pub mod operators;
pub mod oracles;
pub mod par;
pub mod set_dims;
pub mod spectral;
pub mod validation;

pub use error::{Error, Result};
pub use measures::{DiscreteMeasure, RestrictionSet};
