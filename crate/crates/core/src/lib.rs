//! Work-extraction capacitances of noisy quantum batteries.
//!
//! The crate computes ergotropy and total ergotropy of finite-dimensional
//! states, the energy-constrained maximal output ergotropy of a channel, its
//! upper concave envelope (the local capacitance), the separable-input lower
//! bound obtained from total ergotropy, and the closed-form two-mode bosonic
//! attenuator gap.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bosonic;
pub mod capacitance;
pub mod channels;
pub mod ergotropy;
pub mod error;
pub mod exec;
pub mod optim;
pub mod qops;

pub use error::{Error, Result};
pub use exec::Execution;
