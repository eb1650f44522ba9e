//! Numerical reproducing-kernel toolkit for weighted composition operators
//! on the Hardy space, weighted Bergman spaces and the standard function
//! spaces of the unit ball.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ball;
pub mod dbr;
pub mod error;
pub mod experiments;
pub mod kernels;
pub mod linalg;
pub mod operators;
pub mod series;

pub use error::{Error, Result};
pub use series::C64;
