#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular_ode;
pub mod cli;
pub mod error;
pub mod exponents;
pub mod nonlinear;
pub mod numerics;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
