//! Spacelike and timelike minimal surfaces in Lorentz-Minkowski 3-space,
//! built from Weierstrass data over the complex and Lorentz numbers.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod grid;
pub mod kalg;
pub mod lorentz3;
pub mod mobius;
pub mod weierstrass;
pub mod geometry;
pub mod liouville;
pub mod gallery;
pub mod app;

pub use error::{Error, Result};
