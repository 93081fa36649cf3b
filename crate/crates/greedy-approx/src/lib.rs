//! A desk-scale numerical laboratory for weighted greedy-type approximation
//! in Banach sequence spaces.
//!
//! The crate implements the thresholding greedy algorithm and its Chebyshev
//! variant under general set-weights, brute-force oracles for the weighted
//! error functionals they compete against, estimators for the associated
//! constants, and executable property suites that verify the structural
//! inequalities pointwise on finite families, including a two-class
//! rearrangement norm on which democracy-type ratios grow without bound.

pub mod constants;
pub mod error;
pub mod exec;
pub mod family;
pub mod oracles;
pub mod report;
pub mod spaces;
pub mod sparse;
pub mod tga;
pub mod theorems;
pub mod weights;

pub use error::{Error, Result};
