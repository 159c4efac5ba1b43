//! Numerical laboratory for parameterized non-autonomous conformal iterated function
//! systems with overlaps.
//!
//! The crate computes Bowen dimensions from partition sums, samples limit sets through
//! address maps, estimates box and energy dimensions, builds finite-level Gibbs-like
//! measures, and probes the transversality condition of the planar example family
//! `{z ↦ t z, z ↦ t z + 1/j}`.

pub mod catalog;
pub mod conditions;
pub mod dimension;
pub mod gibbs;
pub mod pressure;
pub mod raster;
pub mod records;
pub mod transversality;
pub mod nifs;
pub mod symbolic;

pub use num_complex::Complex64;
