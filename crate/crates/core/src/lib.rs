//! Numerical comparison geometry: space-form kernels, F_k-convexity, cut and focal
//! distances on a zoo of test manifolds, and verifiers for sharp isoperimetric-type
//! inequalities.

pub mod error;
pub mod fk;
pub mod kernels;
pub mod manifold;
pub mod quadrature;
pub mod scenario;
pub mod suite;

pub use error::{Error, Result};
pub use kernels::{CurvatureContext, Ext, KernelValues, ModelMeasures};
