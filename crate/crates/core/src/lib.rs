//! Expected hypervolume improvement (EHVI) of Gaussian predictive densities.
//!
//! The crate provides four ways of computing the EHVI of a multivariate
//! Gaussian against a Pareto-front approximation:
//!
//! * Monte Carlo sampling ([`ehvi::ehvi_mc`]),
//! * Gauss-Hermite quadrature on a pruned, eigen-transformed tensor grid
//!   ([`ehvi::ehvi_gh`]),
//! * the exact closed form for independent bivariate densities
//!   ([`ehvi::ehvi_exact_2d`]),
//! * a refinement-checked dense midpoint rule used as a reference oracle
//!   ([`ehvi::ehvi_reference`]).
//!
//! Supporting modules cover the hypervolume indicator, Pareto-front
//! generators, random test densities, Kendall's rank correlation and the
//! experiment harness driving the comparison studies.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN.

pub mod ehvi;
pub mod experiment;
pub mod fronts;
pub mod gaussians;
pub mod hypervolume;
pub mod numerics;
pub mod quadrature;
pub mod stats;

mod error;

pub use crate::ehvi::{EhviEstimate, Method};
pub use crate::error::{Error, Result};
pub use crate::fronts::{FrontShape, FrontSpec, ReferencePolicy};
pub use crate::gaussians::{FrontBox, GaussianDensity};
pub use crate::hypervolume::ParetoFront;
pub use crate::numerics::{EigenDecomposition, Matrix, RngStream, SymMatrix};
pub use crate::quadrature::{GhOptions, QuadratureGrid, QuadratureRule1D};
pub use crate::stats::KendallResult;
