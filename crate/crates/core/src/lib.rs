//! Nonparametric extreme-value tests of tail behavior for the error
//! components of a stochastic frontier model.
//!
//! The crate provides
//!
//! * [`evt`]: the limiting laws of the largest order statistics and the
//!   density of their self-normalized version,
//! * [`tail_tests`]: the thin-tail test and the equal-tail test together with
//!   their Monte Carlo calibration,
//! * [`frontier`]: OLS residual extraction and the per-group diagnostic
//!   pipeline,
//! * [`lab`]: error-component generators and the simulation scenario runner.

pub mod error;
pub mod evt;
pub mod frontier;
pub mod lab;
pub mod rng;
pub mod tail_tests;

pub use error::{Error, Result};
pub use evt::{NormalizedTail, QuadratureConfig, SortedTail, TailIndex};
