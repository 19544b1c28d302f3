//! Numerical toolkit for diffusions with rapidly oscillating periodic
//! coefficients modulated by a finite-state Markov chain.
//!
//! The library simulates the coupled process, computes the invariant measure
//! and corrector of the torus-projected dynamics on a grid, assembles the
//! effective (homogenized) diffusion matrix and drift, verifies the Gaussian
//! limit of the rescaled process statistically, and solves the associated
//! elliptic and parabolic systems by Feynman-Kac Monte Carlo, together with
//! their constant-coefficient limits.
//!
//! Modules follow the pipeline order:
//!
//! * [`model`] - problem data (coefficient fields, switching generator,
//!   domain, data functions) and numerical validation of the standing
//!   assumptions.
//! * [`sde`] - exact chain sampling and Euler-Maruyama path generation for
//!   the rescaled and original processes, with reproducible per-path
//!   random-number streams.
//! * [`cell`] - finite-difference generator on the torus, stationary
//!   measure, corrector (cell problem), mixing-rate estimation and a
//!   Monte Carlo cross-check for the corrector.
//! * [`effective`] - effective coefficients and their positive-definiteness
//!   certificate.
//! * [`clt`] - moment/normality verification of the Gaussian limit.
//! * [`fk`] - Feynman-Kac solvers (exit-time and fixed-horizon) and the
//!   convergence study comparing oscillating and limit problems.
//! * [`pipeline`] - run configuration, stage orchestration, output files and
//!   the reproducibility manifest.

pub mod cell;
pub mod clt;
pub mod effective;
mod error;
pub mod fk;
pub mod model;
pub mod pipeline;
pub mod sde;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
