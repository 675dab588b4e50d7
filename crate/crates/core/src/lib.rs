//! Downlink coverage probability for multi-connectivity cellular V2X.
//!
//! Base stations are deployed as a 1-D homogeneous Poisson point process along
//! a road; the typical vehicle at the origin is jointly served by its `m`
//! nearest stations (after absorbing log-normal shadowing into the geometry by
//! the displacement theorem) while all remaining stations interfere. The crate
//! computes the SINR coverage probability two independent ways:
//!
//! * [`analytic`] evaluates the closed-form expression — an `m`-fold ordered
//!   integral of a noise kernel times the Laplace transform of the aggregate
//!   interference — by nested Gauss quadrature, and
//! * [`monte_carlo`] estimates the same quantity by simulating deployments
//!   drop by drop with deterministic, trial-indexed random streams.
//!
//! [`validation`] cross-checks the two paths against each other and against
//! distributional facts of the point process, and is what the CLI's
//! `validate` command and the acceptance test suite run.

pub mod analytic;
pub mod channel;
mod error;
pub mod monte_carlo;
pub mod params;
pub mod point_process;
pub mod quadrature;
pub mod stats;
pub mod units;
pub mod validation;

pub use analytic::{AnalyticModel, QuadratureSpec};
pub use error::{Error, Result};
pub use monte_carlo::{CoverageEstimate, DropResult, FadingMode};
pub use params::NetworkParams;
pub use point_process::{Deployment, ServingSet};
