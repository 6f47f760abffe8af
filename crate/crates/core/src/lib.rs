//! Blind-spot probability of a typical localization target when obstacles
//! are modelled by a Poisson line process and anchors by a Poisson point
//! process.
//!
//! The crate has two independent routes to the same quantity:
//!
//! * [`analytic`] integrates the conditional blind-spot probability against
//!   the three-parameter Gamma fit of the Poisson-Voronoi cell area, and
//!   provides the independent-blocking baselines and a design solver.
//! * [`simulator`] draws anchors and obstacles (infinite lines or finite
//!   segments) from seeded, counter-derived RNG streams and counts anchors in
//!   line of sight of the origin.
//!
//! [`geom`] holds the exact planar predicates both routes rely on, and
//! [`stochproc`] the point-process samplers.

// `!(x > 0.0)` rejects NaN as well, which is the intent wherever it appears.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod config;
pub mod error;
pub mod geom;
pub mod quadrature;
pub mod report;
pub mod simulator;
pub mod stochproc;

pub use config::{ObstacleLength, ScenarioConfig};
pub use error::{Error, Result};
