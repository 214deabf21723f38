//! Analytical latency, energy, and Age-of-Information models for XR
//! application pipelines with optional edge offloading, plus a seeded
//! discrete-event simulator that checks the queueing and AoI terms.
//!
//! ```
//! use xrpm::regression::compute_resource;
//! use xrpm::scenario::ComputeAllocation;
//!
//! let c = compute_resource(&ComputeAllocation { cpu_clock: 2.0, gpu_clock: 1.0, cpu_share: 1.0 });
//! assert!((c.value - 13.56).abs() < 1e-9);
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aoi;
pub mod energy;
pub mod error;
pub mod evaluate;
pub mod latency;
pub mod regression;
pub mod scenario;
pub mod segment;
pub mod simoracle;
pub mod warning;

pub use error::{Error, Result};
pub use regression::{CoefficientSet, LinearModel};
pub use scenario::{validate_scenario, ScenarioSpec, ValidationReport};
pub use segment::Segment;
