//! Quantitative landscape analysis for the planning spaces of configurable
//! systems.
//!
//! Given complete per-environment performance tables over one configuration
//! space, this crate enumerates global and local optima, computes fitness
//! distance correlation and random-walk correlation length, compares
//! environments statistically (Fisher z-test, Zou's interval, Wilcoxon
//! rank-sum), and measures how optima carry over between environments.
//!
//! The `planscape` binary drives the full pipeline; see [`report`] for the
//! study orchestration and the report formats.

pub mod crossenv;
pub mod error;
pub mod metrics;
pub mod neighborhood;
pub mod report;
pub mod space;
pub mod stats;

pub use error::{Error, Result};
pub use space::{
    AdaptationPlan, Aggregation, ConfigurationSpace, EnvironmentLandscape, LoadOptions,
    OptionDomain,
};
