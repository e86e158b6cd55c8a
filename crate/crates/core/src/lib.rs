//! Tail index estimation for randomly right-censored heavy-tailed data.
//!
//! The crate covers the full pipeline: simulation of censored samples from
//! heavy-tailed models, the Hill, EFG, Worms–Worms and weighted estimators of
//! the lifetime tail index, the censored tail empirical process with its
//! Kolmogorov–Smirnov and Cramér–von Mises statistics, adaptive selection of
//! the number of upper order statistics, and a reproducible Monte Carlo
//! harness.

pub mod cli;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod format;
pub mod harness;
pub mod quad;
pub mod rng;
pub mod sample;
pub mod selection;
pub mod tail_process;

pub use distributions::{censoring_profile, CensoringProfile, HeavyTailModel};
pub use error::{Error, Result};
pub use estimators::{EstimateReport, EstimatorId, KaplanMeierCurve};
pub use harness::{McConfig, McResult};
pub use sample::{CensoredObservation, SortedCensoredSample};
pub use selection::KSelection;
pub use tail_process::{GofReport, TailProcessCurve};
