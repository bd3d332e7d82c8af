//! Relaxed Douglas–Rachford and Peaceman–Rachford splitting for pairs of
//! maximally monotone operators on R^n. The inconsistent case is covered by
//! estimating the minimal displacement vector and locating normal solutions.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod operators;
pub mod scenarios;
pub mod splitting;

pub use error::{Error, Result};
pub use geometry::{Matrix2, NormalCone, PrimitiveSet, Vector};
pub use operators::{ResolventOperator, SkewLinearSpec};
pub use splitting::{IterationTrace, SplittingOperator, StopReason, StopRule, TraceRow};
