//! Certified upper bounds on how far single points and contiguous window
//! means can sit from a weighted mean, plus the validators and brute-force
//! oracles needed to trust them.
//!
//! The crate is organised bottom-up:
//!
//! * [`sample`]: weighted samples, centering, moments and window statistics.
//! * [`regimes`]: weight-regime classification (positive simplex,
//!   Jensen–Steffensen) and split-index admissibility.
//! * [`bounds`]: the bounds themselves.
//! * [`classes`]: grid checkers for superquadratic and uniformly convex
//!   functions, modulus properties and the built-in function registry.
//! * [`oracle`]: exhaustive verification of every applicable bound on a
//!   dataset and a seeded tightness fuzzer.

// NaN-rejecting `!(x > 0.0)` checks are intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod classes;
mod error;
pub mod oracle;
pub mod regimes;
pub mod sample;
mod summation;

pub use bounds::{BoundKind, BoundReport, Chain, GapBoundPair, ModulusGapReport, ProfilePoint};
pub use classes::{FunctionSpec, ModulusSpec, PropertyFlag};
pub use error::{Error, Result};
pub use oracle::{
    CheckRow, FuzzConfig, FuzzReport, Inequality, ValueDistribution, VerificationReport, Witness,
};
pub use regimes::{Regime, RegimeReport, SplitAdmissibility};
pub use sample::{CenteredSample, MomentSummary, Tolerances, WeightedSample, Window};
