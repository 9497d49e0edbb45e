//! Multitask subspace representation learning on synthetic half-space tasks.
//!
//! A shared linear representation is a `d x K` dictionary `D`; each task `t`
//! predicts with a weight vector `c_t` in the learned feature space, so the
//! task predictor scores `x` by `<c_t, D^T x>`. The crate provides
//!
//! * generators for random environments (Haar dictionaries, unit-sphere task
//!   coefficients, sphere inputs, sign labels with optional pre-sign noise),
//! * projected-subgradient trainers for independent per-task learning, joint
//!   dictionary learning, and transfer to fresh tasks,
//! * Monte-Carlo Gaussian-complexity estimates with closed-form suprema,
//! * closed-form risk bounds and the induced transfer-advantage phase diagram,
//! * evaluation metrics (test error, angular error, dictionary similarity),
//! * a deterministic sweep harness behind the `mtrl` command line tool.
//!
//! Numeric code is generic over [`Scalar`] (f32 or f64); the harness and the
//! aliases below fix f64.

use std::fmt::Debug;
use std::iter::Sum;

use ndarray::{Array1, Array2, NdFloat};
use num_traits::{FromPrimitive, NumCast, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

pub mod bounds;
pub mod complexity;
pub mod hypothesis;
pub mod linalg;
pub mod metrics;
pub mod seeding;
pub mod sweeps;
pub mod synthgen;
pub mod trainers;

/// Floating-point scalar the numeric core is generic over.
pub trait Scalar: NdFloat + FromPrimitive + Sum<Self> {
    /// Draws from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Casts a finite f64 constant into the scalar type.
    fn real(v: f64) -> Self {
        NumCast::from(v).expect("finite f64 constant")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("scalar converts to f64")
    }
}

impl Scalar for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Scalar for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

/// Scalar used by the harness and the CLI.
pub type Real = f64;
pub type Vector = Array1<Real>;
pub type Matrix = Array2<Real>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn mismatch(reason: impl Into<String>) -> Error {
    Error::DimensionMismatch(reason.into())
}
