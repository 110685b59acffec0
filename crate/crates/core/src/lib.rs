//! Evaluation of the generalized hypergeometric function ₍q+1₎F_q with
//! complex parameters and complex argument, including directly at the
//! convergence-circle point z = 1.
//!
//! The defining power series converges too slowly to be summed term by term
//! near and on the unit circle. This crate instead accelerates the
//! partial-sum sequence using a precise asymptotic model of its remainder:
//! the remainder behaves like μ·z^n·n^λ·(c₀ + c₁/n + c₂/n² + …), with the
//! exponent λ and the coefficients c_k computable directly from the
//! parameters. Two consecutive partial sums plus two evaluations of the
//! truncated remainder model eliminate the unknown scale μ and yield an
//! accelerated estimate whose truncation error falls like n^(Re λ − m) for an
//! order-m model.
//!
//! Every evaluation self-terminates with one of three verdicts: the
//! requested tolerance was met, the working precision cannot support that
//! tolerance, or the iteration cap was reached. The error estimates used to
//! decide this (a truncation estimate sharpened by the known remainder decay,
//! and a propagated rounding bound) are returned to the caller along with the
//! value.
//!
//! All numeric kernels are generic over [`scalar::ComplexScalar`], with two
//! instantiations: ordinary binary64 complex arithmetic, and a double-double
//! format carrying ~106 significand bits for work beyond binary64's noise
//! floor.

pub mod asymptotics;
pub mod emethod;
pub mod engine;
mod error;
pub mod oracle;
pub mod scalar;
pub mod termratio;

pub use asymptotics::{AsymptoticExpansion, PointKind, RemainderEstimate, SeriesPoint};
pub use emethod::EMethodResult;
pub use engine::{Diagnostics, EngineConfig, EvalOutcome, Status, TruncVariant};
pub use error::Error;
pub use oracle::{CampaignSpec, Category, OutcomeTally};
pub use scalar::{ComplexScalar, ExtendedComplex, PrecisionProfile};
pub use termratio::{HypergeometricParams, RatioCoefficients};
