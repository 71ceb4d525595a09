//! Numerical toolkit for the L¹ norm of the divisor-function exponential sum
//!
//! ```text
//! S(α) = Σ_{n≤x} τ(n) e(nα),   e(α) = exp(2πiα)
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: sieved τ, μ, φ tables, Ramanujan sums and the `f_x`/`g_x` main-term pair.
//! * [`expsum`]: point and grid evaluation of `S`, `T`, `V`, `F_q`, `G_q`.
//! * [`dissection`]: Farey fractions and the arc systems built on them.
//! * [`l1norm`]: quadrature of `∫₀¹ |S(α)| dα`.
//! * [`asympt`]: the Ramanujan-sum aggregate `U_q(x; β)` and its asymptotics.
//! * [`verify`]: the named invariant suite used by the `verify` subcommand.
//! * [`cli`]: command-line orchestration.
//!
//! Floating-point code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, which is what every accuracy contract
//! in the test suite assumes.

// `!(a <= b)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod asympt;
pub mod cli;
pub mod dissection;
pub mod error;
pub mod expsum;
pub mod l1norm;
pub mod scalar;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use num_complex::Complex;

pub use arith::{ArithTables, MainTermPair, EULER_GAMMA};
pub use dissection::{Arc, Fraction, HalfWidth};
pub use expsum::{ExpSumEval, GridEval, SumKind, TrigPoly};

/// `f64` complex number.
pub type C64 = Complex<f64>;
pub type MainTermPairF64<'a> = arith::MainTermPair<'a, f64>;
pub type ExpSumEvalF64 = expsum::ExpSumEval<f64>;
pub type GridEvalF64 = expsum::GridEval<f64>;
pub type TrigPolyF64 = expsum::TrigPoly<f64>;
pub type ArcF64 = dissection::Arc<f64>;
pub type QuadratureResultF64 = l1norm::QuadratureResult<f64>;
pub type AsymptoticRecordF64 = asympt::AsymptoticRecord<f64>;
pub type PvRecordF64 = asympt::PvRecord<f64>;
pub type ExponentFitF64 = asympt::ExponentFit<f64>;
pub type ClosingConstantF64 = asympt::ClosingConstant<f64>;
