//! Finite-blocklength analysis toolkit for degraded wiretap channels.
//!
//! The crate is organized around five layers:
//!
//! - [`probability`]: distributions, channels, products, composition, and
//!   capacity via alternating maximization.
//! - [`info_measures`]: Rényi divergence and conditional entropy,
//!   max-information, its ε-smoothed variant, and the divergence bounds
//!   they support.
//! - [`typicality`]: method of types, typical-set enumeration, and the
//!   cardinality/probability/mass bounds used in the encoder analysis.
//! - [`hashing`]: uniformly sampled full-rank binary matrices as a
//!   c-universal₂ hash family with uniform right inverses.
//! - [`wiretap`]: hash-based wiretap codes over a degraded cascade, exact
//!   and Monte Carlo error/leakage evaluation, rate thresholds, the
//!   blocklength schedule, and the conditional-entropy gap probe.
//!
//! All information quantities are in nats. Exact-mode computations are
//! deterministic; randomized ones are reproducible from a 64-bit seed via
//! counter-mode ChaCha streams.

// Validation sites use `!(x > 0.0)` so NaN parameters fail loudly.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod hashing;
pub mod info_measures;
pub mod probability;
pub mod typicality;
pub mod wiretap;

pub use error::{Error, Result};
pub use probability::{
    capacity, output_distribution, CapacityResult, Channel, Distribution, JointDistribution,
    MinLogConstant, DEFAULT_MATRIX_BUDGET, DEFAULT_SEQUENCE_BUDGET,
};
