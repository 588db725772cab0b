//! Numerical laboratory for Walsh-Paley martingales on the dyadic cube
//! `{-1, 1}^n` with values in finite-dimensional `l_p` spaces.
//!
//! The crate computes random unconditional constants of martingale
//! differences (`RUMD_n^q`), Rademacher averages, type-2 constants,
//! 2-summing norm bounds and wedge products, together with the canonical
//! martingales (Haar-type `M^1`, its summation image `M^inf`, translation
//! martingales) used to witness their growth.
//!
//! The crate is `no_std` (with `alloc`) when built without the default
//! `std` feature. The `parallel` feature evaluates per-point quantities
//! with rayon; all reductions are pairwise over a fixed order, so results
//! do not depend on the thread count.
//!
//! # Feature flags
//! - **`std`** (default): `std::error::Error` impls.
//! - **`parallel`**: rayon-backed evaluation over the points of the cube.
//! - **`serde`**: `Serialize`/`Deserialize` for reports and estimates.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod dyadic;
pub mod error;
pub mod linalg;
pub mod martingales;
pub mod math;
pub mod operators;
pub mod rademacher;
pub mod rng;
pub mod rumd;
pub mod signsum;
pub mod spaces;
pub mod suites;

pub use dyadic::{DyadicInterval, DyadicPoint, Table};
pub use error::{Error, Result};
pub use martingales::{MartingaleTransform, MartingaleView, WalshPaleyMartingale};
pub use operators::{DenseOperator, PointMeasure};
pub use spaces::{BochnerFunction, Exponent, NormedSpace};

/// Largest supported depth of the dyadic cube.
pub const MAX_DEPTH: usize = 24;
