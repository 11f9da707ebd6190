//! Simulation, estimation and numerical verification for the mixed fractional
//! Ornstein–Uhlenbeck process `dX = −αX dt + dB^H + dW`, with H ∈ (3/4, 1).

// Constants are written at full precision; `!(x > y)` comparisons reject NaN on purpose.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::needless_range_loop))]

pub mod analytic;
pub mod error;
pub mod estimate;
pub mod innovation;
pub mod io;
pub mod kernels;
pub mod optim;
pub mod quad;
pub mod simulate;
pub mod special;
pub mod spectral;
pub mod suites;

pub use error::{Error, Result};
pub use kernels::{FractionalKernel, ThetaParams};
pub use simulate::{MixedIncrements, SamplePath};
pub use spectral::{Periodogram, SpectralConfig};
