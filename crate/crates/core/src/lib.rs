//! Kendall convolution algebra and Kendall renewal asymptotics.
//!
//! - [`distlib`]: distribution models on `[0, ∞)` with closed forms.
//! - [`williamson`]: the Williamson transform, its inversion and the
//!   truncated moments `H_α`, `W_α`, `W̄_α`, `H̄_α`, `m(α)`.
//! - [`kendall`]: binary and n-fold Kendall convolutions, sampling and
//!   weighted renewal functions.
//! - [`renewal`]: the renewal function `R`, its derivative and Blackwell
//!   increments.
//! - [`asymptotics`]: limit constants of the renewal rate theorems and
//!   geometric-grid convergence diagnostics.

pub mod asymptotics;
pub mod distlib;
pub mod error;
pub mod kendall;
pub mod quadrature;
pub mod renewal;
mod special;
pub mod williamson;

pub use distlib::{
    make_builtin, make_tabulated, AuxFunction, BuiltinFamily, DistModel, Family, FamilyParams,
    Interpolation, KendallParam, TabulatedCdf, TailClass,
};
pub use error::{Error, Result};
pub use quadrature::QuadratureSpec;
