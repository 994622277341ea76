//! Painleve VI tau-functions as Toeplitz determinants.
//!
//! The weight t^{-mu} z^{-mu-omega} (1+z)^{2 omega1} (1+tz)^{2 mu}, with an
//! optional jump by (1-xi) on an arc, generates Toeplitz determinants I_N whose
//! reflection coefficients obey discrete Painleve recurrences. Every recurrence
//! route is paired with an independent oracle: direct determinants, partition
//! hypergeometric series, or closed forms at special points.

pub mod apps;
pub mod ctx;
pub mod dpv;
pub mod elliptic;
pub mod error;
pub mod hyp2f1;
pub mod partition;
pub mod quad;
pub mod recurrence;
pub mod report;
pub mod special;
pub mod toeplitz;
pub mod verify;
pub mod weight;
pub mod xc;

pub use ctx::PrecisionContext;
pub use error::{Error, Result};
pub use xc::XComplex;
