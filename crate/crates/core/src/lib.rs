//! Sojourn-time densities for the M/M/1 processor-sharing queue.
//!
//! [`exact`] inverts the waiting-time transform numerically. [`regimes_fixed`]
//! and [`regimes_heavy`] hold the asymptotic formulas for fixed ρ < 1 and for
//! ρ = 1 − ε with ε small. [`simulator`] is an event-driven Monte Carlo model
//! used as an independent check.

pub mod cx;
pub mod error;
pub mod exact;
pub mod inversion;
pub mod par;
pub mod quad;
pub mod regimes_fixed;
pub mod regimes_heavy;
pub mod roots;
pub mod simulator;
pub mod singularities;
pub mod specfun;

pub use error::{Error, Result};
pub use exact::{Contour, DensityValue, InversionConfig, ModelParams};
