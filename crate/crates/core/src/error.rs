use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported parabolic cylinder order {0} (supported: -64..=0)")]
    UnsupportedOrder(i32),

    #[error("transform denominator vanishes near s = {s} (nearest pole estimate {nearest})")]
    PoleProximity { s: Complex64, nearest: f64 },

    #[error("{method} did not converge: estimates {first:e} and {second:e}")]
    Convergence {
        method: &'static str,
        first: f64,
        second: f64,
    },

    #[error("{what}: no root bracketed in [{lo}, {hi}]")]
    Solver {
        what: &'static str,
        lo: f64,
        hi: f64,
    },

    #[error("simulation exceeded {events} events")]
    Runaway { events: u64 },

    #[error("estimation error: {0}")]
    Estimation(String),
}
