//! Self-contained numerical kernel: symmetric tridiagonal eigensolver,
//! bracketed root finding, adaptive quadrature, fixed-step ODE integration,
//! and dominant-frequency extraction.
//!
//! Everything here is a pure function of its inputs and safe to call from
//! multiple threads.

mod freq;
mod highprec;
mod ode;
mod quad;
mod root;
mod tridiag;

pub use freq::dominant_frequency;
pub use highprec::top_two_eigenvalues_hp;
pub use ode::{integrate_ode, StateTrajectory};
pub use quad::quad_adaptive;
pub use root::find_root;
pub use tridiag::{eigh_tridiagonal, EigenDecomposition, TridiagonalSymmetric};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("eigensolver failed to converge at index {index}")]
    Convergence { index: usize },
    #[error("no sign change on bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("function evaluation returned NaN at x = {x}")]
    Evaluation { x: f64 },
    #[error("quadrature recursion depth exhausted; best estimate {estimate}")]
    Accuracy { estimate: f64 },
    #[error("ODE state diverged (NaN) at t = {t}")]
    Divergence { t: f64 },
    #[error("power spectrum has no nonzero-frequency peak")]
    NoPeak,
}

/// Uniformly sampled real series. `dt` is in seconds.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t0: f64, dt: f64, samples: Vec<f64>) -> Result<Self, NumericsError> {
        if !(dt > 0.0) {
            return Err(NumericsError::InvalidInput(format!("dt must be > 0, got {dt}")));
        }
        if samples.len() < 4 {
            return Err(NumericsError::InvalidInput(format!(
                "need at least 4 samples, got {}",
                samples.len()
            )));
        }
        Ok(Self { t0, dt, samples })
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.samples.len() as f64
    }
}
