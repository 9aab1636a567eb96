//! Numerical engine for general multivariate Hawkes processes and the
//! population processes they drive.
//!
//! Three pillars, each cross-validating the others:
//!
//! - [`simulate`] — exact path sampling by thinning and by the Poisson
//!   cluster representation, plus Monte Carlo moment and tail estimators;
//! - [`transform`] / [`moments`] — time-dependent joint transforms of the
//!   population and intensity vectors computed through a fixed-point
//!   iteration over cluster transforms, with moments and probability mass
//!   functions recovered by numerical differentiation and inversion;
//! - [`tails`] — heavy-tail analytics: excitation graph classification,
//!   tail-index propagation, Volterra renewal systems, and power-law tail
//!   asymptotes.
//!
//! Models are declared with [`model::HawkesModel`] or loaded from a JSON
//! config (see [`model::ModelConfig`]). The `hawkes` binary exposes the whole
//! engine over such config files; each major capability also has a runnable
//! example under `examples/`.

pub mod cli;
pub mod model;
pub mod moments;
pub mod numeric;
pub mod rng;
pub mod simulate;
pub mod stats;
pub mod tails;
pub mod transform;

pub use model::{HawkesModel, JumpSpec, KernelSpec, ModelConfig, SojournSpec};

/// Selects which coordinate process an estimate or asymptote refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcessKind {
    /// Counting process of arrivals.
    N,
    /// Population process (arrivals minus departures).
    Q,
    /// Conditional intensity.
    Lambda,
}

impl std::fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProcessKind::N => write!(f, "N"),
            ProcessKind::Q => write!(f, "Q"),
            ProcessKind::Lambda => write!(f, "lambda"),
        }
    }
}
