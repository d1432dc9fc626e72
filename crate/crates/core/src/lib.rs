//! Totally asymmetric exclusion on the integer lattice with quenched,
//! particle-attached jump rates.
//!
//! The crate is organized around the process's equivalent views and the
//! experiments built on them:
//!
//! - [`disorder`]: the rate law, quenched fields and rate-only statistics.
//! - [`state`]: labeled particles, zero-range gaps and heights.
//! - [`measures`]: product equilibria, i.i.d. gap laws and the jam start.
//! - [`engine`]: exact event-driven dynamics from per-particle Poisson clocks,
//!   couplings through shared clocks, and a label-sweep evaluator that is
//!   pathwise identical to the event loop.
//! - [`variational`]: auxiliary and corner processes and the infimum formulas.
//! - [`experiments`]: annealed Monte Carlo estimators and scaling fits.
//! - [`cli`]: the `dtasep` batch harness.


pub mod cli;
pub mod disorder;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod measures;
pub mod rng;
pub mod state;
pub mod variational;


pub use disorder::{CriticalGap, DisorderField, RateLaw};
pub use error::{Error, Result};
pub use state::{GapConfig, HeightConfig, LabelRange, ParticleConfig};
