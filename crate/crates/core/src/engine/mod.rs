//! Continuous-time exclusion dynamics from per-label Poisson clocks.
//!
//! [`run::Simulation`] is the event-driven engine: a min-heap over the next
//! ring of every clock, processing blocked rings as well as jumps, for any
//! number of processes sharing one [`ClockSchedule`]. [`sweep`] evaluates
//! the same construction label by label, which is what the large-time
//! experiments use; its clock-driven form agrees with the engine ring for
//! ring and its service-time form agrees in law.

pub mod clock;
pub mod run;
pub mod sweep;

pub use clock::{Attempt, ClockSchedule, ClockStream, RateSource};
pub use run::{coupled_run, front_count, run, Event, LogEntry, Outcome, Simulation, SimulationRun};
pub use sweep::{
    advance, jam_front_count, jam_sweep, sweep, sweep_jumps, tagged_sweep, ClockView, Dynamics,
    JamOutcome, Rings, ServiceTimes,
    TaggedOutcome,
};

use crate::error::{Error, Result};
use crate::state::LabelRange;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowMode {
    /// Tagged particle 0 driven by labels `0..`.
    Tagged,
    /// Step initial condition, front at label 0; `speed` is the threshold
    /// speed of the statistic being measured.
    Jam { speed: f64 },
}

/// Extra jam particles below the minimal window.
pub const JAM_MARGIN: i64 = 16;

/// Label window sufficient for time `t` with safety factor `k > 1`.
///
/// Tagged: `[0, ceil(k t)]`. Jam: `[-n + 1, 0]` with
/// `n = floor((speed + 1) t) + 1 + margin`; a jam particle starting further left
/// than `-(speed + 1) t` cannot pass `speed * t` in time `t`.
pub fn choose_window(t: f64, k: f64, mode: WindowMode) -> Result<LabelRange> {
    if k.is_nan() || k <= 1.0 {
        return Err(Error::domain("window factor", format!("K = {k} must exceed 1")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain("horizon", format!("t = {t}")));
    }
    Ok(match mode {
        WindowMode::Tagged => LabelRange::new(0, (k * t).ceil() as i64),
        WindowMode::Jam { speed } => {
            let n = ((speed + 1.0) * t).floor() as i64 + 1 + JAM_MARGIN;
            LabelRange::new(-n + 1, 0)
        }
    })
}
