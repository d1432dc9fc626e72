use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};
use std::sync::Arc;

use serde::Serialize;

use super::clock::{ClockSchedule, ClockStream, RateSource};
use crate::error::{Error, Result};
use crate::state::{LabelRange, ParticleConfig};

/// One exclusion process driven by a shared [`ClockSchedule`].
///
/// Particle `j` reads clock `j + clock_offset`. The maximal stored label is
/// never blocked (free motion); particles below the window do not exist.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    initial: ParticleConfig,
    config: ParticleConfig,
    clock_offset: i64,
    thinning: Option<RateSource>,
    now: f64,
    attempts: Vec<u64>,
    jumps: Vec<u64>,
    tracked: BTreeMap<i64, Vec<f64>>,
    pending_snapshots: Vec<f64>,
    snapshots: Vec<(f64, ParticleConfig)>,
    log: Option<Vec<LogEntry>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogEntry {
    pub label: i64,
    pub time: f64,
    pub executed: bool,
}

/// What one clock ring did to one process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// The clock drives no particle of this process.
    Absent,
    /// Removed by thinning.
    Filtered,
    Blocked,
    Jumped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time: f64,
    pub clock: i64,
    pub outcomes: Vec<Outcome>,
}

impl SimulationRun {
    pub fn new(config: ParticleConfig) -> Self {
        let n = config.positions().len();
        SimulationRun {
            initial: config.clone(),
            config,
            clock_offset: 0,
            thinning: None,
            now: 0.0,
            attempts: vec![0; n],
            jumps: vec![0; n],
            tracked: BTreeMap::new(),
            pending_snapshots: Vec::new(),
            snapshots: Vec::new(),
            log: None,
        }
    }

    pub fn with_clock_offset(mut self, offset: i64) -> Self {
        self.clock_offset = offset;
        self
    }

    /// Keep a ring of clock `k` only when its mark is below `own(k) / schedule(k)`.
    pub fn thinned(mut self, own: RateSource) -> Self {
        self.thinning = Some(own);
        self
    }

    /// Record every jump time of `label`.
    pub fn track(mut self, label: i64) -> Self {
        self.tracked.insert(label, Vec::new());
        self
    }

    pub fn snapshot_at(mut self, times: &[f64]) -> Self {
        self.pending_snapshots.extend_from_slice(times);
        self.pending_snapshots
            .sort_by(|a, b| b.total_cmp(a));
        self
    }

    pub fn with_event_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn config(&self) -> &ParticleConfig {
        &self.config
    }
    pub fn initial(&self) -> &ParticleConfig {
        &self.initial
    }
    pub fn labels(&self) -> LabelRange {
        self.config.labels()
    }
    pub fn clock_offset(&self) -> i64 {
        self.clock_offset
    }
    pub fn now(&self) -> f64 {
        self.now
    }
    pub fn snapshots(&self) -> &[(f64, ParticleConfig)] {
        &self.snapshots
    }
    pub fn event_log(&self) -> Option<&[LogEntry]> {
        self.log.as_deref()
    }

    fn index(&self, label: i64) -> Result<usize> {
        let r = self.labels();
        r.index(label).ok_or(Error::OutOfWindow {
            label,
            lo: r.lo,
            hi: r.hi,
        })
    }

    /// Recorded jump times of a tracked label.
    pub fn jump_times(&self, label: i64) -> Option<&[f64]> {
        self.tracked.get(&label).map(Vec::as_slice)
    }

    pub fn attempts(&self, label: i64) -> Result<u64> {
        Ok(self.attempts[self.index(label)?])
    }

    pub fn jumps(&self, label: i64) -> Result<u64> {
        Ok(self.jumps[self.index(label)?])
    }

    /// Total number of clock rings seen by this process.
    pub fn event_count(&self) -> u64 {
        self.attempts.iter().sum()
    }

    fn clock_range(&self) -> LabelRange {
        let r = self.labels();
        LabelRange::new(r.lo + self.clock_offset, r.hi + self.clock_offset)
    }

    /// Position of `label` at an already simulated time.
    pub fn tagged_position(&self, label: i64, time: f64) -> Result<i64> {
        let idx = self.index(label)?;
        if time > self.now {
            return Err(Error::Unsimulated {
                requested: time,
                now: self.now,
            });
        }
        if time == self.now {
            return Ok(self.config.positions()[idx]);
        }
        if let Some(times) = self.tracked.get(&label) {
            let done = times.partition_point(|&s| s <= time) as i64;
            return Ok(self.initial.positions()[idx] + done);
        }
        if time <= 0.0 {
            return Ok(self.initial.positions()[idx]);
        }
        if let Some((_, snap)) = self.snapshots.iter().find(|(s, _)| *s == time) {
            return Ok(snap.positions()[idx]);
        }
        Err(Error::domain(
            "tagged position",
            format!("label {label} is not tracked and no snapshot exists at {time}"),
        ))
    }

    /// Number of particles strictly beyond `speed * time` at `time`.
    pub fn front_count(&self, time: f64, speed: f64) -> Result<usize> {
        let cfg = if time == self.now {
            &self.config
        } else if time <= 0.0 {
            &self.initial
        } else {
            self.snapshots
                .iter()
                .find(|(s, _)| *s == time)
                .map(|(_, c)| c)
                .ok_or(Error::Unsimulated {
                    requested: time,
                    now: self.now,
                })?
        };
        Ok(front_count(cfg, speed * time))
    }

    fn flush_snapshots(&mut self, before: f64, inclusive: bool) {
        while let Some(&s) = self.pending_snapshots.last() {
            let due = if inclusive { s <= before } else { s < before };
            if !due {
                break;
            }
            self.pending_snapshots.pop();
            self.snapshots.push((s, self.config.clone()));
        }
    }

    fn attempt(&mut self, clocks: &ClockSchedule, clock: i64, time: f64, mark: f64) -> Outcome {
        let label = clock - self.clock_offset;
        let Some(idx) = self.labels().index(label) else {
            return Outcome::Absent;
        };
        if let Some(own) = &self.thinning {
            let keep = match (own.rate(clock), clocks.rate(clock)) {
                (Ok(p), Ok(dominating)) => mark * dominating < p,
                _ => false,
            };
            if !keep {
                return Outcome::Filtered;
            }
        }
        self.attempts[idx] += 1;
        let pos = self.config.positions_mut();
        let free = idx + 1 == pos.len() || pos[idx + 1] - pos[idx] >= 2;
        if free {
            pos[idx] += 1;
            self.jumps[idx] += 1;
            if let Some(times) = self.tracked.get_mut(&label) {
                times.push(time);
            }
        }
        debug_assert!(self.config.is_ordered());
        if let Some(log) = &mut self.log {
            log.push(LogEntry {
                label,
                time,
                executed: free,
            });
        }
        if free {
            Outcome::Jumped
        } else {
            Outcome::Blocked
        }
    }
}

/// Particles strictly beyond `threshold`.
pub fn front_count(cfg: &ParticleConfig, threshold: f64) -> usize {
    cfg.positions().iter().filter(|&&x| x as f64 > threshold).count()
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    time: f64,
    clock: i64,
    mark: f64,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    // ties at equal times go to the lower clock label
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.clock.cmp(&other.clock))
    }
}

/// Event loop over one or more processes sharing a clock schedule.
pub struct Simulation {
    clocks: Arc<ClockSchedule>,
    runs: Vec<SimulationRun>,
    clock_lo: i64,
    streams: Vec<Option<ClockStream>>,
    queue: BinaryHeap<Reverse<Pending>>,
    now: f64,
}

impl Simulation {
    pub fn new(clocks: Arc<ClockSchedule>, run: SimulationRun) -> Result<Self> {
        Self::coupled(clocks, vec![run])
    }

    /// Processes advanced through one common attempt sequence. Processes
    /// without a clock offset must share one label window.
    pub fn coupled(clocks: Arc<ClockSchedule>, runs: Vec<SimulationRun>) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::WindowMismatch("no processes".into()));
        }
        let mut plain = runs.iter().filter(|r| r.clock_offset == 0).map(|r| r.labels());
        if let Some(first) = plain.next() {
            if let Some(other) = plain.find(|w| *w != first) {
                return Err(Error::WindowMismatch(format!(
                    "windows {first:?} and {other:?} read the same clocks"
                )));
            }
        }
        if runs.iter().any(|r| r.thinning.is_some()) && !clocks.is_marked() {
            return Err(Error::WindowMismatch(
                "thinned process needs a marked clock schedule".into(),
            ));
        }
        let now = runs[0].now;
        if runs.iter().any(|r| r.now != now) {
            return Err(Error::WindowMismatch("processes are at different times".into()));
        }
        let lo = runs.iter().map(|r| r.clock_range().lo).min().unwrap();
        let hi = runs.iter().map(|r| r.clock_range().hi).max().unwrap();
        let mut streams = Vec::with_capacity((hi - lo + 1) as usize);
        let mut queue = BinaryHeap::new();
        for clock in lo..=hi {
            if !runs.iter().any(|r| r.clock_range().contains(clock)) {
                streams.push(None);
                continue;
            }
            let mut s = clocks.stream(clock)?;
            // resume a run that was already advanced to `now`
            let first = s.by_ref().find(|a| a.time > now).expect("infinite stream");
            queue.push(Reverse(Pending {
                time: first.time,
                clock,
                mark: first.mark,
            }));
            streams.push(Some(s));
        }
        Ok(Simulation {
            clocks,
            runs,
            clock_lo: lo,
            streams,
            queue,
            now,
        })
    }

    pub fn now(&self) -> f64 {
        self.now
    }
    pub fn runs(&self) -> &[SimulationRun] {
        &self.runs
    }
    pub fn run(&self, i: usize) -> &SimulationRun {
        &self.runs[i]
    }
    pub fn into_runs(self) -> Vec<SimulationRun> {
        self.runs
    }
    pub fn clocks(&self) -> &ClockSchedule {
        &self.clocks
    }

    fn pop_due(&mut self, until: f64) -> Option<Pending> {
        let next = self.queue.peek()?.0;
        if next.time > until {
            return None;
        }
        self.queue.pop();
        let stream = self.streams[(next.clock - self.clock_lo) as usize]
            .as_mut()
            .expect("queued clock has a stream");
        let a = stream.next().expect("infinite stream");
        self.queue.push(Reverse(Pending {
            time: a.time,
            clock: next.clock,
            mark: a.mark,
        }));
        for r in &mut self.runs {
            r.flush_snapshots(next.time, false);
        }
        self.now = next.time;
        Some(next)
    }

    /// Process the next ring at or before `until`, reporting its effect on
    /// every process.
    pub fn step(&mut self, until: f64) -> Option<Event> {
        let p = self.pop_due(until)?;
        let clocks = &self.clocks;
        let outcomes = self
            .runs
            .iter_mut()
            .map(|r| {
                r.now = p.time;
                r.attempt(clocks, p.clock, p.time, p.mark)
            })
            .collect();
        Some(Event {
            time: p.time,
            clock: p.clock,
            outcomes,
        })
    }

    /// Process every ring in `(now, until]`.
    pub fn run_until(&mut self, until: f64) -> Result<()> {
        if until < self.now {
            return Err(Error::domain(
                "horizon",
                format!("cannot run back from {} to {until}", self.now),
            ));
        }
        while let Some(p) = self.pop_due(until) {
            let clocks = &self.clocks;
            for r in &mut self.runs {
                r.attempt(clocks, p.clock, p.time, p.mark);
            }
        }
        self.finish(until);
        Ok(())
    }

    fn finish(&mut self, until: f64) {
        self.now = until;
        for r in &mut self.runs {
            r.flush_snapshots(until, true);
            r.now = until;
        }
    }

    /// Step through every ring up to `until`, handing each event and the
    /// post-event processes to `inspect`.
    pub fn run_inspected<E>(
        &mut self,
        until: f64,
        mut inspect: impl FnMut(&Event, &[SimulationRun]) -> std::result::Result<(), E>,
    ) -> std::result::Result<(), E> {
        while let Some(ev) = self.step(until) {
            inspect(&ev, &self.runs)?;
        }
        self.finish(until);
        Ok(())
    }
}

/// Run a single process from its current time to `until`.
pub fn run(run: SimulationRun, clocks: Arc<ClockSchedule>, until: f64) -> Result<SimulationRun> {
    let mut sim = Simulation::new(clocks, run)?;
    sim.run_until(until)?;
    Ok(sim.into_runs().pop().expect("one run"))
}

/// Run several processes on one clock schedule to `until`.
pub fn coupled_run(
    runs: Vec<SimulationRun>,
    clocks: Arc<ClockSchedule>,
    until: f64,
) -> Result<Vec<SimulationRun>> {
    let mut sim = Simulation::coupled(clocks, runs)?;
    sim.run_until(until)?;
    Ok(sim.into_runs())
}
