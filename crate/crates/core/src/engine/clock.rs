use std::sync::Arc;

use rand::Rng;
use rand_distr::Exp1;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::disorder::{DisorderField, RateSampler};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, unit, Domain};

/// Where a clock's rate comes from.
#[derive(Clone)]
pub enum RateSource {
    /// A materialized quenched field; labels outside it are errors.
    Field(Arc<DisorderField>),
    /// Rates generated on demand from `(law, seed)`.
    Lazy(Box<RateSampler>),
    Constant(f64),
    /// `max(base, floor)`.
    Fastened { base: Box<RateSource>, floor: f64 },
}

impl RateSource {
    pub fn rate(&self, label: i64) -> Result<f64> {
        match self {
            RateSource::Field(f) => f.get(label).ok_or_else(|| {
                let r = f.labels();
                Error::OutOfWindow {
                    label,
                    lo: r.lo,
                    hi: r.hi,
                }
            }),
            RateSource::Lazy(s) => Ok(s.rate(label)),
            RateSource::Constant(p) => Ok(*p),
            RateSource::Fastened { base, floor } => Ok(base.rate(label)?.max(*floor)),
        }
    }

    pub fn fastened(self, floor: f64) -> RateSource {
        RateSource::Fastened {
            base: Box::new(self),
            floor,
        }
    }
}

impl std::fmt::Debug for RateSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RateSource::Field(d) => write!(f, "Field({:?})", d.labels()),
            RateSource::Lazy(s) => write!(f, "Lazy({:?})", s.law()),
            RateSource::Constant(p) => write!(f, "Constant({p})"),
            RateSource::Fastened { base, floor } => write!(f, "Fastened({base:?}, {floor})"),
        }
    }
}

/// The graphical construction: one Poisson attempt stream per clock label.
///
/// Stream `i` is a pure function of `(seed, i)` and its rate, so any two
/// processes built on the same schedule see identical rings. A marked
/// schedule also attaches a uniform mark to every attempt, which thinned
/// processes use to keep a fraction of the rings.
#[derive(Debug, Clone)]
pub struct ClockSchedule {
    seed: u64,
    rates: RateSource,
    marked: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attempt {
    pub time: f64,
    pub mark: f64,
}

impl ClockSchedule {
    pub fn new(seed: u64, rates: RateSource) -> Self {
        ClockSchedule {
            seed,
            rates,
            marked: false,
        }
    }

    pub fn marked(mut self) -> Self {
        self.marked = true;
        self
    }

    pub fn is_marked(&self) -> bool {
        self.marked
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rates(&self) -> &RateSource {
        &self.rates
    }

    pub fn rate(&self, label: i64) -> Result<f64> {
        self.rates.rate(label)
    }

    pub fn stream(&self, label: i64) -> Result<ClockStream> {
        let rate = self.rate(label)?;
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::domain(
                "clock rate",
                format!("label {label} has rate {rate}"),
            ));
        }
        Ok(ClockStream {
            rng: stream_rng(self.seed, Domain::Clock, label),
            rate,
            scale: rate.recip(),
            last: 0.0,
            marked: self.marked,
        })
    }
}

/// Lazily generated increasing attempt times of one clock.
#[derive(Debug, Clone)]
pub struct ClockStream {
    rng: Xoshiro256PlusPlus,
    rate: f64,
    scale: f64,
    last: f64,
    marked: bool,
}

impl ClockStream {
    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl Iterator for ClockStream {
    type Item = Attempt;

    #[inline]
    fn next(&mut self) -> Option<Attempt> {
        let spacing = loop {
            let e: f64 = self.rng.sample(Exp1);
            if e > 0.0 {
                break e * self.scale;
            }
        };
        self.last += spacing;
        let mark = if self.marked { unit(&mut self.rng) } else { 0.0 };
        Some(Attempt {
            time: self.last,
            mark,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_increasing_and_regenerable() {
        let clocks = ClockSchedule::new(5, RateSource::Constant(0.7));
        let a: Vec<Attempt> = clocks.stream(3).unwrap().take(1000).collect();
        let b: Vec<Attempt> = clocks.stream(3).unwrap().take(1000).collect();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[1].time > w[0].time));
        assert!(a[0].time > 0.0);
        let other: Vec<Attempt> = clocks.stream(4).unwrap().take(3).collect();
        assert_ne!(a[0], other[0]);
    }

    #[test]
    fn poisson_count_over_long_window() {
        let clocks = ClockSchedule::new(1, RateSource::Constant(1.0));
        let t = 100_000.0;
        let n = clocks.stream(0).unwrap().take_while(|a| a.time <= t).count() as f64;
        assert!((n - t).abs() < 3.0 * t.sqrt(), "count {n}");
    }

    #[test]
    fn marks_are_uniform() {
        let clocks = ClockSchedule::new(2, RateSource::Constant(1.0)).marked();
        let marks: Vec<f64> = clocks.stream(0).unwrap().take(20_000).map(|a| a.mark).collect();
        let below = marks.iter().filter(|&&m| m < 0.3).count() as f64 / 20_000.0;
        assert!((below - 0.3).abs() < 4.0 * (0.21f64 / 20_000.0).sqrt());
    }

    #[test]
    fn fastened_rate_floor() {
        let src = RateSource::Constant(0.55).fastened(0.6);
        assert_eq!(src.rate(0).unwrap(), 0.6);
        let src = RateSource::Constant(0.9).fastened(0.6);
        assert_eq!(src.rate(0).unwrap(), 0.9);
    }
}
