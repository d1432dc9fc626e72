//! Labeled-particle, gap and height views of one exclusion configuration.
//!
//! Gaps follow `eta_i = sigma_{i+1} - sigma_i - 1` throughout, so that
//! `eta_i = h_{i+1} - h_i` with heights `h_i = sigma_i - i`.

use std::io::Write;

use crate::error::{Error, Result};

/// Inclusive interval of integer labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabelRange {
    pub lo: i64,
    pub hi: i64,
}

impl LabelRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty label range [{lo}, {hi}]");
        LabelRange { lo, hi }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, label: i64) -> bool {
        self.lo <= label && label <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + Clone {
        self.lo..=self.hi
    }

    pub fn index(&self, label: i64) -> Option<usize> {
        self.contains(label).then(|| (label - self.lo) as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticleConfig {
    lo: i64,
    positions: Vec<i64>,
    origin_label: i64,
}

impl ParticleConfig {
    /// Particles with labels `lo, lo + 1, ...` at the given positions.
    pub fn new(lo: i64, positions: Vec<i64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::domain("configuration", "no particles"));
        }
        if let Some(k) = positions.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::domain(
                "configuration",
                format!(
                    "exclusion violated between labels {} and {}",
                    lo + k as i64,
                    lo + k as i64 + 1
                ),
            ));
        }
        Ok(ParticleConfig {
            lo,
            positions,
            origin_label: 0,
        })
    }

    pub fn with_origin_label(mut self, label: i64) -> Self {
        self.origin_label = label;
        self
    }

    pub fn labels(&self) -> LabelRange {
        LabelRange::new(self.lo, self.lo + self.positions.len() as i64 - 1)
    }

    pub fn origin_label(&self) -> i64 {
        self.origin_label
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn position(&self, label: i64) -> Result<i64> {
        let r = self.labels();
        r.index(label)
            .map(|i| self.positions[i])
            .ok_or(Error::OutOfWindow {
                label,
                lo: r.lo,
                hi: r.hi,
            })
    }

    pub(crate) fn positions_mut(&mut self) -> &mut [i64] {
        &mut self.positions
    }

    pub fn is_ordered(&self) -> bool {
        self.positions.windows(2).all(|w| w[0] < w[1])
    }

    /// Snapshot rows `(label, position, gap, height)`; the top label has no gap.
    pub fn write_snapshot_csv<W: Write>(&self, time: Option<f64>, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["label", "position", "gap", "height"];
        if time.is_some() {
            header.insert(0, "time");
        }
        w.write_record(&header)?;
        self.write_snapshot_rows(time, &mut w)?;
        w.flush()?;
        Ok(())
    }

    pub(crate) fn write_snapshot_rows<W: Write>(
        &self,
        time: Option<f64>,
        w: &mut csv::Writer<W>,
    ) -> Result<()> {
        for (k, &x) in self.positions.iter().enumerate() {
            let label = self.lo + k as i64;
            let gap = self
                .positions
                .get(k + 1)
                .map(|&y| (y - x - 1).to_string())
                .unwrap_or_default();
            let mut row = vec![
                label.to_string(),
                x.to_string(),
                gap,
                (x - label).to_string(),
            ];
            if let Some(t) = time {
                row.insert(0, t.to_string());
            }
            w.write_record(&row)?;
        }
        Ok(())
    }
}

/// Gaps `eta_i` for labels `anchor_label ..`, plus the anchoring particle.
/// Describes particles `anchor_label ..= anchor_label + gaps.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapConfig {
    pub anchor_label: i64,
    pub anchor_position: i64,
    pub gaps: Vec<u64>,
}

impl GapConfig {
    pub fn gap_labels(&self) -> Option<LabelRange> {
        (!self.gaps.is_empty()).then(|| {
            LabelRange::new(
                self.anchor_label,
                self.anchor_label + self.gaps.len() as i64 - 1,
            )
        })
    }

    pub fn gap(&self, label: i64) -> Option<u64> {
        let idx = usize::try_from(label.checked_sub(self.anchor_label)?).ok()?;
        self.gaps.get(idx).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightConfig {
    pub lo: i64,
    pub heights: Vec<i64>,
}

impl HeightConfig {
    pub fn labels(&self) -> LabelRange {
        LabelRange::new(self.lo, self.lo + self.heights.len() as i64 - 1)
    }

    pub fn height(&self, label: i64) -> Option<i64> {
        self.labels().index(label).map(|i| self.heights[i])
    }
}

pub fn particles_to_gaps(cfg: &ParticleConfig) -> GapConfig {
    GapConfig {
        anchor_label: cfg.lo,
        anchor_position: cfg.positions[0],
        gaps: cfg
            .positions
            .windows(2)
            .map(|w| (w[1] - w[0] - 1) as u64)
            .collect(),
    }
}

pub fn gaps_to_particles(cfg: &GapConfig) -> ParticleConfig {
    let mut positions = Vec::with_capacity(cfg.gaps.len() + 1);
    let mut x = cfg.anchor_position;
    positions.push(x);
    for &g in &cfg.gaps {
        x += g as i64 + 1;
        positions.push(x);
    }
    ParticleConfig {
        lo: cfg.anchor_label,
        positions,
        origin_label: 0,
    }
}

pub fn particles_to_heights(cfg: &ParticleConfig) -> HeightConfig {
    HeightConfig {
        lo: cfg.lo,
        heights: cfg
            .positions
            .iter()
            .enumerate()
            .map(|(k, &x)| x - (cfg.lo + k as i64))
            .collect(),
    }
}

pub fn heights_to_particles(cfg: &HeightConfig) -> Result<ParticleConfig> {
    if let Some(k) = cfg.heights.windows(2).position(|w| w[0] > w[1]) {
        return Err(Error::domain(
            "heights",
            format!("h decreases after label {}", cfg.lo + k as i64),
        ));
    }
    ParticleConfig::new(
        cfg.lo,
        cfg.heights
            .iter()
            .enumerate()
            .map(|(k, &h)| h + cfg.lo + k as i64)
            .collect(),
    )
}
