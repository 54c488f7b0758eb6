use std::io::Write;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tvvar::EfficiencyPath;

pub const DEFAULT_MIN_RUN: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentLabel {
    Efficient,
    Inefficient,
}

impl SegmentLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SegmentLabel::Efficient => "efficient",
            SegmentLabel::Inefficient => "inefficient",
        }
    }

    fn from_flag(efficient: bool) -> Self {
        if efficient {
            SegmentLabel::Efficient
        } else {
            SegmentLabel::Inefficient
        }
    }
}

/// Inclusive index range `[start, end]` of the path with one label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub start_date: Option<NaiveDate>,
    pub end_date: Option<NaiveDate>,
    pub label: SegmentLabel,
    pub mean_zeta: Option<f64>,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Run-length segments of the efficiency flags. Runs shorter than `min_run`
/// are absorbed by their neighbours, shortest (then earliest) first, until
/// every run is long enough or a single run remains.
pub fn classify_segments(path: &EfficiencyPath, min_run: usize) -> Result<Vec<Segment>> {
    let flags = path
        .efficient_flag
        .as_ref()
        .ok_or_else(|| Error::invalid("efficiency path has no bands; run the bootstrap first"))?;
    if flags.is_empty() {
        return Ok(Vec::new());
    }
    // (label, length)
    let mut runs: Vec<(bool, usize)> = Vec::new();
    for &f in flags {
        match runs.last_mut() {
            Some((label, len)) if *label == f => *len += 1,
            _ => runs.push((f, 1)),
        }
    }
    while runs.len() > 1 {
        let Some((idx, _)) = runs
            .iter()
            .enumerate()
            .filter(|(_, r)| r.1 < min_run)
            .min_by_key(|(i, r)| (r.1, *i))
        else {
            break;
        };
        // Flipping a run fuses it with both neighbours.
        let mut len = runs[idx].1;
        let label = !runs[idx].0;
        let mut lo = idx;
        if idx + 1 < runs.len() {
            len += runs[idx + 1].1;
            runs.remove(idx + 1);
        }
        if idx > 0 {
            len += runs[idx - 1].1;
            lo = idx - 1;
            runs.remove(idx);
        }
        runs[lo] = (label, len);
    }

    let mut segments = Vec::with_capacity(runs.len());
    let mut start = 0;
    for (label, len) in runs {
        let end = start + len - 1;
        let defined: Vec<f64> = path.zeta[start..=end].iter().flatten().copied().collect();
        let mean_zeta = if defined.is_empty() {
            None
        } else {
            Some(defined.iter().sum::<f64>() / defined.len() as f64)
        };
        segments.push(Segment {
            start,
            end,
            start_date: path.dates.get(start).copied(),
            end_date: path.dates.get(end).copied(),
            label: SegmentLabel::from_flag(label),
            mean_zeta,
        });
        start = end + 1;
    }
    Ok(segments)
}

/// `start, end, label, mean_zeta`
pub fn write_segments_csv<W: Write>(segments: &[Segment], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["start", "end", "label", "mean_zeta"])?;
    for s in segments {
        let date_or_index = |d: Option<NaiveDate>, i: usize| {
            d.map(|d| d.to_string()).unwrap_or_else(|| i.to_string())
        };
        w.write_record([
            date_or_index(s.start_date, s.start),
            date_or_index(s.end_date, s.end),
            s.label.as_str().to_string(),
            s.mean_zeta.map(|m| format!("{m}")).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}
