//! Null bootstrap bands, efficient/inefficient segmentation and regime summaries.

mod bootstrap;
mod regimes;
mod segments;

pub use bootstrap::{
    bootstrap_bands, null_resample, replicate_zeta, BootstrapSpec, MIN_REPLICATIONS,
    MIN_TAIL_COUNT,
};
pub use regimes::{regime_volatility, Regime, RegimeSummary};
pub use segments::{
    classify_segments, write_segments_csv, Segment, SegmentLabel, DEFAULT_MIN_RUN,
};
