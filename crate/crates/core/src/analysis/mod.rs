//! Turning a recorded dataset into result surfaces: per-tier statistics,
//! smoothed time series, diurnal fits and anomaly windows, plus CSV export.
//!
//! Everything here is a pure function over an immutable dataset.

pub mod csv;
pub mod diurnal;
pub mod series;
pub mod stats;

use thiserror::Error;

pub use self::csv::{write_series_csv, write_tier_stats_csv};
pub use diurnal::{fit_diurnal, DiurnalFit, FitAnomalyWindow, DIURNAL_PERIOD_HOURS};
pub use series::{hourly_mean_series, smooth_series, SeriesMetric, TimeSeries};
pub use stats::{cold_start_stats, performance_stats, ColdStartStats, Metric, TierStats};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("series is empty")]
    EmptySeries,
    #[error("series needs at least {needed} points, got {got}")]
    NotEnoughPoints { needed: usize, got: usize },
    #[error("series spans {span_hours:.1} h, need at least {needed_hours:.0} h")]
    SpanTooShort { span_hours: f64, needed_hours: f64 },
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("series timestamps must be strictly increasing")]
    NonMonotonicSeries,
    #[error("normal equations are degenerate")]
    DegenerateFit,
    #[error(transparent)]
    Csv(#[from] ::csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
