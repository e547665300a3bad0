//! CSV export of statistics tables and time series.
//!
//! Emits a header row, ISO-8601 timestamps and full-precision numbers
//! (Rust's shortest round-trip float rendering).

use std::io::Write;

use super::series::TimeSeries;
use super::stats::TierStats;
use super::AnalysisError;

/// One row per (platform, tier, metric).
pub fn write_tier_stats_csv<W: Write>(
    stats: &[TierStats],
    writer: W,
) -> Result<(), AnalysisError> {
    if stats.is_empty() {
        return Err(AnalysisError::EmptyDataset);
    }
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record([
        "platform", "tier_mb", "metric", "count", "mean", "median", "p95", "stddev", "min", "max",
    ])?;
    for row in stats {
        csv.write_record([
            row.platform.as_str(),
            &row.tier_mb.to_string(),
            row.metric.as_str(),
            &row.count.to_string(),
            &row.mean.to_string(),
            &row.median.to_string(),
            &row.p95.to_string(),
            &row.stddev.to_string(),
            &row.min.to_string(),
            &row.max.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

/// Columns `time,raw` plus `smoothed` when the series carries one.
pub fn write_series_csv<W: Write>(series: &TimeSeries, writer: W) -> Result<(), AnalysisError> {
    if series.points.is_empty() {
        return Err(AnalysisError::EmptySeries);
    }
    let mut csv = csv::Writer::from_writer(writer);
    match &series.smoothed {
        Some(smoothed) => {
            csv.write_record(["time", "raw", "smoothed"])?;
            for (&(t, raw), s) in series.points.iter().zip(smoothed) {
                csv.write_record([t.to_iso8601(), raw.to_string(), s.to_string()])?;
            }
        }
        None => {
            csv.write_record(["time", "raw"])?;
            for &(t, raw) in &series.points {
                csv.write_record([t.to_iso8601(), raw.to_string()])?;
            }
        }
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::series::smooth_series;
    use crate::analysis::stats::Metric;
    use crate::time::{VirtualTime, MILLIS_PER_HOUR};

    fn sample_stats() -> Vec<TierStats> {
        vec![TierStats {
            platform: "aws-like".to_string(),
            tier_mb: 128,
            metric: Metric::ColdStartMs,
            count: 3,
            mean: 346.73,
            median: 340.0,
            p95: 400.5,
            stddev: 12.25,
            min: 300.125,
            max: 402.875,
        }]
    }

    #[test]
    fn stats_csv_round_trips_through_a_reader() {
        let mut buffer = Vec::new();
        write_tier_stats_csv(&sample_stats(), &mut buffer).unwrap();
        let mut reader = csv::Reader::from_reader(buffer.as_slice());
        let headers = reader.headers().unwrap().clone();
        assert_eq!(&headers[0], "platform");
        let row = reader.records().next().unwrap().unwrap();
        assert_eq!(&row[0], "aws-like");
        assert_eq!(row[4].parse::<f64>().unwrap(), 346.73);
        assert_eq!(row[9].parse::<f64>().unwrap(), 402.875);
    }

    #[test]
    fn series_csv_has_smoothed_column_when_present() {
        let points: Vec<(VirtualTime, f64)> = (0..10)
            .map(|h| (VirtualTime::from_hours(h), h as f64))
            .collect();
        let series = TimeSeries::new("m", points).unwrap();
        let smoothed = smooth_series(&series, 4 * MILLIS_PER_HOUR).unwrap();

        let mut buffer = Vec::new();
        write_series_csv(&smoothed, &mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "time,raw,smoothed");
        let first = lines.next().unwrap();
        assert!(first.starts_with("1970-01-01T00:00:00.000Z,0,"));
    }
}
