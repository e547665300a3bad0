//! Time series extraction and smoothing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::observer::InvocationRecord;
use crate::time::{VirtualTime, MILLIS_PER_HOUR};

use super::AnalysisError;

/// An ordered series of (time, value) samples, optionally with a parallel
/// smoothed track.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub metric: String,
    pub points: Vec<(VirtualTime, f64)>,
    pub smoothed: Option<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(metric: impl Into<String>, points: Vec<(VirtualTime, f64)>) -> Result<Self, AnalysisError> {
        if points.is_empty() {
            return Err(AnalysisError::EmptySeries);
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(AnalysisError::NonMonotonicSeries);
        }
        Ok(TimeSeries {
            metric: metric.into(),
            points,
            smoothed: None,
        })
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|&(_, v)| v)
    }
}

/// Per-record value extractors for campaign series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesMetric {
    TotalRuntimeMs,
    PrimeCount,
    DiskMbPerS,
    /// Reciprocal disk throughput, s/MB: directly proportional to the
    /// platform's interference level, which makes it the natural series for
    /// diurnal fitting.
    DiskSecondsPerMb,
}

impl SeriesMetric {
    pub fn label(self) -> &'static str {
        match self {
            SeriesMetric::TotalRuntimeMs => "total_runtime_ms",
            SeriesMetric::PrimeCount => "prime_count",
            SeriesMetric::DiskMbPerS => "disk_mb_per_s",
            SeriesMetric::DiskSecondsPerMb => "disk_s_per_mb",
        }
    }

    fn extract(self, record: &InvocationRecord) -> Option<f64> {
        match self {
            SeriesMetric::TotalRuntimeMs => Some(record.total_runtime_ms),
            SeriesMetric::PrimeCount => Some(record.report.prime_count as f64),
            SeriesMetric::DiskMbPerS => record.report.disk_mb_per_s,
            SeriesMetric::DiskSecondsPerMb => {
                record.report.disk_mb_per_s.map(|rate| 1.0 / rate)
            }
        }
    }
}

/// Mean of a metric per hour-of-campaign bucket, timestamped at the bucket
/// start. Values are sorted before summation so the result is independent
/// of record order.
pub fn hourly_mean_series(
    records: &[InvocationRecord],
    metric: SeriesMetric,
) -> Result<TimeSeries, AnalysisError> {
    let mut buckets: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for record in records {
        if let Some(value) = metric.extract(record) {
            buckets
                .entry(record.request_time.as_millis() / MILLIS_PER_HOUR)
                .or_default()
                .push(value);
        }
    }
    let points: Vec<(VirtualTime, f64)> = buckets
        .into_iter()
        .map(|(hour, mut values)| {
            values.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            (VirtualTime::from_hours(hour), mean)
        })
        .collect();
    TimeSeries::new(metric.label(), points)
}

/// Gaussian-weighted centered moving average with standard deviation
/// `window/2`; weights renormalize over the points available near the
/// endpoints. The smoothed track never leaves the min/max envelope of the
/// points it averaged.
pub fn smooth_series(series: &TimeSeries, window_ms: u64) -> Result<TimeSeries, AnalysisError> {
    if series.points.len() < 2 {
        return Err(AnalysisError::NotEnoughPoints {
            needed: 2,
            got: series.points.len(),
        });
    }
    if window_ms == 0 {
        return Err(AnalysisError::EmptySeries);
    }
    let sigma = window_ms as f64 / 2.0;
    let support = 3.0 * sigma;
    let n = series.points.len();
    let mut smoothed = Vec::with_capacity(n);

    for i in 0..n {
        let (center_t, center_v) = series.points[i];
        let center_ms = center_t.as_millis() as f64;
        let mut weight_sum = 0.0;
        let mut delta_sum = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;

        // Walk outward in both directions until past the kernel support.
        let mut visit = |j: usize| {
            let (t, v) = series.points[j];
            let dt = t.as_millis() as f64 - center_ms;
            if dt.abs() > support {
                return false;
            }
            let w = (-0.5 * (dt / sigma) * (dt / sigma)).exp();
            weight_sum += w;
            delta_sum += w * (v - center_v);
            lo = lo.min(v);
            hi = hi.max(v);
            true
        };
        for j in (0..=i).rev() {
            if !visit(j) {
                break;
            }
        }
        for j in i + 1..n {
            if !visit(j) {
                break;
            }
        }
        // Anchoring on the center value keeps a constant series exactly
        // constant regardless of floating-point summation order.
        let value = (center_v + delta_sum / weight_sum).clamp(lo, hi);
        smoothed.push(value);
    }

    Ok(TimeSeries {
        metric: series.metric.clone(),
        points: series.points.clone(),
        smoothed: Some(smoothed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hourly(values: &[f64]) -> TimeSeries {
        let points = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (VirtualTime::from_hours(i as u64), v))
            .collect();
        TimeSeries::new("test", points).unwrap()
    }

    #[test]
    fn constant_series_smooths_to_itself_exactly() {
        let series = hourly(&[3.25; 100]);
        let smoothed = smooth_series(&series, 12 * MILLIS_PER_HOUR).unwrap();
        for v in smoothed.smoothed.unwrap() {
            assert_eq!(v, 3.25);
        }
    }

    #[test]
    fn impulse_is_strictly_attenuated() {
        let mut values = vec![0.0; 49];
        values[24] = 10.0;
        let series = hourly(&values);
        let smoothed = smooth_series(&series, 6 * MILLIS_PER_HOUR).unwrap();
        let track = smoothed.smoothed.unwrap();
        assert!(track[24] < 10.0);
        assert!(track[24] > 0.0);
    }

    #[test]
    fn smoothing_stays_in_the_envelope() {
        let values: Vec<f64> = (0..200)
            .map(|i| ((i as f64) * 0.7).sin() * 5.0 + ((i * i) % 13) as f64)
            .collect();
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let series = hourly(&values);
        let smoothed = smooth_series(&series, 12 * MILLIS_PER_HOUR).unwrap();
        for v in smoothed.smoothed.unwrap() {
            assert!(v >= min && v <= max);
        }
    }

    #[test]
    fn single_point_series_cannot_be_smoothed() {
        let series = hourly(&[1.0]);
        assert!(matches!(
            smooth_series(&series, MILLIS_PER_HOUR),
            Err(AnalysisError::NotEnoughPoints { .. })
        ));
    }

    #[test]
    fn non_monotonic_points_are_rejected() {
        let points = vec![
            (VirtualTime::from_hours(2), 1.0),
            (VirtualTime::from_hours(1), 2.0),
        ];
        assert!(matches!(
            TimeSeries::new("x", points),
            Err(AnalysisError::NonMonotonicSeries)
        ));
    }
}
