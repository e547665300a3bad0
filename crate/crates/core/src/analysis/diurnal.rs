//! Diurnal pattern fitting and anomaly-window detection.
//!
//! Least-squares fit of `v(t) = m * (1 + A * sin(2pi * (h(t) - phi) / 24))`
//! over a series spanning at least three days. The model is linear in
//! `(m, m*A*cos, m*A*sin)`, so the fit is a 3x3 normal-equation solve.
//! Anomaly windows are maximal runs of at least two consecutive points
//! whose residual exceeds three times the residual RMS.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::time::VirtualTime;

use super::series::TimeSeries;
use super::AnalysisError;

/// Period of the fitted pattern, hours.
pub const DIURNAL_PERIOD_HOURS: f64 = 24.0;

/// Residual threshold in units of residual RMS.
const ANOMALY_SIGMA: f64 = 3.0;
/// Minimum run length, in consecutive points, to call a window.
const ANOMALY_MIN_RUN: usize = 2;

/// A detected interval of out-of-model behaviour. `start` and `end` are the
/// first and last affected sample times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitAnomalyWindow {
    pub start: VirtualTime,
    pub end: VirtualTime,
    pub mean_deviation: f64,
}

/// Fitted diurnal pattern parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiurnalFit {
    /// Relative amplitude of the 24h modulation.
    pub amplitude: f64,
    /// Hour of day of the fitted maximum, in [0, 24).
    pub peak_hour: f64,
    pub period_hours: f64,
    /// Baseline level `m`.
    pub mean_level: f64,
    pub residual_rms: f64,
    pub anomaly_windows: Vec<FitAnomalyWindow>,
}

/// Solve a 3x3 linear system by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .expect("finite matrix")
        })?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut sum = b[row];
        for k in row + 1..3 {
            sum -= a[row][k] * x[k];
        }
        x[row] = sum / a[row][row];
    }
    Some(x)
}

/// Fit the 24h model and detect anomaly windows.
pub fn fit_diurnal(series: &TimeSeries) -> Result<DiurnalFit, AnalysisError> {
    let points = &series.points;
    if points.len() < 4 {
        return Err(AnalysisError::NotEnoughPoints {
            needed: 4,
            got: points.len(),
        });
    }
    let span_hours = points[points.len() - 1].0.as_hours() - points[0].0.as_hours();
    if span_hours < 72.0 {
        return Err(AnalysisError::SpanTooShort {
            span_hours,
            needed_hours: 72.0,
        });
    }

    // Normal equations for v = m + p*sin(theta) + q*cos(theta).
    let mut ata = [[0.0f64; 3]; 3];
    let mut atv = [0.0f64; 3];
    for &(t, v) in points {
        let theta = TAU * t.as_hours() / DIURNAL_PERIOD_HOURS;
        let row = [1.0, theta.sin(), theta.cos()];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atv[i] += row[i] * v;
        }
    }
    let [m, p, q] = solve3(ata, atv).ok_or(AnalysisError::DegenerateFit)?;

    let swing = (p * p + q * q).sqrt();
    let amplitude = if m.abs() < 1e-12 { 0.0 } else { (swing / m).abs() };
    // p*sin + q*cos = swing * sin(theta - theta_phi) with
    // theta_phi = atan2(-q, p); the peak sits a quarter period later.
    let phi_hours = (-q).atan2(p) * DIURNAL_PERIOD_HOURS / TAU;
    let peak_hour = (phi_hours + DIURNAL_PERIOD_HOURS / 4.0).rem_euclid(DIURNAL_PERIOD_HOURS);

    let residuals: Vec<f64> = points
        .iter()
        .map(|&(t, v)| {
            let theta = TAU * t.as_hours() / DIURNAL_PERIOD_HOURS;
            v - (m + p * theta.sin() + q * theta.cos())
        })
        .collect();
    let residual_rms =
        (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();

    Ok(DiurnalFit {
        amplitude,
        peak_hour,
        period_hours: DIURNAL_PERIOD_HOURS,
        mean_level: m,
        residual_rms,
        anomaly_windows: detect_windows(points, &residuals, residual_rms, m),
    })
}

fn detect_windows(
    points: &[(VirtualTime, f64)],
    residuals: &[f64],
    rms: f64,
    mean_level: f64,
) -> Vec<FitAnomalyWindow> {
    // The relative term keeps numerically-perfect fits (rms at the level of
    // floating-point noise) from flagging everything.
    let threshold = ANOMALY_SIGMA * rms + 1e-9 * mean_level.abs();
    let mut windows = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..=residuals.len() {
        let outlier = i < residuals.len() && rms > 0.0 && residuals[i].abs() > threshold;
        match (outlier, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(start)) => {
                let len = i - start;
                if len >= ANOMALY_MIN_RUN {
                    let mean_deviation =
                        residuals[start..i].iter().sum::<f64>() / len as f64;
                    windows.push(FitAnomalyWindow {
                        start: points[start].0,
                        end: points[i - 1].0,
                        mean_deviation,
                    });
                }
                run_start = None;
            }
            _ => {}
        }
    }
    windows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::MILLIS_PER_HOUR;

    fn sinusoid_series(
        mean: f64,
        amplitude: f64,
        peak_hour: f64,
        hours: u64,
    ) -> TimeSeries {
        let points = (0..hours)
            .map(|h| {
                let t = VirtualTime::from_hours(h);
                let phase = TAU * (h as f64 - (peak_hour - 6.0)) / 24.0;
                (t, mean * (1.0 + amplitude * phase.sin()))
            })
            .collect();
        TimeSeries::new("synthetic", points).unwrap()
    }

    #[test]
    fn noiseless_round_trip_recovers_parameters() {
        let series = sinusoid_series(5.0, 0.1, 12.0, 30 * 24);
        let fit = fit_diurnal(&series).unwrap();
        assert!((fit.amplitude - 0.1).abs() < 0.005, "A = {}", fit.amplitude);
        assert!((fit.peak_hour - 12.0).abs() < 0.25, "peak = {}", fit.peak_hour);
        assert!(fit.residual_rms < 1e-9);
        assert!(fit.anomaly_windows.is_empty());
    }

    #[test]
    fn flat_series_has_zero_amplitude() {
        let series = sinusoid_series(7.0, 0.0, 12.0, 5 * 24);
        let fit = fit_diurnal(&series).unwrap();
        assert!(fit.amplitude.abs() < 1e-9);
    }

    #[test]
    fn off_peak_hours_are_recovered() {
        for peak in [0.0, 3.0, 17.0, 23.0] {
            let series = sinusoid_series(2.0, 0.08, peak, 10 * 24);
            let fit = fit_diurnal(&series).unwrap();
            let diff = (fit.peak_hour - peak).rem_euclid(24.0);
            let wrapped = diff.min(24.0 - diff);
            assert!(wrapped < 0.25, "peak {peak} fitted as {}", fit.peak_hour);
        }
    }

    #[test]
    fn injected_window_is_localized() {
        let mut series = sinusoid_series(5.0, 0.1, 12.0, 30 * 24);
        // Two days of halved performance: cost-like series doubles.
        let (win_start, win_end) = (5 * 24usize, 7 * 24usize);
        for i in win_start..win_end {
            series.points[i].1 *= 2.0;
        }
        let fit = fit_diurnal(&series).unwrap();
        assert_eq!(fit.anomaly_windows.len(), 1, "windows: {:?}", fit.anomaly_windows);
        let window = &fit.anomaly_windows[0];
        let start_hour = window.start.as_millis() / MILLIS_PER_HOUR;
        let end_hour = window.end.as_millis() / MILLIS_PER_HOUR;
        assert!(
            (start_hour as i64 - win_start as i64).abs() <= 2,
            "start {start_hour} vs {win_start}"
        );
        assert!(
            (end_hour as i64 - (win_end as i64 - 1)).abs() <= 2,
            "end {end_hour} vs {}",
            win_end - 1
        );
        assert!(window.mean_deviation > 0.0);
    }

    #[test]
    fn short_span_is_rejected() {
        let series = sinusoid_series(5.0, 0.1, 12.0, 48);
        assert!(matches!(
            fit_diurnal(&series),
            Err(AnalysisError::SpanTooShort { .. })
        ));
    }
}
