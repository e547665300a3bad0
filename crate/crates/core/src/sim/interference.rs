//! Diurnal interference model.
//!
//! Platform load modulates a runtime-cost multiplier on a fixed 24-hour
//! sinusoid: work costs the most at the configured peak hour and the least
//! twelve hours away. Anomaly windows model platform incidents: a severity
//! of 0.5 halves effective performance inside the window, which shows up as
//! a doubled cost multiplier.

use std::f64::consts::TAU;

use crate::profile::InterferenceModel;
use crate::time::VirtualTime;

/// Runtime-cost multiplier at virtual time `t`. Throughput-style metrics
/// scale by its reciprocal.
pub fn interference_multiplier(model: &InterferenceModel, t: VirtualTime) -> f64 {
    let hour = t.hour_of_day();
    let phase = TAU * (hour - (model.peak_hour - 6.0)) / 24.0;
    let mut multiplier = 1.0 + model.amplitude * phase.sin();
    for window in &model.anomaly_windows {
        if window.contains(t) {
            multiplier /= window.severity;
        }
    }
    multiplier
}
