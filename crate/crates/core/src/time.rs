//! Virtual wall-clock time for the simulation.
//!
//! All timestamps in the simulator are integer milliseconds of simulated
//! time. Nothing in the workspace reads the host clock; a month-long
//! campaign is just a large offset.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Sub};

pub const MILLIS_PER_SECOND: u64 = 1_000;
pub const MILLIS_PER_HOUR: u64 = 3_600_000;
pub const MILLIS_PER_DAY: u64 = 24 * MILLIS_PER_HOUR;

/// A point on the simulated timeline, in milliseconds since the virtual epoch.
///
/// The virtual epoch (t = 0) is midnight; hour-of-day arithmetic below relies
/// on that anchoring.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct VirtualTime(u64);

impl VirtualTime {
    pub const ZERO: VirtualTime = VirtualTime(0);

    pub fn from_millis(millis: u64) -> Self {
        VirtualTime(millis)
    }

    pub fn from_hours(hours: u64) -> Self {
        VirtualTime(hours * MILLIS_PER_HOUR)
    }

    pub fn as_millis(self) -> u64 {
        self.0
    }

    /// Fractional hours since the virtual epoch.
    pub fn as_hours(self) -> f64 {
        self.0 as f64 / MILLIS_PER_HOUR as f64
    }

    /// Fractional hour of day in `[0, 24)`.
    pub fn hour_of_day(self) -> f64 {
        (self.0 % MILLIS_PER_DAY) as f64 / MILLIS_PER_HOUR as f64
    }

    /// Whole milliseconds elapsed since `earlier`. Saturates at zero when
    /// `earlier` is in the future.
    pub fn since(self, earlier: VirtualTime) -> u64 {
        self.0.saturating_sub(earlier.0)
    }

    /// ISO-8601 rendering (UTC) used by the CSV exporter.
    pub fn to_iso8601(self) -> String {
        let secs = (self.0 / 1_000) as i64;
        let millis = (self.0 % 1_000) as u32;
        let dt = chrono::DateTime::from_timestamp(secs, millis * 1_000_000)
            .expect("virtual time within chrono range");
        dt.format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string()
    }
}

impl Add<u64> for VirtualTime {
    type Output = VirtualTime;

    fn add(self, millis: u64) -> VirtualTime {
        VirtualTime(self.0 + millis)
    }
}

impl Sub for VirtualTime {
    type Output = u64;

    fn sub(self, other: VirtualTime) -> u64 {
        self.0.saturating_sub(other.0)
    }
}

impl fmt::Display for VirtualTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ms", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hour_of_day_wraps_at_midnight() {
        assert_eq!(VirtualTime::from_hours(0).hour_of_day(), 0.0);
        assert_eq!(VirtualTime::from_hours(12).hour_of_day(), 12.0);
        assert_eq!(VirtualTime::from_hours(24).hour_of_day(), 0.0);
        assert_eq!(VirtualTime::from_hours(36).hour_of_day(), 12.0);
    }

    #[test]
    fn since_saturates() {
        let early = VirtualTime::from_millis(100);
        let late = VirtualTime::from_millis(250);
        assert_eq!(late.since(early), 150);
        assert_eq!(early.since(late), 0);
    }

    #[test]
    fn iso8601_renders_epoch() {
        assert_eq!(VirtualTime::ZERO.to_iso8601(), "1970-01-01T00:00:00.000Z");
        assert_eq!(
            VirtualTime::from_millis(3_600_000 + 1_500).to_iso8601(),
            "1970-01-01T01:00:01.500Z"
        );
    }
}
