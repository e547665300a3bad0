//! Parsers for the procfs-style files exposed by the execution environment.
//!
//! Every field is either populated or explicitly `None` ("unavailable");
//! a hidden file yields unavailable fields, never zeros. A file that is
//! present but unparseable is an error naming the file.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::env::ExecutionEnv;
use crate::time::VirtualTime;

/// Milliseconds the host spent in user, system and idle time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpuTimes {
    pub user_ms: u64,
    pub system_ms: u64,
    pub idle_ms: u64,
}

/// System attributes recorded from inside the function.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SystemInfo {
    pub cpu_model_id: Option<u32>,
    pub cpu_mhz: Option<f64>,
    pub mem_total_kb: Option<u64>,
    pub cpu_times: Option<CpuTimes>,
    /// Boot timestamp, reconstructed as now minus /proc/uptime.
    pub boot_time: Option<VirtualTime>,
}

#[derive(Debug, Error)]
pub enum ProbeParseError {
    #[error("malformed {file}: {detail}")]
    Malformed { file: &'static str, detail: String },
}

fn malformed(file: &'static str, detail: impl Into<String>) -> ProbeParseError {
    ProbeParseError::Malformed {
        file,
        detail: detail.into(),
    }
}

/// Collect Table-style system attributes from the environment's procfs view.
pub fn collect_system_info(env: &mut dyn ExecutionEnv) -> Result<SystemInfo, ProbeParseError> {
    let mut info = SystemInfo::default();

    if let Some(text) = env.read_proc("/proc/cpuinfo") {
        let (model, mhz) = parse_cpuinfo(&text)?;
        info.cpu_model_id = model;
        info.cpu_mhz = mhz;
    }
    if let Some(text) = env.read_proc("/proc/meminfo") {
        info.mem_total_kb = Some(parse_meminfo(&text)?);
    }
    if let Some(text) = env.read_proc("/proc/stat") {
        info.cpu_times = Some(parse_stat(&text)?);
    }
    if let Some(text) = env.read_proc("/proc/uptime") {
        let uptime_ms = parse_uptime_ms(&text)?;
        let now = env.now().as_millis();
        info.boot_time = Some(VirtualTime::from_millis(now.saturating_sub(uptime_ms)));
    }
    Ok(info)
}

/// Extract the `model` and `cpu MHz` entries; either may be absent.
pub fn parse_cpuinfo(text: &str) -> Result<(Option<u32>, Option<f64>), ProbeParseError> {
    let mut model = None;
    let mut mhz = None;
    for line in text.lines() {
        let Some((key, value)) = line.split_once(':') else {
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "model" => {
                model = Some(value.parse::<u32>().map_err(|_| {
                    malformed("/proc/cpuinfo", format!("model `{value}` is not a number"))
                })?);
            }
            "cpu MHz" => {
                mhz = Some(value.parse::<f64>().map_err(|_| {
                    malformed("/proc/cpuinfo", format!("cpu MHz `{value}` is not a number"))
                })?);
            }
            _ => {}
        }
    }
    Ok((model, mhz))
}

/// Extract MemTotal in kB.
pub fn parse_meminfo(text: &str) -> Result<u64, ProbeParseError> {
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("MemTotal:") {
            let value = rest.trim().trim_end_matches("kB").trim();
            return value.parse::<u64>().map_err(|_| {
                malformed("/proc/meminfo", format!("MemTotal `{value}` is not a number"))
            });
        }
    }
    Err(malformed("/proc/meminfo", "no MemTotal line"))
}

/// Extract aggregate cpu user/system/idle times; jiffies are 10 ms.
pub fn parse_stat(text: &str) -> Result<CpuTimes, ProbeParseError> {
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("cpu ") {
            let fields: Vec<u64> = rest
                .split_whitespace()
                .map(|f| {
                    f.parse::<u64>()
                        .map_err(|_| malformed("/proc/stat", format!("field `{f}` is not a number")))
                })
                .collect::<Result<_, _>>()?;
            if fields.len() < 4 {
                return Err(malformed("/proc/stat", "cpu line has fewer than 4 fields"));
            }
            return Ok(CpuTimes {
                user_ms: fields[0] * 10,
                system_ms: fields[2] * 10,
                idle_ms: fields[3] * 10,
            });
        }
    }
    Err(malformed("/proc/stat", "no aggregate cpu line"))
}

/// Extract uptime in milliseconds from the first field of /proc/uptime.
pub fn parse_uptime_ms(text: &str) -> Result<u64, ProbeParseError> {
    let first = text
        .split_whitespace()
        .next()
        .ok_or_else(|| malformed("/proc/uptime", "empty file"))?;
    let seconds: f64 = first
        .parse()
        .map_err(|_| malformed("/proc/uptime", format!("uptime `{first}` is not a number")))?;
    Ok((seconds * 1000.0).round() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cpuinfo_model_and_mhz() {
        let text = "processor\t: 0\nvendor_id\t: GenuineIntel\nmodel\t\t: 62\nmodel name\t: ignored\ncpu MHz\t\t: 2500.000\n";
        let (model, mhz) = parse_cpuinfo(text).unwrap();
        assert_eq!(model, Some(62));
        assert_eq!(mhz, Some(2500.0));
    }

    #[test]
    fn cpuinfo_reduced_to_two_fields() {
        let text = "model\t\t: 85\ncpu MHz\t\t: 2000.000\n";
        let (model, mhz) = parse_cpuinfo(text).unwrap();
        assert_eq!(model, Some(85));
        assert_eq!(mhz, Some(2000.0));
    }

    #[test]
    fn cpuinfo_bad_model_names_the_file() {
        let err = parse_cpuinfo("model : sixty-two\n").unwrap_err();
        assert!(err.to_string().contains("/proc/cpuinfo"));
    }

    #[test]
    fn meminfo_parses_sixteen_gb() {
        let kb = parse_meminfo("MemTotal:       16384000 kB\nMemFree: 1 kB\n").unwrap();
        assert_eq!(kb, 16_384_000);
    }

    #[test]
    fn meminfo_without_total_is_malformed() {
        assert!(parse_meminfo("MemFree: 12 kB\n").is_err());
    }

    #[test]
    fn stat_converts_jiffies_to_ms() {
        let times = parse_stat("cpu  120 0 30 99000 0 0 0 0 0 0\n").unwrap();
        assert_eq!(
            times,
            CpuTimes {
                user_ms: 1200,
                system_ms: 300,
                idle_ms: 990_000
            }
        );
    }

    #[test]
    fn uptime_first_field_wins() {
        assert_eq!(parse_uptime_ms("123.45 67.89\n").unwrap(), 123_450);
    }
}
