//! Platform archetype configuration.
//!
//! A [`PlatformProfile`] is the complete parameterization of one simulated
//! FaaS platform: memory tiers and their VM memory mapping, the CPU fleet
//! mix, cold-start distributions, the container reuse policy, per-tier CPU
//! shares and disk rates, the diurnal interference model and the VM
//! identification strategy. Four presets ship with the crate
//! (`aws-like`, `google-like`, `ibm-like`, `azure-like`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::{VirtualTime, MILLIS_PER_HOUR};

/// How the platform exposes (or hides) a VM identity to code running inside
/// a function container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdStrategy {
    /// `/proc/self/cgroup` contains a `sandbox-root-<id>` token.
    CgroupSandbox,
    /// `/proc/machineid` contains the VM identifier.
    MachineId,
    /// No VM identity is observable; only the container-level UID heuristic works.
    ContainerUidOnly,
}

impl IdStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            IdStrategy::CgroupSandbox => "cgroup-sandbox",
            IdStrategy::MachineId => "machine-id",
            IdStrategy::ContainerUidOnly => "container-uid-only",
        }
    }
}

/// One CPU configuration in the platform fleet, weighted by prevalence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpuFleetEntry {
    /// Decimal CPUID model number as it appears in `/proc/cpuinfo`.
    pub model_id: u32,
    pub mhz: u32,
    /// Fraction of VM provisions using this configuration. Must sum to 1
    /// across the fleet.
    pub prevalence: f64,
}

/// Container/VM recycling behaviour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReusePolicy {
    /// Idle containers older than this are garbage collected and can never
    /// be reused.
    pub max_idle_lifetime_ms: u64,
    /// Live containers (busy or idle) hosted by a single VM.
    pub max_containers_per_vm: u32,
    /// Probability per whole idle hour that an idle container has been
    /// recycled by the platform when an acquisition attempts to reuse it.
    /// An idle spell of `h` ms survives with `(1 - p)^ceil(h / 1h)`.
    pub vm_recycle_probability: f64,
}

/// Optional rare alternative VM memory size for a tier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemOutlier {
    pub mem_total_kb: u64,
    pub probability: f64,
}

/// Per-memory-tier configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierSpec {
    /// Function memory allocation in MB; the tier key.
    pub tier_mb: u32,
    /// MemTotal of VMs provisioned for this tier, in kB.
    pub mem_total_kb: u64,
    #[serde(default)]
    pub outlier: Option<MemOutlier>,
    /// Mean of the cold-start delay distribution, ms.
    pub cold_start_mean_ms: f64,
    /// Sigma of the underlying normal of the log-normal delay distribution.
    #[serde(default = "default_dispersion")]
    pub cold_start_dispersion: f64,
    /// Fraction of one core granted by the time slicer, in (0, 1].
    pub cpu_share: f64,
    /// Disk throughput ceiling, MB/s.
    pub disk_rate_mb_s: f64,
}

fn default_dispersion() -> f64 {
    0.35
}

/// A contiguous interval of degraded platform performance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyWindow {
    pub start_hour: u64,
    pub end_hour: u64,
    /// Performance factor in (0, 1]; 0.5 halves throughput inside the window.
    pub severity: f64,
}

impl AnomalyWindow {
    pub fn start(&self) -> VirtualTime {
        VirtualTime::from_hours(self.start_hour)
    }

    pub fn end(&self) -> VirtualTime {
        VirtualTime::from_hours(self.end_hour)
    }

    pub fn contains(&self, t: VirtualTime) -> bool {
        let ms = t.as_millis();
        ms >= self.start_hour * MILLIS_PER_HOUR && ms < self.end_hour * MILLIS_PER_HOUR
    }
}

/// 24h-periodic load modulation plus anomaly windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferenceModel {
    /// Relative amplitude of the diurnal swing, in [0, 1).
    pub amplitude: f64,
    /// Hour of day at which the runtime-cost multiplier peaks.
    pub peak_hour: f64,
    #[serde(default)]
    pub anomaly_windows: Vec<AnomalyWindow>,
}

/// Probe work-metering knobs carried by the platform configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSettings {
    /// Virtual microseconds charged per trial-division inner-loop iteration.
    #[serde(default = "default_unit_cost")]
    pub unit_cost_us: f64,
    /// Blocks written (then read back) by the disk benchmark.
    #[serde(default = "default_disk_blocks")]
    pub disk_block_count: u32,
}

fn default_unit_cost() -> f64 {
    1.0
}

fn default_disk_blocks() -> u32 {
    crate::probe::disk::DEFAULT_BLOCK_COUNT
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            unit_cost_us: default_unit_cost(),
            disk_block_count: default_disk_blocks(),
        }
    }
}

/// Full parameterization of one platform archetype.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformProfile {
    pub name: String,
    pub region: String,
    pub id_strategy: IdStrategy,
    /// Whether `/tmp` is actually backed by memory (affects nothing but the
    /// configured disk rates; kept for documentation of the archetype).
    #[serde(default)]
    pub tmp_is_memory_backed: bool,
    pub reuse_policy: ReusePolicy,
    pub cpu_fleet: Vec<CpuFleetEntry>,
    pub interference: InterferenceModel,
    #[serde(default)]
    pub probe: ProbeSettings,
    pub tiers: Vec<TierSpec>,
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("profile document is not valid TOML: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cpu fleet prevalences sum to {sum}, expected 1")]
    PrevalenceSum { sum: f64 },
    #[error("memory tiers must be non-empty and strictly increasing")]
    TierOrder,
    #[error("tier {tier_mb} MB: {reason}")]
    TierValue { tier_mb: u32, reason: String },
    #[error("interference model invalid: {0}")]
    Interference(String),
    #[error("reuse policy invalid: {0}")]
    ReusePolicy(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

/// Parse and validate a platform profile from a TOML document.
pub fn load_profile(config_text: &str) -> Result<PlatformProfile, ProfileError> {
    let profile: PlatformProfile = toml::from_str(config_text)?;
    profile.validate()?;
    Ok(profile)
}

/// Names of the profiles shipped with the crate.
pub const PRESET_NAMES: [&str; 4] = ["aws-like", "google-like", "ibm-like", "azure-like"];

/// Raw TOML text of a shipped preset.
pub fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "aws-like" => Some(include_str!("../presets/aws-like.toml")),
        "google-like" => Some(include_str!("../presets/google-like.toml")),
        "ibm-like" => Some(include_str!("../presets/ibm-like.toml")),
        "azure-like" => Some(include_str!("../presets/azure-like.toml")),
        _ => None,
    }
}

/// Load one of the shipped presets by name.
pub fn load_preset(name: &str) -> Result<PlatformProfile, ProfileError> {
    let text = preset_text(name).ok_or_else(|| ProfileError::UnknownPreset(name.to_string()))?;
    load_profile(text)
}

impl PlatformProfile {
    pub fn validate(&self) -> Result<(), ProfileError> {
        let sum: f64 = self.cpu_fleet.iter().map(|e| e.prevalence).sum();
        if self.cpu_fleet.is_empty() || (sum - 1.0).abs() > 1e-9 {
            return Err(ProfileError::PrevalenceSum { sum });
        }
        if self.cpu_fleet.iter().any(|e| e.prevalence < 0.0) {
            return Err(ProfileError::PrevalenceSum { sum });
        }
        if self.tiers.is_empty() || self.tiers.windows(2).any(|w| w[0].tier_mb >= w[1].tier_mb) {
            return Err(ProfileError::TierOrder);
        }
        for tier in &self.tiers {
            let fail = |reason: &str| ProfileError::TierValue {
                tier_mb: tier.tier_mb,
                reason: reason.to_string(),
            };
            if tier.cold_start_mean_ms <= 0.0 {
                return Err(fail("cold start mean must be positive"));
            }
            if tier.cold_start_dispersion <= 0.0 {
                return Err(fail("cold start dispersion must be positive"));
            }
            if !(tier.cpu_share > 0.0 && tier.cpu_share <= 1.0) {
                return Err(fail("cpu share must be in (0, 1]"));
            }
            if tier.disk_rate_mb_s <= 0.0 {
                return Err(fail("disk rate must be positive"));
            }
            if tier.mem_total_kb == 0 {
                return Err(fail("mem_total_kb must be positive"));
            }
            if let Some(outlier) = &tier.outlier {
                if !(0.0..1.0).contains(&outlier.probability) {
                    return Err(fail("outlier probability must be in [0, 1)"));
                }
            }
        }
        if !(0.0..1.0).contains(&self.interference.amplitude) {
            return Err(ProfileError::Interference(
                "amplitude must be in [0, 1)".to_string(),
            ));
        }
        if !(0.0..24.0).contains(&self.interference.peak_hour) {
            return Err(ProfileError::Interference(
                "peak_hour must be in [0, 24)".to_string(),
            ));
        }
        for w in &self.interference.anomaly_windows {
            if w.start_hour >= w.end_hour {
                return Err(ProfileError::Interference(format!(
                    "anomaly window [{}, {}) is empty",
                    w.start_hour, w.end_hour
                )));
            }
            if !(w.severity > 0.0 && w.severity <= 1.0) {
                return Err(ProfileError::Interference(
                    "severity must be in (0, 1]".to_string(),
                ));
            }
        }
        if self.reuse_policy.max_idle_lifetime_ms == 0 {
            return Err(ProfileError::ReusePolicy(
                "max_idle_lifetime_ms must be positive".to_string(),
            ));
        }
        if self.reuse_policy.max_containers_per_vm == 0 {
            return Err(ProfileError::ReusePolicy(
                "max_containers_per_vm must be at least 1".to_string(),
            ));
        }
        if !(0.0..=1.0).contains(&self.reuse_policy.vm_recycle_probability) {
            return Err(ProfileError::ReusePolicy(
                "vm_recycle_probability must be in [0, 1]".to_string(),
            ));
        }
        if self.probe.unit_cost_us <= 0.0 || self.probe.disk_block_count == 0 {
            return Err(ProfileError::ReusePolicy(
                "probe settings must be positive".to_string(),
            ));
        }
        Ok(())
    }

    /// Ordered list of configured memory tiers, MB.
    pub fn memory_tiers(&self) -> Vec<u32> {
        self.tiers.iter().map(|t| t.tier_mb).collect()
    }

    pub fn tier(&self, tier_mb: u32) -> Option<&TierSpec> {
        self.tiers.iter().find(|t| t.tier_mb == tier_mb)
    }
}
