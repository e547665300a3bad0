//! Platform fingerprinting: VM identity resolution, CPU model decoding and
//! topology aggregation over a recorded dataset.

pub mod cpuid;
pub mod topology;

pub use cpuid::{
    decode_cpu_model, model_id_hex, CpuModelEntry, CpuidTable, CpuidTableError, DecodedCpu,
};
pub use topology::{build_topology, build_topology_with_table, TopologyError, TopologyReport};

use crate::probe::ProbeReport;
use crate::profile::IdStrategy;

/// Result of trying to pin a report to an execution VM.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VmIdentity {
    Established(String),
    Unavailable { reason: String },
}

/// Extract the VM token from `/proc/self/cgroup` text: the characters after
/// `sandbox-root-`.
pub fn vm_id_from_cgroup(text: &str) -> Option<String> {
    const MARKER: &str = "sandbox-root-";
    let start = text.find(MARKER)? + MARKER.len();
    let token: String = text[start..]
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect();
    if token.is_empty() {
        None
    } else {
        Some(token)
    }
}

/// Resolve the VM identity a report established, given the platform's
/// identification strategy.
pub fn resolve_vm_id(report: &ProbeReport, strategy: IdStrategy) -> VmIdentity {
    match strategy {
        IdStrategy::CgroupSandbox => match &report.vm_id {
            Some(id) => VmIdentity::Established(id.clone()),
            None => VmIdentity::Unavailable {
                reason: "no sandbox-root token was observed".to_string(),
            },
        },
        IdStrategy::MachineId => match &report.vm_id {
            Some(id) => VmIdentity::Established(id.clone()),
            None => VmIdentity::Unavailable {
                reason: "no machine id was observed".to_string(),
            },
        },
        IdStrategy::ContainerUidOnly => VmIdentity::Unavailable {
            reason: "platform does not expose a VM identity; use container UIDs".to_string(),
        },
    }
}
