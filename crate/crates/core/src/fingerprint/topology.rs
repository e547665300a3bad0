//! Topology aggregation: distinct VMs/containers, CPU prevalence and the
//! observed function-memory to VM-memory mapping, from a single-platform
//! dataset.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::cpuid::CpuidTable;
use crate::observer::InvocationRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpuPrevalence {
    pub model_name: String,
    pub percent: f64,
}

/// Aggregate fingerprint of one platform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub platform: String,
    pub total_invocations: u64,
    /// `None` when the platform never exposed a VM identity; containers are
    /// the counted entity in that case.
    pub unique_vms: Option<u64>,
    pub unique_containers: u64,
    /// Percent of counted entities per decoded CPU model, summing to 100.
    pub cpu_prevalence: Vec<CpuPrevalence>,
    /// Function memory tier -> set of VM MemTotal values observed, kB.
    pub memory_map_observed: BTreeMap<u32, Vec<u64>>,
    /// Which entity the counts refer to: `vm-id` or `container-uid`.
    pub identity_strategy_used: String,
}

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset mixes platforms: {0:?}")]
    MixedPlatforms(Vec<String>),
}

/// Build the topology report using the shipped CPUID table.
pub fn build_topology(records: &[InvocationRecord]) -> Result<TopologyReport, TopologyError> {
    build_topology_with_table(records, CpuidTable::shipped())
}

/// Build the topology report against an explicit CPUID table.
///
/// Counting is set-based, so the result is independent of record order.
/// Prevalence denominators are distinct entities (VM provisions when VM
/// identity is available, containers otherwise), not invocations.
pub fn build_topology_with_table(
    records: &[InvocationRecord],
    table: &CpuidTable,
) -> Result<TopologyReport, TopologyError> {
    if records.is_empty() {
        return Err(TopologyError::EmptyDataset);
    }
    let platforms: BTreeSet<&str> = records.iter().map(|r| r.platform.as_str()).collect();
    if platforms.len() > 1 {
        return Err(TopologyError::MixedPlatforms(
            platforms.into_iter().map(str::to_string).collect(),
        ));
    }

    let vm_ids: BTreeSet<&str> = records
        .iter()
        .filter_map(|r| r.report.vm_id.as_deref())
        .collect();
    let containers: BTreeSet<&str> = records
        .iter()
        .map(|r| r.report.container_uid.as_str())
        .collect();
    let vm_identity_available = !vm_ids.is_empty();

    // Entity -> CPU keys seen for it. A well-behaved dataset has one key per
    // entity; ties resolve to the smallest for order independence.
    let mut entity_cpus: BTreeMap<&str, BTreeSet<(u32, u32)>> = BTreeMap::new();
    for record in records {
        let entity = if vm_identity_available {
            match record.report.vm_id.as_deref() {
                Some(id) => id,
                None => continue,
            }
        } else {
            record.report.container_uid.as_str()
        };
        if let (Some(model), Some(mhz)) = (record.report.cpu_model_id, record.report.cpu_mhz) {
            entity_cpus
                .entry(entity)
                .or_default()
                .insert((model, mhz.round() as u32));
        } else {
            entity_cpus.entry(entity).or_default();
        }
    }

    let mut name_counts: BTreeMap<String, u64> = BTreeMap::new();
    for cpus in entity_cpus.values() {
        let label = match cpus.iter().next() {
            Some(&(model, mhz)) => table.decode(model, mhz).label(),
            None => "Unknown".to_string(),
        };
        *name_counts.entry(label).or_insert(0) += 1;
    }
    let denominator = entity_cpus.len().max(1) as f64;
    let mut cpu_prevalence: Vec<CpuPrevalence> = name_counts
        .into_iter()
        .map(|(model_name, count)| CpuPrevalence {
            model_name,
            percent: count as f64 / denominator * 100.0,
        })
        .collect();
    cpu_prevalence.sort_by(|a, b| {
        b.percent
            .partial_cmp(&a.percent)
            .unwrap()
            .then_with(|| a.model_name.cmp(&b.model_name))
    });

    let mut memory_map: BTreeMap<u32, BTreeSet<u64>> = BTreeMap::new();
    for record in records {
        if let Some(kb) = record.report.mem_total_kb {
            memory_map.entry(record.tier_mb).or_default().insert(kb);
        }
    }

    Ok(TopologyReport {
        platform: platforms.into_iter().next().unwrap().to_string(),
        total_invocations: records.len() as u64,
        unique_vms: vm_identity_available.then_some(vm_ids.len() as u64),
        unique_containers: containers.len() as u64,
        cpu_prevalence,
        memory_map_observed: memory_map
            .into_iter()
            .map(|(tier, set)| (tier, set.into_iter().collect()))
            .collect(),
        identity_strategy_used: if vm_identity_available {
            "vm-id".to_string()
        } else {
            "container-uid".to_string()
        },
    })
}

impl fmt::Display for TopologyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "platform: {}", self.platform)?;
        writeln!(f, "total invocations: {}", self.total_invocations)?;
        match self.unique_vms {
            Some(count) => writeln!(f, "unique VMs: {count}")?,
            None => writeln!(f, "unique VMs: not established")?,
        }
        writeln!(f, "unique containers: {}", self.unique_containers)?;
        writeln!(f, "counted entity: {}", self.identity_strategy_used)?;
        writeln!(f, "cpu prevalence:")?;
        for entry in &self.cpu_prevalence {
            writeln!(f, "  {:>7.3}%  {}", entry.percent, entry.model_name)?;
        }
        writeln!(f, "memory map observed (tier MB -> VM MemTotal kB):")?;
        for (tier, values) in &self.memory_map_observed {
            let rendered: Vec<String> = values.iter().map(u64::to_string).collect();
            writeln!(f, "  {:>5} -> {}", tier, rendered.join(", "))?;
        }
        Ok(())
    }
}
