//! Per-tier summary statistics over a dataset.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::observer::InvocationRecord;

use super::AnalysisError;

/// Metrics a tier can be summarized on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    ColdStartMs,
    PrimeCount,
    DiskMbPerS,
    TotalRuntimeMs,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::ColdStartMs => "cold_start_ms",
            Metric::PrimeCount => "prime_count",
            Metric::DiskMbPerS => "disk_mb_per_s",
            Metric::TotalRuntimeMs => "total_runtime_ms",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cold_start_ms" => Ok(Metric::ColdStartMs),
            "prime_count" => Ok(Metric::PrimeCount),
            "disk_mb_per_s" => Ok(Metric::DiskMbPerS),
            "total_runtime_ms" => Ok(Metric::TotalRuntimeMs),
            other => Err(AnalysisError::UnknownMetric(other.to_string())),
        }
    }
}

/// Summary of one metric over one (platform, tier) partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierStats {
    pub platform: String,
    pub tier_mb: u32,
    pub metric: Metric,
    pub count: u64,
    pub mean: f64,
    pub median: f64,
    pub p95: f64,
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
}

/// Cold-start statistics plus warnings for tiers that never went cold.
#[derive(Debug, Clone, PartialEq)]
pub struct ColdStartStats {
    pub stats: Vec<TierStats>,
    pub warnings: Vec<String>,
}

/// Nearest-rank percentile of an ascending-sorted slice.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.max(1) - 1]
}

fn summarize(platform: &str, tier_mb: u32, metric: Metric, mut values: Vec<f64>) -> TierStats {
    // Sorting first makes every statistic independent of record order.
    values.sort_by(|a, b| a.partial_cmp(b).expect("metric values are finite"));
    let count = values.len() as u64;
    let mean = values.iter().sum::<f64>() / count as f64;
    let stddev = if count > 1 {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (count as f64 - 1.0);
        var.sqrt()
    } else {
        0.0
    };
    TierStats {
        platform: platform.to_string(),
        tier_mb,
        metric,
        count,
        mean,
        median: percentile(&values, 50.0),
        p95: percentile(&values, 95.0),
        stddev,
        min: values[0],
        max: values[values.len() - 1],
    }
}

fn group_values<F>(
    records: &[InvocationRecord],
    select: F,
) -> BTreeMap<(String, u32), Vec<f64>>
where
    F: Fn(&InvocationRecord) -> Option<f64>,
{
    let mut groups: BTreeMap<(String, u32), Vec<f64>> = BTreeMap::new();
    for record in records {
        if let Some(value) = select(record) {
            groups
                .entry((record.platform.clone(), record.tier_mb))
                .or_default()
                .push(value);
        }
    }
    groups
}

/// Cold-start latency statistics: start lag of cold records only, per
/// (platform, tier). Tiers without a single cold record are omitted with a
/// warning.
pub fn cold_start_stats(records: &[InvocationRecord]) -> Result<ColdStartStats, AnalysisError> {
    if records.is_empty() {
        return Err(AnalysisError::EmptyDataset);
    }
    let mut seen: BTreeMap<(String, u32), bool> = BTreeMap::new();
    for record in records {
        let entry = seen
            .entry((record.platform.clone(), record.tier_mb))
            .or_insert(false);
        *entry = *entry || record.is_cold;
    }
    let groups = group_values(records, |r| r.is_cold.then_some(r.start_lag_ms));
    let stats = groups
        .into_iter()
        .map(|((platform, tier), values)| summarize(&platform, tier, Metric::ColdStartMs, values))
        .collect();
    let warnings = seen
        .into_iter()
        .filter(|(_, any_cold)| !any_cold)
        .map(|((platform, tier), _)| {
            format!("{platform} tier {tier}: no cold records, tier omitted")
        })
        .collect();
    Ok(ColdStartStats { stats, warnings })
}

/// Performance statistics over all records (cold and warm) for one metric.
pub fn performance_stats(
    records: &[InvocationRecord],
    metric: Metric,
) -> Result<Vec<TierStats>, AnalysisError> {
    if records.is_empty() {
        return Err(AnalysisError::EmptyDataset);
    }
    if metric == Metric::ColdStartMs {
        return Err(AnalysisError::UnknownMetric(
            "cold_start_ms is computed by cold_start_stats".to_string(),
        ));
    }
    let select = move |r: &InvocationRecord| match metric {
        Metric::PrimeCount => Some(r.report.prime_count as f64),
        Metric::DiskMbPerS => r.report.disk_mb_per_s,
        Metric::TotalRuntimeMs => Some(r.total_runtime_ms),
        Metric::ColdStartMs => None,
    };
    Ok(group_values(records, select)
        .into_iter()
        .map(|((platform, tier), values)| summarize(&platform, tier, metric, values))
        .collect())
}
