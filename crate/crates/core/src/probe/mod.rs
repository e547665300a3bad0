//! The in-function measurement payload.
//!
//! One probe run gathers everything a single invocation can observe about
//! its execution environment: system attributes from the procfs view,
//! container identity from tmp storage, the trial-division CPU score and
//! the block-I/O throughput, then emits a flat [`ProbeReport`]. The probe
//! is written against [`env::ExecutionEnv`] and never touches the host OS.

pub mod disk;
pub mod env;
pub mod identity;
pub mod primes;
pub mod sysinfo;

use serde::{Deserialize, Serialize};

use crate::fingerprint;
use crate::time::VirtualTime;

pub use env::{ExecutionEnv, TmpStorageError};
pub use identity::{classify_start, identify_container, ContainerIdentity, StartKind};
pub use primes::{count_primes, count_primes_with_budget, is_prime, PrimeScore, PRIME_BUDGET_MS};
pub use sysinfo::{collect_system_info, CpuTimes, SystemInfo};

/// Everything measured inside one function execution. Serialized as one
/// flat JSON object per invocation; unavailable fields are explicit nulls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub function_id: String,
    pub container_uid: String,
    pub vm_id: Option<String>,
    pub prior_function_ids: Vec<String>,
    pub boot_time: Option<VirtualTime>,
    pub cpu_model_id: Option<u32>,
    pub cpu_mhz: Option<f64>,
    pub cpu_times: Option<CpuTimes>,
    pub mem_total_kb: Option<u64>,
    pub tier_mb: u32,
    pub prime_count: u64,
    pub numbers_checked: u64,
    pub disk_mb_per_s: Option<f64>,
    pub function_runtime_ms: f64,
}

impl ProbeReport {
    /// The probe's own cold/warm classification: an empty prior log means
    /// this invocation was the first in its container.
    pub fn classified_cold(&self) -> bool {
        self.prior_function_ids.is_empty()
    }
}

/// Run the full measurement payload against an execution environment.
///
/// Sub-failures (hidden files, broken tmp storage) degrade individual
/// fields to unavailable; a record is always produced.
pub fn run_probe(env: &mut dyn ExecutionEnv) -> ProbeReport {
    let function_id = format!("fn-{}", env.fresh_id());

    let info = collect_system_info(env).unwrap_or_default();

    let vm_id = env
        .read_proc("/proc/self/cgroup")
        .and_then(|text| fingerprint::vm_id_from_cgroup(&text))
        .or_else(|| {
            env.read_proc("/proc/machineid")
                .map(|text| text.trim().to_string())
                .filter(|id| !id.is_empty())
        });

    let identity = identify_container(env, &function_id, info.boot_time);

    let prime_score = count_primes(env);

    let blocks = env.disk_bench_blocks();
    let disk_mb_per_s = measure_disk(env, blocks);

    ProbeReport {
        function_id,
        container_uid: identity.container_uid,
        vm_id,
        prior_function_ids: identity.prior_function_ids,
        boot_time: info.boot_time,
        cpu_model_id: info.cpu_model_id,
        cpu_mhz: info.cpu_mhz,
        cpu_times: info.cpu_times,
        mem_total_kb: info.mem_total_kb,
        tier_mb: env.tier_mb(),
        prime_count: prime_score.primes_found,
        numbers_checked: prime_score.numbers_checked,
        disk_mb_per_s,
        function_runtime_ms: env.elapsed_ms(),
    }
}

fn measure_disk(env: &mut dyn ExecutionEnv, blocks: u32) -> Option<f64> {
    disk::measure_disk_throughput(env, disk::DEFAULT_BLOCK_BYTES, blocks).ok()
}
