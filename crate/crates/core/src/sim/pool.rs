//! VM and container pool of one simulated platform.
//!
//! The pool is owned by a single driver. Simultaneous requests are whatever
//! order the driver issues them in; a container acquired at time `t` is
//! unavailable to later acquisitions until its invocation's response time,
//! so logically-concurrent requests fan out across containers exactly like
//! a scaling burst.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use thiserror::Error;

use crate::profile::{PlatformProfile, TierSpec};
use crate::time::{VirtualTime, MILLIS_PER_HOUR};

/// A simulated execution VM.
#[derive(Debug, Clone)]
pub struct ExecutionVm {
    pub vm_id: String,
    pub boot_time: VirtualTime,
    pub cpu_model_id: u32,
    pub cpu_mhz: u32,
    pub mem_total_kb: u64,
    /// The tier whose memory mapping provisioned this VM; only containers of
    /// the same tier are hosted here.
    pub tier_mb: u32,
    pub cpu_user_ms: u64,
    pub cpu_system_ms: u64,
    pub containers: BTreeSet<u64>,
}

/// A tmp file inside a container: identity files are text, benchmark
/// streams are accounted by size only.
#[derive(Debug, Clone)]
pub enum TmpFile {
    Text(String),
    Blob { bytes: u64 },
}

/// A simulated function container.
#[derive(Debug, Clone)]
pub struct FunctionContainer {
    pub container_id: String,
    /// Key of the hosting VM.
    pub host_vm: u64,
    pub tier_mb: u32,
    pub created_at: VirtualTime,
    /// Response time of the latest invocation; doubles as busy-until. The
    /// container is idle (reusable, aging) once `now >= last_used`.
    pub last_used: VirtualTime,
    /// Ephemeral storage: lives exactly as long as the container.
    pub tmp_files: BTreeMap<String, TmpFile>,
    /// Function ids completed here, oldest first.
    pub prior_function_ids: Vec<String>,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("tier {tier_mb} MB is not configured for platform {platform}")]
    UnknownTier { tier_mb: u32, platform: String },
}

/// Lifetime counters, mostly for invariant checks and summaries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PoolStats {
    pub completed_invocations: u64,
    pub vms_provisioned: u64,
    pub containers_created: u64,
    pub live_vms: u64,
    pub live_containers: u64,
    /// Log entries of containers that have since been destroyed.
    pub retired_log_entries: u64,
}

/// All platform state: VMs, containers and the idle lists.
#[derive(Debug)]
pub struct PlatformPool {
    pub(crate) profile: PlatformProfile,
    pub(crate) vms: BTreeMap<u64, ExecutionVm>,
    pub(crate) containers: BTreeMap<u64, FunctionContainer>,
    /// Containers not currently executing, per tier. Entries whose
    /// `last_used` is in the future belong to logically-concurrent
    /// invocations and are skipped by the candidate filter.
    idle_by_tier: BTreeMap<u32, Vec<u64>>,
    next_vm_key: u64,
    next_container_key: u64,
    completed_invocations: u64,
    vms_provisioned: u64,
    containers_created: u64,
    retired_log_entries: u64,
}

impl PlatformPool {
    pub fn new(profile: PlatformProfile) -> Self {
        PlatformPool {
            profile,
            vms: BTreeMap::new(),
            containers: BTreeMap::new(),
            idle_by_tier: BTreeMap::new(),
            next_vm_key: 0,
            next_container_key: 0,
            completed_invocations: 0,
            vms_provisioned: 0,
            containers_created: 0,
            retired_log_entries: 0,
        }
    }

    pub fn profile(&self) -> &PlatformProfile {
        &self.profile
    }

    pub fn stats(&self) -> PoolStats {
        PoolStats {
            completed_invocations: self.completed_invocations,
            vms_provisioned: self.vms_provisioned,
            containers_created: self.containers_created,
            live_vms: self.vms.len() as u64,
            live_containers: self.containers.len() as u64,
            retired_log_entries: self.retired_log_entries,
        }
    }

    /// Total prior-log entries across live containers.
    pub fn live_log_entries(&self) -> u64 {
        self.containers
            .values()
            .map(|c| c.prior_function_ids.len() as u64)
            .sum()
    }

    pub fn vm(&self, key: u64) -> Option<&ExecutionVm> {
        self.vms.get(&key)
    }

    pub fn container(&self, key: u64) -> Option<&FunctionContainer> {
        self.containers.get(&key)
    }

    fn tier_spec(&self, tier_mb: u32) -> Result<&TierSpec, SimError> {
        self.profile.tier(tier_mb).ok_or_else(|| SimError::UnknownTier {
            tier_mb,
            platform: self.profile.name.clone(),
        })
    }

    /// Provision a fresh VM for a tier: CPU model sampled by prevalence,
    /// MemTotal from the tier's memory mapping (outlier entry with its
    /// configured probability), boot time = now.
    pub fn provision_vm<R: Rng>(
        &mut self,
        tier_mb: u32,
        now: VirtualTime,
        rng: &mut R,
    ) -> Result<u64, SimError> {
        let tier = self.tier_spec(tier_mb)?.clone();

        let draw: f64 = rng.random();
        let mut cumulative = 0.0;
        let mut chosen = self.profile.cpu_fleet.len() - 1;
        for (idx, entry) in self.profile.cpu_fleet.iter().enumerate() {
            cumulative += entry.prevalence;
            if draw < cumulative {
                chosen = idx;
                break;
            }
        }
        let fleet = &self.profile.cpu_fleet[chosen];

        let mem_total_kb = match &tier.outlier {
            Some(outlier) if rng.random::<f64>() < outlier.probability => outlier.mem_total_kb,
            _ => tier.mem_total_kb,
        };

        let vm_id = format!("{:016x}", rng.random::<u64>());
        let key = self.next_vm_key;
        self.next_vm_key += 1;
        self.vms_provisioned += 1;
        self.vms.insert(
            key,
            ExecutionVm {
                vm_id,
                boot_time: now,
                cpu_model_id: fleet.model_id,
                cpu_mhz: fleet.mhz,
                mem_total_kb,
                tier_mb,
                cpu_user_ms: 0,
                cpu_system_ms: 0,
                containers: BTreeSet::new(),
            },
        );
        Ok(key)
    }

    /// Hand out a container for an invocation arriving at `now`.
    ///
    /// The most recently used idle container of the tier is offered first.
    /// One reuse draw decides its fate: survival probability is
    /// `(1 - p)^ceil(idle hours)` with `p` the per-idle-hour recycle
    /// probability. A failed draw means the platform already recycled the
    /// container, so it is destroyed and a fresh one is created instead.
    pub fn acquire_container<R: Rng>(
        &mut self,
        tier_mb: u32,
        now: VirtualTime,
        rng: &mut R,
    ) -> Result<(u64, bool), SimError> {
        self.tier_spec(tier_mb)?;
        self.expire_idle(now);

        if let Some(candidate) = self.best_idle_candidate(tier_mb, now) {
            self.remove_from_idle(tier_mb, candidate);
            let idle_ms = now.since(self.containers[&candidate].last_used);
            let idle_hours = idle_ms.div_ceil(MILLIS_PER_HOUR);
            let survive =
                (1.0 - self.profile.reuse_policy.vm_recycle_probability).powi(idle_hours as i32);
            if rng.random_bool(survive.clamp(0.0, 1.0)) {
                return Ok((candidate, false));
            }
            self.destroy_container(candidate);
        }

        let key = self.create_container(tier_mb, now, rng)?;
        Ok((key, true))
    }

    /// Drop idle containers past the reuse policy's idle lifetime.
    pub fn expire_idle(&mut self, now: VirtualTime) {
        let lifetime = self.profile.reuse_policy.max_idle_lifetime_ms;
        let mut doomed: Vec<u64> = Vec::new();
        for keys in self.idle_by_tier.values() {
            for &key in keys {
                let container = &self.containers[&key];
                if container.last_used <= now && now.since(container.last_used) > lifetime {
                    doomed.push(key);
                }
            }
        }
        for key in doomed {
            let tier = self.containers[&key].tier_mb;
            self.remove_from_idle(tier, key);
            self.destroy_container(key);
        }
    }

    fn best_idle_candidate(&self, tier_mb: u32, now: VirtualTime) -> Option<u64> {
        self.idle_by_tier
            .get(&tier_mb)?
            .iter()
            .copied()
            .filter(|key| self.containers[key].last_used <= now)
            .max_by_key(|key| (self.containers[key].last_used, *key))
    }

    fn remove_from_idle(&mut self, tier_mb: u32, key: u64) {
        if let Some(list) = self.idle_by_tier.get_mut(&tier_mb) {
            list.retain(|&k| k != key);
        }
    }

    fn destroy_container(&mut self, key: u64) {
        let container = self.containers.remove(&key).expect("container exists");
        self.retired_log_entries += container.prior_function_ids.len() as u64;
        if let Some(vm) = self.vms.get_mut(&container.host_vm) {
            vm.containers.remove(&key);
            if vm.containers.is_empty() {
                self.vms.remove(&container.host_vm);
            }
        }
    }

    fn create_container<R: Rng>(
        &mut self,
        tier_mb: u32,
        now: VirtualTime,
        rng: &mut R,
    ) -> Result<u64, SimError> {
        let max = self.profile.reuse_policy.max_containers_per_vm as usize;
        let host = self
            .vms
            .iter()
            .find(|(_, vm)| vm.tier_mb == tier_mb && vm.containers.len() < max)
            .map(|(&key, _)| key);
        let host = match host {
            Some(key) => key,
            None => self.provision_vm(tier_mb, now, rng)?,
        };

        let container_id = format!("{:016x}", rng.random::<u64>());
        let key = self.next_container_key;
        self.next_container_key += 1;
        self.containers_created += 1;
        self.containers.insert(
            key,
            FunctionContainer {
                container_id,
                host_vm: host,
                tier_mb,
                created_at: now,
                last_used: now,
                tmp_files: BTreeMap::new(),
                prior_function_ids: Vec::new(),
            },
        );
        self.vms
            .get_mut(&host)
            .expect("host vm exists")
            .containers
            .insert(key);
        Ok(key)
    }

    /// Book a completed invocation back into the pool.
    pub(crate) fn complete_invocation(
        &mut self,
        container_key: u64,
        function_id: String,
        response_time: VirtualTime,
        work_ms: u64,
        lag_ms: u64,
    ) {
        let container = self
            .containers
            .get_mut(&container_key)
            .expect("container exists");
        container.prior_function_ids.push(function_id);
        container.last_used = response_time;
        let tier = container.tier_mb;
        let host = container.host_vm;
        self.idle_by_tier.entry(tier).or_default().push(container_key);
        let vm = self.vms.get_mut(&host).expect("host vm exists");
        vm.cpu_user_ms += work_ms;
        vm.cpu_system_ms += lag_ms;
        self.completed_invocations += 1;
    }
}
