//! The simulator-backed execution environment handed to the probe.
//!
//! Work is metered, never performed: a trial-division iteration costs
//! `unit_cost * multiplier / cpu_share` virtual time and benchmark bytes
//! cost `multiplier / disk_rate`, so the time-sliced CPU share and the
//! current interference level shape every score the probe produces.

use rand::Rng;

use crate::probe::env::{ExecutionEnv, TmpStorageError};
use crate::profile::{PlatformProfile, TierSpec};
use crate::time::VirtualTime;

use super::pool::{ExecutionVm, FunctionContainer, TmpFile};
use super::procfs::render_file;

pub struct SimEnvironment<'a, R: Rng> {
    profile: &'a PlatformProfile,
    tier: &'a TierSpec,
    vm: &'a ExecutionVm,
    container: &'a mut FunctionContainer,
    rng: &'a mut R,
    /// Virtual time at probe entry (request time plus any cold-start lag).
    start: VirtualTime,
    /// Interference multiplier frozen at request time.
    multiplier: f64,
    elapsed_ms: f64,
}

impl<'a, R: Rng> SimEnvironment<'a, R> {
    pub fn new(
        profile: &'a PlatformProfile,
        tier: &'a TierSpec,
        vm: &'a ExecutionVm,
        container: &'a mut FunctionContainer,
        start: VirtualTime,
        multiplier: f64,
        rng: &'a mut R,
    ) -> Self {
        SimEnvironment {
            profile,
            tier,
            vm,
            container,
            rng,
            start,
            multiplier,
            elapsed_ms: 0.0,
        }
    }

    fn charge_bytes(&mut self, bytes: u64) {
        // disk_rate is MB/s, i.e. 1000 bytes per virtual ms at rate 1.0.
        self.elapsed_ms += bytes as f64 * self.multiplier / (self.tier.disk_rate_mb_s * 1000.0);
    }
}

impl<R: Rng> ExecutionEnv for SimEnvironment<'_, R> {
    fn read_proc(&mut self, path: &str) -> Option<String> {
        render_file(path, self.vm, self.container, self.profile, self.now())
    }

    fn tier_mb(&self) -> u32 {
        self.tier.tier_mb
    }

    fn now(&self) -> VirtualTime {
        self.start + self.elapsed_ms.round() as u64
    }

    fn elapsed_ms(&self) -> f64 {
        self.elapsed_ms
    }

    fn iteration_cost_ms(&self) -> f64 {
        self.profile.probe.unit_cost_us / 1000.0 * self.multiplier / self.tier.cpu_share
    }

    fn charge_iterations(&mut self, count: u64) {
        self.elapsed_ms += count as f64 * self.iteration_cost_ms();
    }

    fn tmp_read(&mut self, name: &str) -> Result<Option<String>, TmpStorageError> {
        match self.container.tmp_files.get(name) {
            None => Ok(None),
            Some(TmpFile::Text(text)) => Ok(Some(text.clone())),
            Some(TmpFile::Blob { .. }) => Err(TmpStorageError::NotText(name.to_string())),
        }
    }

    fn tmp_write(&mut self, name: &str, text: &str) -> Result<(), TmpStorageError> {
        self.container
            .tmp_files
            .insert(name.to_string(), TmpFile::Text(text.to_string()));
        Ok(())
    }

    fn stream_write(&mut self, name: &str, bytes: u64) -> Result<(), TmpStorageError> {
        match self
            .container
            .tmp_files
            .entry(name.to_string())
            .or_insert(TmpFile::Blob { bytes: 0 })
        {
            TmpFile::Blob { bytes: size } => *size += bytes,
            TmpFile::Text(_) => return Err(TmpStorageError::NotStream(name.to_string())),
        }
        self.charge_bytes(bytes);
        Ok(())
    }

    fn stream_read(
        &mut self,
        name: &str,
        offset: u64,
        bytes: u64,
    ) -> Result<u64, TmpStorageError> {
        let available = match self.container.tmp_files.get(name) {
            Some(TmpFile::Blob { bytes: size }) => size.saturating_sub(offset).min(bytes),
            Some(TmpFile::Text(_)) => return Err(TmpStorageError::NotStream(name.to_string())),
            None => 0,
        };
        self.charge_bytes(available);
        Ok(available)
    }

    fn fresh_id(&mut self) -> String {
        format!("{:016x}", self.rng.random::<u64>())
    }

    fn disk_bench_blocks(&self) -> u32 {
        self.profile.probe.disk_block_count
    }
}
