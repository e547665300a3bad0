//! The execution-environment interface the probe is written against.
//!
//! The probe never touches the host OS. Everything it observes comes
//! through this trait: pseudo-procfs text, container-scoped tmp storage,
//! a virtual clock and a work meter. The simulator provides the only
//! shipped implementation; an adapter reading genuine procfs is a
//! documented extension point.

use thiserror::Error;

use crate::time::VirtualTime;

#[derive(Debug, Error)]
pub enum TmpStorageError {
    #[error("tmp storage unavailable: {0}")]
    Unavailable(String),
    #[error("tmp file `{0}` is a byte blob, not text")]
    NotText(String),
    #[error("tmp file `{0}` is a text file, not a byte stream")]
    NotStream(String),
}

pub trait ExecutionEnv {
    /// Read a pseudo-procfs file. `None` when the platform hides it.
    fn read_proc(&mut self, path: &str) -> Option<String>;

    /// The function's memory allocation, MB.
    fn tier_mb(&self) -> u32;

    /// Current virtual time: invocation start plus metered work so far.
    fn now(&self) -> VirtualTime;

    /// Virtual milliseconds of work metered against this invocation so far.
    fn elapsed_ms(&self) -> f64;

    /// Cost in virtual milliseconds of one trial-division inner-loop
    /// iteration. Constant for the duration of one invocation.
    fn iteration_cost_ms(&self) -> f64;

    /// Charge trial-division inner-loop iterations to the work meter.
    fn charge_iterations(&mut self, count: u64);

    /// Read a container-scoped tmp text file. `Ok(None)` when absent.
    fn tmp_read(&mut self, name: &str) -> Result<Option<String>, TmpStorageError>;

    /// Write (create or replace) a container-scoped tmp text file.
    fn tmp_write(&mut self, name: &str, text: &str) -> Result<(), TmpStorageError>;

    /// Append `bytes` to a tmp byte stream, metered against the disk rate.
    fn stream_write(&mut self, name: &str, bytes: u64) -> Result<(), TmpStorageError>;

    /// Read up to `bytes` back from a tmp byte stream starting at `offset`,
    /// metered at the same rate. Returns the bytes actually available.
    fn stream_read(&mut self, name: &str, offset: u64, bytes: u64)
        -> Result<u64, TmpStorageError>;

    /// Mint a fresh opaque identifier from the environment's seeded RNG.
    fn fresh_id(&mut self) -> String;

    /// Number of blocks the disk benchmark should move. Platform deployments
    /// shrink this so an invocation stays well inside the observer cadence.
    fn disk_bench_blocks(&self) -> u32 {
        super::disk::DEFAULT_BLOCK_COUNT
    }
}
