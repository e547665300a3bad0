//! Block-I/O throughput benchmark.
//!
//! Writes fixed-size blocks to tmp storage and reads them back, reporting
//! megabytes moved per second of metered time, the dd-style protocol.

use super::env::{ExecutionEnv, TmpStorageError};

/// 512 KB blocks.
pub const DEFAULT_BLOCK_BYTES: u64 = 512 * 1024;
/// Blocks written and read back by the standalone benchmark.
pub const DEFAULT_BLOCK_COUNT: u32 = 1000;
/// tmp path of the benchmark stream.
pub const BENCH_FILE: &str = "faasbench-io";

/// Run the benchmark and report throughput in MB/s (decimal megabytes).
pub fn measure_disk_throughput(
    env: &mut dyn ExecutionEnv,
    block_bytes: u64,
    block_count: u32,
) -> Result<f64, TmpStorageError> {
    let started_ms = env.elapsed_ms();
    for _ in 0..block_count {
        env.stream_write(BENCH_FILE, block_bytes)?;
    }
    let mut offset = 0u64;
    for _ in 0..block_count {
        let read = env.stream_read(BENCH_FILE, offset, block_bytes)?;
        offset += read;
    }
    let elapsed_s = (env.elapsed_ms() - started_ms) / 1000.0;
    let total_mb = (2 * u64::from(block_count) * block_bytes) as f64 / 1e6;
    if elapsed_s <= 0.0 {
        return Err(TmpStorageError::Unavailable(
            "disk benchmark consumed no metered time".to_string(),
        ));
    }
    Ok(total_mb / elapsed_s)
}
