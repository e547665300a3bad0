//! Trial-division CPU benchmark.
//!
//! Checks 2, 3, 4, ... one-by-one for primality until a fixed virtual
//! budget is exhausted. Primality is decided the laborious way: divide by
//! every candidate from 2 up to the square root, bailing at the first
//! divisor. The work meter charges one unit per divisibility test, so the
//! score measures how many inner-loop iterations the platform's CPU share
//! let the function execute.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::env::ExecutionEnv;

/// Virtual budget of the benchmark, milliseconds.
pub const PRIME_BUDGET_MS: f64 = 1000.0;

/// Result of one benchmark run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimeScore {
    /// How many candidates (2, 3, 4, ...) were tested.
    pub numbers_checked: u64,
    pub primes_found: u64,
    /// Inner-loop iterations charged to the work meter.
    pub iterations: u64,
    pub budget_ms: f64,
}

/// Exact integer square root.
fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Trial division: returns primality and the number of divisibility tests
/// performed. Candidates run from 2 while `a <= sqrt(n)`; the first divisor
/// proves compositeness. 1 is not prime.
pub fn trial_division(n: u64) -> (bool, u64) {
    if n < 2 {
        return (false, 0);
    }
    let limit = isqrt(n);
    let mut a = 2u64;
    let mut iterations = 0u64;
    while a <= limit {
        iterations += 1;
        if n.is_multiple_of(a) {
            return (false, iterations);
        }
        a += 1;
    }
    (true, iterations)
}

pub fn is_prime(n: u64) -> bool {
    trial_division(n).0
}

/// Cumulative work table: `cum_iters[i]` is the total inner-loop iterations
/// spent checking 2..=(i+2), `cum_primes[i]` the primes among them. Grown on
/// demand and shared process-wide; candidate costs never change.
struct WorkTable {
    cum_iters: Vec<u64>,
    cum_primes: Vec<u64>,
}

impl WorkTable {
    fn new() -> Self {
        WorkTable {
            cum_iters: Vec::new(),
            cum_primes: Vec::new(),
        }
    }

    fn grow_past(&mut self, iterations: u64) {
        while self.cum_iters.last().is_none_or(|&c| c < iterations) {
            let n = self.cum_iters.len() as u64 + 2;
            let (prime, iters) = trial_division(n);
            let prev_iters = self.cum_iters.last().copied().unwrap_or(0);
            let prev_primes = self.cum_primes.last().copied().unwrap_or(0);
            self.cum_iters.push(prev_iters + iters);
            self.cum_primes.push(prev_primes + u64::from(prime));
        }
    }
}

static WORK_TABLE: Mutex<Option<WorkTable>> = Mutex::new(None);

/// Run the benchmark with the default 1000 ms budget.
pub fn count_primes(env: &mut dyn ExecutionEnv) -> PrimeScore {
    count_primes_with_budget(env, PRIME_BUDGET_MS)
}

/// Run the benchmark with an explicit budget.
///
/// A candidate is tested when the work metered so far is still below the
/// budget, so the final candidate may overshoot it by its own divisions.
/// The scan is resolved against a shared cumulative-work table instead of
/// re-dividing millions of integers per invocation; the table is built from
/// [`trial_division`] and yields a candidate-for-candidate identical result.
pub fn count_primes_with_budget(env: &mut dyn ExecutionEnv, budget_ms: f64) -> PrimeScore {
    let cost = env.iteration_cost_ms();
    assert!(cost > 0.0, "iteration cost must be positive");
    if budget_ms <= 0.0 {
        return PrimeScore {
            numbers_checked: 0,
            primes_found: 0,
            iterations: 0,
            budget_ms,
        };
    }

    // Candidate n is tested iff cum_iters(n - 1) * cost < budget, i.e.
    // cum_iters(n - 1) < threshold.
    let threshold = budget_ms / cost;

    let mut guard = WORK_TABLE.lock().expect("work table lock");
    let table = guard.get_or_insert_with(WorkTable::new);
    // Ceiling the threshold bounds the growth; the partition point below
    // works with any table that extends past it.
    table.grow_past(threshold.min(1e16) as u64 + 1);

    // Index i in the table corresponds to candidate n = i + 2, and
    // cum_iters[i] is the work after finishing n. Candidate 2 is always
    // tested (work before it is zero); candidate i + 3 is tested iff
    // cum_iters[i] < threshold. The first index at or past the threshold
    // is therefore the index of the last tested candidate.
    let cut = table
        .cum_iters
        .partition_point(|&c| (c as f64) < threshold);
    let numbers_checked = cut as u64 + 1;
    let primes_found = table.cum_primes[cut];
    let iterations = table.cum_iters[cut];
    drop(guard);

    env.charge_iterations(iterations);
    PrimeScore {
        numbers_checked,
        primes_found,
        iterations,
        budget_ms,
    }
}
