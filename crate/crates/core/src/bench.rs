//! Benchmark harness comparing the cover-based and naive minimizers on
//! random cascades.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tracing::info;

use crate::generators::random_mealy;
use crate::machines::MealyMachine;
use crate::minimization::{minimize_tail, minimize_tail_naive, verify_replacement, Minimized, SolveOptions};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Proposed,
    Naive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: Method,
    pub n_states: usize,
    pub seed: u64,
    pub wall_ms: u64,
    pub result_states: Option<usize>,
    pub sat_calls: usize,
    pub skipped_encoding: bool,
    pub status: Status,
}

/// Head and tail of the benchmark instance for `seed`.
pub fn instance(head_states: usize, tail_states: usize, alpha: usize, seed: u64) -> (MealyMachine, MealyMachine) {
    let h = random_mealy(head_states, alpha, alpha, seed.wrapping_mul(2));
    let t = random_mealy(tail_states, alpha, alpha, seed.wrapping_mul(2).wrapping_add(1));
    (h, t)
}

/// Runs one method on one cascade. Timeouts become records; other
/// failures, including a result that is not a replacement, are errors.
pub fn run_method(
    method: Method,
    h: &MealyMachine,
    t: &MealyMachine,
    seed: u64,
    timeout: Option<Duration>,
    base: &SolveOptions,
) -> Result<BenchRecord, Error> {
    let start = Instant::now();
    let opts = SolveOptions {
        deadline: timeout.map(|d| start + d),
        ..base.clone()
    };
    let outcome = match method {
        Method::Proposed => minimize_tail(h, t, &opts),
        Method::Naive => minimize_tail_naive(h, t, &opts),
    };
    let wall_ms = start.elapsed().as_millis() as u64;
    let record = |found: Option<&Minimized>, wall_ms| BenchRecord {
        method,
        n_states: t.num_states(),
        seed,
        wall_ms,
        result_states: found.map(|f| f.machine.num_states()),
        sat_calls: found.map_or(0, |f| f.sat_calls),
        skipped_encoding: found.is_some_and(|f| f.skipped_encoding),
        status: if found.is_some() { Status::Ok } else { Status::Timeout },
    };
    match outcome {
        Ok(found) => {
            if !verify_replacement(h, t, &found.machine)? {
                return Err(Error::Disagreement(format!("{method:?} result for seed {seed} is not a replacement")));
            }
            Ok(record(Some(&found), wall_ms))
        }
        Err(Error::Timeout { .. }) => {
            let limit = timeout.map_or(wall_ms, |d| d.as_millis() as u64);
            Ok(record(None, limit))
        }
        Err(e) => Err(e),
    }
}

/// Both methods on `random_mealy` heads and tails of every size and seed.
/// Rows come in (size, seed, method) order; completed pairs must agree.
pub fn bench_compare(
    sizes: &[usize],
    seeds: &[u64],
    alpha: usize,
    timeout: Duration,
    opts: &SolveOptions,
) -> Result<Vec<BenchRecord>, Error> {
    let mut rows = Vec::new();
    for &size in sizes {
        for &seed in seeds {
            let (h, t) = instance(size, size, alpha, seed);
            let proposed = run_method(Method::Proposed, &h, &t, seed, Some(timeout), opts)?;
            let naive = run_method(Method::Naive, &h, &t, seed, Some(timeout), opts)?;
            info!(size, seed, proposed = proposed.wall_ms, naive = naive.wall_ms, "instance done");
            if let (Some(a), Some(b)) = (proposed.result_states, naive.result_states) {
                if a != b {
                    return Err(Error::Disagreement(format!(
                        "size {size}, seed {seed}: proposed found {a} states, naive {b}"
                    )));
                }
            }
            rows.push(proposed);
            rows.push(naive);
        }
    }
    Ok(rows)
}

/// The cover-based method on `count` cascades whose head and tail sizes
/// are drawn uniformly from `min..=max`. Instance `i` uses seed
/// `seed0 + i`.
pub fn bench_bimodal(
    count: usize,
    min: usize,
    max: usize,
    seed0: u64,
    alpha: usize,
    timeout: Option<Duration>,
    opts: &SolveOptions,
) -> Result<Vec<BenchRecord>, Error> {
    assert!(1 <= min && min <= max, "size range must be nonempty");
    let mut rows = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let seed = seed0.wrapping_add(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (hs, ts) = (rng.gen_range(min..=max), rng.gen_range(min..=max));
        let (h, t) = instance(hs, ts, alpha, seed);
        let row = run_method(Method::Proposed, &h, &t, seed, timeout, opts)?;
        info!(seed, tail = ts, skipped = row.skipped_encoding, ms = row.wall_ms, "instance done");
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRecord], out: W) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    if rows.is_empty() {
        writer.write_record([
            "method",
            "n_states",
            "seed",
            "wall_ms",
            "result_states",
            "sat_calls",
            "skipped_encoding",
            "status",
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<BenchRecord>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}
