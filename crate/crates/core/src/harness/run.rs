use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{FastPathSummary, FirstOccurrence, HarnessError, JobEcho, RangeJob, ReportRow, VerificationReport};
use crate::arith::{is_prime_u64, Natural};
use crate::egyptian::{min_class_capped, EgyptianError};

/// Execution knobs that do not change the result.
#[derive(Default)]
pub struct RunOptions<'a> {
    /// Worker threads; `0` uses the rayon default.
    pub threads: usize,
    /// Saved after every batch; resumed from when present.
    pub checkpoint: Option<PathBuf>,
    /// Stop with [`HarnessError::Interrupted`] once this many chunks are merged.
    pub stop_after_chunks: Option<u64>,
    /// Called with `(chunks_done, chunks_total)` after each batch.
    pub progress: Option<&'a (dyn Fn(u64, u64) + Sync)>,
}

/// Running totals, merged chunk by chunk in range order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
struct Aggregate {
    counts: BTreeMap<u32, u64>,
    records: Vec<FirstOccurrence>,
    exceptions: Vec<u64>,
    fast_path: u64,
    /// Keyed by identity-covered residue.
    identity_fast_path: BTreeMap<u64, u64>,
    examined: u64,
    rows: Vec<ReportRow>,
}

impl Aggregate {
    fn merge(&mut self, chunk: Aggregate) {
        for (class, count) in chunk.counts {
            *self.counts.entry(class).or_default() += count;
        }
        // A new overall record is necessarily a record within its chunk.
        for r in chunk.records {
            if self.records.last().is_none_or(|last| r.class > last.class) {
                self.records.push(r);
            }
        }
        self.exceptions.extend(chunk.exceptions);
        self.fast_path += chunk.fast_path;
        for (residue, count) in chunk.identity_fast_path {
            *self.identity_fast_path.entry(residue).or_default() += count;
        }
        self.examined += chunk.examined;
        self.rows.extend(chunk.rows);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub fingerprint: String,
    /// Chunks `0..chunks_done` are merged.
    pub chunks_done: u64,
    /// First `n` not yet covered.
    pub merged_upto: u64,
    partial: Aggregate,
}

impl Checkpoint {
    fn load(path: &Path, fingerprint: &str) -> Result<Option<Self>, HarnessError> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(HarnessError::io(path, e)),
        };
        let cp: Checkpoint =
            serde_json::from_str(&text).map_err(|e| HarnessError::Checkpoint(format!("{}: {e}", path.display())))?;
        if cp.fingerprint != fingerprint {
            return Err(HarnessError::FingerprintMismatch {
                expected: fingerprint.to_string(),
                found: cp.fingerprint,
            });
        }
        Ok(Some(cp))
    }

    fn save(&self, path: &Path) -> Result<(), HarnessError> {
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string(self).expect("checkpoint serializes");
        std::fs::write(&tmp, text).map_err(|e| HarnessError::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
    }
}

fn process_chunk(job: &RangeJob, lo: u64, hi: u64) -> Result<Aggregate, HarnessError> {
    let mut agg = Aggregate::default();
    let mut best = 0u32;
    for n in lo..hi {
        let prime = is_prime_u64(n);
        if job.primes_only && !prime {
            continue;
        }
        agg.examined += 1;
        if prime {
            if let Some(skip) = &job.sieve_skip {
                let r = n % skip.excepted.modulus;
                if skip.removals.iter().any(|rm| rm.residue == r) {
                    *agg.identity_fast_path.entry(r).or_default() += 1;
                    continue;
                }
                if !skip.excepted.contains_residue(r) {
                    agg.fast_path += 1;
                    continue;
                }
            }
        }
        match min_class_capped(&Natural::from(n), job.class_cap.0) {
            Ok((class, dec)) => {
                *agg.counts.entry(class.0).or_default() += 1;
                if class.0 > best {
                    best = class.0;
                    agg.records.push(FirstOccurrence { class: class.0, n });
                }
                agg.rows.push(ReportRow {
                    n,
                    is_prime: prime,
                    min_class: i64::from(class.0),
                    denominators: dec.denominators().iter().map(|d| d.to_string()).collect(),
                });
            }
            Err(EgyptianError::ClassCapExceeded { .. }) => {
                agg.exceptions.push(n);
                agg.rows.push(ReportRow {
                    n,
                    is_prime: prime,
                    min_class: -1,
                    denominators: Vec::new(),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(agg)
}

fn finish(job: &RangeJob, agg: Aggregate, chunks_done: u64, started: Instant) -> VerificationReport {
    let fast_path = job.sieve_skip.as_ref().map(|skip| FastPathSummary {
        class_bound: skip.class_bound.0,
        count: agg.fast_path,
        identity_covered: skip
            .removals
            .iter()
            .map(|rm| (rm.residue, rm.class.0, agg.identity_fast_path.get(&rm.residue).copied().unwrap_or(0)))
            .collect(),
    });
    VerificationReport {
        job: JobEcho::from(job),
        counts: VerificationReport::counts_from(&agg.counts),
        first_occurrences: agg.records,
        exceptions: agg.exceptions,
        fast_path,
        examined: agg.examined,
        elapsed_ms: started.elapsed().as_millis() as u64,
        chunks_done,
        rows: agg.rows,
    }
}

/// Runs `job` with default options.
pub fn verify_range(job: &RangeJob) -> Result<VerificationReport, HarnessError> {
    verify_range_with(job, &RunOptions::default())
}

/// Solves every `n` in the job's range in parallel chunks. The report does not
/// depend on thread count, batch timing, or checkpoint interruptions.
pub fn verify_range_with(job: &RangeJob, opts: &RunOptions<'_>) -> Result<VerificationReport, HarnessError> {
    job.validate()?;
    let started = Instant::now();
    let fingerprint = job.fingerprint();
    let total = job.chunk_count();

    let (mut done, mut agg) = match opts.checkpoint.as_deref().map(|p| Checkpoint::load(p, &fingerprint)) {
        Some(Ok(Some(cp))) => (cp.chunks_done, cp.partial),
        Some(Err(e)) => return Err(e),
        _ => (0, Aggregate::default()),
    };
    if done > total {
        return Err(HarnessError::Checkpoint(format!("{done} chunks done but the job has {total}")));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| HarnessError::InvalidJob(format!("thread pool: {e}")))?;
    let batch = (pool.current_num_threads() as u64 * 4).max(1);

    while done < total {
        let mut end = (done + batch).min(total);
        if let Some(stop) = opts.stop_after_chunks {
            end = end.min(stop.max(done));
        }
        if end == done {
            break;
        }
        let results: Vec<Result<Aggregate, HarnessError>> = pool.install(|| {
            use rayon::prelude::*;
            (done..end)
                .into_par_iter()
                .map(|i| {
                    let (lo, hi) = job.chunk_bounds(i);
                    process_chunk(job, lo, hi)
                })
                .collect()
        });
        for r in results {
            agg.merge(r?);
        }
        done = end;
        if let Some(path) = &opts.checkpoint {
            Checkpoint {
                fingerprint: fingerprint.clone(),
                chunks_done: done,
                merged_upto: job.chunk_bounds(done - 1).1,
                partial: agg.clone(),
            }
            .save(path)?;
        }
        if let Some(progress) = opts.progress {
            progress(done, total);
        }
    }
    if done < total {
        return Err(HarnessError::Interrupted { chunks_done: done });
    }
    Ok(finish(job, agg, done, started))
}
