use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{share_percent, HarnessError, RangeJob};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobEcho {
    pub lo: u64,
    pub hi: u64,
    pub primes_only: bool,
    pub cap: u32,
    pub plan: Option<String>,
}

impl From<&RangeJob> for JobEcho {
    fn from(job: &RangeJob) -> Self {
        Self {
            lo: job.lo,
            hi: job.hi,
            primes_only: job.primes_only,
            cap: job.class_cap.0,
            plan: job.sieve_skip.as_ref().map(|s| s.excepted.provenance.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCount {
    pub class: u32,
    pub count: u64,
    /// Percent of solved items, 4 significant digits.
    pub share: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstOccurrence {
    pub class: u32,
    pub n: u64,
}

/// Primes settled by the sieve without a solve.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FastPathSummary {
    /// Outside the excepted set: class at most `class_bound`.
    pub class_bound: u32,
    pub count: u64,
    /// Per identity-covered residue: `(residue, class, count)`.
    pub identity_covered: Vec<(u64, u32, u64)>,
}

/// One CSV line; `min_class = -1` and empty denominators for exceptions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: u64,
    pub is_prime: bool,
    pub min_class: i64,
    pub denominators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub job: JobEcho,
    pub counts: Vec<ClassCount>,
    pub first_occurrences: Vec<FirstOccurrence>,
    pub exceptions: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fast_path: Option<FastPathSummary>,
    pub examined: u64,
    pub elapsed_ms: u64,
    pub chunks_done: u64,
    #[serde(skip)]
    pub rows: Vec<ReportRow>,
}

impl VerificationReport {
    pub(crate) fn counts_from(map: &BTreeMap<u32, u64>) -> Vec<ClassCount> {
        let total: u64 = map.values().sum();
        map.iter()
            .map(|(&class, &count)| ClassCount {
                class,
                count,
                share: share_percent(count, total),
            })
            .collect()
    }

    pub fn count_of(&self, class: u32) -> u64 {
        self.counts.iter().find(|c| c.class == class).map_or(0, |c| c.count)
    }

    pub fn max_class(&self) -> Option<u32> {
        self.counts.iter().map(|c| c.class).max()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with `elapsed_ms` zeroed: equal for equal jobs regardless of
    /// threads, timing, or interruption.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.elapsed_ms = 0;
        c.to_json()
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Checkpoint(format!("report JSON: {e}")))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,is_prime,min_class,a,b,c\n");
        for r in &self.rows {
            let dens = if r.denominators.len() == 3 {
                r.denominators.join(",")
            } else {
                ",,".to_string()
            };
            writeln!(out, "{},{},{},{}", r.n, r.is_prime, r.min_class, dens).expect("write to string");
        }
        out
    }

    pub fn write_json(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_json()).map_err(|e| HarnessError::io(path, e))
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_csv()).map_err(|e| HarnessError::io(path, e))
    }
}
