//! Range verification, class statistics, and report persistence.

mod report;
mod run;
mod stats;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::egyptian::{ClassIndex, EgyptianError};
use crate::identities::{Catalog, IdentityError};
use crate::sieve::{remove_identity_covered, run_plan, ExceptedSet, Removal, SieveError, SievePlan};

pub use report::{ClassCount, FastPathSummary, FirstOccurrence, JobEcho, ReportRow, VerificationReport};
pub use run::{verify_range, verify_range_with, Checkpoint, RunOptions};
pub use stats::{
    check_single, family_distribution, moreover_discrepancies, share_percent, Discrepancy,
    FamilyHistogram, SingleCheck,
};

pub const DEFAULT_CHUNK: u64 = 4096;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid job: {0}")]
    InvalidJob(String),
    #[error("i/o on {path}: {message}")]
    Io { path: String, message: String },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("checkpoint belongs to a different job (fingerprint {found}, expected {expected})")]
    FingerprintMismatch { expected: String, found: String },
    #[error("stopped after {chunks_done} chunks; resume from the checkpoint")]
    Interrupted { chunks_done: u64 },
    #[error(transparent)]
    Egyptian(#[from] EgyptianError),
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
}

impl HarnessError {
    pub(crate) fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

/// Excepted residues of a plan plus the residues discharged by three-term
/// identities. Primes outside both are known to lie in `class_bound` or below.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveSkip {
    pub excepted: ExceptedSet,
    pub class_bound: ClassIndex,
    pub removals: Vec<Removal>,
}

impl SieveSkip {
    pub fn from_plan(plan: &SievePlan, catalog: &Catalog) -> Result<Self, HarnessError> {
        let excepted = run_plan(plan, catalog)?;
        let (excepted, removals) = remove_identity_covered(&excepted, catalog)?;
        Ok(Self {
            excepted,
            class_bound: plan.class_bound(),
            removals,
        })
    }
}

/// Numbers `lo <= n < hi` (primes only when `primes_only`), solved up to
/// `class_cap`, in chunks of `chunk_size`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeJob {
    pub lo: u64,
    pub hi: u64,
    pub primes_only: bool,
    pub class_cap: ClassIndex,
    pub sieve_skip: Option<SieveSkip>,
    pub chunk_size: u64,
}

impl RangeJob {
    pub fn new(lo: u64, hi: u64, primes_only: bool, class_cap: u32) -> Self {
        Self {
            lo,
            hi,
            primes_only,
            class_cap: ClassIndex(class_cap),
            sieve_skip: None,
            chunk_size: DEFAULT_CHUNK,
        }
    }

    pub fn with_skip(mut self, skip: SieveSkip) -> Self {
        self.sieve_skip = Some(skip);
        self
    }

    pub fn with_chunk_size(mut self, chunk_size: u64) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.lo < 2 {
            return Err(HarnessError::InvalidJob(format!("lo = {} < 2", self.lo)));
        }
        if self.lo > self.hi {
            return Err(HarnessError::InvalidJob(format!("lo = {} > hi = {}", self.lo, self.hi)));
        }
        if self.chunk_size == 0 {
            return Err(HarnessError::InvalidJob("chunk_size must be at least 1".into()));
        }
        if self.class_cap.0 == 0 {
            return Err(HarnessError::InvalidJob("class cap must be at least 1".into()));
        }
        Ok(())
    }

    /// SHA-256 of the job parameters.
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("job serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub(crate) fn chunk_count(&self) -> u64 {
        (self.hi - self.lo).div_ceil(self.chunk_size)
    }

    pub(crate) fn chunk_bounds(&self, index: u64) -> (u64, u64) {
        let start = self.lo + index * self.chunk_size;
        (start, (start + self.chunk_size).min(self.hi))
    }
}
