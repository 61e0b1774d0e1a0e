use std::path::Path;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{composite_witness, identity_status, CoverageStatus, ExceptedSet, SieveError};
use crate::egyptian::ClassIndex;
use crate::identities::{Catalog, SplitIdentity};

/// One refinement: lift the open residues to `lcm(M, P_1, ..) · prime` and
/// try each identity whose class index is at most `class_bound_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanStep {
    pub identities: Vec<String>,
    pub prime: u64,
    pub class_bound_i: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SievePlan {
    pub name: String,
    pub steps: Vec<PlanStep>,
}

fn step(ids: &[&str], prime: u64, bound: u32) -> PlanStep {
    PlanStep {
        identities: ids.iter().map(|s| s.to_string()).collect(),
        prime,
        class_bound_i: bound,
    }
}

fn chain(base: &str, extra: PlanStep) -> Vec<PlanStep> {
    let mut steps = SievePlan::builtin(base).expect("builtin base").steps;
    steps.push(extra);
    steps
}

impl SievePlan {
    pub const BUILTIN: [&'static str; 7] = [
        "prop-1.2",
        "prop-1.3",
        "prop-1.4",
        "prop-1.5",
        "mordell-840",
        "thm-1320",
        "thm-9240",
    ];

    pub fn builtin(name: &str) -> Option<Self> {
        let steps = match name {
            "prop-1.2" => vec![step(&["even-2k-1", "three-mod-4", "fibonacci-4k", "eq-4k+1"], 3, 1)],
            "prop-1.3" => chain("prop-1.2", step(&["eq-12l+1"], 2, 1)),
            "prop-1.4" => chain("prop-1.3", step(&["eq-24k+1"], 7, 2)),
            "prop-1.5" => chain("prop-1.3", step(&["eq-24k+1", "eq-24k+1-a6k+1"], 5, 2)),
            "mordell-840" => chain("prop-1.4", step(&["eq-24k+1", "eq-24k+1-a6k+1"], 5, 2)),
            "thm-1320" => chain("prop-1.5", step(&["eq-120k+1", "eq-120k+49"], 11, 3)),
            "thm-9240" => chain("thm-1320", step(&["eq-24k+1"], 7, 3)),
            _ => return None,
        };
        Some(Self {
            name: name.to_string(),
            steps,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, SieveError> {
        serde_json::from_str(text).map_err(|e| SieveError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    /// A built-in name, or `@path` for a JSON plan file.
    pub fn load(spec: &str) -> Result<Self, SieveError> {
        match spec.strip_prefix('@') {
            Some(path) => {
                let text = std::fs::read_to_string(Path::new(path))
                    .map_err(|e| SieveError::Io(format!("{path}: {e}")))?;
                Self::from_json(&text)
            }
            None => Self::builtin(spec).ok_or_else(|| SieveError::UnknownPlan(spec.to_string())),
        }
    }

    /// Largest class bound over the steps: residues the plan discharges hold
    /// primes in this class or below.
    pub fn class_bound(&self) -> ClassIndex {
        ClassIndex(self.steps.iter().map(|s| s.class_bound_i).max().unwrap_or(0))
    }
}

/// How one residue was discharged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub residue: u64,
    pub status: CoverageStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity: Option<String>,
    /// `(ρ, Q)`: the class `k ≡ ρ (mod Q)` of the covering identity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_class: Option<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepLog {
    pub modulus: u64,
    pub prime: u64,
    pub class_bound: ClassIndex,
    pub covered: Vec<Coverage>,
    pub open: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanRun {
    pub excepted: ExceptedSet,
    pub class_bound: ClassIndex,
    pub steps: Vec<StepLog>,
}

struct Resolved<'a> {
    name: &'a str,
    id: &'a SplitIdentity,
    class: ClassIndex,
}

fn resolve<'a>(step: &'a PlanStep, catalog: &'a Catalog) -> Result<Vec<Resolved<'a>>, SieveError> {
    if step.prime < 2 {
        return Err(SieveError::InvalidPlan(format!("refinement prime {} < 2", step.prime)));
    }
    step.identities
        .iter()
        .map(|name| {
            let id = catalog.split(name)?;
            if id.family.modulus == 0 || id.family.residue >= id.family.modulus {
                return Err(SieveError::InvalidPlan(format!("{name}: family needs 0 <= σ < P")));
            }
            Ok(Resolved {
                name,
                id,
                class: id.class()?,
            })
        })
        .collect()
}

fn cover(s: u64, modulus: u64, ids: &[Resolved<'_>], bound: ClassIndex) -> Option<Coverage> {
    if let Some(prime) = composite_witness(s, modulus) {
        return Some(Coverage {
            residue: s,
            status: CoverageStatus::CompositeWitness { prime },
            identity: None,
            k_class: None,
        });
    }
    for r in ids.iter().filter(|r| r.class <= bound) {
        let (p, sigma) = (r.id.family.modulus, r.id.family.residue);
        if s % p != sigma {
            continue;
        }
        let q = modulus / p;
        let rho = ((s - sigma) / p) % q;
        let status = identity_status(r.id, q, rho);
        if status.is_covered() {
            return Some(Coverage {
                residue: s,
                status,
                identity: Some(r.name.to_string()),
                k_class: Some((rho, q)),
            });
        }
    }
    None
}

/// Runs every step, logging how each lifted residue was discharged.
pub fn run_plan_detailed(plan: &SievePlan, catalog: &Catalog) -> Result<PlanRun, SieveError> {
    if plan.steps.is_empty() {
        return Err(SieveError::InvalidPlan("plan has no steps".into()));
    }
    let mut modulus: u64 = 1;
    let mut open: Vec<u64> = vec![0];
    let mut logs = Vec::with_capacity(plan.steps.len());
    for step in &plan.steps {
        let ids = resolve(step, catalog)?;
        let base = ids.iter().fold(modulus, |acc, r| acc.lcm(&r.id.family.modulus));
        let next = base
            .checked_mul(step.prime)
            .ok_or_else(|| SieveError::TooLarge(format!("modulus {base}·{}", step.prime)))?;
        let lifts = next / modulus;
        let bound = ClassIndex(step.class_bound_i);
        let results: Vec<(u64, Option<Coverage>)> = open
            .par_iter()
            .flat_map_iter(|&r| (0..lifts).map(move |t| r + modulus * t))
            .map(|s| (s, cover(s, next, &ids, bound)))
            .collect();
        let mut covered = Vec::new();
        let mut still_open = Vec::new();
        for (s, c) in results {
            match c {
                Some(c) => covered.push(c),
                None => still_open.push(s),
            }
        }
        covered.sort_by_key(|c| c.residue);
        still_open.sort_unstable();
        logs.push(StepLog {
            modulus: next,
            prime: step.prime,
            class_bound: bound,
            covered,
            open: still_open.clone(),
        });
        modulus = next;
        open = still_open;
    }
    Ok(PlanRun {
        excepted: ExceptedSet::new(modulus, open, plan.name.clone())?,
        class_bound: plan.class_bound(),
        steps: logs,
    })
}

/// The excepted residues on `n` at the plan's final modulus.
pub fn run_plan(plan: &SievePlan, catalog: &Catalog) -> Result<ExceptedSet, SieveError> {
    Ok(run_plan_detailed(plan, catalog)?.excepted)
}
