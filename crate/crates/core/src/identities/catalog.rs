use serde::{Deserialize, Serialize};

use super::{
    Family, Identity, IdentityError, LinearForm, SplitIdentity, Term, ThreeTermIdentity,
};
use crate::egyptian::ClassIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityStatus {
    Verified,
    /// Fails as written; the entry named in `corrected_by` verifies.
    PrintedFormInvalidCorrected,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub identity: Identity,
    pub status: IdentityStatus,
    pub provenance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrected_by: Option<String>,
}

#[derive(Deserialize)]
struct RawEntry {
    name: String,
    identity: Identity,
    provenance: String,
    #[serde(default)]
    corrected_by: Option<String>,
}

/// Named identities with computed status.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

const fn lf(c1: i64, c0: i64) -> LinearForm {
    LinearForm::new(c1, c0)
}

fn split(p: u64, sigma: u64, a: LinearForm, m: u64, gamma: u64, forms: Vec<LinearForm>) -> Identity {
    Identity::Split(SplitIdentity {
        family: Family::new(p, sigma),
        unit_term: a,
        numerator: m,
        constant: gamma,
        forms,
    })
}

fn three(p: u64, sigma: u64, terms: [Term; 3], class: u32) -> Identity {
    Identity::ThreeTerm(ThreeTermIdentity {
        family: Family::new(p, sigma),
        terms,
        claimed_class: ClassIndex(class),
    })
}

fn raw(name: &str, identity: Identity, provenance: &str, corrected_by: Option<&str>) -> RawEntry {
    RawEntry {
        name: name.to_string(),
        identity,
        provenance: provenance.to_string(),
        corrected_by: corrected_by.map(str::to_string),
    }
}

fn builtin_entries() -> Vec<RawEntry> {
    let n1201 = lf(9240, 1201);
    let n6001 = lf(9240, 6001);
    let n2521 = lf(120120, 2521);
    vec![
        raw(
            "even-2k-1",
            split(4, 2, lf(1, 1), 1, 1, vec![lf(1, 1), lf(2, 1)]),
            "2/(2k-1) = 1/k + 1/(k(2k-1)), indexed from k = 0",
            None,
        ),
        raw(
            "three-mod-4",
            split(4, 3, lf(1, 1), 1, 1, vec![lf(1, 1), lf(4, 3)]),
            "4/(4k-1) = 1/k + 1/(k(4k-1)), indexed from k = 0",
            None,
        ),
        raw(
            "fibonacci-4k",
            split(4, 0, lf(1, 1), 1, 1, vec![lf(1, 0), lf(1, 1)]),
            "1/n = 1/(n+1) + 1/(n(n+1)) applied to 4/(4k) = 1/k, k >= 1",
            None,
        ),
        raw(
            "eq-4k+1",
            split(4, 1, lf(1, 1), 3, 1, vec![lf(1, 1), lf(4, 1)]),
            "smallest a for n = 4k+1; refined mod 3",
            None,
        ),
        raw(
            "eq-12l+1",
            split(12, 1, lf(3, 1), 3, 1, vec![lf(3, 1), lf(12, 1)]),
            "the 4k+1 split restricted to n = 12l+1; refined mod 2",
            None,
        ),
        raw(
            "eq-24k+1",
            split(24, 1, lf(6, 2), 7, 2, vec![lf(3, 1), lf(24, 1)]),
            "a = (n+7)/4 for n = 24k+1; refined mod 7 and mod 5",
            None,
        ),
        raw(
            "eq-24k+1-a6k+1",
            split(24, 1, lf(6, 1), 3, 1, vec![lf(6, 1), lf(24, 1)]),
            "a = (n+3)/4 for n = 24k+1; used for 6k+1 ≡ 0 (mod 5)",
            None,
        ),
        raw(
            "eq-120k+1",
            split(120, 1, lf(30, 3), 11, 3, vec![lf(10, 1), lf(120, 1)]),
            "a = (n+11)/4 for n = 120k+1; refined mod 11",
            None,
        ),
        raw(
            "eq-120k+49",
            split(120, 49, lf(30, 15), 11, 15, vec![lf(2, 1), lf(120, 49)]),
            "a = (n+11)/4 for n = 120k+49; refined mod 11",
            None,
        ),
        raw(
            "res-1201-printed",
            three(
                9240,
                1201,
                [
                    Term::new(1, vec![lf(2310, 308)]),
                    Term::new(5, vec![lf(9240, 1), lf(15, 2)]),
                    Term::new(770, vec![lf(9240, 1), lf(15, 2)]),
                ],
                8,
            ),
            "residue 1201 mod 9240 as printed, with 9240k+1 in both tails",
            Some("res-1201"),
        ),
        raw(
            "res-1201",
            three(
                9240,
                1201,
                [
                    Term::new(1, vec![lf(2310, 308)]),
                    Term::new(5, vec![n1201, lf(15, 2)]),
                    Term::new(770, vec![n1201, lf(15, 2)]),
                ],
                8,
            ),
            "residue 1201 mod 9240, tails carry n = 9240k+1201",
            None,
        ),
        raw(
            "res-6001",
            three(
                9240,
                6001,
                [
                    Term::new(1, vec![lf(2310, 1540)]),
                    Term::new(385, vec![n6001, lf(2034, 1321)]),
                    Term::new(22, vec![lf(3, 2), lf(2034, 1321)]),
                ],
                40,
            ),
            "residue 6001 = 17·353 mod 9240",
            None,
        ),
        raw(
            "res-2521-mod-120120-printed",
            split(
                120120,
                2521,
                lf(30030, 4004),
                1,
                22022,
                vec![n2521, lf(15, 2), lf(810, 17), lf(810, 17)],
            ),
            "residue 2521 mod 120120 as printed: no '+' between the last two fractions, read as a product",
            Some("res-2521-mod-120120"),
        ),
        raw(
            "res-2521-mod-120120",
            three(
                120120,
                2521,
                [
                    Term::new(1, vec![lf(30030, 4004)]),
                    Term::new(1001, vec![n2521, lf(810, 17)]),
                    Term::new(22, vec![lf(15, 2), lf(810, 17)]),
                ],
                3374,
            ),
            "residue 2521 mod 120120 with the missing '+' restored",
            None,
        ),
    ]
}

impl Catalog {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Every identity used by the built-in sieve plans and range reports.
    pub fn builtin() -> Self {
        Self::from_raw(builtin_entries()).expect("builtin catalog names are unique")
    }

    fn from_raw(raw: Vec<RawEntry>) -> Result<Self, IdentityError> {
        for (i, r) in raw.iter().enumerate() {
            if raw[..i].iter().any(|o| o.name == r.name) {
                return Err(IdentityError::Duplicate(r.name.clone()));
            }
        }
        let holds: Vec<bool> = raw.iter().map(|r| super::verify_identity(&r.identity)).collect();
        let entries = raw
            .iter()
            .zip(&holds)
            .map(|(r, &ok)| {
                let fixed = r.corrected_by.as_ref().is_some_and(|target| {
                    raw.iter()
                        .position(|o| &o.name == target)
                        .is_some_and(|j| holds[j])
                });
                let status = match (ok, fixed) {
                    (true, _) => IdentityStatus::Verified,
                    (false, true) => IdentityStatus::PrintedFormInvalidCorrected,
                    (false, false) => IdentityStatus::Invalid,
                };
                CatalogEntry {
                    name: r.name.clone(),
                    identity: r.identity.clone(),
                    status,
                    provenance: r.provenance.clone(),
                    corrected_by: r.corrected_by.clone(),
                }
            })
            .collect();
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// A verified split identity by name.
    pub fn split(&self, name: &str) -> Result<&SplitIdentity, IdentityError> {
        let entry = self
            .get(name)
            .filter(|e| e.status == IdentityStatus::Verified)
            .ok_or_else(|| IdentityError::Unknown(name.to_string()))?;
        match &entry.identity {
            Identity::Split(s) => Ok(s),
            Identity::ThreeTerm(_) => Err(IdentityError::NotSplit(name.to_string())),
        }
    }

    /// Verified three-term identities for the family `modulus·k + residue`.
    pub fn three_term_for(&self, modulus: u64, residue: u64) -> impl Iterator<Item = (&str, &ThreeTermIdentity)> {
        self.entries.iter().filter_map(move |e| match &e.identity {
            Identity::ThreeTerm(t)
                if e.status == IdentityStatus::Verified
                    && t.family == Family::new(modulus, residue) =>
            {
                Some((e.name.as_str(), t))
            }
            _ => None,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("catalog serializes")
    }

    /// Reads a catalog written by [`Catalog::to_json`]. Any `status` field in
    /// the input is ignored and recomputed.
    pub fn from_json(text: &str) -> Result<Self, IdentityError> {
        let raw: Vec<RawEntry> =
            serde_json::from_str(text).map_err(|e| IdentityError::Json(e.to_string()))?;
        Self::from_raw(raw)
    }
}
