use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::SieveError;
use crate::arith::{crt_intersect, is_prime_u64, is_square_u64, Natural, ResidueClass};
use crate::egyptian::ClassIndex;
use crate::identities::{class_of_identity, Catalog};

/// Residues `r mod modulus` the sieve could not discharge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExceptedSet {
    pub modulus: u64,
    pub residues: Vec<u64>,
    pub provenance: String,
}

impl ExceptedSet {
    /// Sorts and deduplicates; every residue must be below `modulus`.
    pub fn new(modulus: u64, mut residues: Vec<u64>, provenance: impl Into<String>) -> Result<Self, SieveError> {
        if modulus == 0 {
            return Err(SieveError::BadSet("modulus must be positive".into()));
        }
        if let Some(r) = residues.iter().find(|&&r| r >= modulus) {
            return Err(SieveError::BadSet(format!("residue {r} >= modulus {modulus}")));
        }
        residues.sort_unstable();
        residues.dedup();
        Ok(Self {
            modulus,
            residues,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn contains_residue(&self, r: u64) -> bool {
        self.residues.binary_search(&r).is_ok()
    }

    /// `true` when `n mod modulus` is an excepted residue.
    pub fn contains(&self, n: &Natural) -> bool {
        let r = (n % self.modulus).to_u64().expect("residue below a u64 modulus");
        self.contains_residue(r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("set serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SieveError> {
        let raw: ExceptedSet = serde_json::from_str(text).map_err(|e| SieveError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::new(raw.modulus, raw.residues, raw.provenance)
    }

    /// `# mod M provenance` then one residue per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("# mod {} {}\n", self.modulus, self.provenance);
        for r in &self.residues {
            writeln!(out, "{r}").expect("write to string");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, SieveError> {
        let mut lines = text.lines().enumerate();
        let parse_err = |line: usize, message: String| SieveError::Parse {
            line: line + 1,
            column: 1,
            message,
        };
        let (_, header) = lines.next().ok_or_else(|| parse_err(0, "empty input".into()))?;
        let rest = header
            .strip_prefix("# mod ")
            .ok_or_else(|| parse_err(0, "expected '# mod M provenance'".into()))?;
        let (m, provenance) = rest.split_once(' ').unwrap_or((rest, ""));
        let modulus = m
            .trim()
            .parse()
            .map_err(|e| parse_err(0, format!("modulus: {e}")))?;
        let mut residues = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            residues.push(line.parse().map_err(|e| parse_err(i, format!("{line:?}: {e}")))?);
        }
        Self::new(modulus, residues, provenance.trim())
    }
}

/// Residues modulo `lcm(A.modulus, B.modulus)` reducing into both sets.
pub fn intersect_excepted(a: &ExceptedSet, b: &ExceptedSet) -> Result<ExceptedSet, SieveError> {
    let l = a.modulus.lcm(&b.modulus);
    let l_big = (a.modulus as u128 / a.modulus.gcd(&b.modulus) as u128) * b.modulus as u128;
    if l_big > u64::MAX as u128 {
        return Err(SieveError::TooLarge(format!("lcm({}, {})", a.modulus, b.modulus)));
    }
    let mut out = Vec::new();
    for &ra in &a.residues {
        let ca = ResidueClass::from_u64(ra, a.modulus)?;
        for &rb in &b.residues {
            let cb = ResidueClass::from_u64(rb, b.modulus)?;
            if let Some(c) = crt_intersect(&ca, &cb) {
                out.push(c.residue().to_u64().expect("below lcm"));
            }
        }
    }
    ExceptedSet::new(l, out, format!("{} ∩ {}", a.provenance, b.provenance))
}

/// A residue discharged by a three-term identity on its whole progression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Removal {
    pub residue: u64,
    pub identity: String,
    pub class: ClassIndex,
}

/// Drops each residue `σ` that has a verified three-term identity for the
/// family `S.modulus·k + σ`.
pub fn remove_identity_covered(s: &ExceptedSet, catalog: &Catalog) -> Result<(ExceptedSet, Vec<Removal>), SieveError> {
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for &r in &s.residues {
        match catalog.three_term_for(s.modulus, r).next() {
            Some((name, id)) => removed.push(Removal {
                residue: r,
                identity: name.to_string(),
                class: class_of_identity(id)?,
            }),
            None => kept.push(r),
        }
    }
    let provenance = if removed.is_empty() {
        s.provenance.clone()
    } else {
        format!("{} minus identity-covered", s.provenance)
    };
    Ok((ExceptedSet::new(s.modulus, kept, provenance)?, removed))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueClassification {
    pub squares: Vec<u64>,
    pub primes: Vec<u64>,
    pub composite_nonsquare: Vec<u64>,
}

/// Splits residues into perfect squares (including 0 and 1), primes, and
/// the rest.
pub fn classify_residues(s: &ExceptedSet) -> ResidueClassification {
    let mut out = ResidueClassification::default();
    for &r in &s.residues {
        if is_square_u64(r) {
            out.squares.push(r);
        } else if is_prime_u64(r) {
            out.primes.push(r);
        } else {
            out.composite_nonsquare.push(r);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(m: u64, r: &[u64]) -> ExceptedSet {
        ExceptedSet::new(m, r.to_vec(), "t").unwrap()
    }

    #[test]
    fn intersections() {
        let e168 = set(168, &[1, 25, 121]);
        let e120 = set(120, &[1, 49]);
        assert_eq!(intersect_excepted(&e168, &e120).unwrap().residues, vec![1, 121, 169, 289, 361, 529]);
        assert_eq!(intersect_excepted(&e168, &e168).unwrap().residues, e168.residues);
        assert!(intersect_excepted(&set(168, &[1]), &set(120, &[2])).unwrap().is_empty());
    }

    #[test]
    fn text_and_json_round_trip() {
        let s = set(840, &[529, 1, 121]);
        assert_eq!(s.to_text(), "# mod 840 t\n1\n121\n529\n");
        assert_eq!(ExceptedSet::from_text(&s.to_text()).unwrap(), s);
        assert_eq!(ExceptedSet::from_json(&s.to_json()).unwrap(), s);
        assert!(ExceptedSet::from_text("1\n2\n").is_err());
        assert!(matches!(
            ExceptedSet::from_text("# mod 10 x\n3\nfoo\n"),
            Err(SieveError::Parse { line: 3, .. })
        ));
        assert!(ExceptedSet::new(10, vec![10], "x").is_err());
    }

    #[test]
    fn classification() {
        let c = classify_residues(&set(840, &[1, 121, 169, 289, 361, 529]));
        assert_eq!((c.squares.len(), c.primes.len(), c.composite_nonsquare.len()), (6, 0, 0));
        let c = classify_residues(&set(24, &[1]));
        assert_eq!(c.squares, vec![1]);
    }

    #[test]
    fn removal_with_empty_catalog_is_identity() {
        let s = set(840, &[1, 121]);
        let (kept, removed) = remove_identity_covered(&s, &Catalog::empty()).unwrap();
        assert_eq!(kept, s);
        assert!(removed.is_empty());
    }
}
