//! Modular covering sieve over split identities.
//!
//! A class `k ≡ ρ (mod Q)` of a split identity
//! `4/n = 1/a + m/(γ·ΠF_j)` is discharged when one of these holds for every
//! `k` in the class:
//!
//! * a prime `p | P·Q` divides every `n(k)` and `n(k) > p` (no prime lives there);
//! * `m | γ·ΠF_j(k)`, so the residual is a unit fraction;
//! * a divisor pair `(x, y)` built from `γ`, primes forced into the forms and
//!   the forms themselves has `xy | γ·ΠF_j` and `m | x + y`.

mod plan;
mod sets;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{divisors_u64, factor_u64, Natural, ResidueClass};
use crate::egyptian::{
    certificate_to_decomposition, Decomposition, DivisorCertificate, EgyptianError,
};
use crate::identities::{IdentityError, LinearForm, SplitIdentity, Term};

pub use plan::{run_plan, run_plan_detailed, Coverage, PlanRun, PlanStep, SievePlan, StepLog};
pub use sets::{
    classify_residues, intersect_excepted, remove_identity_covered, ExceptedSet, Removal,
    ResidueClassification,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SieveError {
    #[error("plan parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown plan {0:?}")]
    UnknownPlan(String),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("modulus or residue too large: {0}")]
    TooLarge(String),
    #[error("refinement needs identities of a single family")]
    MixedFamilies,
    #[error("excepted set: {0}")]
    BadSet(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error(transparent)]
    Egyptian(#[from] EgyptianError),
}

/// `constant · Π forms`, one side of a uniform divisor certificate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivisorExpr {
    pub constant: u64,
    pub forms: Vec<LinearForm>,
}

impl DivisorExpr {
    pub fn eval(&self, k: &BigInt) -> BigInt {
        Term::new(self.constant, self.forms.clone()).eval(k)
    }
}

impl fmt::Display for DivisorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Term::new(self.constant, self.forms.clone()).fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CoverageStatus {
    CompositeWitness { prime: u64 },
    UnitResidual,
    Certified { x: DivisorExpr, y: DivisorExpr },
    Uncovered,
}

impl CoverageStatus {
    pub fn is_covered(&self) -> bool {
        !matches!(self, CoverageStatus::Uncovered)
    }
}

impl fmt::Display for CoverageStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverageStatus::CompositeWitness { prime } => write!(f, "composite witness {prime}"),
            CoverageStatus::UnitResidual => write!(f, "unit residual"),
            CoverageStatus::Certified { x, y } => write!(f, "certified x={x}, y={y}"),
            CoverageStatus::Uncovered => write!(f, "uncovered"),
        }
    }
}

/// Smallest prime `p | modulus` dividing every `n ≡ s (mod modulus)` with
/// `n >= 2`, provided the smallest such `n` exceeds `p`.
pub(crate) fn composite_witness(s: u64, modulus: u64) -> Option<u64> {
    let n_min = if s >= 2 { s as u128 } else { s as u128 + modulus as u128 };
    factor_u64(modulus)
        .into_iter()
        .map(|(p, _)| p)
        .find(|&p| s.is_multiple_of(p) && n_min > p as u128)
}

fn to_u64(v: &Natural, what: &str) -> Result<u64, SieveError> {
    v.to_u64().ok_or_else(|| SieveError::TooLarge(format!("{what} = {v}")))
}

fn eval_i128(f: &LinearForm, k: u64) -> i128 {
    f.c1 as i128 * k as i128 + f.c0 as i128
}

/// Side assignment of each residual form in a certificate search.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    X,
    Y,
    Free,
}

/// Status of `k ≡ rho (mod q)` for `id` without the composite check.
pub(crate) fn identity_status(id: &SplitIdentity, q: u64, rho: u64) -> CoverageStatus {
    let m = id.numerator as u128;
    let forms = &id.forms;
    // gcd of F_j over the class: gcd(F_j(ρ), c1_j·Q)
    let gs: Vec<u128> = forms
        .iter()
        .map(|f| {
            let at = eval_i128(f, rho).unsigned_abs();
            at.gcd(&(f.c1.unsigned_abs() as u128 * q as u128))
        })
        .collect();
    let all = gs.iter().fold(id.constant as u128 % m, |acc, g| acc * (g % m) % m);
    if all == 0 {
        return CoverageStatus::UnitResidual;
    }
    let m_divides_q = (q as u128).is_multiple_of(m);
    let form_mod = |idx: &[usize]| -> u128 {
        idx.iter().fold(1u128, |acc, &j| {
            acc * (eval_i128(&forms[j], rho).rem_euclid(m as i128) as u128) % m
        })
    };
    type Key = (usize, u64, Vec<usize>, usize, u64, Vec<usize>);
    let mut best: Option<Key> = None;
    let count = 3usize.pow(forms.len() as u32);
    for code in 0..count {
        let mut c = code;
        let sides: Vec<Side> = (0..forms.len())
            .map(|_| {
                let s = [Side::Free, Side::X, Side::Y][c % 3];
                c /= 3;
                s
            })
            .collect();
        let pick = |want: Side| -> Vec<usize> { (0..forms.len()).filter(|&j| sides[j] == want).collect() };
        let (sx, sy) = (pick(Side::X), pick(Side::Y));
        let constant_sum = sx.is_empty() && sy.is_empty();
        if !constant_sum && !m_divides_q {
            continue;
        }
        let free: u128 = pick(Side::Free)
            .iter()
            .fold(id.constant as u128, |acc, &j| acc.saturating_mul(gs[j]));
        let Ok(free) = u64::try_from(free) else {
            continue;
        };
        let (fx, fy) = (form_mod(&sx), form_mod(&sy));
        for &cx in &divisors_u64(free) {
            for &cy in &divisors_u64(free / cx) {
                let sum = (cx as u128 % m * fx + cy as u128 % m * fy) % m;
                if sum != 0 {
                    continue;
                }
                let key = (sx.len(), cx, sx.clone(), sy.len(), cy, sy.clone());
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
            }
        }
    }
    match best {
        Some((_, cx, sx, _, cy, sy)) => CoverageStatus::Certified {
            x: DivisorExpr {
                constant: cx,
                forms: sx.iter().map(|&j| forms[j]).collect(),
            },
            y: DivisorExpr {
                constant: cy,
                forms: sy.iter().map(|&j| forms[j]).collect(),
            },
        },
        None => CoverageStatus::Uncovered,
    }
}

/// Status of the class `k ≡ ρ (mod q)` for `id`, first match in the order
/// composite witness, unit residual, certified, uncovered.
pub fn coverage_status(id: &SplitIdentity, class: &ResidueClass) -> Result<CoverageStatus, SieveError> {
    let q = to_u64(class.modulus(), "class modulus")?;
    let rho = to_u64(class.residue(), "class residue")?;
    let p = id.family.modulus;
    let big = p
        .checked_mul(q)
        .ok_or_else(|| SieveError::TooLarge(format!("P·q = {p}·{q}")))?;
    let s = ((p as u128 * rho as u128 + id.family.residue as u128) % big as u128) as u64;
    if let Some(prime) = composite_witness(s, big) {
        return Ok(CoverageStatus::CompositeWitness { prime });
    }
    Ok(identity_status(id, q, rho))
}

/// One subclass produced by [`refine`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refinement {
    /// The subclass on `k`.
    pub class: ResidueClass,
    /// The same subclass on `n`.
    pub n_class: ResidueClass,
    pub status: CoverageStatus,
    pub identity: Option<String>,
}

/// Splits `base` (a class on `k`) into `q` subclasses modulo `q·|base|` and
/// reports the first identity covering each.
pub fn refine(
    ids: &[(&str, &SplitIdentity)],
    q: u64,
    base: &ResidueClass,
) -> Result<Vec<Refinement>, SieveError> {
    let Some((_, first)) = ids.first() else {
        return Err(SieveError::InvalidPlan("refine needs at least one identity".into()));
    };
    if ids.iter().any(|(_, id)| id.family != first.family) {
        return Err(SieveError::MixedFamilies);
    }
    if q < 2 {
        return Err(SieveError::InvalidPlan(format!("refinement prime {q} < 2")));
    }
    let family = first.family;
    let m0 = to_u64(base.modulus(), "base modulus")?;
    let r0 = to_u64(base.residue(), "base residue")?;
    let modulus = m0
        .checked_mul(q)
        .ok_or_else(|| SieveError::TooLarge(format!("{m0}·{q}")))?;
    let mut out = Vec::with_capacity(q as usize);
    for t in 0..q {
        let rho = r0 + m0 * t;
        let class = ResidueClass::from_u64(rho, modulus)?;
        let mut status = CoverageStatus::Uncovered;
        let mut covering = None;
        for (name, id) in ids {
            let st = coverage_status(id, &class)?;
            if st.is_covered() {
                if !matches!(st, CoverageStatus::CompositeWitness { .. }) {
                    covering = Some(name.to_string());
                }
                status = st;
                break;
            }
        }
        let n_mod = family.modulus as u128 * modulus as u128;
        let n_res = (family.modulus as u128 * rho as u128 + family.residue as u128) % n_mod;
        out.push(Refinement {
            class,
            n_class: ResidueClass::new(Natural::from(n_res), Natural::from(n_mod))?,
            status,
            identity: covering,
        });
    }
    Ok(out)
}

/// Concrete decomposition of `4/n(k)` for a class discharged by a unit
/// residual or a certificate; `None` for other statuses.
pub fn witness_decomposition(
    id: &SplitIdentity,
    status: &CoverageStatus,
    k: &Natural,
) -> Result<Option<Decomposition>, SieveError> {
    let kb = BigInt::from(k.clone());
    let nat = |v: BigInt, what: &str| {
        v.to_biguint()
            .filter(|v| *v > Natural::from(0u32))
            .ok_or_else(|| SieveError::InvalidPlan(format!("{what} not positive at k = {k}")))
    };
    let n = nat(id.family.n_at(&kb), "n")?;
    let a = nat(id.unit_term.eval(&kb), "a")?;
    let den = nat(id.residual_denominator(&kb), "residual denominator")?;
    let m = Natural::from(id.numerator);
    let tails = match status {
        CoverageStatus::UnitResidual => {
            if !(&den % &m).is_zero() {
                return Ok(None);
            }
            let unit = &den / &m;
            vec![&unit * 2u32, &unit * 2u32]
        }
        CoverageStatus::Certified { x, y } => {
            let cert = DivisorCertificate::new(nat(x.eval(&kb), "x")?, nat(y.eval(&kb), "y")?);
            certificate_to_decomposition(&m, &den, &cert)?.denominators().to_vec()
        }
        _ => return Ok(None),
    };
    let mut dens = vec![a];
    dens.extend(tails);
    Ok(Some(Decomposition::four_over(&n, dens)?))
}

impl From<crate::arith::ArithError> for SieveError {
    fn from(e: crate::arith::ArithError) -> Self {
        SieveError::Egyptian(EgyptianError::Arith(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::Catalog;

    fn status(name: &str, rho: u64, q: u64) -> CoverageStatus {
        let c = Catalog::builtin();
        coverage_status(c.split(name).unwrap(), &ResidueClass::from_u64(rho, q).unwrap()).unwrap()
    }

    #[test]
    fn coverage_examples() {
        // 3 | n(2) = 9 and the composite check runs first
        assert_eq!(status("eq-4k+1", 2, 3), CoverageStatus::CompositeWitness { prime: 3 });
        assert_eq!(status("eq-24k+1", 2, 7), CoverageStatus::CompositeWitness { prime: 7 });
        let CoverageStatus::Certified { x, y } = status("eq-24k+1", 3, 5) else {
            panic!("expected a certificate");
        };
        let mut pair = [x.constant, y.constant];
        pair.sort();
        assert_eq!(pair, [2, 5]);
        assert!(x.forms.is_empty() && y.forms.is_empty());
        assert_eq!(status("eq-4k+1", 0, 3), CoverageStatus::Uncovered);
    }

    #[test]
    fn unit_residual_without_witness() {
        // k ≡ 2 (mod 3) with the composite check skipped
        let c = Catalog::builtin();
        assert_eq!(identity_status(c.split("eq-4k+1").unwrap(), 3, 2), CoverageStatus::UnitResidual);
    }

    #[test]
    fn paper_style_certificate() {
        // x = 1, y = 3(10k+1) = 30k+3 for k ≡ 5 (mod 11)
        let CoverageStatus::Certified { x, y } = status("eq-120k+1", 5, 11) else {
            panic!("expected a certificate");
        };
        assert_eq!(x.constant * y.constant, 3);
        assert_eq!(x.forms.len() + y.forms.len(), 1);
    }

    #[test]
    fn refine_examples() {
        let c = Catalog::builtin();
        let uncovered = |name: &str, q: u64| -> (Vec<u64>, Vec<u64>) {
            let id = c.split(name).unwrap();
            let r = refine(&[(name, id)], q, &ResidueClass::all()).unwrap();
            assert_eq!(r.len() as u64, q);
            r.iter()
                .filter(|x| !x.status.is_covered())
                .map(|x| {
                    (
                        x.class.residue().to_u64().unwrap(),
                        x.n_class.residue().to_u64().unwrap(),
                    )
                })
                .unzip()
        };
        assert_eq!(uncovered("eq-4k+1", 3), (vec![0], vec![1]));
        assert_eq!(
            uncovered("eq-120k+1", 11),
            (vec![0, 3, 6, 7, 8, 9, 10], vec![1, 361, 721, 841, 961, 1081, 1201])
        );
        assert_eq!(
            uncovered("eq-120k+49", 11),
            (vec![0, 1, 2, 4, 7], vec![49, 169, 289, 529, 889])
        );
    }

    #[test]
    fn mixed_families_rejected() {
        let c = Catalog::builtin();
        let a = c.split("eq-4k+1").unwrap();
        let b = c.split("eq-24k+1").unwrap();
        assert_eq!(
            refine(&[("a", a), ("b", b)], 3, &ResidueClass::all()),
            Err(SieveError::MixedFamilies)
        );
    }

    #[test]
    fn witnesses_are_exact() {
        let c = Catalog::builtin();
        let id = c.split("eq-24k+1").unwrap();
        let st = status("eq-24k+1", 3, 5);
        for t in 0..20u64 {
            let k = Natural::from(3 + 5 * t);
            let d = witness_decomposition(id, &st, &k).unwrap().unwrap();
            assert_eq!(d.denominators().len(), 3);
        }
    }
}
