//! Parametric identities `4/(Pk + σ) = ...` over linear forms in `k`.
//!
//! A [`SplitIdentity`] fixes the unit term `1/a(k)` and leaves a residual
//! `m/(γ·ΠF_j(k))`; a [`ThreeTermIdentity`] is a full three-term
//! representation. Both are checked exactly by sampling: the cross-multiplied
//! difference is a polynomial in `k`, so agreement at more points than its
//! degree proves the identity.

mod catalog;
mod search;

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{ExactRational, Natural};
use crate::egyptian::{ClassIndex, Decomposition, EgyptianError};

pub use catalog::{Catalog, CatalogEntry, IdentityStatus};
pub use search::{search_extended_identity, search_simple_identity};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentityError {
    #[error("denominator {which} is not positive at k = {k}")]
    NonPositive { which: String, k: Natural },
    #[error("4a(k) - n(k) is not a positive constant; no uniform class")]
    NotUniformClass,
    #[error("unknown identity {0:?}")]
    Unknown(String),
    #[error("identity {0:?} is not a split identity")]
    NotSplit(String),
    #[error("duplicate identity name {0:?}")]
    Duplicate(String),
    #[error("search needs P ≡ 0 and σ ≡ 1 (mod 4) with σ < P; got P = {p}, σ = {sigma}")]
    BadFamily { p: u64, sigma: u64 },
    #[error("coefficient overflow while building an identity")]
    Overflow,
    #[error("catalog JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Egyptian(#[from] EgyptianError),
}

/// `c1·k + c0`. Serialized as `[c1, c0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct LinearForm {
    pub c1: i64,
    pub c0: i64,
}

impl From<[i64; 2]> for LinearForm {
    fn from([c1, c0]: [i64; 2]) -> Self {
        Self { c1, c0 }
    }
}

impl From<LinearForm> for [i64; 2] {
    fn from(f: LinearForm) -> Self {
        [f.c1, f.c0]
    }
}

impl LinearForm {
    pub const fn new(c1: i64, c0: i64) -> Self {
        Self { c1, c0 }
    }

    pub fn eval(&self, k: &BigInt) -> BigInt {
        BigInt::from(self.c1) * k + self.c0
    }

    /// `gcd(c1, c0)`, non-negative.
    pub fn content(&self) -> u64 {
        self.c1.unsigned_abs().gcd(&self.c0.unsigned_abs())
    }

    pub fn is_constant(&self) -> bool {
        self.c1 == 0
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.c1, self.c0) {
            (0, c0) => write!(f, "{c0}"),
            (c1, c0) => {
                match c1 {
                    1 => write!(f, "k")?,
                    -1 => write!(f, "-k")?,
                    _ => write!(f, "{c1}k")?,
                }
                match c0.cmp(&0) {
                    std::cmp::Ordering::Greater => write!(f, "+{c0}"),
                    std::cmp::Ordering::Less => write!(f, "{c0}"),
                    std::cmp::Ordering::Equal => Ok(()),
                }
            }
        }
    }
}

/// The progression `n(k) = P·k + σ`, `k >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Family {
    pub modulus: u64,
    pub residue: u64,
}

impl Family {
    pub const fn new(modulus: u64, residue: u64) -> Self {
        Self { modulus, residue }
    }

    pub fn form(&self) -> LinearForm {
        LinearForm::new(self.modulus as i64, self.residue as i64)
    }

    pub fn n_at(&self, k: &BigInt) -> BigInt {
        self.form().eval(k)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.form())
    }
}

/// A denominator `constant · Π forms`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Term {
    pub constant: u64,
    pub forms: Vec<LinearForm>,
}

impl Term {
    pub fn new(constant: u64, forms: Vec<LinearForm>) -> Self {
        Self { constant, forms }
    }

    pub fn eval(&self, k: &BigInt) -> BigInt {
        self.forms
            .iter()
            .fold(BigInt::from(self.constant), |acc, f| acc * f.eval(k))
    }

    fn degree(&self) -> usize {
        self.forms.iter().filter(|f| !f.is_constant()).count()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.forms.is_empty() {
            return write!(f, "{}", self.constant);
        }
        if self.constant != 1 {
            write!(f, "{}", self.constant)?;
        }
        if self.constant == 1 && self.forms.len() == 1 {
            return write!(f, "{}", self.forms[0]);
        }
        for form in &self.forms {
            write!(f, "({form})")?;
        }
        Ok(())
    }
}

/// `4/n(k) = 1/a(k) + m/(γ·ΠF_j(k))`. The family form `n(k)` may appear
/// among the residual forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplitIdentity {
    pub family: Family,
    pub unit_term: LinearForm,
    pub numerator: u64,
    pub constant: u64,
    pub forms: Vec<LinearForm>,
}

impl SplitIdentity {
    /// `γ·ΠF_j(k)`.
    pub fn residual_denominator(&self, k: &BigInt) -> BigInt {
        Term::new(self.constant, self.forms.clone()).eval(k)
    }

    fn degree(&self) -> usize {
        2 + self.forms.len()
    }

    fn holds_at(&self, k: &BigInt) -> Option<bool> {
        let n = self.family.n_at(k);
        let a = self.unit_term.eval(k);
        let den = self.residual_denominator(k);
        if n.is_zero() || a.is_zero() || den.is_zero() {
            return None;
        }
        // 4/n = 1/a + m/den  <=>  4·a·den = n·(den + m·a)
        Some(BigInt::from(4) * &a * &den == &n * (&den + BigInt::from(self.numerator) * &a))
    }

    pub fn verify(&self) -> bool {
        verify_by_sampling(self.degree(), |k| self.holds_at(k))
    }

    /// Class index of the unit term: `ceil((4a(0) - σ + 1)/4)`.
    pub fn class(&self) -> Result<ClassIndex, IdentityError> {
        uniform_class(&self.family, |k| self.unit_term.eval(k))
    }
}

impl fmt::Display for SplitIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "4/({}) = 1/({}) + {}/({})",
            self.family,
            self.unit_term,
            self.numerator,
            Term::new(self.constant, self.forms.clone())
        )
    }
}

/// `4/n(k) = 1/T_1(k) + 1/T_2(k) + 1/T_3(k)`; `T_1` is the unit term that
/// fixes the class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThreeTermIdentity {
    pub family: Family,
    pub terms: [Term; 3],
    pub claimed_class: ClassIndex,
}

impl ThreeTermIdentity {
    fn degree(&self) -> usize {
        1 + self.terms.iter().map(Term::degree).sum::<usize>()
    }

    fn holds_at(&self, k: &BigInt) -> Option<bool> {
        let n = self.family.n_at(k);
        let d: Vec<BigInt> = self.terms.iter().map(|t| t.eval(k)).collect();
        if n.is_zero() || d.iter().any(Zero::is_zero) {
            return None;
        }
        let lhs = BigInt::from(4) * &d[0] * &d[1] * &d[2];
        let rhs = &n * (&d[1] * &d[2] + &d[0] * &d[2] + &d[0] * &d[1]);
        Some(lhs == rhs)
    }

    pub fn verify(&self) -> bool {
        verify_by_sampling(self.degree(), |k| self.holds_at(k))
    }
}

impl fmt::Display for ThreeTermIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "4/({}) = 1/({}) + 1/({}) + 1/({})",
            self.family, self.terms[0], self.terms[1], self.terms[2]
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Identity {
    Split(SplitIdentity),
    ThreeTerm(ThreeTermIdentity),
}

impl Identity {
    pub fn family(&self) -> Family {
        match self {
            Identity::Split(s) => s.family,
            Identity::ThreeTerm(t) => t.family,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Identity::Split(s) => s.fmt(f),
            Identity::ThreeTerm(t) => t.fmt(f),
        }
    }
}

/// Concrete values of an identity at one `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Split {
        n: Natural,
        unit: Natural,
        residual: ExactRational,
    },
    Full(Decomposition),
}

/// Samples `k = 1, 2, ...`, skipping poles, until `degree + 2` points agree.
fn verify_by_sampling(degree: usize, holds_at: impl Fn(&BigInt) -> Option<bool>) -> bool {
    let needed = degree + 2;
    let mut seen = 0;
    // each non-constant linear factor vanishes at most once
    let limit = 1 + needed + degree + 4;
    for k in 1..=limit {
        match holds_at(&BigInt::from(k)) {
            Some(true) => seen += 1,
            Some(false) => return false,
            None => continue,
        }
        if seen == needed {
            return true;
        }
    }
    false
}

fn uniform_class(family: &Family, a: impl Fn(&BigInt) -> BigInt) -> Result<ClassIndex, IdentityError> {
    let a0 = a(&BigInt::zero());
    let a1 = a(&BigInt::one());
    let a2 = a(&BigInt::from(2));
    let step = &a1 - &a0;
    if &a2 - &a1 != step || BigInt::from(4) * &step != BigInt::from(family.modulus) {
        return Err(IdentityError::NotUniformClass);
    }
    let diff = BigInt::from(4) * a0 - family.residue;
    if !diff.is_positive() {
        return Err(IdentityError::NotUniformClass);
    }
    let i: BigInt = (diff + 4) / 4;
    i.to_u32().map(ClassIndex).ok_or(IdentityError::Overflow)
}

pub fn verify_identity(id: &Identity) -> bool {
    match id {
        Identity::Split(s) => s.verify(),
        Identity::ThreeTerm(t) => t.verify(),
    }
}

/// `ceil((4a(0) - σ + 1)/4)` for the first term, after checking that
/// `4a(k) - n(k)` does not depend on `k`.
pub fn class_of_identity(id: &ThreeTermIdentity) -> Result<ClassIndex, IdentityError> {
    uniform_class(&id.family, |k| id.terms[0].eval(k))
}

fn positive(value: BigInt, which: impl Into<String>, k: &Natural) -> Result<Natural, IdentityError> {
    match value.to_biguint() {
        Some(v) if !v.is_zero() => Ok(v),
        _ => Err(IdentityError::NonPositive {
            which: which.into(),
            k: k.clone(),
        }),
    }
}

/// Evaluates the identity at `k`. Three-term identities yield a checked
/// [`Decomposition`] of `4/n(k)`.
pub fn instantiate(id: &Identity, k: &Natural) -> Result<Instance, IdentityError> {
    let kb = BigInt::from_biguint(Sign::Plus, k.clone());
    match id {
        Identity::Split(s) => {
            let n = positive(s.family.n_at(&kb), "n", k)?;
            let unit = positive(s.unit_term.eval(&kb), "a", k)?;
            let den = positive(s.residual_denominator(&kb), "residual", k)?;
            let residual = ExactRational::from_naturals(&Natural::from(s.numerator), &den)
                .map_err(EgyptianError::from)?;
            Ok(Instance::Split { n, unit, residual })
        }
        Identity::ThreeTerm(t) => {
            let n = positive(t.family.n_at(&kb), "n", k)?;
            let dens = t
                .terms
                .iter()
                .enumerate()
                .map(|(i, term)| positive(term.eval(&kb), format!("term {}", i + 1), k))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Instance::Full(Decomposition::four_over(&n, dens)?))
        }
    }
}
