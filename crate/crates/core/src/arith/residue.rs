use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{ArithError, Natural};

/// The arithmetic progression `{ n : n ≡ residue (mod modulus) }`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueClass {
    modulus: Natural,
    residue: Natural,
}

impl ResidueClass {
    /// The class of `value` modulo `modulus`; `value` is reduced.
    pub fn new(value: Natural, modulus: Natural) -> Result<Self, ArithError> {
        if modulus.is_zero() {
            return Err(ArithError::ZeroInput("residue class modulus"));
        }
        let residue = value % &modulus;
        Ok(Self { modulus, residue })
    }

    pub fn from_u64(value: u64, modulus: u64) -> Result<Self, ArithError> {
        Self::new(Natural::from(value), Natural::from(modulus))
    }

    /// Every integer.
    pub fn all() -> Self {
        Self {
            modulus: Natural::one(),
            residue: Natural::zero(),
        }
    }

    pub fn modulus(&self) -> &Natural {
        &self.modulus
    }

    pub fn residue(&self) -> &Natural {
        &self.residue
    }

    pub fn contains(&self, n: &Natural) -> bool {
        n % &self.modulus == self.residue
    }

    /// This class reduced to a divisor of its modulus.
    pub fn reduce(&self, modulus: &Natural) -> Option<Self> {
        if modulus.is_zero() || !(&self.modulus % modulus).is_zero() {
            return None;
        }
        Some(Self {
            modulus: modulus.clone(),
            residue: &self.residue % modulus,
        })
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

/// Intersection of two residue classes: a class modulo `lcm(m1, m2)`, or
/// `None` when the residues disagree modulo `gcd(m1, m2)`.
pub fn crt_intersect(c1: &ResidueClass, c2: &ResidueClass) -> Option<ResidueClass> {
    let m1 = BigInt::from_biguint(Sign::Plus, c1.modulus.clone());
    let m2 = BigInt::from_biguint(Sign::Plus, c2.modulus.clone());
    let r1 = BigInt::from_biguint(Sign::Plus, c1.residue.clone());
    let r2 = BigInt::from_biguint(Sign::Plus, c2.residue.clone());

    let ext = m1.extended_gcd(&m2);
    let g = ext.gcd;
    let diff = &r2 - &r1;
    if !(&diff % &g).is_zero() {
        return None;
    }
    // r1 + m1 * t with m1 * t ≡ r2 - r1 (mod m2)
    let m2_over_g = &m2 / &g;
    let t = ((&diff / &g) * ext.x).mod_floor(&m2_over_g);
    let lcm = &m1 * &m2_over_g;
    let x = (r1 + &m1 * t).mod_floor(&lcm);
    Some(ResidueClass {
        modulus: lcm.to_biguint().expect("lcm positive"),
        residue: x.to_biguint().expect("reduced residue non-negative"),
    })
}
