//! Unit-fraction solvers for `m/n` and `4/n`.
//!
//! Two-term representations come from the factorization of `n^2`:
//! `m/n = 1/a + 1/b` exactly when `(m a - n)(m b - n) = n^2`. Three-term
//! representations fix the smallest denominator `a`, reduce the residual
//! `4/n - 1/a`, and split it with the two-term machinery.

mod certificate;
mod greedy;
mod oracle;
mod solver;

use std::fmt;

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{ArithError, ExactRational, Natural};

pub use certificate::{certificate_to_decomposition, find_certificate, DivisorCertificate};
pub use greedy::greedy_expand;
pub use oracle::{oracle_min_class, oracle_three_term};
pub use solver::{
    class_index_for, min_class, min_class_capped, three_term_bounded, two_term_all,
    DEFAULT_CLASS_CAP,
};

pub(crate) use solver::class_bound_a;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EgyptianError {
    #[error("n = {0} has no three-term representation (need n >= 2)")]
    NTooSmall(Natural),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("class cap C_{cap} exceeded for n = {n}")]
    ClassCapExceeded { n: Natural, cap: u32 },
    #[error("certificate (x={x}, y={y}) is not valid for {m}/{n}")]
    InvalidCertificate {
        m: Natural,
        n: Natural,
        x: Natural,
        y: Natural,
    },
    #[error("denominators do not sum to {0}")]
    SumMismatch(ExactRational),
    #[error("{0} is too large for the brute-force oracle")]
    TooLarge(Natural),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Index `i` of the class `C_i`: the `n` with a three-term representation
/// whose smallest denominator is at most `(n + 4i - 1) / 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassIndex(pub u32);

impl ClassIndex {
    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for ClassIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C_{}", self.0)
    }
}

/// `target = sum 1/d` over non-decreasing denominators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decomposition {
    target: ExactRational,
    denominators: Vec<Natural>,
}

impl Decomposition {
    /// Sorts `denominators` and checks the sum exactly.
    pub fn new(target: ExactRational, mut denominators: Vec<Natural>) -> Result<Self, EgyptianError> {
        if denominators.iter().any(Zero::is_zero) {
            return Err(EgyptianError::NonPositive("denominator"));
        }
        denominators.sort();
        let sum = denominators
            .iter()
            .map(ExactRational::unit)
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .sum::<ExactRational>();
        if sum != target {
            return Err(EgyptianError::SumMismatch(target));
        }
        Ok(Self {
            target,
            denominators,
        })
    }

    /// `4/n = 1/a + 1/b + 1/c`.
    pub fn four_over(n: &Natural, denominators: Vec<Natural>) -> Result<Self, EgyptianError> {
        let target = ExactRational::from_naturals(&Natural::from(4u32), n)?;
        Self::new(target, denominators)
    }

    pub fn target(&self) -> &ExactRational {
        &self.target
    }

    pub fn denominators(&self) -> &[Natural] {
        &self.denominators
    }

    /// Smallest denominator.
    pub fn first(&self) -> &Natural {
        &self.denominators[0]
    }

    /// Denominators as `u128`, when they all fit.
    pub fn to_u128s(&self) -> Option<Vec<u128>> {
        self.denominators.iter().map(|d| d.to_u128()).collect()
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.denominators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_checks_sum() {
        let n = Natural::from(9u32);
        let ok = Decomposition::four_over(&n, vec![18u32.into(), 3u32.into(), 18u32.into()]).unwrap();
        assert_eq!(ok.to_string(), "(3, 18, 18)");
        assert!(Decomposition::four_over(&n, vec![3u32.into(), 18u32.into(), 19u32.into()]).is_err());
        assert!(Decomposition::four_over(&n, vec![0u32.into()]).is_err());
    }
}
