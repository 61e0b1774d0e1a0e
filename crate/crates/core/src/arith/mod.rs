//! Exact integer and rational arithmetic: factorization, divisors, residue
//! classes and CRT.

mod factor;
mod rational;
mod residue;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

pub use factor::{factorize, is_prime, Factorization};
pub use rational::{rational_sub, ExactRational};
pub use residue::{crt_intersect, ResidueClass};

pub(crate) use factor::{factor_u64, is_prime_u64};

/// Unbounded non-negative integer.
pub type Natural = BigUint;

/// Divisor enumeration refuses to materialize more than this many values.
pub const MAX_DIVISORS: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0}: input must be positive")]
    ZeroInput(&'static str),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("{count} divisors exceeds the enumeration cap of {MAX_DIVISORS}")]
    TooManyDivisors { count: Natural },
    #[error("invalid factorization: {0}")]
    InvalidFactorization(String),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

/// All divisors of the factored value, strictly increasing.
pub fn divisors(f: &Factorization) -> Result<Vec<Natural>, ArithError> {
    let count = f.divisor_count();
    if count > Natural::from(MAX_DIVISORS) {
        return Err(ArithError::TooManyDivisors { count });
    }
    let mut out = vec![Natural::one()];
    out.reserve(count.to_usize().unwrap_or(0));
    for (p, e) in f.factors() {
        let len = out.len();
        let mut power = Natural::one();
        for _ in 0..*e {
            power *= p;
            for i in 0..len {
                let d = &out[i] * &power;
                out.push(d);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Divisors of a `u64` value, sorted.
pub(crate) fn divisors_u64(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor_u64(n) {
        let len = out.len();
        let mut power = 1u64;
        for _ in 0..e {
            power *= p;
            for i in 0..len {
                out.push(out[i] * power);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `true` when `n` is a perfect square.
pub(crate) fn is_square_u64(n: u64) -> bool {
    let r = (n as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).any(|s| s.checked_mul(s) == Some(n))
}
