use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::EgyptianError;
use crate::arith::{ExactRational, Natural};

/// Fibonacci–Sylvester expansion: repeatedly subtract the largest unit
/// fraction not exceeding the remainder whose denominator has not been used.
/// Returns strictly increasing denominators.
pub fn greedy_expand(r: &ExactRational) -> Result<Vec<Natural>, EgyptianError> {
    if !r.is_positive() {
        return Err(EgyptianError::NonPositive("greedy target"));
    }
    let mut rest = r.clone();
    let mut out: Vec<Natural> = Vec::new();
    let mut last = BigInt::zero();
    while !rest.is_zero() {
        let d = rest.recip()?.ceil().max(&last + BigInt::one());
        let d = d.to_biguint().expect("positive denominator");
        rest = &rest - &ExactRational::unit(&d)?;
        last = BigInt::from(d.clone());
        out.push(d);
    }
    Ok(out)
}
