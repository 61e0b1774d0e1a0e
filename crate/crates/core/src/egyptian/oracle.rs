//! Brute-force three-term search. Uses neither factorization nor divisor
//! certificates, so it can check the solver independently.

use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{class_index_for, ClassIndex, Decomposition, EgyptianError};
use crate::arith::Natural;
use crate::egyptian::class_bound_a;

const ORACLE_LIMIT: u64 = 1 << 32;

/// Same contract as [`super::three_term_bounded`]: for each `a`, scans `b`
/// from `max(a, ceil(1/r))` to `floor(2/r)` where `r = 4/n - 1/a`, keeping
/// the pair `b : c = x : y` (coprime) with the smallest `x + y`, then `x`.
pub fn oracle_three_term(n: &Natural, a_max: &Natural) -> Result<Option<Decomposition>, EgyptianError> {
    let nv = n.to_u64().ok_or_else(|| EgyptianError::TooLarge(n.clone()))?;
    if nv < 2 {
        return Err(EgyptianError::NTooSmall(n.clone()));
    }
    if nv >= ORACLE_LIMIT {
        return Err(EgyptianError::TooLarge(n.clone()));
    }
    let nv = nv as u128;
    let hi = (3 * nv / 4).min(a_max.to_u128().unwrap_or(u128::MAX));
    let mut a = nv / 4 + 1;
    while a <= hi {
        let num = 4 * a - nv;
        let den = nv * a;
        let g = num.gcd(&den);
        let (p, q) = (num / g, den / g);
        let b_lo = a.max(q.div_ceil(p));
        let b_hi = 2 * q / p;
        // among all splits at this a, smallest (x + y, x) with b : c = x : y
        let mut best: Option<((u128, u128), u128, u128)> = None;
        for b in b_lo..=b_hi {
            // r - 1/b = (p b - q) / (q b)
            let top = p * b;
            if top <= q {
                continue;
            }
            let diff = top - q;
            let qb = q * b;
            if qb % diff == 0 {
                let c = qb / diff;
                let g = b.gcd(&c);
                let key = (b / g + c / g, b / g);
                if best.is_none_or(|(k, _, _)| key < k) {
                    best = Some((key, b, c));
                }
            }
        }
        if let Some((_, b, c)) = best {
            let dens = vec![Natural::from(a), Natural::from(b), Natural::from(c)];
            return Decomposition::four_over(n, dens).map(Some);
        }
        a += 1;
    }
    Ok(None)
}

/// Smallest class via the brute-force oracle.
pub fn oracle_min_class(n: &Natural, cap: u32) -> Result<(ClassIndex, Decomposition), EgyptianError> {
    match oracle_three_term(n, &class_bound_a(n, cap))? {
        Some(d) => Ok((class_index_for(n, d.first()), d)),
        None => Err(EgyptianError::ClassCapExceeded { n: n.clone(), cap }),
    }
}
