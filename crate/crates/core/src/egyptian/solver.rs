use std::fmt::Debug;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{CheckedMul, FromPrimitive, ToPrimitive, Zero};

use super::{ClassIndex, Decomposition, EgyptianError};
use crate::arith::{factor_u64, factorize, Natural};

/// Default ceiling on the class search in [`min_class`].
pub const DEFAULT_CLASS_CAP: u32 = 64;

/// Values below this bound run on `u128` internally: `n * a < 2^124`.
const FAST_LIMIT: u64 = 1 << 62;

/// Integer backend for the solver: `u128` for the fast path, `BigUint`
/// otherwise.
pub(crate) trait Word:
    Clone + Ord + Integer + CheckedMul + FromPrimitive + ToPrimitive + Into<BigUint> + Debug
{
    fn prime_factors(&self) -> Vec<(Self, u32)>;
}

impl Word for u128 {
    fn prime_factors(&self) -> Vec<(u128, u32)> {
        let v = u64::try_from(*self).expect("fast path only factors u64 values");
        factor_u64(v).into_iter().map(|(p, e)| (p as u128, e)).collect()
    }
}

impl Word for BigUint {
    fn prime_factors(&self) -> Vec<(BigUint, u32)> {
        factorize(self)
            .expect("solver factors positive values only")
            .factors()
            .to_vec()
    }
}

fn fast(n: &Natural) -> Option<u128> {
    n.to_u64().filter(|&v| v < FAST_LIMIT).map(u128::from)
}

/// Ascending divisors `d <= n` of `n^2` with `m | n + d` and `m | n + n^2/d`.
/// Each gives `m/n = 1/b + 1/c` with `b = (n + d)/m <= c = (n + n^2/d)/m`.
fn square_divisor_splits<T: Word>(m: &T, n: &T, fac: &[(T, u32)]) -> Vec<T> {
    let n_mod = n.mod_floor(m);
    let mut out = Vec::new();
    let mut powers: Vec<Vec<T>> = Vec::with_capacity(fac.len());
    for (p, e) in fac {
        let p_mod = p.mod_floor(m);
        let mut row = vec![T::one().mod_floor(m)];
        for k in 0..2 * e {
            let next = (row[k as usize].clone() * p_mod.clone()).mod_floor(m);
            row.push(next);
        }
        powers.push(row);
    }
    walk(fac, &powers, 0, T::one(), T::one().mod_floor(m), m, n, &n_mod, &mut out);
    out.sort();
    out
}

#[allow(clippy::too_many_arguments)]
fn walk<T: Word>(
    fac: &[(T, u32)],
    powers: &[Vec<T>],
    idx: usize,
    d: T,
    cod_mod: T,
    m: &T,
    n: &T,
    n_mod: &T,
    out: &mut Vec<T>,
) {
    if idx == fac.len() {
        let lhs = (n_mod.clone() + d.mod_floor(m)).mod_floor(m);
        let rhs = (n_mod.clone() + cod_mod).mod_floor(m);
        if lhs.is_zero() && rhs.is_zero() {
            out.push(d);
        }
        return;
    }
    let (p, e) = &fac[idx];
    let top = 2 * *e as usize;
    let mut current = d;
    for f in 0..=top {
        let cod = (cod_mod.clone() * powers[idx][top - f].clone()).mod_floor(m);
        walk(fac, powers, idx + 1, current.clone(), cod, m, n, n_mod, out);
        match current.checked_mul(p) {
            Some(next) if next <= *n => current = next,
            _ => break,
        }
    }
}

fn to_pairs<T: Word>(m: &T, n: &T, splits: Vec<T>) -> Vec<(Natural, Natural)> {
    let nb: BigUint = n.clone().into();
    let mb: BigUint = m.clone().into();
    splits
        .into_iter()
        .map(|d| {
            let db: BigUint = d.into();
            let b = (&nb + &db) / &mb;
            let c = (&nb * &nb / &db + &nb) / &mb;
            (b, c)
        })
        .collect()
}

fn two_term_generic<T: Word>(m: &T, n: &T) -> Vec<(Natural, Natural)> {
    let fac = n.prime_factors();
    to_pairs(m, n, square_divisor_splits(m, n, &fac))
}

/// Every pair `a <= b` with `1/a + 1/b = m/n`, sorted by `a`.
pub fn two_term_all(m: &Natural, n: &Natural) -> Result<Vec<(Natural, Natural)>, EgyptianError> {
    if m.is_zero() {
        return Err(EgyptianError::NonPositive("m"));
    }
    if n.is_zero() {
        return Err(EgyptianError::NonPositive("n"));
    }
    Ok(match (fast(m), fast(n)) {
        (Some(m), Some(n)) => two_term_generic(&m, &n),
        _ => two_term_generic(m, n),
    })
}

/// Factorization of `n * a / g` from those of `n` and `a`.
fn residual_factors<T: Word>(fac_n: &[(T, u32)], a: &T, g: &T) -> Vec<(T, u32)> {
    let mut merged: Vec<(T, u32)> = fac_n.to_vec();
    for (p, e) in a.prime_factors() {
        match merged.iter_mut().find(|(q, _)| *q == p) {
            Some(entry) => entry.1 += e,
            None => merged.push((p, e)),
        }
    }
    merged.sort();
    let mut g = g.clone();
    for (p, e) in merged.iter_mut() {
        while *e > 0 && g.is_multiple_of(p) {
            g = g / p.clone();
            *e -= 1;
        }
    }
    debug_assert!(g.is_one());
    merged.retain(|(_, e)| *e > 0);
    merged
}

/// Smallest `(b, c)` with `b >= a` and `4/n - 1/a = 1/b + 1/c`.
fn best_split<T: Word>(n: &T, a: &T, fac_n: &[(T, u32)]) -> Option<(Natural, Natural)> {
    let four = T::from_u8(4).expect("4 fits");
    let num = four * a.clone() - n.clone();
    let den = n.clone() * a.clone();
    let g = num.gcd(&den);
    let m = num / g.clone();
    let rest = den / g.clone();
    let fac = residual_factors(fac_n, a, &g);
    let a_big: BigUint = a.clone().into();
    // b >= a  <=>  rest + d >= m a
    let d_floor = m.clone() * a.clone();
    let best = square_divisor_splits(&m, &rest, &fac)
        .into_iter()
        .filter(|d| rest.clone() + d.clone() >= d_floor)
        .min_by_key(|d| certificate_key(d, &rest))?;
    let (b, c) = to_pairs(&m, &rest, vec![best]).pop()?;
    debug_assert!(b >= a_big);
    Some((b, c))
}

/// The split `b/c = x/y` with `x, y` coprime has `x = d/g`, `y = rest/g`,
/// `g = gcd(d, rest)`. Splits are ranked by `(x + y, x)`.
fn certificate_key<T: Word>(d: &T, rest: &T) -> (T, T) {
    let g = d.gcd(rest);
    let x = d.clone() / g.clone();
    let y = rest.clone() / g;
    (x.clone() + y, x)
}

fn three_term_generic<T: Word>(n: &T, a_max: &T) -> Option<(Natural, Natural, Natural)> {
    let four = T::from_u8(4).expect("4 fits");
    let three = T::from_u8(3).expect("3 fits");
    let lo = n.clone() / four.clone() + T::one();
    let hi = (three * n.clone() / four).min(a_max.clone());
    let fac_n = n.prime_factors();
    let mut a = lo;
    while a <= hi {
        if let Some((b, c)) = best_split(n, &a, &fac_n) {
            return Some((a.into(), b, c));
        }
        a = a + T::one();
    }
    None
}

/// The representation `4/n = 1/a + 1/b + 1/c` with the smallest `a <= a_max`.
/// The search starts at `a = floor(n/4) + 1`. Among the splits of the
/// residual `4/n - 1/a` with `b >= a`, the one whose coprime certificate
/// `b : c = x : y` has the smallest `x + y` (then the smallest `x`) is chosen.
pub fn three_term_bounded(n: &Natural, a_max: &Natural) -> Result<Option<Decomposition>, EgyptianError> {
    if *n < Natural::from(2u32) {
        return Err(EgyptianError::NTooSmall(n.clone()));
    }
    let found = match fast(n) {
        Some(nf) => {
            let cap = a_max.to_u128().unwrap_or(u128::MAX);
            three_term_generic(&nf, &cap)
        }
        None => three_term_generic(n, a_max),
    };
    found
        .map(|(a, b, c)| Decomposition::four_over(n, vec![a, b, c]))
        .transpose()
}

/// `ceil((4a - n + 1)/4)`: the class index witnessed by smallest denominator `a`.
pub fn class_index_for(n: &Natural, a: &Natural) -> ClassIndex {
    let t = Natural::from(4u32) * a + 1u32;
    assert!(t > *n, "4a must exceed n");
    let i = (t - n + 3u32) / 4u32;
    ClassIndex(i.to_u32().expect("class index fits u32"))
}

/// `floor((n + 4i - 1)/4)`: the largest smallest-denominator allowed in `C_i`.
pub(crate) fn class_bound_a(n: &Natural, class: u32) -> Natural {
    (n + Natural::from(4 * class as u64) - 1u32) / 4u32
}

/// Smallest class containing `n`, with the witness for the smallest `a`.
pub fn min_class(n: &Natural) -> Result<(ClassIndex, Decomposition), EgyptianError> {
    min_class_capped(n, DEFAULT_CLASS_CAP)
}

pub fn min_class_capped(n: &Natural, cap: u32) -> Result<(ClassIndex, Decomposition), EgyptianError> {
    let bound = class_bound_a(n, cap);
    match three_term_bounded(n, &bound)? {
        Some(d) => Ok((class_index_for(n, d.first()), d)),
        None => Err(EgyptianError::ClassCapExceeded { n: n.clone(), cap }),
    }
}
