//! Deterministic primality testing and integer factorization.
//!
//! Trial division by the primes below 10^4, Miller–Rabin with the first
//! thirteen prime bases, and Brent's variant of Pollard rho. Every random-looking
//! choice (rho start point, polynomial constant) is derived from the input so
//! the same `n` always produces the same factor list in the same order.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{ArithError, Natural};

const TRIAL_LIMIT: u32 = 10_000;

/// Miller–Rabin with these bases is exact below this bound.
const MR_EXACT_BOUND: &str = "3317044064679887385961981";
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const MR_EXTRA_BASES: [u64; 11] = [43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

/// The primes below 10^4, built once.
pub(crate) fn small_primes() -> &'static [u32] {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let limit = TRIAL_LIMIT as usize;
        let mut composite = vec![false; limit + 1];
        let mut primes = Vec::new();
        for i in 2..=limit {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j <= limit {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

/// Prime factorization of a natural number: primes strictly increasing,
/// exponents positive.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    factors: Vec<(Natural, u32)>,
}

impl Factorization {
    /// Builds a factorization from `(prime, exponent)` pairs, checking the
    /// ordering and primality invariants.
    pub fn from_pairs(pairs: Vec<(Natural, u32)>) -> Result<Self, ArithError> {
        for w in pairs.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(ArithError::InvalidFactorization(
                    "primes must be strictly increasing".into(),
                ));
            }
        }
        for (p, e) in &pairs {
            if *e == 0 {
                return Err(ArithError::InvalidFactorization(format!(
                    "zero exponent for {p}"
                )));
            }
            if !is_prime(p) {
                return Err(ArithError::InvalidFactorization(format!("{p} is not prime")));
            }
        }
        Ok(Self { factors: pairs })
    }

    pub(crate) fn from_u64_pairs(pairs: &[(u64, u32)]) -> Self {
        Self {
            factors: pairs.iter().map(|&(p, e)| (Natural::from(p), e)).collect(),
        }
    }

    pub fn factors(&self) -> &[(Natural, u32)] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Product of `prime^exponent` over all entries.
    pub fn value(&self) -> Natural {
        self.factors
            .iter()
            .fold(Natural::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// Number of divisors, `prod (e_i + 1)`.
    pub fn divisor_count(&self) -> Natural {
        self.factors
            .iter()
            .fold(Natural::one(), |acc, (_, e)| acc * Natural::from(e + 1))
    }
}

/// Factors `n` into primes. Deterministic for a given `n`.
pub fn factorize(n: &Natural) -> Result<Factorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroInput("factorize"));
    }
    if let Some(small) = n.to_u64() {
        return Ok(Factorization::from_u64_pairs(&factor_u64(small)));
    }
    let mut primes = Vec::new();
    let mut rest = n.clone();
    for &p in small_primes() {
        let p = BigUint::from(p);
        while (&rest % &p).is_zero() {
            rest /= &p;
            primes.push(p.clone());
        }
    }
    split_big(rest, &mut primes);
    primes.sort();
    Ok(Factorization {
        factors: group(primes),
    })
}

/// Primality of an arbitrary natural. Exact below 3.3e24; above that bound
/// the result is a strong probable-prime test to 24 fixed bases.
pub fn is_prime(n: &Natural) -> bool {
    match n.to_u64() {
        Some(small) => is_prime_u64(small),
        None => is_prime_big(n),
    }
}

fn group<T: PartialEq + Clone>(sorted: Vec<T>) -> Vec<(T, u32)> {
    let mut out: Vec<(T, u32)> = Vec::new();
    for p in sorted {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

// ---------------------------------------------------------------------------
// u64 fast path
// ---------------------------------------------------------------------------

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn brent_u64(n: u64, seed: u64) -> Option<u64> {
    const BLOCK: u64 = 128;
    let c = seed % (n - 1) + 1;
    let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
    let mut y = splitmix64(seed) % n;
    let (mut r, mut q, mut g) = (1u64, 1u64, 1u64);
    let (mut x, mut ys) = (0u64, 0u64);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BLOCK.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += BLOCK;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn split_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let root = (n as f64).sqrt() as u64;
    if let Some(r) = (root.saturating_sub(1)..=root + 1).find(|&r| r > 1 && r.checked_mul(r) == Some(n)) {
        split_u64(r, out);
        split_u64(r, out);
        return;
    }
    let mut seed = splitmix64(n);
    let d = loop {
        if let Some(d) = brent_u64(n, seed) {
            break d;
        }
        seed = splitmix64(seed);
    };
    split_u64(d, out);
    split_u64(n / d, out);
}

/// Sorted `(prime, exponent)` pairs of `n`; empty for `n <= 1`.
pub(crate) fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n <= 1 {
        return out;
    }
    for &p in small_primes() {
        let p = p as u64;
        if p * p > n {
            break;
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n == 1 {
        return out;
    }
    let bound = TRIAL_LIMIT as u64;
    if n < bound * bound {
        out.push((n, 1));
        return out;
    }
    let mut big = Vec::new();
    split_u64(n, &mut big);
    big.sort_unstable();
    out.extend(group(big));
    out
}

// ---------------------------------------------------------------------------
// arbitrary precision path
// ---------------------------------------------------------------------------

fn is_prime_big(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &p in MR_BASES.iter().chain(MR_EXTRA_BASES.iter()) {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let exact_bound: BigUint = MR_EXACT_BOUND.parse().expect("constant parses");
    let bases: Vec<u64> = if *n < exact_bound {
        MR_BASES.to_vec()
    } else {
        MR_BASES.iter().chain(MR_EXTRA_BASES.iter()).copied().collect()
    };
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in bases {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn brent_big(n: &BigUint, seed: u64) -> Option<BigUint> {
    const BLOCK: u64 = 128;
    let c = BigUint::from(seed) % (n - 1u32) + 1u32;
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(splitmix64(seed)) % n;
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = BigUint::zero();
    let mut ys = BigUint::zero();
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..BLOCK.min(r - k) {
                y = f(&y);
                q = (q * diff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += BLOCK;
        }
        r *= 2;
    }
    if g == *n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (g != *n).then_some(g)
}

/// `(r, k)` with `r^k = n` and `k >= 2` maximal-first, if `n` is a perfect power.
fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits() as u32;
    for k in (2..=bits).rev() {
        let r = n.nth_root(k);
        if r > BigUint::one() && r.pow(k) == *n {
            return Some((r, k));
        }
    }
    None
}

fn split_big(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if let Some(small) = n.to_u64() {
        let mut parts = Vec::new();
        split_u64(small, &mut parts);
        out.extend(parts.into_iter().map(BigUint::from));
        return;
    }
    if is_prime_big(&n) {
        out.push(n);
        return;
    }
    if let Some((root, k)) = perfect_power(&n) {
        let mut parts = Vec::new();
        split_big(root, &mut parts);
        for _ in 0..k {
            out.extend(parts.iter().cloned());
        }
        return;
    }
    let digest = n.iter_u64_digits().fold(0u64, |h, w| splitmix64(h ^ w));
    let mut seed = digest;
    let d = loop {
        if let Some(d) = brent_big(&n, seed) {
            break d;
        }
        seed = splitmix64(seed);
    };
    let cofactor = &n / &d;
    split_big(d, out);
    split_big(cofactor, out);
}
