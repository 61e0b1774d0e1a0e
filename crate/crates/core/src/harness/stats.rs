use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ClassCount, HarnessError, VerificationReport};
use crate::arith::{is_prime, Natural};
use crate::egyptian::{min_class_capped, ClassIndex, Decomposition, EgyptianError};
use crate::sieve::ExceptedSet;

/// `100·count/total` as a percentage rounded half-even to 4 significant
/// digits, computed exactly.
pub fn share_percent(count: u64, total: u64) -> f64 {
    if count == 0 || total == 0 {
        return 0.0;
    }
    let (count, total) = (u128::from(count), u128::from(total));
    // Smallest scale 10^s putting the value in [1000, 10000).
    let mut s = 0u32;
    while 100 * count * 10u128.pow(s) < 1000 * total {
        s += 1;
    }
    let num = 100 * count * 10u128.pow(s);
    let (mut q, rem) = (num / total, num % total);
    if 2 * rem > total || (2 * rem == total && q % 2 == 1) {
        q += 1;
    }
    let digits = q.to_string();
    let text = if s == 0 {
        digits
    } else {
        let pad = format!("{digits:0>width$}", width = s as usize + 1);
        let (int, frac) = pad.split_at(pad.len() - s as usize);
        format!("{int}.{frac}")
    };
    text.parse().expect("decimal string")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyHistogram {
    pub modulus: u64,
    pub residue: u64,
    pub s_lo: u64,
    pub s_hi: u64,
    pub cap: u32,
    pub primes_only: bool,
    pub counts: Vec<ClassCount>,
    /// Values `s` whose member exceeded the cap.
    pub exceptions: Vec<u64>,
    pub max_class: Option<u32>,
}

impl FamilyHistogram {
    pub fn count_of(&self, class: u32) -> u64 {
        self.counts.iter().find(|c| c.class == class).map_or(0, |c| c.count)
    }

    pub fn share_of(&self, class: u32) -> f64 {
        self.counts.iter().find(|c| c.class == class).map_or(0.0, |c| c.share)
    }
}

/// Min-class histogram of `modulus·s + residue` for `s_lo <= s <= s_hi`,
/// optionally restricted to prime members.
pub fn family_distribution(
    modulus: u64,
    residue: u64,
    s_lo: u64,
    s_hi: u64,
    cap: u32,
    primes_only: bool,
) -> Result<FamilyHistogram, HarnessError> {
    if s_lo > s_hi {
        return Err(HarnessError::InvalidJob(format!("s_lo = {s_lo} > s_hi = {s_hi}")));
    }
    let results: Vec<(u64, Result<ClassIndex, EgyptianError>)> = (s_lo..=s_hi)
        .into_par_iter()
        .filter_map(|s| {
            let n = Natural::from(modulus) * s + residue;
            if primes_only && !is_prime(&n) {
                return None;
            }
            Some((s, min_class_capped(&n, cap).map(|(c, _)| c)))
        })
        .collect();
    let mut counts = BTreeMap::new();
    let mut exceptions = Vec::new();
    for (s, r) in results {
        match r {
            Ok(c) => *counts.entry(c.0).or_insert(0u64) += 1,
            Err(EgyptianError::ClassCapExceeded { .. }) => exceptions.push(s),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(FamilyHistogram {
        modulus,
        residue,
        s_lo,
        s_hi,
        cap,
        primes_only,
        max_class: counts.keys().next_back().copied(),
        counts: VerificationReport::counts_from(&counts),
        exceptions,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleCheck {
    pub class: ClassIndex,
    pub decomposition: Decomposition,
    pub elapsed: Duration,
}

pub fn check_single(n: &Natural, cap: u32) -> Result<SingleCheck, HarnessError> {
    let started = Instant::now();
    let (class, decomposition) = min_class_capped(n, cap)?;
    Ok(SingleCheck {
        class,
        decomposition,
        elapsed: started.elapsed(),
    })
}

/// An `n` outside the excepted residues whose class exceeds the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub n: u64,
    pub residue: u64,
    pub min_class: u32,
}

/// Checks the all-`n` reading of "outside the excepted set means class at
/// most `bound`" on `lo <= n < hi`. Report only: such claims hold for primes
/// but not for every `n`.
pub fn moreover_discrepancies(set: &ExceptedSet, bound: ClassIndex, lo: u64, hi: u64) -> Result<Vec<Discrepancy>, HarnessError> {
    let lo = lo.max(2);
    let found: Vec<Result<Option<Discrepancy>, HarnessError>> = (lo..hi.max(lo))
        .into_par_iter()
        .filter(|n| !set.contains_residue(n % set.modulus))
        .map(|n| {
            let cap = bound.0 + 1;
            match min_class_capped(&Natural::from(n), cap) {
                Ok((c, _)) if c <= bound => Ok(None),
                Ok((c, _)) => Ok(Some(Discrepancy {
                    n,
                    residue: n % set.modulus,
                    min_class: c.0,
                })),
                Err(EgyptianError::ClassCapExceeded { .. }) => {
                    let (c, _) = min_class_capped(&Natural::from(n), u32::MAX)?;
                    Ok(Some(Discrepancy {
                        n,
                        residue: n % set.modulus,
                        min_class: c.0,
                    }))
                }
                Err(e) => Err(e.into()),
            }
        })
        .collect();
    found.into_iter().filter_map(Result::transpose).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shares_round_half_even() {
        assert_eq!(share_percent(10852, 24493), 44.31);
        assert_eq!(share_percent(1, 3), 33.33);
        assert_eq!(share_percent(2, 3), 66.67);
        assert_eq!(share_percent(1, 1), 100.0);
        assert_eq!(share_percent(0, 7), 0.0);
        // 1/8 = 12.5 exactly; 1/16 = 6.25 exactly; 1/160000 = 0.000625
        assert_eq!(share_percent(1, 8), 12.5);
        assert_eq!(share_percent(1, 160000), 0.000625);
        // 0.12345 -> 0.1234 (tie to even), 0.12355 -> 0.1236
        assert_eq!(share_percent(12345, 10_000_000), 0.1234);
        assert_eq!(share_percent(12355, 10_000_000), 0.1236);
        // 99.995 rounds up past the fourth digit
        assert_eq!(share_percent(19999, 20000), 100.0);
    }

    #[test]
    fn single_checks() {
        let r = check_single(&Natural::from(2u32), 4).unwrap();
        assert_eq!(r.class, ClassIndex(1));
        assert_eq!(r.decomposition.to_u128s(), Some(vec![1, 2, 2]));
        let r = check_single(&Natural::from(1009u32), 4).unwrap();
        assert_eq!(r.decomposition.to_u128s(), Some(vec![253, 92828, 1021108]));
        let err = check_single(&Natural::from(2521u32), 3).unwrap_err();
        assert!(err.to_string().contains("C_3"), "{err}");
    }

    #[test]
    fn identity_family_stays_in_bound() {
        let h = family_distribution(9240, 1201, 0, 100, 8, false).unwrap();
        assert!(h.exceptions.is_empty());
        assert_eq!(h.counts.iter().map(|c| c.count).sum::<u64>(), 101);
        assert!(family_distribution(9240, 1201, 5, 4, 8, false).is_err());
    }

    #[test]
    fn moreover_mod_24_fails_at_8() {
        let e = ExceptedSet::new(24, vec![1], "prop-1.3").unwrap();
        let d = moreover_discrepancies(&e, ClassIndex(1), 2, 50).unwrap();
        assert!(d.iter().any(|d| d.n == 8));
        assert!(d.iter().all(|d| d.min_class > 1));
    }
}
