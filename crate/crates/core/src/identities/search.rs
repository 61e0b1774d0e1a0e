//! Template search for three-term identities on a family `Pk + σ`.
//!
//! A candidate unit term is `a(k) = (P/4)k + a0 = d·g(k)` with `d` the
//! content of `a`. Then `4/n - 1/a = m/(d·n·g)` with `m = 4a0 - σ`.
//!
//! * simple template: `m/d = 1/u + 1/v` gives tails `1/(u·n·g) + 1/(v·n·g)`;
//! * extended template: tails `1/(α·n·G) + 1/(β·g·G)` with
//!   `G = d(β·g + α·n)/(m·α·β)` an integral linear form.

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::{class_of_identity, Family, IdentityError, LinearForm, Term, ThreeTermIdentity};
use crate::arith::{divisors_u64, Natural};
use crate::egyptian::{two_term_all, ClassIndex};

struct Candidate {
    family: Family,
    d: u64,
    g: LinearForm,
    m: u64,
}

impl Candidate {
    fn new(family: Family, a0: u64) -> Option<Self> {
        let quarter = family.modulus / 4;
        let m = (4 * a0).checked_sub(family.residue).filter(|&m| m > 0)?;
        let d = quarter.gcd(&a0);
        let g = LinearForm::new(to_i64(quarter / d).ok()?, to_i64(a0 / d).ok()?);
        Some(Self { family, d, g, m })
    }

    fn unit_term(&self) -> Term {
        Term::new(self.d, vec![self.g])
    }

    fn finish(&self, tails: [Term; 2]) -> Result<Option<ThreeTermIdentity>, IdentityError> {
        let [t2, t3] = tails;
        let mut id = ThreeTermIdentity {
            family: self.family,
            terms: [self.unit_term(), t2, t3],
            claimed_class: ClassIndex(0),
        };
        if !id.verify() {
            return Ok(None);
        }
        id.claimed_class = class_of_identity(&id)?;
        Ok(Some(id))
    }

    fn simple(&self) -> Result<Vec<ThreeTermIdentity>, IdentityError> {
        let n = self.family.form();
        let mut out = Vec::new();
        for (u, v) in two_term_all(&Natural::from(self.m), &Natural::from(self.d))? {
            let (u, v) = (to_u64(&u)?, to_u64(&v)?);
            let tails = [Term::new(u, vec![n, self.g]), Term::new(v, vec![n, self.g])];
            out.extend(self.finish(tails)?);
        }
        Ok(out)
    }

    fn extended(&self, bound: u64) -> Result<Vec<ThreeTermIdentity>, IdentityError> {
        let Family { modulus: p, residue: sigma } = self.family;
        let (g1, g0) = (self.g.c1 as u128, self.g.c0 as u128);
        let d = self.d as u128;
        // α = α'h, β = β'h with gcd(α', β') = 1 forces α' | d and β' | d·gcd(P, σ)
        let alphas = divisors_u64(self.d);
        let betas = divisors_u64(self.d.checked_mul(p.gcd(&sigma)).ok_or(IdentityError::Overflow)?);
        let mut found: Vec<(u64, u64, LinearForm)> = Vec::new();
        for &a1 in alphas.iter().take_while(|&&a| a <= bound) {
            for &b1 in betas.iter().take_while(|&&b| b <= bound) {
                if a1.gcd(&b1) != 1 {
                    continue;
                }
                let base = self.m as u128 * a1 as u128 * b1 as u128;
                let n1 = d * (b1 as u128 * g1 + a1 as u128 * p as u128);
                let n0 = d * (b1 as u128 * g0 + a1 as u128 * sigma as u128);
                if !n1.is_multiple_of(base) || !n0.is_multiple_of(base) {
                    continue;
                }
                let (q1, q0) = (n1 / base, n0 / base);
                let h_max = bound / a1.max(b1);
                for h in 1..=h_max {
                    if q1 % h as u128 == 0 && q0 % h as u128 == 0 {
                        let big_g = LinearForm::new(to_i64(q1 / h as u128)?, to_i64(q0 / h as u128)?);
                        found.push((a1 * h, b1 * h, big_g));
                    }
                }
            }
        }
        found.sort();
        let n = self.family.form();
        let mut out = Vec::new();
        for (alpha, beta, big_g) in found {
            let tails = [Term::new(alpha, vec![n, big_g]), Term::new(beta, vec![self.g, big_g])];
            out.extend(self.finish(tails)?);
        }
        Ok(out)
    }
}

fn to_i64(v: impl TryInto<i64>) -> Result<i64, IdentityError> {
    v.try_into().map_err(|_| IdentityError::Overflow)
}

fn to_u64(v: &Natural) -> Result<u64, IdentityError> {
    v.to_u64().ok_or(IdentityError::Overflow)
}

fn check_family(p: u64, sigma: u64) -> Result<Family, IdentityError> {
    if p == 0 || !p.is_multiple_of(4) || sigma % 4 != 1 || sigma >= p || p > i64::MAX as u64 {
        return Err(IdentityError::BadFamily { p, sigma });
    }
    Ok(Family::new(p, sigma))
}

/// `a0 = (σ - 1)/4 + j` for `1 <= j <= j_max`; offset `j` is the class index.
fn offset_candidates(family: Family, j_max: u64) -> Vec<u64> {
    let base = (family.residue - 1) / 4;
    (1..=j_max).map(|j| base + j).collect()
}

/// Offsets plus content-aligned values `a0 = d·g0` with `d | P/4`,
/// `g0 <= j_max` and `gcd(P/(4d), g0) = 1`, which make `a` have content `d`.
fn extended_candidates(family: Family, j_max: u64) -> Vec<u64> {
    let quarter = family.modulus / 4;
    let mut out = offset_candidates(family, j_max);
    for d in divisors_u64(quarter) {
        for g0 in 1..=j_max {
            if (quarter / d).gcd(&g0) == 1 {
                if let Some(a0) = d.checked_mul(g0).filter(|&a0| 4 * a0 > family.residue) {
                    out.push(a0);
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// All identities of the simple template for offsets `j <= j_max`, ordered by
/// `j`, then by `u`.
pub fn search_simple_identity(p: u64, sigma: u64, j_max: u64) -> Result<Vec<ThreeTermIdentity>, IdentityError> {
    let family = check_family(p, sigma)?;
    let per: Vec<Vec<ThreeTermIdentity>> = offset_candidates(family, j_max)
        .into_par_iter()
        .map(|a0| Candidate::new(family, a0).map_or(Ok(Vec::new()), |c| c.simple()))
        .collect::<Result<_, _>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Simple and extended templates over the offsets and the content-aligned
/// unit terms, with `α, β <= coeff_bound`. Ordered by `a(0)`, then simple
/// before extended, then by `u` or `(α, β)`.
pub fn search_extended_identity(
    p: u64,
    sigma: u64,
    j_max: u64,
    coeff_bound: u64,
) -> Result<Vec<ThreeTermIdentity>, IdentityError> {
    let family = check_family(p, sigma)?;
    let per: Vec<Vec<ThreeTermIdentity>> = extended_candidates(family, j_max)
        .into_par_iter()
        .map(|a0| {
            let Some(c) = Candidate::new(family, a0) else {
                return Ok(Vec::new());
            };
            let mut found = c.simple()?;
            for id in c.extended(coeff_bound)? {
                if !found.contains(&id) {
                    found.push(id);
                }
            }
            Ok(found)
        })
        .collect::<Result<_, IdentityError>>()?;
    Ok(per.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_families_rejected() {
        assert!(search_simple_identity(9240, 1203, 5).is_err());
        assert!(search_simple_identity(9242, 1201, 5).is_err());
        assert!(search_simple_identity(24, 25, 5).is_err());
    }

    #[test]
    fn results_verify_within_offset() {
        // m/d > 2 for every small offset on 24k+1, so nothing splits
        assert!(search_simple_identity(24, 1, 4).unwrap().is_empty());
        let found = search_simple_identity(9240, 1201, 10).unwrap();
        assert!(!found.is_empty());
        for id in &found {
            assert!(id.verify());
            assert_eq!(class_of_identity(id).unwrap(), id.claimed_class);
            assert!(id.claimed_class.0 <= 10);
        }
    }

    #[test]
    fn content_aligned_candidates() {
        let c = extended_candidates(Family::new(120120, 2521), 50);
        assert!(c.contains(&4004));
        assert!(c.windows(2).all(|w| w[0] < w[1]));
    }
}
