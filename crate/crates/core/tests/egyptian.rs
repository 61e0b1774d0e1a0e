use es_lab::arith::{ExactRational, Natural};
use es_lab::egyptian::{
    certificate_to_decomposition, class_index_for, find_certificate, greedy_expand, min_class, min_class_capped,
    oracle_min_class, oracle_three_term, three_term_bounded, two_term_all, ClassIndex, DivisorCertificate,
    EgyptianError,
};
use num_integer::Integer;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn nat(v: u64) -> Natural {
    Natural::from(v)
}

fn dens(v: &[Natural]) -> Vec<u64> {
    v.iter().map(|d| d.to_u64().unwrap()).collect()
}

/// Every `a <= b` with `1/a + 1/b = m/n`, by scanning `a`.
fn scan_two_term(m: u64, n: u64) -> Vec<(u64, u64)> {
    let lo = n.div_ceil(m);
    let hi = 2 * n / m;
    (lo..=hi)
        .filter_map(|a| {
            let top = m * a;
            if top <= n {
                return None;
            }
            let (num, den) = (top - n, n * a);
            (den % num == 0).then(|| (a, den / num)).filter(|&(a, b)| b >= a)
        })
        .collect()
}

#[test]
fn two_term_2009() {
    let got: Vec<(u64, u64)> = two_term_all(&nat(4), &nat(2009))
        .unwrap()
        .into_iter()
        .map(|(a, b)| (a.to_u64().unwrap(), b.to_u64().unwrap()))
        .collect();
    assert_eq!(got, vec![(504, 144648), (574, 4018), (588, 3444)]);
}

#[test]
fn two_term_complete_against_scan() {
    for m in 1..=6u64 {
        for n in 1..=5000u64 {
            let got: Vec<(u64, u64)> = two_term_all(&nat(m), &nat(n))
                .unwrap()
                .into_iter()
                .map(|(a, b)| (a.to_u64().unwrap(), b.to_u64().unwrap()))
                .collect();
            assert_eq!(got, scan_two_term(m, n), "{m}/{n}");
        }
    }
}

#[test]
fn certificate_iff_two_term() {
    for m in 1..=12u64 {
        for n in 1..=2000u64 {
            if m.gcd(&n) != 1 {
                continue;
            }
            let has_pair = !two_term_all(&nat(m), &nat(n)).unwrap().is_empty();
            let cert = find_certificate(&nat(m), &nat(n)).unwrap();
            assert_eq!(has_pair, cert.is_some(), "{m}/{n}");
            if let Some(c) = cert {
                let d = certificate_to_decomposition(&nat(m), &nat(n), &c).unwrap();
                assert_eq!(d.target(), &ExactRational::from_u64s(m, n).unwrap());
            }
        }
    }
}

#[test]
fn certificate_examples() {
    let c = find_certificate(&nat(7), &nat(1460)).unwrap().unwrap();
    let (x, y) = (c.x.to_u64().unwrap(), c.y.to_u64().unwrap());
    assert_eq!((x.min(y), x.max(y)), (2, 5));
    let bad = DivisorCertificate::new(3u32, 5u32);
    assert!(matches!(
        certificate_to_decomposition(&nat(7), &nat(1460), &bad),
        Err(EgyptianError::InvalidCertificate { .. })
    ));
}

#[test]
fn three_term_examples() {
    let t = |n: u64, a: u64| dens(three_term_bounded(&nat(n), &nat(a)).unwrap().unwrap().denominators());
    assert_eq!(t(9, 3), vec![3, 18, 18]);
    assert_eq!(t(1009, 253), vec![253, 92828, 1021108]);
    assert_eq!(t(2521, 636), vec![636, 70588, 5611746]);
    assert!(three_term_bounded(&nat(2521), &nat(635)).unwrap().is_none());
    assert!(matches!(three_term_bounded(&nat(1), &nat(5)), Err(EgyptianError::NTooSmall(_))));
}

#[test]
fn min_class_examples() {
    assert_eq!(min_class(&nat(2)).unwrap().0, ClassIndex(1));
    assert_eq!(min_class(&nat(73)).unwrap().0, ClassIndex(2));
    // No representation of 4/1201 has a <= 305, so 1201 sits in C_6, not C_4.
    let (i, d) = min_class(&nat(1201)).unwrap();
    assert_eq!((i, d.first().to_u64().unwrap()), (ClassIndex(6), 306));
    assert!(oracle_three_term(&nat(1201), &nat(305)).unwrap().is_none());
    let err = min_class_capped(&nat(2521), 5).unwrap_err();
    assert_eq!(err, EgyptianError::ClassCapExceeded { n: nat(2521), cap: 5 });
}

#[test]
fn solver_matches_oracle_with_same_witness() {
    for n in 2..=800u64 {
        let (i, d) = min_class(&nat(n)).unwrap();
        let (oi, od) = oracle_min_class(&nat(n), 64).unwrap();
        assert_eq!((i, d.denominators()), (oi, od.denominators()), "n = {n}");
    }
}

#[test]
fn bounded_search_matches_oracle() {
    for n in 2..=400u64 {
        for a_max in [n / 4, n / 4 + 1, n / 4 + 3, n / 2] {
            let s = three_term_bounded(&nat(n), &nat(a_max)).unwrap();
            let o = oracle_three_term(&nat(n), &nat(a_max)).unwrap();
            assert_eq!(s, o, "n = {n}, a_max = {a_max}");
        }
    }
}

#[test]
fn smallest_denominator_within_range() {
    for n in 2..=5000u64 {
        let (i, d) = min_class(&nat(n)).unwrap();
        let a = d.first().to_u64().unwrap();
        assert!(n / 4 < a && a <= 3 * n / 4, "n = {n}, a = {a}");
        assert_eq!(class_index_for(&nat(n), d.first()), i);
        assert_eq!(d.target(), &ExactRational::from_u64s(4, n).unwrap());
    }
}

#[test]
fn large_input_uses_big_path() {
    // Above the u64 fast path: 4/n with n = 4k+3 splits as 1/(k+1) + ...
    let n: Natural = "340282366920938463463374607431768211459".parse().unwrap();
    let (i, d) = min_class(&n).unwrap();
    assert_eq!(i, ClassIndex(1));
    assert_eq!(d.target(), &ExactRational::from_naturals(&nat(4), &n).unwrap());
}

proptest! {
    #[test]
    // Greedy denominators grow doubly exponentially in the step count, so
    // numerators stay small.
    fn greedy_sums_and_terminates(p in 1u64..8, q in 1u64..400) {
        let r = ExactRational::from_u64s(p, q).unwrap();
        let d = greedy_expand(&r).unwrap();
        prop_assert!(d.windows(2).all(|w| w[0] < w[1]));
        let mut sum = ExactRational::zero();
        for x in &d {
            sum = &sum + &ExactRational::unit(x).unwrap();
        }
        prop_assert_eq!(sum, r);
    }
}
