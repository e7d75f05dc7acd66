use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use semired::hilbert_poly::{
    eventual_compare, truncated_compare, HilbertPolynomial, SlopeVector, TruncatedOrder, Verdict,
};

fn rational() -> impl Strategy<Value = BigRational> {
    (-30i64..=30, 1i64..=8).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn polynomial() -> impl Strategy<Value = HilbertPolynomial> {
    prop::collection::vec(rational(), 0..=6).prop_map(HilbertPolynomial::new)
}

/// `1 + Σ |numerator|·denominator`, above every real root of `p`.
fn root_bound(p: &HilbertPolynomial) -> BigRational {
    let lead = match p.leading_coefficient() {
        Some(c) => c.abs(),
        None => return BigRational::zero(),
    };
    let total = p.coefficients().iter().fold(BigRational::zero(), |acc, c| acc + c.abs() / &lead);
    BigRational::from_integer(BigInt::from(1)) + total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn eventual_order_matches_evaluation_past_the_roots(p in polynomial(), q in polynomial()) {
        let d = p.sub(&q);
        let n = root_bound(&d);
        let value = p.evaluate(&n) - q.evaluate(&n);
        let expected = if value.is_zero() {
            Ordering::Equal
        } else if value.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        };
        prop_assert_eq!(eventual_compare(&p, &q), expected);
    }

    #[test]
    fn reduced_coefficients_ignore_scaling(p in polynomial(), c in rational()) {
        prop_assume!(!p.is_zero() && !c.is_zero());
        let scaled = p.scale(&c);
        for k in 0..=p.degree().unwrap() {
            prop_assert_eq!(p.coefficient_a(k).unwrap(), scaled.coefficient_a(k).unwrap());
        }
    }

    #[test]
    fn display_round_trips(p in polynomial()) {
        let back: HilbertPolynomial = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn lexicographic_truncation_is_a_total_order(
        vs in prop::collection::hash_set(prop::collection::vec(-3i64..=3, 3), 1..12)
    ) {
        let vs: Vec<SlopeVector> = vs.into_iter().map(|v| SlopeVector::from_integers(&v)).collect();
        let lex = TruncatedOrder::Lexicographic;
        let above = |u: &SlopeVector, v: &SlopeVector| truncated_compare(u, v, 3, lex).unwrap() == Verdict::Dominates;
        for u in &vs {
            for v in &vs {
                let verdict = truncated_compare(u, v, 3, lex).unwrap();
                if u == v {
                    prop_assert_eq!(verdict, Verdict::EqualToLevel);
                } else {
                    prop_assert!(above(u, v) != above(v, u));
                }
                for w in &vs {
                    if above(u, v) && above(v, w) {
                        prop_assert!(above(u, w));
                    }
                }
            }
        }
    }
}
