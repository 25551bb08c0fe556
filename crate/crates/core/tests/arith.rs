mod common;

use betadiv::arith::{self, Sieve};
use betadiv::Error;
use common::oracle;
use proptest::prelude::*;

#[test]
fn small_primes_match_trial_division() {
    let listed = arith::prime_source(arith::PrimeQuery::UpTo(10_000)).unwrap();
    assert_eq!(listed, oracle::primes_upto(10_000));
    assert_eq!(arith::nth_prime(25).unwrap(), 97);
    assert_eq!(arith::prime_index(97).unwrap(), 25);
}

#[test]
fn omega_matches_trial_division() {
    for m in 1..=20_000 {
        assert_eq!(arith::omega(m).unwrap(), oracle::omega(m), "m = {m}");
    }
}

#[test]
fn zero_is_out_of_domain() {
    assert!(matches!(arith::factorize(0), Err(Error::OutOfDomain(0))));
    assert!(matches!(
        arith::nth_prime(0),
        Err(Error::ParamOutOfRange(_))
    ));
}

#[test]
fn small_cap_sieve() {
    let sieve = Sieve::new(100);
    assert_eq!(sieve.nth_prime(25).unwrap(), 97);
    assert!(matches!(
        sieve.prime_index(101),
        Err(Error::BeyondCap { .. })
    ));
    assert!(matches!(
        sieve.factorize(10_007 * 10_009),
        Err(Error::BeyondCap { .. })
    ));
    assert_eq!(
        sieve.factorize(97 * 89 * 2).unwrap().factors,
        vec![(2, 1), (89, 1), (97, 1)]
    );
}

#[test]
fn factorials_and_lcm_overflow() {
    assert_eq!(arith::factorial(20).unwrap(), 2_432_902_008_176_640_000);
    assert!(matches!(arith::factorial(21), Err(Error::Overflow(_))));
    assert!(matches!(
        arith::lcm(u64::MAX, u64::MAX - 1),
        Err(Error::Overflow(_))
    ));
}

proptest! {
    #[test]
    fn factorization_multiplies_back(m in 1u64..1_000_000_000_000) {
        let f = arith::factorize(m).unwrap();
        prop_assert_eq!(f.multiply_out(), m);
        for p in f.primes() {
            prop_assert!(oracle::is_prime(p));
        }
        prop_assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn omega_is_additive(a in 1u64..1_000_000, b in 1u64..1_000_000) {
        prop_assert_eq!(arith::omega(a * b).unwrap(), arith::omega(a).unwrap() + arith::omega(b).unwrap());
    }

    #[test]
    fn divisors_divide(m in 1u64..100_000) {
        let d = arith::divisors(m).unwrap();
        let brute: Vec<u64> = (1..=m).filter(|x| m % x == 0).collect();
        prop_assert_eq!(d, brute);
    }

    #[test]
    fn gcd_lcm_identity(a in 1u64..1_000_000, b in 1u64..1_000_000) {
        let g = arith::gcd(a, b);
        prop_assert_eq!(g, oracle::gcd(a, b));
        prop_assert_eq!(arith::lcm(a, b).unwrap() * g, a * b);
        prop_assert_eq!(arith::coprime(a, b), g == 1);
    }
}
