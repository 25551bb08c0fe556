//! Exact integer arithmetic over N = {1, 2, 3, ...}.
//!
//! A smallest-prime-factor sieve covers `[1, cap]` (default 10^6). Values
//! above the cap are factored by trial division with the sieved primes; a
//! value whose cofactor cannot be certified that way (a composite with all
//! prime factors above the cap) is reported as [`Error::BeyondCap`] rather
//! than guessed.
//!
//! The default sieve lives in a process-wide `OnceLock`, so concurrent callers
//! share one write-once table.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_SIEVE_CAP: u64 = 1_000_000;

/// Prime factorization of a natural number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub value: u64,
    /// `(prime, exponent)` pairs in ascending prime order.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Total number of prime factors counted with multiplicity.
    pub fn omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn multiply_out(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// All divisors in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Which primes to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeQuery {
    /// All primes `<= M`, ascending.
    UpTo(u64),
    /// The i-th prime, 1-based.
    Nth(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GcdLcm {
    pub gcd: u64,
    pub lcm: u64,
    pub coprime: bool,
}

#[derive(Debug)]
pub struct Sieve {
    cap: u64,
    spf: Vec<u32>,
    primes: Vec<u64>,
}

impl Sieve {
    pub fn new(cap: u64) -> Self {
        let cap = cap.max(2);
        let n = cap as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u64);
            }
            let si = spf[i];
            for &p in &primes {
                if p as u32 > si || i * p as usize > n {
                    break;
                }
                spf[i * p as usize] = p as u32;
            }
        }
        Sieve { cap, spf, primes }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn factorize(&self, m: u64) -> Result<Factorization> {
        if m == 0 {
            return Err(Error::OutOfDomain(0));
        }
        let mut factors: Vec<(u64, u32)> = Vec::new();
        let mut push = |p: u64| match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        };
        if m <= self.cap {
            let mut r = m as usize;
            while r > 1 {
                let p = self.spf[r] as usize;
                push(p as u64);
                r /= p;
            }
        } else {
            let mut r = m;
            let mut certified = false;
            for &p in &self.primes {
                if p.saturating_mul(p) > r {
                    certified = true;
                    break;
                }
                while r % p == 0 {
                    push(p);
                    r /= p;
                }
            }
            if r > 1 {
                // All remaining prime factors exceed the cap; r is prime only
                // if it is below the square of the next prime.
                if !certified && r > self.cap.saturating_mul(self.cap) {
                    return Err(Error::BeyondCap {
                        what: "cofactor",
                        value: r,
                        cap: self.cap,
                    });
                }
                push(r);
            }
        }
        Ok(Factorization { value: m, factors })
    }

    pub fn is_prime(&self, m: u64) -> Result<bool> {
        if m == 0 {
            return Err(Error::OutOfDomain(0));
        }
        if m <= self.cap {
            return Ok(m >= 2 && self.spf[m as usize] as u64 == m);
        }
        let f = self.factorize(m)?;
        Ok(f.factors.len() == 1 && f.factors[0].1 == 1)
    }

    /// 1-based index of the prime `p` (so `prime_index(2) == 1`).
    pub fn prime_index(&self, p: u64) -> Result<u64> {
        if p > self.cap {
            return Err(Error::BeyondCap {
                what: "prime index query",
                value: p,
                cap: self.cap,
            });
        }
        match self.primes.binary_search(&p) {
            Ok(i) => Ok(i as u64 + 1),
            Err(_) => Err(Error::NotPrime(p)),
        }
    }

    pub fn nth_prime(&self, i: u64) -> Result<u64> {
        if i == 0 {
            return Err(Error::ParamOutOfRange("prime index must be >= 1".into()));
        }
        self.primes
            .get(i as usize - 1)
            .copied()
            .ok_or(Error::BeyondCap {
                what: "prime index",
                value: i,
                cap: self.primes.len() as u64,
            })
    }

    pub fn primes_upto(&self, bound: u64) -> Result<&[u64]> {
        if bound > self.cap {
            return Err(Error::BeyondCap {
                what: "prime bound",
                value: bound,
                cap: self.cap,
            });
        }
        let end = self.primes.partition_point(|&p| p <= bound);
        Ok(&self.primes[..end])
    }

    pub fn prime_source(&self, query: PrimeQuery) -> Result<Vec<u64>> {
        match query {
            PrimeQuery::UpTo(m) => Ok(self.primes_upto(m)?.to_vec()),
            PrimeQuery::Nth(i) => Ok(vec![self.nth_prime(i)?]),
        }
    }
}

static DEFAULT_SIEVE: OnceLock<Sieve> = OnceLock::new();

/// The shared default sieve (cap [`DEFAULT_SIEVE_CAP`]).
pub fn sieve() -> &'static Sieve {
    DEFAULT_SIEVE.get_or_init(|| Sieve::new(DEFAULT_SIEVE_CAP))
}

pub fn factorize(m: u64) -> Result<Factorization> {
    sieve().factorize(m)
}

/// Ω(m): prime factors of m counted with multiplicity. `m` lies on level Ω(m).
pub fn omega(m: u64) -> Result<u32> {
    Ok(factorize(m)?.omega())
}

pub fn is_prime(m: u64) -> Result<bool> {
    sieve().is_prime(m)
}

pub fn prime_index(p: u64) -> Result<u64> {
    sieve().prime_index(p)
}

pub fn nth_prime(i: u64) -> Result<u64> {
    sieve().nth_prime(i)
}

pub fn prime_source(query: PrimeQuery) -> Result<Vec<u64>> {
    sieve().prime_source(query)
}

pub fn divisors(m: u64) -> Result<Vec<u64>> {
    Ok(factorize(m)?.divisors())
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn coprime(a: u64, b: u64) -> bool {
    gcd(a, b) == 1
}

pub fn lcm(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Err(Error::OutOfDomain(0));
    }
    (a / gcd(a, b))
        .checked_mul(b)
        .ok_or_else(|| Error::Overflow(format!("lcm({a}, {b})")))
}

pub fn coprime_lcm(a: u64, b: u64) -> Result<GcdLcm> {
    let lcm = lcm(a, b)?;
    let gcd = gcd(a, b);
    Ok(GcdLcm {
        gcd,
        lcm,
        coprime: gcd == 1,
    })
}

pub fn factorial(n: u64) -> Result<u64> {
    (1..=n).try_fold(1u64, |acc, i| {
        acc.checked_mul(i)
            .ok_or_else(|| Error::Overflow(format!("{n}!")))
    })
}

/// Exact integer n-th root, if `m` is a perfect n-th power.
pub fn exact_root(m: u64, n: u32) -> Option<u64> {
    if n == 1 {
        return Some(m);
    }
    let guess = (m as f64).powf(1.0 / n as f64).round() as u64;
    let lo = guess.saturating_sub(1);
    (lo..=guess + 1).find(|&x| x.checked_pow(n) == Some(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().factors, vec![(2, 2), (3, 1)]);
        assert!(factorize(1).unwrap().factors.is_empty());
        assert_eq!(factorize(97).unwrap().factors, vec![(97, 1)]);
        assert_eq!(factorize(0), Err(Error::OutOfDomain(0)));
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(12).unwrap(), 3);
        assert_eq!(omega(1).unwrap(), 0);
        for p in [2, 3, 5, 97, 7919] {
            assert_eq!(omega(p).unwrap(), 1);
        }
    }

    #[test]
    fn gcd_lcm_examples() {
        assert_eq!(
            coprime_lcm(4, 9).unwrap(),
            GcdLcm {
                gcd: 1,
                lcm: 36,
                coprime: true
            }
        );
        assert_eq!(
            coprime_lcm(6, 10).unwrap(),
            GcdLcm {
                gcd: 2,
                lcm: 30,
                coprime: false
            }
        );
        assert!(coprime_lcm(1, 1).unwrap().coprime);
        assert!(!coprime_lcm(7, 7).unwrap().coprime);
        assert_eq!(coprime_lcm(7, 7).unwrap().lcm, 7);
        assert!(coprime(1, 123456));
    }

    #[test]
    fn prime_source_examples() {
        assert_eq!(
            prime_source(PrimeQuery::UpTo(10)).unwrap(),
            vec![2, 3, 5, 7]
        );
        assert_eq!(prime_source(PrimeQuery::Nth(1)).unwrap(), vec![2]);
        assert_eq!(prime_source(PrimeQuery::Nth(25)).unwrap(), vec![97]);
        assert!(matches!(
            prime_source(PrimeQuery::UpTo(DEFAULT_SIEVE_CAP + 1)),
            Err(Error::BeyondCap { .. })
        ));
        assert!(matches!(
            prime_source(PrimeQuery::Nth(10_000_000)),
            Err(Error::BeyondCap { .. })
        ));
    }

    #[test]
    fn nth_25_matches_trial_division_count() {
        let p = (2u64..)
            .filter(|&n| trial_division_is_prime(n))
            .nth(24)
            .unwrap();
        assert_eq!(p, 97);
    }

    #[test]
    fn sieve_matches_trial_division_to_1e5() {
        let primes = prime_source(PrimeQuery::UpTo(100_000)).unwrap();
        let naive: Vec<u64> = (1..=100_000)
            .filter(|&n| trial_division_is_prime(n))
            .collect();
        assert_eq!(primes, naive);
    }

    #[test]
    fn factorize_beyond_cap() {
        // product of the first 12 primes
        let m = 7_420_738_134_810u64;
        let f = factorize(m).unwrap();
        assert_eq!(f.omega(), 12);
        assert_eq!(f.multiply_out(), m);
        // large prime times small
        let f = factorize(2 * 999_983).unwrap();
        assert_eq!(f.factors, vec![(2, 1), (999_983, 1)]);
        // product of two primes just above the cap cannot be certified
        let small = Sieve::new(100);
        assert!(matches!(
            small.factorize(101 * 103 * 107),
            Err(Error::BeyondCap { .. })
        ));
        assert!(matches!(
            small.factorize(101 * 103),
            Err(Error::BeyondCap { .. })
        ));
        assert_eq!(
            small.factorize(2 * 9973).unwrap().factors,
            vec![(2, 1), (9973, 1)]
        );
    }

    #[test]
    fn exact_roots() {
        assert_eq!(exact_root(27, 3), Some(3));
        assert_eq!(exact_root(28, 3), None);
        assert_eq!(exact_root(1, 5), Some(1));
        assert_eq!(exact_root(1 << 40, 2), Some(1 << 20));
    }

    #[test]
    fn prime_index_roundtrip() {
        for i in 1..2000 {
            assert_eq!(prime_index(nth_prime(i).unwrap()).unwrap(), i);
        }
        assert_eq!(prime_index(4), Err(Error::NotPrime(4)));
    }
}
