//! Integer factoring sized for module cardinalities and discriminants:
//! trial division, deterministic Miller-Rabin, Pollard-Brent rho.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::linalg::Int;

/// Factors `|n|` into primes; every prime must fit in u64.
pub fn factor(n: &Int) -> Result<BTreeMap<u64, u32>, Error> {
    let mut n = n.abs();
    assert!(!n.is_zero(), "factoring zero");
    let mut out = BTreeMap::new();
    for p in SMALL_PRIMES {
        let p_int = Int::from(p);
        while n.is_multiple_of(&p_int) {
            n /= &p_int;
            *out.entry(p).or_insert(0) += 1;
        }
        if n.is_one() {
            return Ok(out);
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            let p = m
                .to_u64()
                .ok_or_else(|| Error::FactorTooLarge(m.to_string()))?;
            *out.entry(p).or_insert(0) += 1;
            continue;
        }
        let d = pollard_rho(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    Ok(out)
}

/// Deterministic Miller-Rabin for u64-scale inputs; for larger inputs the
/// fixed base set makes it a primality test with no known counterexample.
pub fn is_prime_u64(p: u64) -> bool {
    is_prime(&Int::from(p))
}

pub fn is_prime(n: &Int) -> bool {
    if n < &Int::from(2) {
        return false;
    }
    for p in SMALL_PRIMES {
        let p_int = Int::from(p);
        if *n == p_int {
            return true;
        }
        if n.is_multiple_of(&p_int) {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n > 2 is odd here");
    let d = &n_minus_1 >> s;
    'base: for a in MR_BASES {
        let a = Int::from(a);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = x.modpow(&Int::from(2), n);
            if x == n_minus_1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// Pollard rho with Floyd cycle detection over a fixed offset sequence;
/// returns a nontrivial divisor of the odd composite `n`.
fn pollard_rho(n: &Int) -> Int {
    for c in 1u64.. {
        let c = Int::from(c);
        let f = |x: &Int| (x * x + &c) % n;
        let mut x = Int::from(2);
        let mut y = x.clone();
        let mut d = Int::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
        }
        if d != *n {
            return d;
        }
        // Cycle collapsed onto n; retry with the next polynomial offset.
    }
    unreachable!("pollard_rho exhausted offsets")
}

const SMALL_PRIMES: [u64; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

/// Bases making Miller-Rabin deterministic below 3.3 * 10^24.
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_mixed_composites() {
        let n = Int::from(2u64.pow(5)) * Int::from(3u64.pow(2)) * Int::from(1_000_003u64);
        let f = factor(&n).unwrap();
        assert_eq!(f.get(&2), Some(&5));
        assert_eq!(f.get(&3), Some(&2));
        assert_eq!(f.get(&1_000_003), Some(&1));
        // Semiprime with both factors beyond the trial-division bound.
        let sp = Int::from(1_000_003u64) * Int::from(1_000_033u64);
        let f = factor(&sp).unwrap();
        assert_eq!(f.len(), 2);
        // Sign is ignored.
        assert_eq!(factor(&Int::from(-12)).unwrap(), factor(&Int::from(12)).unwrap());
    }

    #[test]
    fn primality() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(0));
        assert!(is_prime_u64(1_000_003));
        assert!(!is_prime_u64(1_000_001));
        // Strong pseudoprime to base 2.
        assert!(!is_prime_u64(2047));
        assert!(is_prime(&Int::from(u64::MAX - 58))); // 2^64 - 59 is prime
    }
}
