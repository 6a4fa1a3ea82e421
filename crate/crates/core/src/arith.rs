//! Machine-integer number theory used throughout: factorization, modular
//! inverses, CRT and the totient.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Trial-division factorization, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3] {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut p = 5u64;
    while p.saturating_mul(p) <= n {
        for cand in [p, p + 2] {
            if n % cand == 0 {
                let mut e = 0;
                while n % cand == 0 {
                    n /= cand;
                    e += 1;
                }
                out.push((cand, e));
            }
        }
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn gcd_i(a: i64, b: u64) -> u64 {
    gcd(a.unsigned_abs(), b)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_u64(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Combine `x ≡ a1 (mod m1)` and `x ≡ a2 (mod m2)` for coprime moduli.
pub fn crt_pair(a1: u64, m1: u64, a2: u64, m2: u64) -> (u64, u64) {
    let m = m1 as u128 * m2 as u128;
    let inv = inv_mod(m1 % m2, m2).expect("crt moduli must be coprime") as u128;
    let diff = (a2 as i128 - (a1 % m2) as i128).rem_euclid(m2 as i128) as u128;
    let t = diff * inv % m2 as u128;
    let x = (a1 as u128 + m1 as u128 * t) % m;
    (x as u64, m as u64)
}

pub fn reduce_mod(x: &BigInt, m: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(m));
    u64::try_from(r).expect("residue fits in u64")
}

/// p-adic valuation; `None` for zero.
pub fn valuation(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.abs();
    loop {
        let (q, r) = y.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        y = q;
        v += 1;
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let f = factorize(n);
    f.len() == 1 && f[0].1 == 1
}

/// Divisors of `n` in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_and_phi() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(97), vec![(97, 1)]);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(36), 12);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn crt_and_inverse() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(2, 4), None);
        let (x, m) = crt_pair(2, 3, 3, 5);
        assert_eq!((x, m), (8, 15));
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&BigInt::from(48), 2), Some(4));
        assert_eq!(valuation(&BigInt::from(-9), 3), Some(2));
        assert_eq!(valuation(&BigInt::from(0), 3), None);
    }
}
