//! Root sets of `h` modulo `q`.

use crate::arith::{crt_pair, factorize, inv_mod};
use crate::poly::IntPoly;

/// Moduli below this are cross-checked against brute force in debug builds.
pub const DEFAULT_BRUTE_THRESHOLD: u64 = 10_000;

/// `{r mod q : h(r) ≡ 0 (mod q)}`, ascending.
///
/// Prime powers are handled by lifting roots mod `p` one digit at a time
/// (a direct Hensel step for nonsingular roots, a scan over the `p` lifts
/// otherwise); composite moduli are assembled by CRT.
pub fn roots_mod(h: &IntPoly, q: u64) -> Vec<u64> {
    let roots = roots_mod_lifted(h, q);
    if cfg!(debug_assertions) && q < DEFAULT_BRUTE_THRESHOLD {
        debug_assert_eq!(roots, roots_mod_brute(h, q), "root lifting disagrees with brute force mod {q}");
    }
    roots
}

pub fn roots_mod_brute(h: &IntPoly, q: u64) -> Vec<u64> {
    let hm = h.reduce_mod(q);
    (0..q).filter(|&r| hm.eval(r) == 0).collect()
}

fn roots_mod_lifted(h: &IntPoly, q: u64) -> Vec<u64> {
    assert!(q >= 1, "modulus must be positive");
    let mut acc: Vec<u64> = vec![0];
    let mut modulus = 1u64;
    for (p, e) in factorize(q) {
        let local = roots_mod_prime_power(h, p, e);
        let pe = p.pow(e);
        let mut next = Vec::with_capacity(acc.len() * local.len());
        for &a in &acc {
            for &b in &local {
                next.push(crt_pair(a, modulus, b, pe).0);
            }
        }
        modulus *= pe;
        acc = next;
    }
    acc.sort_unstable();
    acc
}

/// Roots modulo `p^e`, ascending.
pub fn roots_mod_prime_power(h: &IntPoly, p: u64, e: u32) -> Vec<u64> {
    let hp = h.reduce_mod(p);
    let mut roots: Vec<u64> = (0..p).filter(|&r| hp.eval(r) == 0).collect();
    let dh = h.derivative().reduce_mod(p);
    let mut pi = p;
    for _ in 1..e {
        let next_mod = pi * p;
        let hn = h.reduce_mod(next_mod);
        let mut next = Vec::new();
        for &r in &roots {
            let deriv = dh.eval(r);
            if deriv != 0 {
                // h(r + t p^i) ≡ h(r) + t p^i h'(r)  (mod p^(i+1))
                let hr = hn.eval(r) / pi;
                let inv = inv_mod(deriv, p).expect("p is prime");
                let t = (p - hr % p) % p * inv % p;
                next.push(r + t * pi);
            } else {
                next.extend(
                    (0..p)
                        .map(|t| r + t * pi)
                        .filter(|&x| hn.eval(x) == 0),
                );
            }
        }
        roots = next;
        pi = next_mod;
    }
    roots.sort_unstable();
    roots
}

/// Whether some root of `h` modulo `p^e` is a unit.
pub fn coprime_root_mod_prime_power(h: &IntPoly, p: u64, e: u32) -> bool {
    roots_mod_prime_power(h, p, e).iter().any(|r| r % p != 0)
}

/// Whether some `r` with `gcd(r, q) = 1` satisfies `q | h(r)`.
///
/// By CRT this holds iff it holds at every prime power exactly dividing `q`.
pub fn coprime_root_exists(h: &IntPoly, q: u64) -> bool {
    factorize(q)
        .into_iter()
        .all(|(p, e)| coprime_root_mod_prime_power(h, p, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn root_examples() {
        assert_eq!(roots_mod(&p(&[-1, 0, 1]), 8), vec![1, 3, 5, 7]);
        assert_eq!(roots_mod(&p(&[-1, 0, 1]), 5), vec![1, 4]);
        assert_eq!(roots_mod(&p(&[0, 0, 1]), 2), vec![0]);
        assert_eq!(roots_mod(&p(&[-1, 0, 1]), 1), vec![0]);
    }

    #[test]
    fn coprime_examples() {
        assert!(!coprime_root_exists(&p(&[0, 0, 1]), 2));
        assert!(coprime_root_exists(&p(&[0, -1, 1]), 9));
        for q in 1..500 {
            assert!(coprime_root_exists(&p(&[-1, 0, 1]), q));
        }
    }

    #[test]
    fn lifting_matches_brute_force() {
        let polys = [
            p(&[-1, 0, 1]),
            p(&[0, 0, 1]),
            p(&[1, -2, 1]),
            p(&[0, -1, 0, 1]),
            p(&[-2, -1, 2, 1]),
            p(&[7, 3, 0, 0, 2]),
            p(&[-19, 0, 0, 1]),
        ];
        for h in &polys {
            for q in 1..700u64 {
                let lifted = roots_mod_lifted(h, q);
                assert_eq!(lifted, roots_mod_brute(h, q), "h = {h}, q = {q}");
                let brute_coprime = lifted.iter().any(|&r| crate::arith::gcd(r, q) == 1);
                assert_eq!(coprime_root_exists(h, q), brute_coprime, "h = {h}, q = {q}");
            }
        }
    }
}
