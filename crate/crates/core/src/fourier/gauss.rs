//! Complete and twisted Gauss sums of integer polynomials.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::e_frac;
use crate::arith::{factorize, gcd, gcd_i, inv_mod};
use crate::error::{Error, Result};
use crate::fft;
use crate::intersective::AuxData;
use crate::poly::IntPoly;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussValue {
    pub a: u64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    /// `|G(a, q)| / q^(1 - 1/k)`.
    pub ratio: f64,
}

fn require_coprime(a: i64, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    if gcd_i(a, q) != 1 {
        return Err(Error::NotCoprime { a, q });
    }
    Ok(a.rem_euclid(q as i64) as u64)
}

fn sum_phases(values: impl Iterator<Item = u64>, q: u64) -> Complex64 {
    let table: Vec<Complex64> = (0..q).map(|v| e_frac(v, q)).collect();
    let mut re = crate::numeric::KahanSum::new();
    let mut im = crate::numeric::KahanSum::new();
    for v in values {
        let z = table[v as usize];
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.value(), im.value())
}

/// `Σ_{ℓ < q, gcd(Wℓ + b, q) = 1} e(g(ℓ) a / q)`, straight from the
/// definition.
pub fn twisted_gauss_sum_direct(g: &IntPoly, w: i64, b: i64, a: i64, q: u64) -> Result<Complex64> {
    let a = require_coprime(a, q)?;
    let gm = g.reduce_mod(q);
    let qi = q as i128;
    let vals = (0..q)
        .filter(|&l| {
            let lin = (w as i128 * l as i128 + b as i128).rem_euclid(qi) as u64;
            gcd(lin, q) == 1
        })
        .map(|l| crate::arith::mul_mod(gm.eval(l), a, q));
    Ok(sum_phases(vals, q))
}

/// `Σ_{ℓ < q} e(g(ℓ) a / q)`.
pub fn complete_sum(g: &IntPoly, a: u64, q: u64) -> Complex64 {
    let gm = g.reduce_mod(q);
    sum_phases((0..q).map(|l| crate::arith::mul_mod(gm.eval(l), a % q, q)), q)
}

/// The twisted sum at a prime power `p^j`.
fn local_sum(g: &IntPoly, w: i64, b: i64, a: u64, p: u64, j: u32) -> Complex64 {
    let pj = p.pow(j);
    let w_mod = (w.rem_euclid(p as i64)) as u64;
    let b_mod = (b.rem_euclid(p as i64)) as u64;
    if w_mod == 0 {
        return if b_mod == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            complete_sum(g, a, pj)
        };
    }
    // Remove the class ℓ ≡ m (mod p) where p | Wℓ + b, using
    // g(pr + m) = g(m) + p g̃(r).
    let m = (p - b_mod) % p * inv_mod(w_mod, p).expect("p prime") % p;
    let big_m = BigInt::from(m);
    let big_p = BigInt::from(p);
    let gm = g.eval(&big_m);
    let shifted = g.shift_scale(&big_m, &big_p);
    let tilde = (&shifted - &IntPoly::constant(gm.clone()))
        .div_exact_scalar(&big_p)
        .expect("g(pr + m) - g(m) is divisible by p");
    let g_m_mod = gm.mod_floor(&BigInt::from(pj)).to_u64().expect("residue");
    let head = e_frac(crate::arith::mul_mod(g_m_mod, a, pj), pj);
    let tail = if j == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        complete_sum(&tilde, a % p.pow(j - 1), p.pow(j - 1))
    };
    complete_sum(g, a, pj) - head * tail
}

/// The same sum assembled from prime-power pieces: with `q = ∏ q_i` and
/// `a/q ≡ Σ a_i/q_i`, the sum is the product of the local twisted sums.
pub fn twisted_gauss_sum_split(g: &IntPoly, w: i64, b: i64, a: i64, q: u64) -> Result<Complex64> {
    let a = require_coprime(a, q)?;
    let mut out = Complex64::new(1.0, 0.0);
    for (p, j) in factorize(q) {
        let qi = p.pow(j);
        let rest = q / qi;
        let ai = crate::arith::mul_mod(a % qi, inv_mod(rest % qi, qi).expect("coprime"), qi);
        out *= local_sum(g, w, b, ai, p, j);
    }
    Ok(out)
}

/// `G(a, q) = Σ_{ℓ < q, gcd(r_d + dℓ, q) = 1} e(h_d(ℓ) a / q)`.
pub fn gauss_sum(aux: &AuxData, a: i64, q: u64) -> Result<Complex64> {
    twisted_gauss_sum_direct(&aux.h_d, aux.d as i64, aux.r_d, a, q)
}

/// `G(a, q)` for every `a` coprime to `q`, from one histogram of `h_d(ℓ)
/// mod q` and a length-`q` FFT.
pub fn gauss_sums_all(aux: &AuxData, q: u64) -> Result<Vec<GaussValue>> {
    if q == 0 {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    let hm = aux.h_d.reduce_mod(q);
    let mut hist = vec![Complex64::new(0.0, 0.0); q as usize];
    let d = aux.d as i128;
    let r = aux.r_d as i128;
    for l in 0..q {
        let lin = (r + d * l as i128).rem_euclid(q as i128) as u64;
        if gcd(lin, q) == 1 {
            hist[hm.eval(l) as usize] += 1.0;
        }
    }
    // Σ_v c_v e(v a / q) is the unnormalized inverse DFT at a.
    let spec = fft::inverse(&hist, q as usize);
    let k = aux.h_d.degree().max(1) as f64;
    let norm = (q as f64).powf(1.0 - 1.0 / k);
    Ok((0..q)
        .filter(|&a| gcd(a, q) == 1)
        .map(|a| {
            let z = spec[a as usize];
            GaussValue {
                a,
                re: z.re,
                im: z.im,
                abs: z.norm(),
                ratio: z.norm() / norm,
            }
        })
        .collect())
}

/// `max_{(a, q) = 1} |G(a, q)| / q^(1 - 1/k)`.
pub fn gauss_bound_ratio(aux: &AuxData, q: u64) -> Result<f64> {
    Ok(gauss_sums_all(aux, q)?
        .into_iter()
        .map(|g| g.ratio)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersective::AuxFactory;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn gauss_examples() {
        let h = p(&[-1, 0, 1]);
        let aux = AuxFactory::new(&h).unwrap().aux_mut(1).unwrap();
        assert_eq!(gauss_sum(&aux, 1, 1).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(gauss_sum(&aux, 1, 2).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(gauss_sum(&aux, 1, 3).unwrap(), Complex64::new(2.0, 0.0));
        assert!(matches!(gauss_sum(&aux, 2, 4), Err(Error::NotCoprime { .. })));
        assert!((gauss_bound_ratio(&aux, 3).unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((gauss_bound_ratio(&aux, 1).unwrap() - 1.0).abs() < 1e-12);
        let g4: Vec<f64> = [1, 3].iter().map(|&a| gauss_sum(&aux, a, 4).unwrap().norm() / 2.0).collect();
        assert!((gauss_bound_ratio(&aux, 4).unwrap() - g4[0].max(g4[1])).abs() < 1e-12);
    }

    #[test]
    fn twisted_examples() {
        let g = p(&[0, 0, 1]);
        let z = twisted_gauss_sum_direct(&g, 1, 0, 1, 4).unwrap();
        assert!((z - Complex64::new(0.0, 2.0)).norm() < 1e-12);
        assert_eq!(twisted_gauss_sum_direct(&g, 0, 0, 1, 5).unwrap(), Complex64::new(0.0, 0.0));
        let c = complete_sum(&g, 1, 7);
        assert!((twisted_gauss_sum_direct(&g, 0, 1, 1, 7).unwrap() - c).norm() < 1e-12);
    }

    #[test]
    fn split_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let polys = [p(&[-1, 0, 1]), p(&[3, -8, 5]), p(&[0, -1, 0, 1]), p(&[2, -6, 4]), p(&[1, 2, 3, 0, 7])];
        for _ in 0..300 {
            let g = &polys[rng.gen_range(0..polys.len())];
            let q = rng.gen_range(1..=600u64);
            let a = loop {
                let a = rng.gen_range(1..=q as i64);
                if gcd_i(a, q) == 1 {
                    break a;
                }
            };
            let w = rng.gen_range(-12..=12);
            let b = rng.gen_range(-12..=12);
            let d = twisted_gauss_sum_direct(g, w, b, a, q).unwrap();
            let s = twisted_gauss_sum_split(g, w, b, a, q).unwrap();
            assert!((d - s).norm() < 1e-9, "g = {g}, W = {w}, b = {b}, a = {a}, q = {q}");
        }
    }

    #[test]
    fn histogram_path_matches_direct() {
        let h = p(&[-1, 0, 1]);
        let mut f = AuxFactory::new(&h).unwrap();
        for d in [1u64, 2, 5, 12] {
            let aux = f.aux_mut(d).unwrap();
            for q in [1u64, 7, 12, 45, 128] {
                for gv in gauss_sums_all(&aux, q).unwrap() {
                    let z = gauss_sum(&aux, gv.a as i64, q).unwrap();
                    assert!((z - Complex64::new(gv.re, gv.im)).norm() < 1e-9);
                }
            }
        }
    }
}
