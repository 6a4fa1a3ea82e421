//! p-adic roots of `h` and the per-prime choice of `z_p`.
//!
//! `h` is split into square-free layers `h = c ∏ g_i^i`. A p-adic root of
//! `g_i` is a simple root of `g_i` and a root of multiplicity exactly `i` of
//! `h`, so all lifting happens on the `g_i` with Newton steps that tolerate
//! `v_p(g_i'(ζ)) > 0`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::valuation;
use crate::error::{Error, Result};
use crate::poly::IntPoly;

/// The chosen p-adic root `z_p` of `h`, known modulo `p^depth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicRootChoice {
    pub prime: u64,
    /// `z_p mod p^depth`, in `[0, p^depth)`.
    #[serde(with = "crate::poly::big_decimal")]
    pub residue: BigInt,
    pub depth: u32,
    pub multiplicity: u32,
    pub coprime: bool,
    /// The square-free layer of `h` having `z_p` as a simple root.
    pub layer: IntPoly,
    /// `v_p(layer'(z_p))`.
    pub derivative_valuation: u32,
    /// `z_p` is a rational integer (lifting is then trivial).
    pub exact: bool,
}

impl PadicRootChoice {
    /// `z_p mod p^e`, lifting further when `e` exceeds the stored depth.
    pub fn residue_at(&self, e: u32) -> BigInt {
        let pe = num_traits::pow(BigInt::from(self.prime), e as usize);
        if e <= self.depth {
            return self.residue.mod_floor(&pe);
        }
        newton_lift(
            &self.layer,
            self.prime,
            self.residue.clone(),
            self.derivative_valuation,
            e,
        )
        .expect("stored root lifts")
    }

    pub fn residue_at_u64(&self, e: u32) -> u64 {
        self.residue_at(e).to_u64().expect("p^e fits in u64")
    }
}

/// A root of a square-free layer, as found by the search.
#[derive(Clone, Debug)]
struct Seed {
    z: BigInt,
    t: u32,
    exact: bool,
}

fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Precision beyond which distinct roots of the square-free `g` in `Z_p`
/// cannot agree: `v(ζ - ζ') ≤ v(disc g) + (n-1)(n-2) v(lc g)`.
fn separation_depth(g: &IntPoly, disc: &BigInt, p: u64) -> u32 {
    let n = g.degree() as u32;
    if n < 2 {
        return 1;
    }
    let vd = valuation(disc, p).expect("square-free layer has nonzero discriminant");
    let vl = valuation(&g.lead(), p).unwrap_or(0);
    vd + (n - 1) * (n - 2) * vl + 1
}

/// Lift a seed to `ζ mod p^target`.
fn newton_lift(g: &IntPoly, p: u64, mut z: BigInt, t: u32, target: u32) -> Result<BigInt> {
    let dg = g.derivative();
    let pt = pow_big(p, t);
    let work = pow_big(p, target + 2 * t + 2);
    let out_mod = pow_big(p, target);
    for _ in 0..128 {
        let gz = g.eval(&z);
        if gz.is_zero() {
            return Ok(z.mod_floor(&out_mod));
        }
        let vg = valuation(&gz, p).expect("nonzero");
        if vg >= target + t {
            return Ok(z.mod_floor(&out_mod));
        }
        let gdz = dg.eval(&z);
        debug_assert_eq!(valuation(&gdz, p), Some(t));
        let u = &gz / &pt;
        let w = (&gdz / &pt).mod_floor(&work);
        let inv = mod_inverse(&w, &work).expect("unit");
        z = (z - u * inv).mod_floor(&work);
    }
    Err(Error::LiftDepthExceeded { p, depth: target })
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// All roots of the square-free `g` in `Z_p`, as residues modulo
/// `p^precision` (at least the separation depth, so they are distinct).
fn layer_roots(g: &IntPoly, disc: &BigInt, p: u64, precision: u32) -> Result<Vec<Seed>> {
    let sep = separation_depth(g, disc, p);
    let cap = 2 * sep + 8;
    let dg = g.derivative();
    let hp = g.reduce_mod(p);
    let mut stack: Vec<(BigInt, u32)> = (0..p)
        .filter(|&r| hp.eval(r) == 0)
        .map(|r| (BigInt::from(r), 1))
        .collect();
    let mut found: Vec<Seed> = Vec::new();
    while let Some((z, e)) = stack.pop() {
        let gz = g.eval(&z);
        // The class z + p^e Z_p holds exactly one root once v(g'(z)) < e and
        // v(g(z)) > 2 v(g'(z)).
        if let Some(t) = valuation(&dg.eval(&z), p) {
            if t < e && valuation(&gz, p).is_none_or(|vg| vg > 2 * t) {
                found.push(Seed {
                    exact: gz.is_zero(),
                    z,
                    t,
                });
                continue;
            }
        }
        if e >= cap {
            return Err(Error::LiftDepthExceeded { p, depth: e });
        }
        let pe = pow_big(p, e);
        let next = pow_big(p, e + 1);
        for c in 0..p {
            let cand = &z + &pe * BigInt::from(c);
            if g.eval(&cand).mod_floor(&next).is_zero() {
                stack.push((cand, e + 1));
            }
        }
    }
    let precision = precision.max(sep);
    let modulus = pow_big(p, precision);
    let mut lifted: BTreeMap<BigInt, Seed> = BTreeMap::new();
    for seed in found {
        let z = if seed.exact {
            seed.z.clone()
        } else {
            newton_lift(g, p, seed.z.clone(), seed.t, precision)?
        };
        let key = z.mod_floor(&modulus);
        lifted.entry(key.clone()).or_insert(Seed {
            z: if seed.exact { seed.z } else { key },
            t: seed.t,
            exact: seed.exact,
        });
    }
    Ok(lifted.into_values().collect())
}

/// Per-polynomial data reused across primes: the square-free layers of `h`
/// and the discriminants that govern lifting depth.
#[derive(Clone, Debug)]
pub struct RootFinder {
    h: IntPoly,
    parts: Vec<(IntPoly, u32)>,
    layer_disc: Vec<BigInt>,
    /// `|Res(g_i, g_i')|` per layer (`lc` for linear layers).
    layer_res: Vec<BigInt>,
    /// `Δ(sf(h)) · a_k`, with `Δ = 1` for a linear square-free part.
    singular: BigInt,
    unit_content: BigInt,
}

impl RootFinder {
    pub fn new(h: &IntPoly) -> Self {
        let parts = h.squarefree_decomposition();
        let disc_of = |g: &IntPoly| -> BigInt {
            if g.degree() >= 2 {
                BigInt::from(g.discriminant_abs().expect("degree >= 2"))
            } else {
                BigInt::one()
            }
        };
        let layer_disc: Vec<BigInt> = parts.iter().map(|(g, _)| disc_of(g)).collect();
        let layer_res = parts
            .iter()
            .zip(&layer_disc)
            .map(|((g, _), disc)| disc * g.lead().abs())
            .collect();
        let sf = h.squarefree_part();
        let singular = disc_of(&sf) * h.lead();
        // h = c * prod g_i^i with primitive g_i.
        let prod = parts
            .iter()
            .fold(IntPoly::constant(BigInt::one()), |acc, (g, i)| {
                (0..*i).fold(acc, |a, _| &a * g)
            });
        let unit_content = &h.lead() / &prod.lead();
        Self {
            h: h.clone(),
            parts,
            layer_disc,
            layer_res,
            singular,
            unit_content,
        }
    }

    pub fn poly(&self) -> &IntPoly {
        &self.h
    }

    pub fn layers(&self) -> &[(IntPoly, u32)] {
        &self.parts
    }

    /// `v_p(Δ·a_k)` for the square-free part.
    pub fn singular_valuation(&self, p: u64) -> u32 {
        valuation(&self.singular, p).unwrap_or(0)
    }

    /// Exponent `e` such that a unit root of `h` modulo `p^e` forces a unit
    /// root in `Z_p`.
    ///
    /// Off the singular primes this is 1. Otherwise it is the larger of
    /// `2v + 1` and `v_p(c) + Σ 2i·v_p(Res(g_i, g_i')) + 1`; the second term
    /// covers repeated factors, where `2v + 1` alone can be too shallow.
    pub fn certification_depth(&self, p: u64) -> u32 {
        let v = self.singular_valuation(p);
        let mut layered = valuation(&self.unit_content, p).unwrap_or(0) + 1;
        for ((_, i), res) in self.parts.iter().zip(&self.layer_res) {
            layered += 2 * i * valuation(res, p).unwrap_or(0);
        }
        (2 * v + 1).max(layered)
    }

    /// Every root of `h` in `Z_p` with its multiplicity, as residues modulo
    /// `p^depth`; `depth` is reported alongside.
    pub fn roots(&self, p: u64) -> Result<(u32, Vec<PadicRootChoice>)> {
        let v = self.singular_valuation(p);
        // Keep u64-sized moduli lift-free.
        let word_depth = (62.0 / (p as f64).log2()).floor().max(1.0) as u32;
        let mut depth = (2 * v + 1).max(word_depth);
        for ((g, _), disc) in self.parts.iter().zip(&self.layer_disc) {
            depth = depth.max(separation_depth(g, disc, p));
        }
        let modulus = pow_big(p, depth);
        let mut out = Vec::new();
        for ((g, mult), disc) in self.parts.iter().zip(&self.layer_disc) {
            for seed in layer_roots(g, disc, p, depth)? {
                let residue = seed.z.mod_floor(&modulus);
                let coprime = !residue.mod_floor(&BigInt::from(p)).is_zero();
                out.push(PadicRootChoice {
                    prime: p,
                    residue,
                    depth,
                    multiplicity: *mult,
                    coprime,
                    layer: g.clone(),
                    derivative_valuation: seed.t,
                    exact: seed.exact,
                });
            }
        }
        out.sort_by(|a, b| a.residue.cmp(&b.residue));
        Ok((depth, out))
    }

    /// The smallest nonnegative residue at the certification depth among
    /// roots that are units mod `p`.
    pub fn choose(&self, p: u64) -> Result<PadicRootChoice> {
        let (_, roots) = self.roots(p)?;
        let choice = roots
            .into_iter()
            .find(|r| r.coprime)
            .ok_or(Error::NoCoprimeRoot(p))?;
        debug_assert!(self.multiplicity_certified(&choice));
        Ok(choice)
    }

    /// `h, h', ..., h^(m-1)` vanish at the root to its depth and `h^(m)` does
    /// not.
    pub fn multiplicity_certified(&self, c: &PadicRootChoice) -> bool {
        let pd = pow_big(c.prime, c.depth);
        let vanishes = |j: usize| self.h.nth_derivative(j).eval(&c.residue).mod_floor(&pd).is_zero();
        (0..c.multiplicity as usize).all(vanishes) && !vanishes(c.multiplicity as usize)
    }
}

/// Every root of `h` in `Z_p`; see [`RootFinder::roots`].
pub fn padic_roots(h: &IntPoly, p: u64) -> Result<(u32, Vec<PadicRootChoice>)> {
    RootFinder::new(h).roots(p)
}

/// Fix `z_p` for each listed prime (smallest unit residue).
pub fn select_padic_roots(h: &IntPoly, primes: &[u64]) -> Result<BTreeMap<u64, PadicRootChoice>> {
    let finder = RootFinder::new(h);
    primes.iter().map(|&p| Ok((p, finder.choose(p)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn choose(h: &IntPoly, prime: u64) -> PadicRootChoice {
        select_padic_roots(h, &[prime]).unwrap().remove(&prime).unwrap()
    }

    #[test]
    fn choice_examples() {
        let c = choose(&p(&[-1, 0, 1]), 5);
        assert_eq!((c.residue_at_u64(1), c.multiplicity), (1, 1));
        let c = choose(&p(&[-1, 0, 1]), 2);
        assert_eq!((c.residue_at_u64(3), c.multiplicity), (1, 1));
        assert!(c.depth >= 3);
        for prime in [2u64, 3, 5, 7, 101] {
            let c = choose(&p(&[1, -2, 1]), prime);
            assert_eq!((c.residue_at_u64(1), c.multiplicity), (1, 2));
        }
    }

    #[test]
    fn no_coprime_root_is_reported() {
        assert_eq!(
            select_padic_roots(&p(&[0, 0, 1]), &[3]),
            Err(Error::NoCoprimeRoot(3))
        );
        // x^2 - 2 has no root mod 5.
        assert_eq!(
            select_padic_roots(&p(&[-2, 0, 1]), &[5]),
            Err(Error::NoCoprimeRoot(5))
        );
    }

    #[test]
    fn irrational_roots_lift_to_every_depth() {
        // x^2 - 2 splits in Q_7 (3^2 = 9 ≡ 2), and x^2 + 7 in Q_2.
        for (h, prime) in [(p(&[-2, 0, 1]), 7u64), (p(&[7, 0, 1]), 2), (p(&[-19, 0, 0, 1]), 3)] {
            let (_, roots) = padic_roots(&h, prime).unwrap();
            assert!(!roots.is_empty(), "{h} over Z_{prime}");
            for r in &roots {
                for e in 1..40u32 {
                    let pe = pow_big(prime, e);
                    let z = r.residue_at(e);
                    assert!(h.eval(&z).mod_floor(&pe).is_zero(), "{h} mod {prime}^{e}");
                }
            }
        }
    }

    #[test]
    fn root_counts_match_factor_structure() {
        // x^2 + 7 has exactly two 2-adic roots even though h'(z) is never a unit.
        assert_eq!(padic_roots(&p(&[7, 0, 1]), 2).unwrap().1.len(), 2);
        // x^2 + 1 has no 2-adic root, two 5-adic roots.
        assert_eq!(padic_roots(&p(&[1, 0, 1]), 2).unwrap().1.len(), 0);
        assert_eq!(padic_roots(&p(&[1, 0, 1]), 5).unwrap().1.len(), 2);
        // x^3 - x over Z_2: roots 0, 1, -1.
        assert_eq!(padic_roots(&p(&[0, -1, 0, 1]), 2).unwrap().1.len(), 3);
    }

    #[test]
    fn multiplicity_agrees_with_derivative_vanishing() {
        // (x - 1)^2 (x + 3)^3 (x - 5)
        let a = p(&[-1, 1]);
        let b = p(&[3, 1]);
        let h = &(&(&a * &a) * &(&(&b * &b) * &b)) * &p(&[-5, 1]);
        for prime in [2u64, 3, 5, 7, 11] {
            let (depth, roots) = padic_roots(&h, prime).unwrap();
            for r in roots {
                let pd = pow_big(prime, depth);
                for j in 0..r.multiplicity as usize {
                    assert!(h.nth_derivative(j).eval(&r.residue).mod_floor(&pd).is_zero());
                }
                let next = h.nth_derivative(r.multiplicity as usize).eval(&r.residue);
                assert!(!next.mod_floor(&pd).is_zero());
            }
        }
    }
}
