//! The auxiliary objects attached to a modulus `d`: `r_d`, `λ(d)`, `h_d`,
//! and for an ambient length `L` the structure set `H_d` and scale `M_d`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::padic::{PadicRootChoice, RootFinder};
use crate::arith::{crt_pair, factorize, gcd_i};
use crate::error::{Error, Result};
use crate::poly::{big_to_f64, IntPoly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxData {
    pub d: u64,
    /// The representative of the chosen root class in `(-d, 0]`.
    pub r_d: i64,
    #[serde(with = "crate::poly::big_decimal")]
    pub lambda_d: BigInt,
    pub h_d: IntPoly,
    #[serde(with = "crate::poly::big_decimal")]
    pub b_d: BigInt,
}

impl AuxData {
    pub fn degree(&self) -> usize {
        self.h_d.degree()
    }
}

/// `λ(d) = ∏ p^(m_p v_p(d))`.
pub fn lambda(choices: &BTreeMap<u64, PadicRootChoice>, d: u64) -> Result<BigInt> {
    let mut out = BigInt::one();
    for (p, e) in factorize(d) {
        let c = choices.get(&p).ok_or(Error::MissingRootChoice(p))?;
        out *= num_traits::pow(BigInt::from(p), (c.multiplicity * e) as usize);
    }
    Ok(out)
}

/// Build `r_d`, `λ(d)` and `h_d = h(r_d + d x) / λ(d)` from fixed roots.
pub fn aux_data(h: &IntPoly, choices: &BTreeMap<u64, PadicRootChoice>, d: u64) -> Result<AuxData> {
    if d == 0 {
        return Err(Error::InvalidArgument("modulus d must be positive".into()));
    }
    let mut r = 0u64;
    let mut modulus = 1u64;
    for (p, e) in factorize(d) {
        let c = choices.get(&p).ok_or(Error::MissingRootChoice(p))?;
        let z = c.residue_at_u64(e);
        (r, modulus) = crt_pair(r, modulus, z, p.pow(e));
    }
    debug_assert_eq!(modulus, d);
    let r_d = if r == 0 { 0 } else { r as i64 - d as i64 };
    let lambda_d = lambda(choices, d)?;
    let shifted = h.shift_scale(&BigInt::from(r_d), &BigInt::from(d));
    let h_d = shifted
        .div_exact_scalar(&lambda_d)
        .ok_or_else(|| Error::InexactDivision {
            d,
            lambda: lambda_d.to_string(),
        })?;
    debug_assert!(h.eval_i64(r_d).mod_floor(&BigInt::from(d)).is_zero());
    debug_assert_eq!(gcd_i(r_d, d), 1);
    let b_d = h_d.lead();
    Ok(AuxData {
        d,
        r_d,
        lambda_d,
        h_d,
        b_d,
    })
}

/// Root choices for `h`, filled in lazily prime by prime.
///
/// Once the needed primes are present the factory is only read, so a
/// prepared factory can be shared across threads.
#[derive(Clone, Debug)]
pub struct AuxFactory {
    finder: RootFinder,
    choices: BTreeMap<u64, PadicRootChoice>,
}

impl AuxFactory {
    pub fn new(h: &IntPoly) -> Result<Self> {
        if h.degree() < 1 {
            return Err(Error::ConstantPolynomial);
        }
        Ok(Self {
            finder: RootFinder::new(h),
            choices: BTreeMap::new(),
        })
    }

    pub fn poly(&self) -> &IntPoly {
        self.finder.poly()
    }

    pub fn choices(&self) -> &BTreeMap<u64, PadicRootChoice> {
        &self.choices
    }

    /// Choose roots for every prime dividing `d`.
    pub fn ensure(&mut self, d: u64) -> Result<()> {
        for (p, _) in factorize(d) {
            if !self.choices.contains_key(&p) {
                let c = self.finder.choose(p)?;
                self.choices.insert(p, c);
            }
        }
        Ok(())
    }

    /// Choose roots for every prime up to `n`.
    pub fn prepare_upto(&mut self, n: u64) -> Result<()> {
        for p in 2..=n {
            if crate::arith::is_prime_u64(p) && !self.choices.contains_key(&p) {
                let c = self.finder.choose(p)?;
                self.choices.insert(p, c);
            }
        }
        Ok(())
    }

    /// Auxiliary data for `d`; the primes of `d` must already be prepared.
    pub fn aux(&self, d: u64) -> Result<AuxData> {
        aux_data(self.poly(), &self.choices, d)
    }

    pub fn aux_mut(&mut self, d: u64) -> Result<AuxData> {
        self.ensure(d)?;
        self.aux(d)
    }

    pub fn lambda(&self, d: u64) -> Result<BigInt> {
        lambda(&self.choices, d)
    }

    pub fn lambda_mut(&mut self, d: u64) -> Result<BigInt> {
        self.ensure(d)?;
        self.lambda(d)
    }
}

/// `H_d = {x ≥ 1 : 0 < h_d(x) < L/s}` together with `M_d = (L/(s b_d))^(1/k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HRange {
    pub l: u64,
    pub s: u64,
    /// Members of `H_d`, ascending.
    pub set: Vec<u64>,
    /// `h_d(x)` for each member.
    pub values: Vec<u64>,
    pub m_d: f64,
    /// `⌊M_d⌋`, computed exactly.
    pub m_floor: u64,
    /// `|[1, ⌊M_d⌋] △ H_d|`.
    pub symdiff: u64,
}

impl HRange {
    /// Largest index that any weighted sum over this range touches.
    pub fn extent(&self) -> u64 {
        self.set.last().copied().unwrap_or(0).max(self.m_floor)
    }
}

pub fn h_range(aux: &AuxData, l: u64, s: u64) -> Result<HRange> {
    let h = &aux.h_d;
    if !aux.b_d.is_positive() {
        return Err(Error::NonPositiveLead(aux.b_d.to_string()));
    }
    if s == 0 || l < s {
        return Err(Error::InvalidArgument(format!("need L >= s >= 1, got L = {l}, s = {s}")));
    }
    let k = h.degree();
    let big_l = BigInt::from(l);
    let big_s = BigInt::from(s);
    // Past every real critical point h_d is increasing.
    let monotone_from = h.derivative().cauchy_root_bound().ceil().max(1.0) as u64;
    let mut set = Vec::new();
    let mut values = Vec::new();
    let mut x = 1u64;
    loop {
        let v = h.eval(&BigInt::from(x));
        let scaled = &v * &big_s;
        if v.is_positive() && scaled < big_l {
            set.push(x);
            values.push(v.to_u64().expect("h_d(x) < L"));
        }
        if x >= monotone_from && scaled >= big_l {
            break;
        }
        x += 1;
    }
    let m_floor = if k == 0 {
        0
    } else {
        integer_root_floor(&(&big_l / (&big_s * &aux.b_d)), k as u32)
    };
    let m_d = (l as f64 / (s as f64 * big_to_f64(&aux.b_d))).powf(1.0 / k as f64);
    let in_set = |y: u64| set.binary_search(&y).is_ok();
    let missing = (1..=m_floor).filter(|&y| !in_set(y)).count() as u64;
    let extra = set.iter().filter(|&&y| y > m_floor).count() as u64;
    Ok(HRange {
        l,
        s,
        set,
        values,
        m_d,
        m_floor,
        symdiff: missing + extra,
    })
}

/// `⌊n^(1/k)⌋` for `n ≥ 0`. Note `⌊(L/(s b))^(1/k)⌋ = ⌊⌊L/(s b)⌋^(1/k)⌋`.
fn integer_root_floor(n: &BigInt, k: u32) -> u64 {
    if !n.is_positive() {
        return 0;
    }
    let mut r = n.nth_root(k).to_u64().expect("root fits in u64");
    while num_traits::pow(BigInt::from(r + 1), k as usize) <= *n {
        r += 1;
    }
    while r > 0 && num_traits::pow(BigInt::from(r), k as usize) > *n {
        r -= 1;
    }
    r
}

/// Whether `d` divides `h(r_d)` and `r_d` is a unit mod `d`.
pub fn aux_is_consistent(h: &IntPoly, aux: &AuxData) -> bool {
    let d = BigInt::from(aux.d);
    h.eval_i64(aux.r_d).mod_floor(&d).is_zero()
        && gcd_i(aux.r_d, aux.d) == 1
        && aux.r_d <= 0
        && aux.r_d > -(aux.d as i64)
        && (&h.shift_scale(&BigInt::from(aux.r_d), &d) - &aux.h_d.scale(&aux.lambda_d)).is_zero()
}

/// `cont(h_d) ≤ Δ(h)^((k-1)/2) cont(h)`, decided exactly by squaring.
pub fn content_within_bound(h: &IntPoly, aux: &AuxData) -> Result<bool> {
    let k = h.degree();
    let delta = h.root_separation_discriminant()?;
    let ratio = num_rational::BigRational::new(aux.h_d.content()?.abs(), h.content()?.abs());
    let lhs = &ratio * &ratio;
    let mut rhs = num_rational::BigRational::from_integer(BigInt::from(1));
    for _ in 1..k {
        rhs *= &delta;
    }
    Ok(lhs <= rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn aux(h: &IntPoly, d: u64) -> AuxData {
        AuxFactory::new(h).unwrap().aux_mut(d).unwrap()
    }

    #[test]
    fn aux_examples() {
        let h = p(&[-1, 0, 1]);
        let a1 = aux(&h, 1);
        assert_eq!((a1.r_d, a1.lambda_d.clone(), a1.h_d.clone()), (0, BigInt::one(), h.clone()));
        let a2 = aux(&h, 2);
        assert_eq!((a2.r_d, a2.lambda_d.clone()), (-1, BigInt::from(2)));
        assert_eq!(a2.h_d, p(&[0, -2, 2]));
        let a5 = aux(&h, 5);
        assert_eq!((a5.r_d, a5.lambda_d.clone()), (-4, BigInt::from(5)));
        assert_eq!(a5.h_d, p(&[3, -8, 5]));
        assert_eq!(a5.b_d, BigInt::from(5));
    }

    #[test]
    fn range_examples() {
        let h = p(&[-1, 0, 1]);
        let r = h_range(&aux(&h, 1), 100, 10).unwrap();
        assert_eq!(r.set, vec![2, 3]);
        assert_eq!(r.values, vec![3, 8]);
        assert!((r.m_d - 10f64.sqrt()).abs() < 1e-12);
        assert_eq!((r.m_floor, r.symdiff), (3, 1));

        let r = h_range(&aux(&h, 1), 10, 10).unwrap();
        assert!(r.set.is_empty());
        assert_eq!(r.m_d, 1.0);

        let r = h_range(&aux(&h, 2), 400, 10).unwrap();
        assert_eq!(r.set, vec![2, 3, 4]);
        assert_eq!(r.values, vec![4, 12, 24]);
        assert!((r.m_d - 20f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn range_rejects_negative_lead() {
        let a = aux(&p(&[1, 0, -1]), 1);
        assert!(matches!(h_range(&a, 100, 10), Err(Error::NonPositiveLead(_))));
    }

    #[test]
    fn missing_choice_is_reported() {
        let f = AuxFactory::new(&p(&[-1, 0, 1])).unwrap();
        assert_eq!(f.aux(6), Err(Error::MissingRootChoice(2)));
    }

    #[test]
    fn auxiliary_polynomials_are_consistent() {
        for h in [p(&[-1, 0, 1]), p(&[0, -1, 1]), p(&[1, -2, 1]), p(&[0, -1, 0, 1]), p(&[-2, -1, 2, 1])] {
            let mut f = AuxFactory::new(&h).unwrap();
            f.prepare_upto(200).unwrap();
            for d in 1..=200 {
                let a = f.aux(d).unwrap();
                assert!(aux_is_consistent(&h, &a), "{h} at d = {d}");
            }
        }
    }

    #[test]
    fn integer_roots() {
        assert_eq!(integer_root_floor(&BigInt::from(10), 2), 3);
        assert_eq!(integer_root_floor(&BigInt::from(9), 2), 3);
        assert_eq!(integer_root_floor(&BigInt::from(26), 3), 2);
        assert_eq!(integer_root_floor(&BigInt::from(27), 3), 3);
        assert_eq!(integer_root_floor(&BigInt::zero(), 3), 0);
    }
}
