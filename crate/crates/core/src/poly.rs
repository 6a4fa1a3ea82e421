//! Exact integer polynomials.
//!
//! Coefficients are arbitrary-precision throughout: `h(r + d x)` for moduli in
//! the tens of thousands already leaves 64-bit range at degree five.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::mul_mod;
use crate::error::{Error, Result};

/// Dense polynomial `a_0 + a_1 x + ... + a_k x^k` over the integers.
///
/// The coefficient vector never has trailing zeros, so `degree()` is the
/// index of the last coefficient and `lead()` is that coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval(&BigInt::from(x))
    }

    /// Evaluate at a rational point `num/den`, scaled by `den^k`.
    pub fn eval_homogeneous(&self, num: &BigInt, den: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut den_pow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * num + c * &den_pow;
            den_pow *= den;
        }
        acc
    }

    pub fn reduce_mod(&self, q: u64) -> ModPoly {
        let m = BigInt::from(q);
        ModPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.mod_floor(&m).to_u64().expect("residue fits"))
                .collect(),
            modulus: q,
        }
    }

    /// `p(r + d x)`, expanded exactly.
    pub fn shift_scale(&self, r: &BigInt, d: &BigInt) -> IntPoly {
        let lin = IntPoly::new(vec![r.clone(), d.clone()]);
        let mut acc = IntPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &IntPoly::constant(c.clone());
        }
        acc
    }

    /// gcd of `a_1, ..., a_k`; the constant term does not participate.
    pub fn content(&self) -> Result<BigInt> {
        if self.degree() < 1 {
            return Err(Error::DegreeTooSmall {
                needed: 1,
                found: self.degree(),
            });
        }
        Ok(self.coeffs[1..]
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c)))
    }

    /// gcd of all coefficients (the usual content, used for primitive parts).
    pub fn full_content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part normalized to a positive leading coefficient.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = self.full_content();
        if self.lead().is_negative() {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> IntPoly {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Divide every coefficient by `c`, or `None` when some division is inexact.
    pub fn div_exact_scalar(&self, c: &BigInt) -> Option<IntPoly> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            let (q, r) = a.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(IntPoly::new(out))
    }

    /// Exact polynomial division over the integers.
    pub fn div_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        if divisor.is_zero() {
            return None;
        }
        if self.degree() < divisor.degree() || self.is_zero() {
            return if self.is_zero() {
                Some(IntPoly::zero())
            } else {
                None
            };
        }
        let dl = divisor.lead();
        let dd = divisor.degree();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); self.degree() - dd + 1];
        for i in (0..quot.len()).rev() {
            let top = &rem[i + dd];
            let (q, r) = top.div_rem(&dl);
            if !r.is_zero() {
                return None;
            }
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &q * c;
            }
            quot[i] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(IntPoly::new(quot))
    }

    /// Pseudo-remainder `lc(b)^(deg a - deg b + 1) a mod b`.
    fn pseudo_rem(&self, b: &IntPoly) -> IntPoly {
        let db = b.degree();
        let lb = b.lead();
        let mut r = self.clone();
        while !r.is_zero() && r.degree() >= db {
            let shift = r.degree() - db;
            let lr = r.lead();
            let mut coeffs: Vec<BigInt> = r.coeffs.iter().map(|c| c * &lb).collect();
            for (j, c) in b.coeffs.iter().enumerate() {
                coeffs[shift + j] -= &lr * c;
            }
            r = IntPoly::new(coeffs);
        }
        r
    }

    /// Primitive gcd over `Q[x]`, normalized to a primitive integer polynomial
    /// with positive leading coefficient.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part()
    }

    /// Yun's square-free decomposition: primitive pairwise-coprime factors
    /// `g_i` with `h = c * prod g_i^i`. Only factors of positive degree are
    /// returned.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPoly, u32)> {
        let mut out = Vec::new();
        if self.degree() < 1 {
            return out;
        }
        let f = self.primitive_part();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_exact(&a0).expect("gcd divides f");
        let c = fp.div_exact(&a0).expect("gcd divides f'");
        let mut d = &c - &b.derivative();
        let mut i = 1u32;
        while b.degree() >= 1 {
            let a = b.gcd(&d);
            if a.degree() >= 1 {
                out.push((a.clone(), i));
            }
            b = b.div_exact(&a).expect("yun: a divides b");
            let c = d.div_exact(&a).expect("yun: a divides d");
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// Product of the distinct irreducible factors (primitive, positive lead).
    pub fn squarefree_part(&self) -> IntPoly {
        self.squarefree_decomposition()
            .into_iter()
            .fold(IntPoly::constant(BigInt::one()), |acc, (g, _)| &acc * &g)
    }

    /// `|disc(h)| = |Res(h, h')| / |a_k|`; zero exactly when `h` has a repeated
    /// complex root.
    pub fn discriminant_abs(&self) -> Result<BigUint> {
        if self.degree() < 2 {
            return Err(Error::DegreeTooSmall {
                needed: 2,
                found: self.degree(),
            });
        }
        let res = resultant(self, &self.derivative());
        let lead = self.lead();
        let (q, r) = res.div_rem(&lead);
        debug_assert!(r.is_zero());
        Ok(q.magnitude().clone())
    }

    /// `|a|^(2k-2) prod_{i != j} |alpha_i - alpha_j|^(e_i e_j)` over the
    /// distinct complex roots `alpha_i` of multiplicities `e_i`.
    ///
    /// Agrees with [`IntPoly::discriminant_abs`] for square-free input, but
    /// stays nonzero when roots repeat. This is the quantity that bounds the
    /// content of the auxiliary polynomials.
    pub fn root_separation_discriminant(&self) -> Result<BigRational> {
        let k = self.degree();
        if k < 1 {
            return Err(Error::DegreeTooSmall { needed: 1, found: k });
        }
        let a = BigRational::from_integer(self.lead().abs());
        let mut delta = pow_rat(&a, (2 * k - 2) as u32);
        let parts = self.squarefree_decomposition();
        for (idx, (g, s)) in parts.iter().enumerate() {
            let n = g.degree() as u32;
            if n >= 2 {
                let lc = BigRational::from_integer(g.lead().abs());
                let disc = BigRational::from_integer(BigInt::from(
                    g.discriminant_abs().expect("degree >= 2"),
                ));
                let monic_disc = disc / pow_rat(&lc, 2 * n - 2);
                delta *= pow_rat(&monic_disc, s * s);
            }
            for (h2, t) in parts.iter().skip(idx + 1) {
                let m = h2.degree() as u32;
                let res = BigRational::from_integer(resultant(g, h2).abs());
                let norm = pow_rat(&BigRational::from_integer(g.lead().abs()), m)
                    * pow_rat(&BigRational::from_integer(h2.lead().abs()), n);
                delta *= pow_rat(&(res / norm), 2 * s * t);
            }
        }
        Ok(delta)
    }

    pub fn discriminant_data(&self) -> Result<DiscriminantData> {
        Ok(DiscriminantData {
            delta_abs: self.discriminant_abs()?,
            content_h: self.content()?.magnitude().clone(),
        })
    }

    /// Upper bound on the absolute value of every complex root (Cauchy).
    pub fn cauchy_root_bound(&self) -> f64 {
        if self.degree() == 0 {
            return 0.0;
        }
        let lead = big_to_f64(&self.lead()).abs();
        let m = self.coeffs[..self.degree()]
            .iter()
            .map(|c| big_to_f64(c).abs() / lead)
            .fold(0.0, f64::max);
        1.0 + m
    }

    /// Rational roots `num/den` in lowest terms with `den > 0`, ascending.
    ///
    /// Candidates come from the rational root theorem; `None` if a constant
    /// or leading coefficient is too large to factor by trial division.
    pub fn rational_roots(&self) -> Option<Vec<(BigInt, BigInt)>> {
        if self.is_zero() {
            return None;
        }
        let mut roots = Vec::new();
        let mut p = self.clone();
        if p.coeffs[0].is_zero() {
            roots.push((BigInt::zero(), BigInt::one()));
            let shift = p.coeffs.iter().take_while(|c| c.is_zero()).count();
            p = IntPoly::new(p.coeffs[shift..].to_vec());
        }
        if p.degree() == 0 {
            return Some(roots);
        }
        let a0 = p.coeffs[0].magnitude().to_u64()?;
        let ak = p.lead().magnitude().to_u64()?;
        const LIMIT: u64 = 1_000_000_000_000;
        if a0 > LIMIT || ak > LIMIT {
            return None;
        }
        let nums = crate::arith::divisors(a0);
        let dens = crate::arith::divisors(ak);
        for &u in &nums {
            for &v in &dens {
                if num_integer::gcd(u, v) != 1 {
                    continue;
                }
                for sign in [1i64, -1] {
                    let num = BigInt::from(u) * sign;
                    let den = BigInt::from(v);
                    if p.eval_homogeneous(&num, &den).is_zero() {
                        roots.push((num, den));
                    }
                }
            }
        }
        roots.sort_by(|a, b| (&a.0 * &b.1).cmp(&(&b.0 * &a.1)));
        roots.dedup();
        Some(roots)
    }

    /// Human-readable form such as `x^2 - 1`.
    pub fn pretty(&self) -> String {
        self.to_string()
    }
}

fn pow_rat(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

pub(crate) fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.sign() == Sign::Minus {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

impl std::ops::Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl std::ops::Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl std::ops::Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

/// Resultant via the Sylvester matrix, with Bareiss fraction-free
/// elimination so every intermediate stays an exact integer.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
    if f.is_zero() || g.is_zero() {
        return BigInt::zero();
    }
    let (m, n) = (f.degree(), g.degree());
    if m == 0 {
        return num_traits::pow(f.lead(), n);
    }
    if n == 0 {
        return num_traits::pow(g.lead(), m);
    }
    let size = m + n;
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for row in 0..n {
        for (j, c) in f.coeffs.iter().rev().enumerate() {
            mat[row][row + j] = c.clone();
        }
    }
    for row in 0..m {
        for (j, c) in g.coeffs.iter().rev().enumerate() {
            mat[n + row][row + j] = c.clone();
        }
    }
    bareiss_det(mat)
}

fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `|Δ(h)|` and `cont(h)` bundled for reporting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantData {
    pub delta_abs: BigUint,
    pub content_h: BigUint,
}

/// A polynomial with coefficients reduced modulo `modulus < 2^64`.
#[derive(Clone, Debug)]
pub struct ModPoly {
    coeffs: Vec<u64>,
    modulus: u64,
}

impl ModPoly {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn eval(&self, x: u64) -> u64 {
        let q = self.modulus;
        let x = x % q;
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| ((mul_mod(acc, x, q) as u128 + c as u128) % q as u128) as u64)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.magnitude();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one() && i > 0;
            if !unit {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&c.to_string())?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct CoeffVisitor;

        impl<'de> Visitor<'de> for CoeffVisitor {
            type Value = IntPoly;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an array of decimal coefficient strings, lowest degree first")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<IntPoly, A::Error> {
                let mut coeffs = Vec::new();
                while let Some(v) = seq.next_element::<serde_json::Value>()? {
                    let c = match &v {
                        serde_json::Value::String(s) => s.trim().parse::<BigInt>().ok(),
                        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
                        _ => None,
                    }
                    .ok_or_else(|| de::Error::custom(format!("bad coefficient {v}")))?;
                    coeffs.push(c);
                }
                Ok(IntPoly::new(coeffs))
            }
        }

        deserializer.deserialize_seq(CoeffVisitor)
    }
}

/// `BigInt` as a decimal string, for `#[serde(with = "...")]`.
pub mod big_decimal {
    use num_bigint::BigInt;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let text = String::deserialize(d)?;
        text.trim().parse().map_err(|_| de::Error::custom(format!("bad integer {text:?}")))
    }
}

impl std::str::FromStr for IntPoly {
    type Err = Error;

    /// Parses the JSON coefficient-array encoding.
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::PolyParse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p(&[-1, 0, 1]).eval_i64(3), BigInt::from(8));
        assert_eq!(p(&[-1, 0, 1]).eval_i64(1), BigInt::from(0));
        assert_eq!(p(&[3, -8, 5]).eval_i64(2), BigInt::from(7));
    }

    #[test]
    fn shift_scale_examples() {
        let h = p(&[-1, 0, 1]);
        assert_eq!(h.shift_scale(&(-1).into(), &2.into()), p(&[0, -4, 4]));
        assert_eq!(h.shift_scale(&0.into(), &1.into()), h);
        assert_eq!(h.shift_scale(&(-4).into(), &5.into()), p(&[15, -40, 25]));
    }

    #[test]
    fn content_examples() {
        assert_eq!(p(&[-1, 0, 1]).content().unwrap(), BigInt::from(1));
        assert_eq!(p(&[0, -2, 2]).content().unwrap(), BigInt::from(2));
        assert_eq!(p(&[0, 9, 0, 6]).content().unwrap(), BigInt::from(3));
        assert!(p(&[5]).content().is_err());
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(p(&[-1, 0, 1]).discriminant_abs().unwrap(), BigUint::from(4u32));
        assert_eq!(p(&[1, 1, 1]).discriminant_abs().unwrap(), BigUint::from(3u32));
        assert_eq!(p(&[1, -2, 1]).discriminant_abs().unwrap(), BigUint::from(0u32));
        assert!(p(&[1, 1]).discriminant_abs().is_err());
        // x^3 + 2x^2 - x - 2 = (x-1)(x+1)(x+2)
        assert_eq!(p(&[-2, -1, 2, 1]).discriminant_abs().unwrap(), BigUint::from(36u32));
    }

    #[test]
    fn separation_discriminant_handles_repeated_roots() {
        let one = BigRational::one();
        assert_eq!(p(&[1, -2, 1]).root_separation_discriminant().unwrap(), one);
        assert_eq!(
            p(&[-1, 0, 1]).root_separation_discriminant().unwrap(),
            BigRational::from_integer(4.into())
        );
        // 2(x-1)^2 (x+1): a^4 * |2|^(2*2*1) = 16 * 16
        let h = &(&p(&[-1, 1]) * &p(&[-1, 1])) * &p(&[2, 2]);
        assert_eq!(
            h.root_separation_discriminant().unwrap(),
            BigRational::from_integer(256.into())
        );
    }

    #[test]
    fn squarefree_decomposition_splits_multiplicities() {
        // (x-1)^2 (x+2)^3 x
        let a = p(&[-1, 1]);
        let b = p(&[2, 1]);
        let h = &(&(&a * &a) * &(&(&b * &b) * &b)) * &IntPoly::x();
        let dec = h.squarefree_decomposition();
        assert_eq!(dec, vec![(IntPoly::x(), 1), (a, 2), (b, 3)]);
    }

    #[test]
    fn rational_roots_found() {
        let roots = p(&[0, -1, 1]).rational_roots().unwrap();
        assert_eq!(roots, vec![(0.into(), 1.into()), (1.into(), 1.into())]);
        // (2x - 1)(3x + 1)
        let roots = p(&[-1, -1, 6]).rational_roots().unwrap();
        assert_eq!(roots, vec![((-1).into(), 3.into()), (1.into(), 2.into())]);
        assert_eq!(p(&[-2, 0, 1]).rational_roots().unwrap(), vec![]);
    }

    #[test]
    fn json_encoding() {
        let h: IntPoly = r#"["-1","0","1"]"#.parse().unwrap();
        assert_eq!(h, p(&[-1, 0, 1]));
        assert_eq!(serde_json::to_string(&h).unwrap(), r#"["-1","0","1"]"#);
        assert_eq!(h.to_string(), "x^2 - 1");
        assert_eq!(p(&[3, -8, 5]).to_string(), "5x^2 - 8x + 3");
    }

    fn small_poly() -> impl Strategy<Value = IntPoly> {
        prop::collection::vec(-20i64..20, 1..6).prop_map(|c| IntPoly::from_i64(&c))
    }

    proptest! {
        #[test]
        fn shift_scale_composes(h in small_poly(), r1 in -9i64..9, d1 in 1i64..9, r2 in -9i64..9, d2 in 1i64..9) {
            let lhs = h.shift_scale(&r1.into(), &d1.into()).shift_scale(&r2.into(), &d2.into());
            let rhs = h.shift_scale(&(r1 + d1 * r2).into(), &(d1 * d2).into());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn content_is_homogeneous(h in small_poly(), c in -12i64..12) {
            prop_assume!(h.degree() >= 1 && c != 0);
            let scaled = h.scale(&c.into());
            prop_assert_eq!(scaled.content().unwrap(), h.content().unwrap() * BigInt::from(c.abs()));
        }

        #[test]
        fn discriminant_shift_invariant(h in small_poly(), r in -50i64..50) {
            prop_assume!(h.degree() >= 2);
            let shifted = h.shift_scale(&r.into(), &1.into());
            prop_assert_eq!(shifted.discriminant_abs().unwrap(), h.discriminant_abs().unwrap());
        }
    }

    #[test]
    fn eval_matches_power_sum_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let deg = rng.gen_range(0..7);
            let coeffs: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-1000..1000)).collect();
            let x: i64 = rng.gen_range(-10_000..10_000);
            let h = p(&coeffs);
            // Independent oracle: explicit powers rather than Horner.
            let xb = BigInt::from(x);
            let expect: BigInt = coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| BigInt::from(c) * num_traits::pow(xb.clone(), i))
                .sum();
            assert_eq!(h.eval(&xb), expect);
        }
    }
}
