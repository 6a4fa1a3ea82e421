//! Exponential sums: transforms on `Z`, Weyl and Gauss sums, arcs, main
//! terms and moments.

mod arcs;
mod asym;
mod gauss;
mod moments;
mod quad;
mod weyl;

pub use arcs::{l2_concentration, ArcSystem, L2Masses};
pub use asym::{main_term_asym2, major_arc_residual, ExceptionalConfig};
pub use gauss::{
    complete_sum, gauss_bound_ratio, gauss_sum, gauss_sums_all, twisted_gauss_sum_direct,
    twisted_gauss_sum_split, GaussValue,
};
pub use moments::{moment_sum, MomentKind, MomentSum};
pub use quad::{oscillatory_integral, QuadResult};
pub use weyl::{orthogonality_sides, weyl_sum, WeylSum};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::float::FloatCore;

use crate::counting::IndexSet;
use crate::error::{Error, Result};
use crate::fft;

const TAU: f64 = std::f64::consts::TAU;

/// `e(θ) = e^(2πiθ)`.
pub fn e(theta: f64) -> Complex64 {
    let (s, c) = (TAU * theta).sin_cos();
    Complex64::new(c, s)
}

/// `e(v/q)` for a residue `v mod q`; exactly `1` at `v ≡ 0`.
pub fn e_frac(v: u64, q: u64) -> Complex64 {
    let v = v % q;
    if v == 0 {
        return Complex64::new(1.0, 0.0);
    }
    e(v as f64 / q as f64)
}

/// A point of the circle, either an exact fraction or a double.
///
/// A double is itself an exact dyadic rational, so `{hα}` is reduced
/// exactly in integer arithmetic before any rounding happens.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Frequency {
    Rational { num: i64, den: u64 },
    Real(f64),
}

impl Frequency {
    pub fn rational(num: i64, den: u64) -> Self {
        assert!(den > 0);
        Frequency::Rational { num, den }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Frequency::Rational { num, den } => num as f64 / den as f64,
            Frequency::Real(x) => x,
        }
    }

    /// `{h α} ∈ [0, 1)`.
    pub fn frac_mul(self, h: i128) -> f64 {
        match self {
            Frequency::Rational { num, den } => {
                let den = den as i128;
                let v = (h.rem_euclid(den) * (num as i128).rem_euclid(den)).rem_euclid(den);
                v as f64 / den as f64
            }
            Frequency::Real(x) => frac_mul_dyadic(h, x),
        }
    }

    /// `e(h α)`.
    pub fn phase(self, h: i128) -> Complex64 {
        match self {
            Frequency::Rational { num, den } => {
                let d = den as i128;
                let v = (h.rem_euclid(d) * (num as i128).rem_euclid(d)).rem_euclid(d);
                e_frac(v as u64, den)
            }
            Frequency::Real(_) => e(self.frac_mul(h)),
        }
    }
}

fn frac_mul_dyadic(h: i128, x: f64) -> f64 {
    if h == 0 || x == 0.0 {
        return 0.0;
    }
    let (mant, exp, sign) = x.integer_decode();
    let m = mant as i128 * sign as i128;
    if exp >= 0 {
        return 0.0;
    }
    let shift = (-exp) as u32;
    match h.checked_mul(m) {
        Some(p) if shift <= 126 => {
            let r = p.rem_euclid(1i128 << shift);
            r as f64 * 2f64.powi(exp as i32)
        }
        Some(p) => {
            // |h m| < 2^127, so |h x| < 2^(127 - shift) < 1/2.
            let v = ldexp(p as f64, exp as i32);
            v - v.floor()
        }
        None => {
            use num_bigint::BigInt;
            use num_integer::Integer;
            let p = BigInt::from(h) * BigInt::from(m);
            let modulus = BigInt::from(1) << shift;
            let r = p.mod_floor(&modulus);
            crate::poly::big_to_f64(&r) / crate::poly::big_to_f64(&modulus)
        }
    }
}

/// `x · 2^e` without overflowing the intermediate power.
fn ldexp(mut x: f64, mut e: i32) -> f64 {
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e)
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frequency::Rational { num, den } => write!(f, "{num}/{den}"),
            Frequency::Real(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Frequency {
    type Err = Error;

    /// `p/q` or a decimal.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse frequency {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let num: i64 = n.trim().parse().map_err(|_| bad())?;
            let den: u64 = d.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            Ok(Frequency::Rational { num, den })
        } else {
            let x: f64 = s.trim().parse().map_err(|_| bad())?;
            if !x.is_finite() {
                return Err(bad());
            }
            Ok(Frequency::Real(x))
        }
    }
}

/// `F̂(α) = Σ_x F(x) e(-xα)` for finitely supported `F`.
pub fn transform_at(support: &[(i64, f64)], alpha: Frequency) -> Complex64 {
    let mut re = crate::numeric::KahanSum::new();
    let mut im = crate::numeric::KahanSum::new();
    for &(x, v) in support {
        let z = alpha.phase(-(x as i128)) * v;
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.value(), im.value())
}

/// `F̂(t/T)` for `t ∈ [0, T)`, where `values[i] = F(offset + i)`.
pub fn transform_grid(values: &[f64], offset: i64, grid: usize) -> Vec<Complex64> {
    let mut folded = vec![0.0; grid];
    for (i, &v) in values.iter().enumerate() {
        let x = (offset + i as i64).rem_euclid(grid as i64) as usize;
        folded[x] += v;
    }
    fft::real_forward(&folded, grid)
}

/// `T = 2^⌈log₂ 4L⌉`.
pub fn default_grid(l: u64) -> usize {
    fft::next_pow2_at_least(4 * l)
}

/// `f_B = 1_B - σ 1_[1,L]`.
#[derive(Clone, Debug)]
pub struct BalanceFn {
    set: IndexSet,
}

impl BalanceFn {
    pub fn new(set: &IndexSet) -> Self {
        Self { set: set.clone() }
    }

    pub fn set(&self) -> &IndexSet {
        &self.set
    }

    pub fn sigma(&self) -> f64 {
        self.set.sigma()
    }

    /// `f_B(x)` for `x ∈ [1, L]` (index `x - 1`).
    pub fn values(&self) -> Vec<f64> {
        let sigma = self.sigma();
        let mask = self.set.mask();
        (1..=self.set.length())
            .map(|x| if mask[x as usize] { 1.0 - sigma } else { -sigma })
            .collect()
    }

    pub fn support(&self) -> Vec<(i64, f64)> {
        self.values()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (i as i64 + 1, v))
            .collect()
    }

    /// `Σ_x f_B(x)`, computed in exact rationals (always zero).
    pub fn sum_exact(&self) -> Ratio<i128> {
        let l = self.set.length() as i128;
        let b = self.set.size() as i128;
        if l == 0 {
            return Ratio::from_integer(0);
        }
        let sigma = Ratio::new(b, l);
        Ratio::from_integer(b) * (Ratio::from_integer(1) - sigma) - (Ratio::from_integer(l - b)) * sigma
    }

    /// `Σ_x f_B(x)^2 = σ(1-σ)L`.
    pub fn l2_mass(&self) -> f64 {
        let s = self.sigma();
        s * (1.0 - s) * self.set.length() as f64
    }

    /// `f̂_B(t/T)` on a grid of `T` points; `T > L` keeps it alias free.
    pub fn transform_grid(&self, grid: usize) -> Result<Vec<Complex64>> {
        if (grid as u64) <= self.set.length() {
            return Err(Error::GridTooCoarse {
                grid,
                len: self.set.length(),
            });
        }
        Ok(transform_grid(&self.values(), 1, grid))
    }
}

/// Plancherel on a grid: `(Σ_t |F̂(t/T)|^2 / T, Σ_x |F(x)|^2)`.
pub fn plancherel_sides(spectrum: &[Complex64], values: &[f64]) -> (f64, f64) {
    let t = spectrum.len() as f64;
    let lhs = crate::numeric::kahan_sum(spectrum.iter().map(|z| z.norm_sqr())) / t;
    let rhs = crate::numeric::kahan_sum(values.iter().map(|v| v * v));
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_examples() {
        let z = transform_at(&[(0, 1.0)], Frequency::Real(0.3127));
        assert_eq!(z, Complex64::new(1.0, 0.0));
        let z = transform_at(&[(1, 1.0), (2, 1.0)], Frequency::rational(1, 2));
        assert!(z.norm() < 1e-15);
        let b = BalanceFn::new(&IndexSet::full(10));
        assert!(transform_at(&b.support(), Frequency::Real(0.1)).norm() < 1e-12);
    }

    #[test]
    fn grid_matches_pointwise() {
        let set = IndexSet::new(50, vec![1, 2, 7, 11, 20, 33, 49]).unwrap();
        let f = BalanceFn::new(&set);
        let grid = default_grid(50);
        let spec = f.transform_grid(grid).unwrap();
        let support = f.support();
        for t in 0..grid {
            let direct = transform_at(&support, Frequency::rational(t as i64, grid as u64));
            assert!((spec[t] - direct).norm() < 1e-9, "t = {t}");
        }
        let (lhs, rhs) = plancherel_sides(&spec, &f.values());
        assert!((lhs - rhs).abs() < 1e-9 * rhs);
        assert!((rhs - f.l2_mass()).abs() < 1e-9);
        assert_eq!(f.sum_exact(), Ratio::from_integer(0));
    }

    #[test]
    fn dyadic_phase_reduction_is_exact() {
        // α = 3/2^40 exactly; h α = h·3 / 2^40.
        let alpha = 3.0 / (1u64 << 40) as f64;
        let h: i128 = (1i128 << 60) + 12345;
        let expect = ((h * 3) % (1i128 << 40)) as f64 / (1u64 << 40) as f64;
        assert_eq!(Frequency::Real(alpha).frac_mul(h), expect);
        // Naive double arithmetic loses all phase information here.
        assert_eq!(Frequency::Real(0.5).frac_mul(7), 0.5);
        assert_eq!(Frequency::Real(-0.25).frac_mul(3), 0.25);
        assert_eq!(Frequency::rational(-1, 3).frac_mul(1), 2.0 / 3.0);
        let tiny = Frequency::Real(1e-300).frac_mul(1_000_000);
        assert!((tiny - 1e-294).abs() < 1e-306);
    }

    #[test]
    fn frequency_parsing() {
        assert_eq!("1/3".parse::<Frequency>().unwrap(), Frequency::rational(1, 3));
        assert_eq!("0.25".parse::<Frequency>().unwrap(), Frequency::Real(0.25));
        assert!("1/0".parse::<Frequency>().is_err());
        assert!("abc".parse::<Frequency>().is_err());
    }
}
