//! Major-arc main terms and their comparison with the Weyl sum.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::quad::{oscillatory_integral_weighted, QuadResult};
use super::{gauss_sum, Frequency};
use crate::arith::euler_phi;
use crate::error::{Error, Result};
use crate::intersective::AuxData;
use crate::numeric::KahanSum;
use crate::primes::WeightedPrimes;

/// An exceptional modulus `q_0` with real character `χ` (values on residues
/// mod `q_0`) and Siegel zero `ρ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalConfig {
    pub q0: u64,
    pub rho: f64,
    pub chi: Vec<f64>,
}

impl ExceptionalConfig {
    pub fn new(q0: u64, rho: f64, chi: Vec<f64>) -> Result<Self> {
        if q0 == 0 || chi.len() as u64 != q0 {
            return Err(Error::InvalidArgument(format!(
                "character table has {} entries for q0 = {q0}",
                chi.len()
            )));
        }
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidArgument(format!("rho = {rho} outside [0, 1)")));
        }
        Ok(Self { q0, rho, chi })
    }

    pub fn chi_at(&self, n: i64) -> f64 {
        self.chi[n.rem_euclid(self.q0 as i64) as usize]
    }

    /// The trivial configuration leaves the main term unchanged.
    pub fn is_trivial(&self) -> bool {
        self.q0 <= 1 || self.chi.iter().all(|&c| c == 0.0)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MainTerm {
    pub re: f64,
    pub im: f64,
    pub integral: QuadResult,
}

impl MainTerm {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// `(φ(d)/φ(qd)) G(a, q) ∫_1^M w(x) e(h_d(x) β) dx`, where `w ≡ 1` unless
/// a nontrivial exceptional configuration gives
/// `w(x) = 1 - χ(r_d) (dx)^(ρ-1)`.
pub fn main_term_asym2(
    aux: &AuxData,
    a: i64,
    q: u64,
    beta: f64,
    m: f64,
    exceptional: Option<&ExceptionalConfig>,
) -> Result<MainTerm> {
    let g = gauss_sum(aux, a, q)?;
    let factor = euler_phi(aux.d) as f64 / euler_phi(q * aux.d) as f64;
    let integral = match exceptional.filter(|c| !c.is_trivial()) {
        None => oscillatory_integral_weighted(&aux.h_d, beta, 1.0, m, 1e-12, &|_| 1.0),
        Some(cfg) => {
            let chi = cfg.chi_at(aux.r_d);
            let d = aux.d as f64;
            let rho = cfg.rho;
            oscillatory_integral_weighted(&aux.h_d, beta, 1.0, m, 1e-12, &move |x| {
                1.0 - chi * (d * x).powf(rho - 1.0)
            })
        }
    };
    let v = g * integral.value() * factor;
    Ok(MainTerm {
        re: v.re,
        im: v.im,
        integral,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MajorArcComparison {
    pub a: i64,
    pub q: u64,
    pub beta: f64,
    pub s_re: f64,
    pub s_im: f64,
    pub main: MainTerm,
    pub psi: f64,
    /// `|S_M(a/q + β) - main| / Ψ_d`.
    pub residual: f64,
}

/// `S_M(a/q + β)` over `x ≤ ⌊M_d⌋`, with `h_d(x) a/q` reduced mod `q`
/// exactly and `h_d(x) β` through the dyadic reduction.
fn shifted_weyl_sum(aux: &AuxData, wp: &WeightedPrimes, a: i64, q: u64, beta: f64) -> Complex64 {
    let rat = Frequency::rational(a, q);
    let real = Frequency::Real(beta);
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for x in 1..=wp.range.m_floor.min(wp.extent()) {
        let nu = wp.nu_at(x);
        if nu == 0.0 {
            continue;
        }
        let h = aux.h_d.eval_i64(x as i64).to_i128().expect("h_d(x) fits in i128");
        let z = rat.phase(h) * real.phase(h) * nu;
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.value(), im.value())
}

/// Compare the Weyl sum at `a/q + β` with its major-arc main term, taking
/// `M = M_d`.
pub fn major_arc_residual(
    aux: &AuxData,
    wp: &WeightedPrimes,
    a: i64,
    q: u64,
    beta: f64,
    exceptional: Option<&ExceptionalConfig>,
) -> Result<MajorArcComparison> {
    if wp.d != aux.d {
        return Err(Error::Precondition(format!(
            "weights built for d = {} but aux data is for d = {}",
            wp.d, aux.d
        )));
    }
    let main = main_term_asym2(aux, a, q, beta, wp.range.m_d, exceptional)?;
    let s = shifted_weyl_sum(aux, wp, a, q, beta);
    let psi = wp.psi_total;
    let residual = (s - main.value()).norm() / psi.max(f64::MIN_POSITIVE);
    Ok(MajorArcComparison {
        a,
        q,
        beta,
        s_re: s.re,
        s_im: s.im,
        main,
        psi,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::weyl_sum;
    use crate::intersective::AuxFactory;
    use crate::poly::IntPoly;
    use crate::primes::{weighted_primes, PrimeTable};

    #[test]
    fn zero_frequency_main_term() {
        let h = IntPoly::from_i64(&[-1, 0, 1]);
        let mut f = AuxFactory::new(&h).unwrap();
        for (d, q, a) in [(1u64, 3u64, 1i64), (2, 5, 2), (4, 7, 3)] {
            let aux = f.aux_mut(d).unwrap();
            let m = 137.5;
            let main = main_term_asym2(&aux, a, q, 0.0, m, None).unwrap();
            let expect = gauss_sum(&aux, a, q).unwrap() * (m - 1.0) * euler_phi(d) as f64
                / euler_phi(q * d) as f64;
            assert!((main.value() - expect).norm() < 1e-9);
        }
    }

    #[test]
    fn main_term_tracks_sum_at_small_beta() {
        let h = IntPoly::from_i64(&[-1, 0, 1]);
        let aux = AuxFactory::new(&h).unwrap().aux_mut(1).unwrap();
        let table = PrimeTable::sieve(20_000);
        let wp = weighted_primes(&aux, 100_000_000, 1, &table).unwrap();
        let beta = 1e-8;
        let cmp = major_arc_residual(&aux, &wp, 1, 1, beta, None).unwrap();
        let s = weyl_sum(&aux, &wp, wp.range.m_floor, Frequency::Real(beta)).unwrap();
        assert!((s - Complex64::new(cmp.s_re, cmp.s_im)).norm() < 1e-9);
        assert!((cmp.main.re - s.re).abs() < 0.2 * s.re.abs());
        assert!(cmp.main.integral.doubling_change < 1e-6);
    }

    #[test]
    fn exceptional_weight() {
        let h = IntPoly::from_i64(&[-1, 0, 1]);
        let aux = AuxFactory::new(&h).unwrap().aux_mut(3).unwrap();
        let plain = main_term_asym2(&aux, 1, 4, 1e-4, 200.0, None).unwrap();
        let cfg = ExceptionalConfig::new(1, 0.5, vec![0.0]).unwrap();
        let same = main_term_asym2(&aux, 1, 4, 1e-4, 200.0, Some(&cfg)).unwrap();
        assert_eq!(plain.value(), same.value());
        let chi3 = ExceptionalConfig::new(3, 0.8, vec![0.0, 1.0, -1.0]).unwrap();
        let other = main_term_asym2(&aux, 1, 4, 0.0, 200.0, Some(&chi3)).unwrap();
        // ∫_1^M (1 - χ (dx)^(ρ-1)) dx = (M - 1) - χ d^(ρ-1) (M^ρ - 1) / ρ.
        let (chi, rho, m) = (chi3.chi_at(aux.r_d), 0.8f64, 200.0f64);
        assert_ne!(chi, 0.0);
        let weight = (m - 1.0) - chi * 3f64.powf(rho - 1.0) * (m.powf(rho) - 1.0) / rho;
        let expect = gauss_sum(&aux, 1, 4).unwrap() * weight * euler_phi(3) as f64 / euler_phi(12) as f64;
        assert!((other.value() - expect).norm() < 1e-9 * expect.norm().max(1.0));
        assert!(ExceptionalConfig::new(4, 0.5, vec![1.0]).is_err());
    }
}
