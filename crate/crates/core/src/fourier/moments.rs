//! Discrete moments `Σ_{t mod N} |T(t/N)|^s` of the normalized Weyl sums.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::intersective::AuxData;
use crate::numeric::{kahan_sum, KahanSum};
use crate::primes::WeightedPrimes;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentKind {
    /// `T(α) = Ψ_d^(-1) Σ_{x ∈ H_d} ν_d(x) e(h_d(x) α)`.
    T,
    /// As `T`, with `ν_d(x)` replaced by `M_d ν_d(x) h_d'(x) / N`.
    W,
}

impl fmt::Display for MomentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MomentKind::T => "T",
            MomentKind::W => "W",
        })
    }
}

impl FromStr for MomentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" | "t" => Ok(MomentKind::T),
            "W" | "w" => Ok(MomentKind::W),
            _ => Err(Error::InvalidArgument(format!("unknown moment kind {s:?} (T | W)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSum {
    pub kind: MomentKind,
    pub s: u32,
    #[serde(rename = "N")]
    pub n: u64,
    pub value: f64,
    pub at_zero: f64,
    /// `N^(-1) Σ_t |T(t/N)|^2`.
    pub parseval_lhs: f64,
    /// `Σ_v |c_v|^2` with `c_v` the total coefficient on `h_d(x) = v`.
    pub parseval_rhs: f64,
}

/// `Σ_{t=0}^{N-1} |T(t/N)|^s` through one length-`N` FFT of the
/// coefficients bucketed by `h_d(x) mod N`.
pub fn moment_sum(aux: &AuxData, wp: &WeightedPrimes, kind: MomentKind, s: u32, n: u64) -> Result<MomentSum> {
    if s == 0 || s % 2 == 1 {
        return Err(Error::OddMoment(s));
    }
    let max_h = wp.range.values.iter().copied().max().unwrap_or(0);
    let needed = 2 * max_h.max(1);
    if n < needed {
        return Err(Error::ModulusTooSmall { n, needed });
    }
    let psi = wp.psi_total;
    if psi <= 0.0 {
        return Err(Error::Precondition("Ψ_d = 0".into()));
    }
    let deriv = aux.h_d.derivative();
    let mut grouped: BTreeMap<u64, KahanSum> = BTreeMap::new();
    for (&x, &v) in wp.range.set.iter().zip(&wp.range.values) {
        let nu = wp.nu_at(x);
        if nu == 0.0 {
            continue;
        }
        let c = match kind {
            MomentKind::T => nu / psi,
            MomentKind::W => {
                let dh = deriv.eval_i64(x as i64).to_f64().expect("finite");
                wp.range.m_d * nu * dh / (psi * n as f64)
            }
        };
        grouped.entry(v).or_default().add(c);
    }
    let coeffs: Vec<(u64, f64)> = grouped.into_iter().map(|(v, c)| (v, c.value())).collect();
    let mut buckets = vec![Complex64::new(0.0, 0.0); n as usize];
    for &(v, c) in &coeffs {
        buckets[(v % n) as usize] += c;
    }
    let values = fft::inverse(&buckets, n as usize);
    let half = s / 2;
    let value = kahan_sum(values.iter().map(|z| z.norm_sqr().powi(half as i32)));
    let parseval_lhs = kahan_sum(values.iter().map(|z| z.norm_sqr())) / n as f64;
    let parseval_rhs = kahan_sum(coeffs.iter().map(|&(_, c)| c * c));
    Ok(MomentSum {
        kind,
        s,
        n,
        value,
        at_zero: values[0].re,
        parseval_lhs,
        parseval_rhs,
    })
}
