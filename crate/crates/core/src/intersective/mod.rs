//! Deciding P-intersectivity and building the auxiliary objects.

mod aux;
mod padic;
mod roots;

pub use aux::{aux_data, aux_is_consistent, content_within_bound, h_range, lambda, AuxData, AuxFactory, HRange};
pub use padic::{padic_roots, select_padic_roots, PadicRootChoice, RootFinder};
pub use roots::{
    coprime_root_exists, coprime_root_mod_prime_power, roots_mod, roots_mod_brute,
    roots_mod_prime_power, DEFAULT_BRUTE_THRESHOLD,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime_u64};
use crate::error::{Error, Result};
use crate::poly::IntPoly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum IntersectivityVerdict {
    /// Every prime power up to `bound` has a unit root.
    CertifiedUpTo { bound: u64, details: String },
    /// No unit root modulo `q`; `roots` lists all roots mod `q`.
    FailsAt { q: u64, roots: Vec<u64>, details: String },
    /// A structural reason guarantees a unit root for every modulus.
    SufficientCondition { name: String, details: String },
}

impl IntersectivityVerdict {
    pub fn is_failure(&self) -> bool {
        matches!(self, Self::FailsAt { .. })
    }
}

fn sufficient_condition(h: &IntPoly) -> Option<(String, String)> {
    for x in [1i64, -1] {
        if h.eval_i64(x).is_zero() {
            return Some((format!("root at {x}"), format!("h({x}) = 0")));
        }
    }
    let roots = h.rational_roots()?;
    for (i, (a, b)) in roots.iter().enumerate() {
        for (c, d) in &roots[i + 1..] {
            if (a * b).gcd(&(c * d)) == BigInt::from(1) {
                return Some((
                    "coprime rational roots".into(),
                    format!("roots {a}/{b} and {c}/{d} with gcd({}, {}) = 1", a * b, c * d),
                ));
            }
        }
    }
    None
}

/// Decide P-intersectivity where a finite argument exists, otherwise check
/// every prime power up to `q_max`.
///
/// For each prime only powers up to its certification depth are examined;
/// beyond that depth a unit root modulo `p^e` always lifts to `Z_p`.
pub fn certify_p_intersective(h: &IntPoly, q_max: u64) -> Result<IntersectivityVerdict> {
    if h.is_zero() || h.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    if q_max < 2 {
        return Err(Error::InvalidArgument("qmax must be at least 2".into()));
    }
    if let Some((name, details)) = sufficient_condition(h) {
        return Ok(IntersectivityVerdict::SufficientCondition { name, details });
    }
    let finder = RootFinder::new(h);
    let mut best: Option<(u64, u32)> = None;
    let mut deepest = (0u64, 0u32);
    for p in 2..=q_max {
        if best.is_some_and(|(q, _)| p >= q) {
            break;
        }
        if !is_prime_u64(p) {
            continue;
        }
        let depth = finder.certification_depth(p);
        if depth > deepest.1 {
            deepest = (p, depth);
        }
        let mut pe = p;
        for e in 1..=depth {
            if !coprime_root_mod_prime_power(h, p, e) {
                if best.is_none_or(|(q, _)| pe < q) {
                    best = Some((pe, e));
                }
                break;
            }
            match pe.checked_mul(p) {
                Some(next) if next <= q_max => pe = next,
                _ => break,
            }
        }
    }
    Ok(match best {
        Some((q, e)) => {
            let roots = roots_mod(h, q);
            let p = factorize(q)[0].0;
            IntersectivityVerdict::FailsAt {
                q,
                details: format!(
                    "no root mod {p}^{e} is prime to {p}; all {} roots mod {q} share a factor with it",
                    roots.len()
                ),
                roots,
            }
        }
        None => IntersectivityVerdict::CertifiedUpTo {
            bound: q_max,
            details: format!(
                "unit roots exist modulo every prime power up to {q_max}; deepest check {}^{}",
                deepest.0, deepest.1
            ),
        },
    })
}

/// Parameters of the progression `{step, 2 step, ...}` that avoids every
/// positive difference `h(p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessParams {
    pub q: u64,
    #[serde(with = "crate::poly::big_decimal")]
    pub m: BigInt,
    #[serde(with = "crate::poly::big_decimal")]
    pub step: BigInt,
}

/// For `q` with no unit root of `h`, any prime with `q | h(p)` must divide
/// `q`, so `m = max h(p)/q` ranges over finitely many primes.
pub fn witness_set_params(h: &IntPoly, q: u64) -> Result<WitnessParams> {
    if q == 0 {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    if coprime_root_exists(h, q) {
        return Err(Error::HasCoprimeRoot(q));
    }
    let big_q = BigInt::from(q);
    let mut m = BigInt::zero();
    for (p, _) in factorize(q) {
        let v = h.eval_i64(p as i64);
        if v.is_positive() && v.mod_floor(&big_q).is_zero() {
            m = m.max(&v / &big_q);
        }
    }
    let step = &big_q * (&m + 1);
    Ok(WitnessParams { q, m, step })
}
