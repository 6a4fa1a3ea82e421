//! The weighted count `R_d(B)`, its FFT form, subprogression extraction and
//! greedy difference-avoiding sets.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::autocorrelation;
use crate::numeric::KahanSum;
use crate::poly::IntPoly;
use crate::primes::{PrimeTable, WeightedPrimes};

/// A subset of `[1, L]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSet {
    #[serde(rename = "L")]
    l: u64,
    members: Vec<u64>,
}

impl IndexSet {
    /// Members are sorted and deduplicated; anything outside `[1, L]` is an
    /// error.
    pub fn new(l: u64, mut members: Vec<u64>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if let Some(&bad) = members.iter().find(|&&x| x == 0 || x > l) {
            return Err(Error::InvalidArgument(format!("{bad} is outside [1, {l}]")));
        }
        Ok(Self { l, members })
    }

    pub fn empty(l: u64) -> Self {
        Self { l, members: Vec::new() }
    }

    pub fn full(l: u64) -> Self {
        Self {
            l,
            members: (1..=l).collect(),
        }
    }

    pub fn from_predicate(l: u64, f: impl Fn(u64) -> bool) -> Self {
        Self {
            l,
            members: (1..=l).filter(|&x| f(x)).collect(),
        }
    }

    pub fn length(&self) -> u64 {
        self.l
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn contains(&self, x: u64) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// `|B| / L` as an exact fraction.
    pub fn sigma_exact(&self) -> Ratio<u64> {
        Ratio::new(self.members.len() as u64, self.l.max(1))
    }

    pub fn sigma(&self) -> f64 {
        self.members.len() as f64 / self.l.max(1) as f64
    }

    /// `mask[x]` for `x ∈ [0, L]`.
    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.l as usize + 1];
        for &x in &self.members {
            m[x as usize] = true;
        }
        m
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    /// `|B ∩ [lo, hi]|`.
    pub fn count_in(&self, lo: u64, hi: u64) -> u64 {
        if lo > hi {
            return 0;
        }
        (self.members.partition_point(|&x| x <= hi) - self.members.partition_point(|&x| x < lo)) as u64
    }
}

/// `R_d(B) = Σ_{x, y} 1_B(x) 1_B(x + h_d(y)) ν_d(y)` over `y ∈ H_d`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RCount {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(u64, u64)>>,
    /// Number of solutions `(x, y)` per prime `r_d + d y`.
    #[serde(skip)]
    pub per_prime: BTreeMap<u64, u64>,
    /// `φ(d)/d` as an exact fraction.
    #[serde(skip)]
    pub phi_ratio: Option<Ratio<u64>>,
}

/// Pair lists are truncated at this many entries.
pub const PAIR_CAP: usize = 1_000_000;

impl RCount {
    pub fn solutions(&self) -> u64 {
        self.per_prime.values().sum()
    }

    /// Exact certificate that `self ≤ other`: the weight `φ(d)/d` is no
    /// larger and every prime occurs no more often.
    ///
    /// Both values are `(φ(d)/d) Σ_p n_p log p`, so this implies the real
    /// inequality without any rounding.
    pub fn dominated_by(&self, other: &RCount) -> bool {
        let (Some(a), Some(b)) = (self.phi_ratio, other.phi_ratio) else {
            return false;
        };
        if self.per_prime.is_empty() {
            return true;
        }
        a <= b
            && self
                .per_prime
                .iter()
                .all(|(p, n)| other.per_prime.get(p).is_some_and(|m| n <= m))
    }
}

fn phi_ratio_exact(wp: &WeightedPrimes) -> Ratio<u64> {
    Ratio::new(crate::arith::euler_phi(wp.d), wp.d)
}

fn check_lengths(b: &IndexSet, wp: &WeightedPrimes) -> Result<()> {
    if b.l != wp.l {
        return Err(Error::Precondition(format!(
            "weights built for L = {} but the set lives in [1, {}]",
            wp.l, b.l
        )));
    }
    Ok(())
}

/// The structure lags `(y, h_d(y), ν_d(y))` with `ν_d(y) > 0`.
fn weighted_lags(wp: &WeightedPrimes) -> impl Iterator<Item = (u64, u64, f64)> + '_ {
    wp.range
        .set
        .iter()
        .zip(&wp.range.values)
        .map(|(&y, &g)| (y, g, wp.nu_at(y)))
        .filter(|t| t.2 > 0.0)
}

fn prime_of(wp: &WeightedPrimes, y: u64) -> u64 {
    (wp.r_d + (wp.d * y) as i64) as u64
}

/// Double loop over `x ∈ B` and `y ∈ H_d`.
pub fn count_r_direct(b: &IndexSet, wp: &WeightedPrimes, want_pairs: bool) -> Result<RCount> {
    check_lengths(b, wp)?;
    let mask = b.mask();
    let mut total = KahanSum::new();
    let mut per_prime = BTreeMap::new();
    let mut pairs = want_pairs.then(Vec::new);
    for (y, g, nu) in weighted_lags(wp) {
        let mut hits = 0u64;
        for &x in &b.members {
            let t = x + g;
            if t <= b.l && mask[t as usize] {
                hits += 1;
                if let Some(ps) = pairs.as_mut() {
                    if ps.len() < PAIR_CAP {
                        ps.push((x, y));
                    }
                }
            }
        }
        if hits > 0 {
            total.add(hits as f64 * nu);
            *per_prime.entry(prime_of(wp, y)).or_insert(0) += hits;
        }
    }
    Ok(RCount {
        value: total.value(),
        pairs,
        per_prime,
        phi_ratio: Some(phi_ratio_exact(wp)),
    })
}

/// Same quantity through the FFT autocorrelation of `1_B`.
pub fn count_r_fft(b: &IndexSet, wp: &WeightedPrimes) -> Result<RCount> {
    check_lengths(b, wp)?;
    let mut f = vec![0.0; b.l as usize + 1];
    for &x in &b.members {
        f[x as usize] = 1.0;
    }
    let corr = autocorrelation(&f);
    let mut total = KahanSum::new();
    let mut per_prime = BTreeMap::new();
    for (y, g, nu) in weighted_lags(wp) {
        let Some(&c) = corr.get(g as usize) else { continue };
        let hits = c.round().max(0.0) as u64;
        if hits > 0 {
            total.add(hits as f64 * nu);
            *per_prime.entry(prime_of(wp, y)).or_insert(0) += hits;
        }
    }
    Ok(RCount {
        value: total.value(),
        pairs: None,
        per_prime,
        phi_ratio: Some(phi_ratio_exact(wp)),
    })
}

/// `B' = {ℓ ∈ [1, L'] : x_0 + ℓ λ(q) ∈ B}`.
pub fn extract_subprogression(b: &IndexSet, x0: i64, lambda_q: u64, l_new: u64) -> Result<IndexSet> {
    if lambda_q == 0 || l_new > b.l / lambda_q {
        return Err(Error::Precondition(format!(
            "L' = {l_new} exceeds L / λ(q) = {} / {lambda_q}",
            b.l
        )));
    }
    let members = (1..=l_new)
        .filter(|&ell| {
            let x = x0 + (ell * lambda_q) as i64;
            x >= 1 && b.contains(x as u64)
        })
        .collect();
    Ok(IndexSet { l: l_new, members })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GapMode {
    #[serde(rename = "primes")]
    Primes,
    #[serde(rename = "all-n")]
    AllN,
}

impl fmt::Display for GapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GapMode::Primes => "primes",
            GapMode::AllN => "all-n",
        })
    }
}

impl FromStr for GapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primes" => Ok(GapMode::Primes),
            "all-n" => Ok(GapMode::AllN),
            _ => Err(Error::InvalidArgument(format!("unknown mode {s:?} (primes | all-n)"))),
        }
    }
}

/// Sorted distinct values `h(n) ∈ [1, N]` over `n ≥ 1` (prime `n` only in
/// `Primes` mode).
pub fn forbidden_gaps(h: &IntPoly, n_max: u64, mode: GapMode) -> Vec<u64> {
    if h.degree() == 0 {
        let c = h.coeff(0);
        return match c.to_u64() {
            Some(g) if g >= 1 && g <= n_max && mode == GapMode::AllN => vec![g],
            _ => Vec::new(),
        };
    }
    let big_n = BigInt::from(n_max);
    let rising = h.lead().is_positive();
    let monotone_from = h.derivative().cauchy_root_bound().ceil().max(1.0) as u64;
    let mut candidates = Vec::new();
    let mut n = 1u64;
    loop {
        let v = h.eval(&BigInt::from(n));
        if v.is_positive() && v <= big_n {
            candidates.push((n, v.to_u64().expect("<= N")));
        }
        let finished = if rising { v > big_n } else { !v.is_positive() };
        if n >= monotone_from && finished {
            break;
        }
        n += 1;
    }
    let table = (mode == GapMode::Primes).then(|| PrimeTable::sieve(n));
    let mut gaps: Vec<u64> = candidates
        .into_iter()
        .filter(|&(n, _)| table.as_ref().is_none_or(|t| t.is_prime(n)))
        .map(|(_, g)| g)
        .collect();
    gaps.sort_unstable();
    gaps.dedup();
    gaps
}

/// Left-to-right greedy subset of `[1, N]` with no two members differing by
/// a forbidden gap.
pub fn greedy_avoider(h: &IntPoly, n: u64, mode: GapMode) -> IndexSet {
    let gaps = forbidden_gaps(h, n, mode);
    let mut forbidden = vec![false; n as usize + 1];
    let mut members = Vec::new();
    for x in 1..=n {
        if forbidden[x as usize] {
            continue;
        }
        members.push(x);
        for &g in &gaps {
            let t = x + g;
            if t > n {
                break;
            }
            forbidden[t as usize] = true;
        }
    }
    IndexSet { l: n, members }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub density: f64,
    pub set_size: u64,
    pub mode: GapMode,
    pub poly: String,
}

pub fn density_profile(h: &IntPoly, ns: &[u64], mode: GapMode) -> Vec<ProfileRow> {
    let poly = h.pretty();
    ns.par_iter()
        .map(|&n| {
            let set = greedy_avoider(h, n, mode);
            ProfileRow {
                n,
                density: set.sigma(),
                set_size: set.size() as u64,
                mode,
                poly: poly.clone(),
            }
        })
        .collect()
}

pub const PROFILE_HEADER: &str = "N,density,set_size,mode,poly";

pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut out = String::from(PROFILE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.n, r.density, r.set_size, r.mode, r.poly));
    }
    out
}
