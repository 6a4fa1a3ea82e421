//! Prime tables, `ψ(X, a, q)` and the weights `ν_d`.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::euler_phi;
use crate::error::{Error, Result};
use crate::intersective::{h_range, AuxData, HRange};
use crate::numeric::KahanSum;

const MAGIC: &[u8; 4] = b"PSIV";
const CACHE_VERSION: u32 = 1;
/// Odd numbers per sieve segment (a multiple of 64).
const SEGMENT: u64 = 1 << 18;
pub const CACHE_ENV: &str = "PINTERSECT_CACHE";
pub const CACHE_FILE: &str = "primes.psiv";

/// All primes in `[2, limit]`, with an odd-number bitmap for O(1) lookups.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    limit: u64,
    /// Bit `i` is set when `2i + 1` is prime.
    bits: Vec<u64>,
    primes: Vec<u64>,
}

fn small_primes(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Bitmap words for odd numbers `2i + 1`, `i ∈ [lo, lo + 64·words)`.
fn sieve_segment(lo: u64, words: usize, base: &[u64], limit: u64) -> Vec<u64> {
    let mut seg = vec![u64::MAX; words];
    let hi = lo + 64 * words as u64;
    let first = 2 * lo + 1;
    let last = 2 * hi - 1;
    for &p in base.iter().skip(1) {
        if p * p > last {
            break;
        }
        // Smallest odd multiple of p that is >= max(p^2, first).
        let mut m = (first.max(p * p)).div_ceil(p) * p;
        if m % 2 == 0 {
            m += p;
        }
        while m <= last {
            let i = (m - 1) / 2 - lo;
            seg[(i / 64) as usize] &= !(1u64 << (i % 64));
            m += 2 * p;
        }
    }
    for i in lo..hi {
        let n = 2 * i + 1;
        if n == 1 || n > limit {
            let j = i - lo;
            seg[(j / 64) as usize] &= !(1u64 << (j % 64));
        }
    }
    seg
}

impl PrimeTable {
    /// Segmented sieve of Eratosthenes over `[2, limit]`.
    pub fn sieve(limit: u64) -> Self {
        let limit = limit.max(2);
        let base = small_primes((limit as f64).sqrt() as u64 + 1);
        let odd_count = limit / 2 + 1;
        let total_words = odd_count.div_ceil(64) as usize;
        let seg_words = (SEGMENT / 64) as usize;
        let starts: Vec<usize> = (0..total_words).step_by(seg_words).collect();
        let bits: Vec<u64> = starts
            .par_iter()
            .flat_map_iter(|&w| {
                let words = seg_words.min(total_words - w);
                sieve_segment(64 * w as u64, words, &base, limit)
            })
            .collect();
        Self::from_bits(limit, bits)
    }

    fn from_bits(limit: u64, bits: Vec<u64>) -> Self {
        let mut primes = vec![2];
        for (w, &word) in bits.iter().enumerate() {
            let mut x = word;
            while x != 0 {
                let b = x.trailing_zeros() as u64;
                primes.push(2 * (64 * w as u64 + b) + 1);
                x &= x - 1;
            }
        }
        Self { limit, bits, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primes `≤ x`.
    pub fn primes_upto(&self, x: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= x);
        &self.primes[..end]
    }

    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} is beyond the sieve limit {}", self.limit);
        if n == 2 {
            return true;
        }
        if n % 2 == 0 {
            return false;
        }
        let i = n / 2;
        self.bits[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn check_covers(&self, n: u64) -> Result<()> {
        if n > self.limit {
            Err(Error::TableTooSmall {
                needed: n,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
        let mut buf = Vec::with_capacity(16 + 8 * self.bits.len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        buf.extend_from_slice(&self.limit.to_le_bytes());
        for w in &self.bits {
            buf.extend_from_slice(&w.to_le_bytes());
        }
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(&buf).map_err(io)?;
        f.sync_all().map_err(io)?;
        fs::rename(&tmp, path).map_err(io)
    }

    pub fn read_cache(path: &Path) -> Result<Self> {
        let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
        let mut buf = Vec::new();
        fs::File::open(path)
            .map_err(io)?
            .read_to_end(&mut buf)
            .map_err(io)?;
        if buf.len() < 16 || &buf[..4] != MAGIC {
            return Err(Error::Cache(format!("{}: bad header", path.display())));
        }
        let version = u32::from_le_bytes(buf[4..8].try_into().unwrap());
        if version != CACHE_VERSION {
            return Err(Error::Cache(format!("unsupported version {version}")));
        }
        let limit = u64::from_le_bytes(buf[8..16].try_into().unwrap());
        let words = (limit / 2 + 1).div_ceil(64) as usize;
        if buf.len() != 16 + 8 * words {
            return Err(Error::Cache(format!("{}: truncated bitmap", path.display())));
        }
        let bits = buf[16..]
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self::from_bits(limit, bits))
    }

    /// Load from `dir` when a large enough cached table exists, otherwise
    /// sieve and (best effort) write the cache back.
    pub fn cached_in(dir: &Path, limit: u64) -> Result<Self> {
        let path = dir.join(CACHE_FILE);
        if let Ok(t) = Self::read_cache(&path) {
            if t.limit >= limit {
                return Ok(t);
            }
        }
        let t = Self::sieve(limit);
        fs::create_dir_all(dir).map_err(|e| Error::Cache(e.to_string()))?;
        t.write_cache(&path)?;
        Ok(t)
    }

    /// Like [`PrimeTable::cached_in`] using `$PINTERSECT_CACHE`; a plain sieve
    /// when the variable is unset.
    pub fn load_or_sieve(limit: u64) -> Result<Self> {
        match cache_dir() {
            Some(dir) => Self::cached_in(&dir, limit),
            None => Ok(Self::sieve(limit)),
        }
    }
}

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).map(PathBuf::from)
}

/// `ψ(X, a, q) = Σ log p` over primes `p ≤ X` with `p ≡ a (mod q)`.
pub fn psi(table: &PrimeTable, x: u64, a: i64, q: u64) -> Result<f64> {
    if q == 0 {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    table.check_covers(x)?;
    let a = a.rem_euclid(q as i64) as u64;
    Ok(table
        .primes_upto(x)
        .iter()
        .filter(|&&p| p % q == a)
        .map(|&p| (p as f64).ln())
        .collect::<KahanSum>()
        .value())
}

/// `ψ(X, a, q)` for every residue `a` at once, advanced in `X`.
#[derive(Clone, Debug)]
pub struct PsiAccumulator<'a> {
    table: &'a PrimeTable,
    q: u64,
    x: u64,
    next: usize,
    sums: Vec<KahanSum>,
}

impl<'a> PsiAccumulator<'a> {
    pub fn new(table: &'a PrimeTable, q: u64) -> Self {
        assert!(q >= 1);
        Self {
            table,
            q,
            x: 0,
            next: 0,
            sums: vec![KahanSum::new(); q as usize],
        }
    }

    pub fn advance_to(&mut self, x: u64) -> Result<()> {
        self.table.check_covers(x)?;
        let primes = self.table.primes();
        while self.next < primes.len() && primes[self.next] <= x {
            let p = primes[self.next];
            self.sums[(p % self.q) as usize].add((p as f64).ln());
            self.next += 1;
        }
        self.x = self.x.max(x);
        Ok(())
    }

    pub fn value(&self, a: i64) -> f64 {
        self.sums[a.rem_euclid(self.q as i64) as usize].value()
    }
}

/// `ν_d` on `[1, extent]` and the total `Ψ_d` for `(h, d, L)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightedPrimes {
    pub d: u64,
    pub l: u64,
    pub s: u64,
    pub r_d: i64,
    pub range: HRange,
    /// `φ(d)/d`.
    pub phi_ratio: f64,
    /// `nu[x]` for `x ∈ [0, extent]`; `nu[0] = 0`.
    pub nu: Vec<f64>,
    /// `Λ_d` restricted to `[1, extent]`.
    pub members: Vec<u64>,
    /// `Ψ_d = (φ(d)/d) ψ(r_d + d⌊M_d⌋, r_d, d)`, i.e. `x ≤ ⌊M_d⌋`.
    pub psi_total: f64,
    pub max_nu: f64,
}

impl WeightedPrimes {
    pub fn extent(&self) -> u64 {
        self.nu.len() as u64 - 1
    }

    pub fn nu_at(&self, x: u64) -> f64 {
        self.nu.get(x as usize).copied().unwrap_or(0.0)
    }

    /// `Σ_{y ∈ H_d} ν_d(y)`.
    pub fn mass_on_h(&self) -> f64 {
        self.range.set.iter().map(|&y| self.nu_at(y)).collect::<KahanSum>().value()
    }

    /// `Σ_{x ≤ ⌊M_d⌋} ν_d(x)`, summed directly.
    pub fn nu_partial_sum(&self, upto: u64) -> f64 {
        self.nu[1..=(upto.min(self.extent()) as usize)]
            .iter()
            .copied()
            .collect::<KahanSum>()
            .value()
    }
}

/// Largest integer `r_d + d x` that [`weighted_primes`] tests for primality.
pub fn weighted_primes_needs(aux: &AuxData, range: &HRange) -> u64 {
    (aux.r_d + (aux.d * range.extent()) as i64).max(2) as u64
}

/// [`weighted_primes_needs`] for the range `(aux, L, s)` determines.
pub fn h_range_needs(aux: &AuxData, l: u64, s: u64) -> Result<u64> {
    Ok(weighted_primes_needs(aux, &h_range(aux, l, s)?))
}

pub fn weighted_primes(aux: &AuxData, l: u64, s: u64, table: &PrimeTable) -> Result<WeightedPrimes> {
    let range = h_range(aux, l, s)?;
    let extent = range.extent();
    table.check_covers(weighted_primes_needs(aux, &range))?;
    let d = aux.d;
    let phi_ratio = euler_phi(d) as f64 / d as f64;
    let mut nu = vec![0.0; extent as usize + 1];
    let mut members = Vec::new();
    for x in 1..=extent {
        let n = aux.r_d + (d * x) as i64;
        if n >= 2 && table.is_prime(n as u64) {
            nu[x as usize] = phi_ratio * (n as f64).ln();
            members.push(x);
        }
    }
    let top = aux.r_d + (d * range.m_floor) as i64;
    let psi_total = if top >= 2 {
        phi_ratio * psi(table, top as u64, aux.r_d, d)?
    } else {
        0.0
    };
    let max_nu = nu.iter().copied().fold(0.0, f64::max);
    Ok(WeightedPrimes {
        d,
        l,
        s,
        r_d: aux.r_d,
        range,
        phi_ratio,
        nu,
        members,
        psi_total,
        max_nu,
    })
}

/// Desk-scale form of the lower bound `Ψ_d ≫ (1 - ρ) M_d ≫ M_d / q_0`:
/// whether `Ψ_d ≥ c M_d min(1/q_0, 1 - ρ)`.
pub fn psi_lower_check(wp: &WeightedPrimes, q0: u64, rho: Option<f64>, c: f64) -> bool {
    let mut factor = 1.0 / q0.max(1) as f64;
    if let Some(rho) = rho {
        factor = factor.min(1.0 - rho);
    }
    wp.psi_total >= c * wp.range.m_d * factor
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersective::AuxFactory;
    use crate::poly::IntPoly;

    fn trial_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|i| i * i <= n).all(|i| n % i != 0)
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(PrimeTable::sieve(10).primes(), &[2, 3, 5, 7]);
        let t = PrimeTable::sieve(30);
        assert_eq!(t.primes().len(), 10);
        assert_eq!(*t.primes().last().unwrap(), 29);
        assert_eq!(PrimeTable::sieve(1_000_000).primes().len(), 78_498);
    }

    #[test]
    fn sieve_matches_trial_division_across_segments() {
        let limit = 3 * SEGMENT * 2 + 12_345;
        let t = PrimeTable::sieve(limit);
        let expected: Vec<u64> = (0..=limit).filter(|&n| trial_prime(n)).collect();
        assert_eq!(t.primes(), expected.as_slice());
        for n in [0, 1, 2, 3, 4, 9, 25, limit] {
            assert_eq!(t.is_prime(n), trial_prime(n));
        }
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = PrimeTable::cached_in(dir.path(), 100_000).unwrap();
        let bytes = fs::read(dir.path().join(CACHE_FILE)).unwrap();
        assert_eq!(&bytes[..4], b"PSIV");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 100_000);
        // Bit 1 of the first byte is 3, bit 2 is 5, bit 4 is 9.
        assert_eq!(bytes[16] & 0b10110, 0b00110);
        let u = PrimeTable::read_cache(&dir.path().join(CACHE_FILE)).unwrap();
        assert_eq!(t.primes(), u.primes());
        let smaller = PrimeTable::cached_in(dir.path(), 50_000).unwrap();
        assert_eq!(smaller.limit(), 100_000);
        fs::write(dir.path().join(CACHE_FILE), b"junk").unwrap();
        assert!(PrimeTable::read_cache(&dir.path().join(CACHE_FILE)).is_err());
    }

    #[test]
    fn psi_examples() {
        let t = PrimeTable::sieve(100);
        let v = psi(&t, 20, 1, 4).unwrap();
        assert!((v - (5f64.ln() + 13f64.ln() + 17f64.ln())).abs() < 1e-12);
        assert!((v - 7.0076).abs() < 1e-4);
        assert!((psi(&t, 10, 1, 1).unwrap() - 210f64.ln()).abs() < 1e-12);
        assert!((psi(&t, 10, 0, 2).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!(psi(&t, 1000, 0, 2).is_err());
        let mut acc = PsiAccumulator::new(&t, 4);
        acc.advance_to(20).unwrap();
        assert_eq!(acc.value(1), v);
        assert_eq!(acc.value(-3), v);
    }

    #[test]
    fn weighted_examples() {
        let h = IntPoly::from_i64(&[-1, 0, 1]);
        let mut f = AuxFactory::new(&h).unwrap();
        let t = PrimeTable::sieve(10_000);
        let wp = weighted_primes(&f.aux_mut(1).unwrap(), 100, 10, &t).unwrap();
        assert_eq!(wp.members, vec![2, 3]);
        assert!((wp.nu_at(2) - 2f64.ln()).abs() < 1e-15);
        assert!((wp.nu_at(3) - 3f64.ln()).abs() < 1e-15);
        assert_eq!(wp.nu_at(1), 0.0);
        assert!((wp.psi_total - 6f64.ln()).abs() < 1e-12);

        let wp = weighted_primes(&f.aux_mut(2).unwrap(), 400, 10, &t).unwrap();
        assert!((wp.nu_at(2) - 0.5 * 3f64.ln()).abs() < 1e-15);
        for x in 1..=wp.extent() {
            assert_eq!(wp.nu_at(x) > 0.0, trial_prime(2 * x - 1));
        }
        assert!((wp.psi_total - wp.nu_partial_sum(wp.range.m_floor)).abs() < 1e-9);
    }

    #[test]
    fn lower_check_examples() {
        let h = IntPoly::from_i64(&[-1, 0, 1]);
        let mut f = AuxFactory::new(&h).unwrap();
        let t = PrimeTable::sieve(10_000);
        for d in [1, 2] {
            let wp = weighted_primes(&f.aux_mut(d).unwrap(), 1_000_000, 10, &t).unwrap();
            assert!(psi_lower_check(&wp, 1, None, 0.5), "d = {d}");
        }
        let wp = weighted_primes(&f.aux_mut(1).unwrap(), 10, 10, &t).unwrap();
        assert!(!psi_lower_check(&wp, 1, None, 0.5));
    }

    #[test]
    fn table_too_small_is_reported() {
        let h = IntPoly::from_i64(&[-1, 0, 1]);
        let a = AuxFactory::new(&h).unwrap().aux_mut(7).unwrap();
        let t = PrimeTable::sieve(100);
        assert!(matches!(
            weighted_primes(&a, 1_000_000, 10, &t),
            Err(Error::TableTooSmall { .. })
        ));
    }
}
