//! Major and minor arcs, and where the `L²` mass of `f̂_B` sits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::BalanceFn;
use crate::arith::gcd;
use crate::counting::IndexSet;
use crate::error::{Error, Result};
use crate::numeric::KahanSum;

/// Grid cells touched by all major arcs together are capped at this.
const CELL_CAP: u64 = 400_000_000;

/// Major arcs `|α - a/q| < 1/(η^γ L)` for `q ≤ ⌊η^(-γ)⌋`, `gcd(a, q) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcSystem {
    #[serde(rename = "L")]
    pub l: u64,
    pub eta: f64,
    pub gamma: f64,
    pub q_max: u64,
    pub radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorArc {
    pub q: u64,
    pub a: u64,
    pub center: f64,
    pub radius: f64,
}

impl ArcSystem {
    pub fn new(l: u64, eta: f64, gamma: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) || gamma <= 0.0 || l == 0 {
            return Err(Error::InvalidArgument(format!(
                "arc system needs L ≥ 1, 0 < η ≤ 1, γ > 0 (got L = {l}, η = {eta}, γ = {gamma})"
            )));
        }
        let scale = eta.powf(gamma);
        // Guard against 0.999.. from pow rounding when η^(-γ) is an integer.
        let q_max = ((1.0 / scale) * (1.0 + 1e-12)).floor().max(1.0) as u64;
        Ok(Self {
            l,
            eta,
            gamma,
            q_max,
            radius: 1.0 / (scale * l as f64),
        })
    }

    /// `γ = k + ε/2`.
    pub fn gamma_for(k: usize, epsilon: f64) -> f64 {
        k as f64 + epsilon / 2.0
    }

    pub fn majors(&self) -> impl Iterator<Item = MajorArc> + '_ {
        (1..=self.q_max).flat_map(move |q| {
            (0..q).filter(move |&a| gcd(a, q) == 1).map(move |a| MajorArc {
                q,
                a,
                center: a as f64 / q as f64,
                radius: self.radius,
            })
        })
    }

    pub fn major_count(&self) -> u64 {
        (1..=self.q_max).map(crate::arith::euler_phi).sum()
    }

    /// The major arc containing `α` with the smallest `q`, if any.
    pub fn contains_major(&self, alpha: f64) -> Option<(u64, u64)> {
        let alpha = alpha - alpha.floor();
        (1..=self.q_max).find_map(|q| {
            let a = (alpha * q as f64).round() as u64 % q;
            let mut dist = (alpha - a as f64 / q as f64).abs();
            dist = dist.min(1.0 - dist);
            (gcd(a, q) == 1 && dist < self.radius).then_some((a, q))
        })
    }

    pub fn is_minor(&self, alpha: f64) -> bool {
        self.contains_major(alpha).is_none()
    }

    /// Grid cells `t` with `|t/T - a/q| < radius` on the circle.
    fn cells(&self, q: u64, a: u64, grid: usize) -> impl Iterator<Item = usize> {
        let t = grid as f64;
        let center = a as f64 * t / q as f64;
        let half = self.radius * t;
        let lo = (center - half).floor() as i64;
        let hi = (center + half).ceil() as i64;
        (lo..=hi)
            .filter(move |&c| ((c as f64) - center).abs() < half)
            .map(move |c| c.rem_euclid(grid as i64) as usize)
    }
}

/// `∫ |f̂_B|²` over each `M_q`, over their union, over the minor arcs, and
/// over the whole circle, as Riemann sums on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct L2Masses {
    pub per_q: BTreeMap<u64, f64>,
    pub union: f64,
    pub minor: f64,
    pub total: f64,
    /// `Σ_x f_B(x)^2`.
    pub plancherel: f64,
    pub grid: usize,
}

impl L2Masses {
    /// Smallest `q` carrying the most mass.
    pub fn argmax(&self) -> Option<(u64, f64)> {
        let mut best: Option<(u64, f64)> = None;
        for (&q, &m) in &self.per_q {
            if best.is_none_or(|(_, bm)| m > bm) {
                best = Some((q, m));
            }
        }
        best
    }
}

pub fn l2_concentration(b: &IndexSet, arcs: &ArcSystem, grid: usize) -> Result<L2Masses> {
    let l = b.length();
    if (grid as u64) < 4 * l {
        return Err(Error::GridTooCoarse { grid, len: l });
    }
    if arcs.l != l {
        return Err(Error::Precondition(format!(
            "arc system built for L = {} but the set lives in [1, {l}]",
            arcs.l
        )));
    }
    let cells_per_arc = (2.0 * arcs.radius * grid as f64).ceil() as u64 + 1;
    let estimate = arcs.major_count().saturating_mul(cells_per_arc);
    if estimate > CELL_CAP {
        return Err(Error::TooManyArcs(arcs.major_count()));
    }
    let f = BalanceFn::new(b);
    let spec = f.transform_grid(grid)?;
    let power: Vec<f64> = spec.iter().map(|z| z.norm_sqr()).collect();
    let t = grid as f64;

    let mut in_union = vec![false; grid];
    // stamp[c] == q marks cell c as already counted for this q.
    let mut stamp = vec![0u64; grid];
    let mut per_q = BTreeMap::new();
    for q in 1..=arcs.q_max {
        let mut mass = KahanSum::new();
        for a in (0..q).filter(|&a| gcd(a, q) == 1) {
            for c in arcs.cells(q, a, grid) {
                if stamp[c] != q {
                    stamp[c] = q;
                    mass.add(power[c]);
                    in_union[c] = true;
                }
            }
        }
        per_q.insert(q, mass.value() / t);
    }
    let mut union = KahanSum::new();
    let mut minor = KahanSum::new();
    for (c, &p) in power.iter().enumerate() {
        if in_union[c] {
            union.add(p);
        } else {
            minor.add(p);
        }
    }
    let total = crate::numeric::kahan_sum(power.iter().copied()) / t;
    let plancherel = crate::numeric::kahan_sum(f.values().iter().map(|v| v * v));
    Ok(L2Masses {
        per_q,
        union: union.value() / t,
        minor: minor.value() / t,
        total,
        plancherel,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{default_grid, transform_at, Frequency};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn arc_system_shape() {
        let arcs = ArcSystem::new(1000, 0.25, 2.0).unwrap();
        assert_eq!(arcs.q_max, 16);
        assert!((arcs.radius - 16.0 / 1000.0).abs() < 1e-15);
        assert_eq!(arcs.majors().count() as u64, arcs.major_count());
        assert!(arcs.majors().all(|m| m.q <= 16 && gcd(m.a, m.q) == 1 && m.radius == arcs.radius));
        assert_eq!(arcs.contains_major(0.3334), Some((1, 3)));
        assert_eq!(arcs.contains_major(0.999), Some((0, 1)));
        let sparse = ArcSystem::new(1_000_000, 0.5, 2.0).unwrap();
        assert!(sparse.is_minor(0.1234567));
    }

    #[test]
    fn full_set_has_no_mass() {
        let b = IndexSet::full(500);
        let arcs = ArcSystem::new(500, 0.3, 2.25).unwrap();
        let m = l2_concentration(&b, &arcs, default_grid(500)).unwrap();
        assert!(m.total < 1e-18 && m.per_q.values().all(|&v| v < 1e-18));
    }

    #[test]
    fn multiples_of_three_concentrate_at_three() {
        let b = IndexSet::from_predicate(3000, |x| x % 3 == 0);
        let arcs = ArcSystem::new(3000, 0.3, 2.25).unwrap();
        let m = l2_concentration(&b, &arcs, default_grid(3000)).unwrap();
        assert!((m.total - m.plancherel).abs() < 1e-9 * m.plancherel);
        assert!((m.union + m.minor - m.total).abs() < 1e-9 * m.total);
        assert!(m.per_q[&3] >= 0.5 * m.plancherel);
        assert_eq!(m.argmax().unwrap().0, 3);
        // The peak really is at 1/3.
        let f = BalanceFn::new(&b);
        let peak = transform_at(&f.support(), Frequency::rational(1, 3)).norm();
        assert!((peak - 1000.0).abs() < 1e-6);
    }

    #[test]
    fn random_sets_are_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let l = 1000;
        let arcs = ArcSystem::new(l, 0.25, 2.25).unwrap();
        let mut flat = 0;
        for _ in 0..40 {
            let members = (1..=l).filter(|_| rng.gen_bool(0.5)).collect();
            let b = IndexSet::new(l, members).unwrap();
            let m = l2_concentration(&b, &arcs, default_grid(l)).unwrap();
            let mean = m.per_q.values().sum::<f64>() / m.per_q.len() as f64;
            if m.per_q.values().all(|&v| v <= 10.0 * mean) {
                flat += 1;
            }
        }
        assert!(flat >= 38, "{flat} of 40");
    }

    #[test]
    fn coarse_grid_rejected() {
        let b = IndexSet::full(100);
        let arcs = ArcSystem::new(100, 0.5, 2.0).unwrap();
        assert!(matches!(l2_concentration(&b, &arcs, 256), Err(Error::GridTooCoarse { .. })));
    }
}
