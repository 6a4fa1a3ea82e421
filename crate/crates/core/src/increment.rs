//! The density-increment engine: edge intervals, Fourier concentration,
//! progression extraction and the iteration driver.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::counting::{count_r_fft, extract_subprogression, IndexSet, RCount};
use crate::error::{Error, Result};
use crate::fourier::{default_grid, l2_concentration, ArcSystem};
use crate::intersective::AuxFactory;
use crate::poly::IntPoly;
use crate::primes::{h_range_needs, weighted_primes, PrimeTable, WeightedPrimes};

/// Knobs of the iteration. The paper's existence constants have no values,
/// so these are empirical stand-ins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementConfig {
    /// `H_d` is cut at `h_d(x) < L/s`.
    pub s: u64,
    pub epsilon: f64,
    /// `η = c₂ σ` before the resolution clamp.
    pub c2: f64,
    /// `C` in the step budget `⌈C δ^(-(γ-1))⌉`.
    pub budget_c: f64,
    /// The structure gate `R_d(B) > threshold · σ² L Ψ_d`.
    pub threshold: f64,
    pub density_ceiling: f64,
    /// Stop once `L` drops below this; `⌈√N⌉` when unset.
    pub length_floor: Option<u64>,
    pub q0: u64,
    /// Overrides the automatic step budget.
    pub budget: Option<u64>,
}

impl IncrementConfig {
    pub fn for_poly(h: &IntPoly) -> Self {
        let k = h.degree().min(16) as u32;
        Self {
            s: (1u64 << k) + 6,
            epsilon: 0.5,
            c2: 1.0 / 64.0,
            budget_c: 1.0,
            threshold: 1.0 / 8.0,
            density_ceiling: 0.9,
            length_floor: None,
            q0: 1,
            budget: None,
        }
    }

    pub fn gamma(&self, k: usize) -> f64 {
        ArcSystem::gamma_for(k, self.epsilon)
    }

    /// `η = max(c₂ σ, (L/2)^(-1/(3γ)))`.
    ///
    /// With the paper's `η = c₂σ` the arcs at desk scale are wider than
    /// the circle and there are far too many of them; the clamp keeps
    /// `q_max³ ≤ L/2`.
    pub fn eta(&self, sigma: f64, l: u64, gamma: f64) -> f64 {
        let floor = (l.max(2) as f64 / 2.0).powf(-1.0 / (3.0 * gamma));
        (self.c2 * sigma).max(floor).min(1.0)
    }

    pub fn budget_for(&self, delta: f64, gamma: f64) -> u64 {
        self.budget
            .unwrap_or_else(|| (self.budget_c * delta.powf(-(gamma - 1.0))).ceil().max(1.0) as u64)
    }

    pub fn floor_for(&self, n: u64) -> u64 {
        self.length_floor.unwrap_or_else(|| (n as f64).sqrt().ceil() as u64)
    }
}

/// An interval `[lo, hi]` carrying at least `σL/8` of `B`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeInterval {
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
    pub density: f64,
}

impl EdgeInterval {
    pub fn length(&self) -> u64 {
        self.hi + 1 - self.lo
    }
}

/// If `|B ∩ (L/9, 8L/9)| < 3σL/4`, the denser of `[1, ⌊L/9⌋]` and
/// `[⌈8L/9⌉, L]` (left on ties). Counting is exact.
pub fn edge_case_check(b: &IndexSet) -> Option<EdgeInterval> {
    let l = b.length();
    let size = b.size() as u64;
    // (L/9, 8L/9) as integers: ⌊L/9⌋ + 1 ..= ⌈8L/9⌉ - 1.
    let left_hi = l / 9;
    let right_lo = (8 * l).div_ceil(9);
    let middle = if right_lo > left_hi + 1 {
        b.count_in(left_hi + 1, right_lo - 1)
    } else {
        0
    };
    if 4 * middle >= 3 * size {
        return None;
    }
    let left = (left_hi >= 1).then(|| (1, left_hi, b.count_in(1, left_hi)));
    let right = (right_lo <= l).then(|| (right_lo.max(1), l, b.count_in(right_lo.max(1), l)));
    let pick = match (left, right) {
        (Some(a), Some(c)) => {
            // Denser first, exact cross-multiplication.
            if c.2 * (a.1 + 1 - a.0) > a.2 * (c.1 + 1 - c.0) {
                c
            } else {
                a
            }
        }
        (Some(a), None) => a,
        (None, Some(c)) => c,
        (None, None) => return None,
    };
    let (lo, hi, count) = pick;
    Some(EdgeInterval {
        lo,
        hi,
        count,
        density: count as f64 / (hi + 1 - lo) as f64,
    })
}

/// The progression `{x0 + ℓ λ : 1 ≤ ℓ ≤ len}` and how much of `B` it holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Progression {
    pub x0: i64,
    pub step: u64,
    pub len: u64,
    pub count: u64,
}

impl Progression {
    pub fn density(&self) -> f64 {
        self.count as f64 / self.len as f64
    }

    pub fn first(&self) -> i64 {
        self.x0 + self.step as i64
    }
}

/// The densest block when each class mod `step` inside `[1, L]` is cut into
/// consecutive blocks of `block` terms. A short final block is merged into
/// its neighbour when that keeps lengths within `⌊L/step⌋`; blocks shorter
/// than half the target are not candidates. Ties go to the block that starts
/// leftmost.
pub fn densest_block(b: &IndexSet, step: u64, block: u64) -> Option<Progression> {
    let l = b.length();
    if step == 0 || step > l || block == 0 {
        return None;
    }
    let cap = l / step;
    let block = block.min(cap);
    let mask = b.mask();
    let mut best: Option<Progression> = None;
    for c in 1..=step {
        let terms = (l - c) / step + 1;
        let mut j = 0;
        while j < terms {
            let mut len = block.min(terms - j);
            let rest = terms - j - len;
            if rest > 0 && rest < block.div_ceil(2) && len + rest <= cap {
                len += rest;
            }
            if 2 * len < block {
                j += len;
                continue;
            }
            let count = (0..len).filter(|i| mask[(c + (j + i) * step) as usize]).count() as u64;
            let cand = Progression {
                x0: (c + j * step) as i64 - step as i64,
                step,
                len,
                count,
            };
            let better = match &best {
                None => true,
                Some(p) => {
                    let lhs = cand.count as u128 * p.len as u128;
                    let rhs = p.count as u128 * cand.len as u128;
                    lhs > rhs || (lhs == rhs && cand.first() < p.first())
                }
            };
            if better {
                best = Some(cand);
            }
            j += len;
        }
    }
    best
}

/// Which `M_q` carries the mass and the progression it produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Concentration {
    pub q: u64,
    pub lambda_q: u64,
    pub eta: f64,
    pub q_max: u64,
    /// `∫_{M_q} |f̂_B|²`.
    pub mass: f64,
    /// `mass / (σ² L)`.
    pub omega: f64,
    /// `L'` before block partitioning.
    pub block: u64,
    pub progression: Progression,
}

/// Locate the `q ≤ η^(-γ)` with the largest arc mass (smallest `q` on ties,
/// skipping any `q` with `λ(q) > L`), and the densest `λ(q)`-progression of
/// the length that mass guarantees.
pub fn concentration_step(
    b: &IndexSet,
    factory: &mut AuxFactory,
    eta: f64,
    gamma: f64,
) -> Result<Concentration> {
    let l = b.length();
    let sigma = b.sigma();
    let arcs = ArcSystem::new(l, eta, gamma)?;
    let masses = l2_concentration(b, &arcs, default_grid(l))?;
    let mut ranked: Vec<(u64, f64)> = masses.per_q.iter().map(|(&q, &m)| (q, m)).collect();
    ranked.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    for (q, mass) in ranked {
        let lambda = factory.lambda_mut(q)?;
        let Some(lambda_q) = lambda.to_u64().filter(|&v| v <= l) else {
            continue;
        };
        let omega = mass / (sigma * sigma * l as f64);
        let scale = eta.powf(gamma).min(omega * sigma);
        let block = ((scale * l as f64 / lambda_q as f64).floor() as u64).clamp(1, l / lambda_q);
        let progression = densest_block(b, lambda_q, block).expect("λ(q) ≤ L");
        // |B ∩ P| / L' > σ, exactly.
        if progression.count as u128 * l as u128 <= b.size() as u128 * progression.len as u128 {
            return Err(Error::NoIncrement { sigma });
        }
        return Ok(Concentration {
            q,
            lambda_q,
            eta,
            q_max: arcs.q_max,
            mass,
            omega,
            block,
            progression,
        });
    }
    Err(Error::NoIncrement { sigma })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "pigeonhole")]
    Pigeonhole,
    #[serde(rename = "edge-interval")]
    EdgeInterval,
    #[serde(rename = "concentration")]
    Concentration,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementStep {
    pub sigma_in: f64,
    pub sigma_out: f64,
    #[serde(rename = "L_in")]
    pub l_in: u64,
    #[serde(rename = "L_out")]
    pub l_out: u64,
    pub d_in: u64,
    pub d_out: u64,
    pub q: u64,
    pub lambda_q: u64,
    pub x0: i64,
    pub branch: Branch,
    pub r_before: f64,
    pub r_after: f64,
    /// `R_{qd}(B') ≤ R_d(B)` certified prime by prime.
    pub r_dominated: bool,
    /// `(σ_out - σ_in) / σ_in^γ`.
    pub increment_ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concentration: Option<Concentration>,
}

/// What one call of [`increment_once`] found.
#[derive(Clone, Debug)]
pub enum StepResult {
    /// `R_d(B)` is above the gate.
    Structure { r: f64, gate: f64 },
    Step { step: IncrementStep, set: IndexSet },
}

/// Root choices, a prime table that grows on demand, and the config.
pub struct Engine {
    pub factory: AuxFactory,
    pub config: IncrementConfig,
    table: PrimeTable,
}

impl Engine {
    pub fn new(h: &IntPoly, config: IncrementConfig) -> Result<Self> {
        Ok(Self {
            factory: AuxFactory::new(h)?,
            config,
            table: PrimeTable::sieve(1 << 16),
        })
    }

    pub fn degree(&self) -> usize {
        self.factory.poly().degree()
    }

    pub fn gamma(&self) -> f64 {
        self.config.gamma(self.degree())
    }

    /// `ν_d` and `Ψ_d` on `[1, L]`.
    pub fn weights(&mut self, d: u64, l: u64) -> Result<WeightedPrimes> {
        let aux = self.factory.aux_mut(d)?;
        let needed = h_range_needs(&aux, l, self.config.s)?;
        if needed > self.table.limit() {
            self.table = PrimeTable::load_or_sieve(needed.max(2 * self.table.limit()))?;
        }
        weighted_primes(&aux, l, self.config.s, &self.table)
    }

    /// `R_d(B)`; `None` for the weights when `L < s` leaves `H_d` empty.
    fn r_count(&mut self, b: &IndexSet, d: u64) -> Result<(RCount, Option<WeightedPrimes>)> {
        if b.length() < self.config.s {
            let r = RCount {
                value: 0.0,
                pairs: None,
                per_prime: Default::default(),
                phi_ratio: Some(num_rational::Ratio::new(crate::arith::euler_phi(d), d)),
            };
            return Ok((r, None));
        }
        let wp = self.weights(d, b.length())?;
        Ok((count_r_fft(b, &wp)?, Some(wp)))
    }

    /// `R_d(B)` against `threshold · σ² L Ψ_d`.
    pub fn gate(&mut self, b: &IndexSet, d: u64) -> Result<Gate> {
        let sigma = b.sigma();
        let (r, wp) = self.r_count(b, d)?;
        let psi = wp.map_or(0.0, |w| w.psi_total);
        let gate = self.config.threshold * sigma * sigma * b.length() as f64 * psi;
        Ok(Gate { r, psi, gate })
    }

    /// One step of the iteration at modulus `d`.
    pub fn increment_once(&mut self, b: &IndexSet, d: u64) -> Result<StepResult> {
        let g = self.gate(b, d)?;
        if g.psi <= 0.0 {
            return Err(Error::Precondition(format!("Ψ_d = 0 at d = {d}, L = {}", b.length())));
        }
        if g.structure() {
            return Ok(StepResult::Structure { r: g.r.value, gate: g.gate });
        }
        let (step, set) = self.step_below_gate(b, d, &g.r)?;
        Ok(StepResult::Step { step, set })
    }

    /// The edge-interval or concentration step, once `R_d(B) = r` is known
    /// to be below the gate.
    fn step_below_gate(&mut self, b: &IndexSet, d: u64, r: &RCount) -> Result<(IncrementStep, IndexSet)> {
        let l = b.length();
        let sigma = b.sigma();
        let gamma = self.gamma();
        let (branch, q, lambda_q, prog, concentration) = match edge_case_check(b) {
            Some(iv) => {
                let prog = Progression {
                    x0: iv.lo as i64 - 1,
                    step: 1,
                    len: iv.length(),
                    count: iv.count,
                };
                (Branch::EdgeInterval, 1, 1, prog, None)
            }
            None => {
                let eta = self.config.eta(sigma, l, gamma);
                let c = concentration_step(b, &mut self.factory, eta, gamma)?;
                (Branch::Concentration, c.q, c.lambda_q, c.progression, Some(c))
            }
        };
        let set = extract_subprogression(b, prog.x0, lambda_q, prog.len)?;
        let d_out = q * d;
        let (r_after, _) = self.r_count(&set, d_out)?;
        let sigma_out = set.sigma();
        let step = IncrementStep {
            sigma_in: sigma,
            sigma_out,
            l_in: l,
            l_out: set.length(),
            d_in: d,
            d_out,
            q,
            lambda_q,
            x0: prog.x0,
            branch,
            r_before: r.value,
            r_after: r_after.value,
            r_dominated: r_after.dominated_by(r),
            increment_ratio: (sigma_out - sigma) / sigma.powf(gamma),
            concentration,
        };
        Ok((step, set))
    }
}

/// `R_d(B)`, `Ψ_d` and the structure threshold.
#[derive(Clone, Debug)]
pub struct Gate {
    pub r: RCount,
    pub psi: f64,
    pub gate: f64,
}

impl Gate {
    pub fn structure(&self) -> bool {
        self.r.value > self.gate
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Outcome {
    StructureFound { r: f64, gate: f64 },
    DensitySaturated { sigma: f64 },
    StepBudgetExhausted { budget: u64 },
    LengthFloor {
        #[serde(rename = "L")]
        l: u64,
        floor: u64,
    },
    NoIncrement { sigma: f64 },
    /// `Ψ_d` vanished: no primes left in range to weigh.
    EmptyWeights { d: u64, #[serde(rename = "L")] l: u64 },
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::StructureFound { .. } => "StructureFound",
            Outcome::DensitySaturated { .. } => "DensitySaturated",
            Outcome::StepBudgetExhausted { .. } => "StepBudgetExhausted",
            Outcome::LengthFloor { .. } => "LengthFloor",
            Outcome::NoIncrement { .. } => "NoIncrement",
            Outcome::EmptyWeights { .. } => "EmptyWeights",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStart {
    pub poly: String,
    #[serde(rename = "A_size")]
    pub a_size: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub delta: f64,
    pub d0: u64,
    pub gamma: f64,
    pub budget: u64,
    pub floor: u64,
    pub config: IncrementConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub start: TraceStart,
    pub steps: Vec<IncrementStep>,
    pub outcome: String,
    pub outcome_detail: Outcome,
}

impl IterationTrace {
    /// Every violated trace invariant, described.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut prev: Option<&IncrementStep> = None;
        for (i, s) in self.steps.iter().enumerate() {
            if s.sigma_out < s.sigma_in {
                out.push(format!("step {i}: density fell {} -> {}", s.sigma_in, s.sigma_out));
            }
            if s.branch == Branch::Concentration && s.sigma_out <= s.sigma_in {
                out.push(format!("step {i}: concentration step without increment"));
            }
            if s.d_out % s.d_in != 0 || s.d_out != s.q * s.d_in {
                out.push(format!("step {i}: d_out = {} is not q d_in", s.d_out));
            }
            if s.l_out > s.l_in / s.lambda_q {
                out.push(format!("step {i}: L_out = {} > L_in / λ(q)", s.l_out));
            }
            if !s.r_dominated || s.r_after > s.r_before {
                out.push(format!("step {i}: R rose {} -> {}", s.r_before, s.r_after));
            }
            if let Some(p) = prev {
                if p.d_out != s.d_in || p.l_out != s.l_in || p.sigma_out != s.sigma_in {
                    out.push(format!("step {i}: does not continue step {}", i - 1));
                }
            }
            prev = Some(s);
        }
        let concentration_steps = self.steps.iter().filter(|s| s.branch != Branch::Pigeonhole).count() as u64;
        if concentration_steps > self.start.budget {
            out.push(format!("{concentration_steps} steps exceed the budget {}", self.start.budget));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

/// Densest progression of step `λ(q_0)` and length in `[N/2λ, N/λ]`.
fn pigeonhole(a: &IndexSet, lambda: u64) -> Option<Progression> {
    let n = a.length();
    if lambda <= 1 || lambda > n {
        return None;
    }
    densest_block(a, lambda, n / lambda)
}

pub fn run_iteration(a: &IndexSet, h: &IntPoly, config: IncrementConfig) -> Result<IterationTrace> {
    let mut engine = Engine::new(h, config)?;
    run_with_engine(a, &mut engine)
}

pub fn run_with_engine(a: &IndexSet, engine: &mut Engine) -> Result<IterationTrace> {
    let n = a.length();
    let delta = a.sigma();
    let gamma = engine.gamma();
    let budget = engine.config.budget_for(delta.max(f64::MIN_POSITIVE), gamma);
    let floor = engine.config.floor_for(n);
    let q0 = engine.config.q0.max(1);
    let mut steps = Vec::new();
    let mut set = a.clone();
    let mut d = 1;
    if q0 > 1 {
        let lambda = engine
            .factory
            .lambda_mut(q0)?
            .to_u64()
            .ok_or_else(|| Error::InvalidArgument(format!("λ({q0}) overflows")))?;
        if let Some(p) = pigeonhole(a, lambda) {
            let (r_before, _) = engine.r_count(a, 1)?;
            let next = extract_subprogression(a, p.x0, lambda, p.len)?;
            let (r_after, _) = engine.r_count(&next, q0)?;
            steps.push(IncrementStep {
                sigma_in: delta,
                sigma_out: next.sigma(),
                l_in: n,
                l_out: next.length(),
                d_in: 1,
                d_out: q0,
                q: q0,
                lambda_q: lambda,
                x0: p.x0,
                branch: Branch::Pigeonhole,
                r_before: r_before.value,
                r_after: r_after.value,
                r_dominated: r_after.dominated_by(&r_before),
                increment_ratio: (next.sigma() - delta) / delta.powf(gamma),
                concentration: None,
            });
            set = next;
            d = q0;
        }
    }
    let mut taken = 0u64;
    let outcome = loop {
        if set.length() < floor {
            break Outcome::LengthFloor { l: set.length(), floor };
        }
        let g = engine.gate(&set, d)?;
        if g.psi <= 0.0 {
            break Outcome::EmptyWeights { d, l: set.length() };
        }
        if g.structure() {
            break Outcome::StructureFound { r: g.r.value, gate: g.gate };
        }
        if set.sigma() > engine.config.density_ceiling {
            break Outcome::DensitySaturated { sigma: set.sigma() };
        }
        if set.is_empty() {
            break Outcome::NoIncrement { sigma: 0.0 };
        }
        if taken == budget {
            break Outcome::StepBudgetExhausted { budget };
        }
        let (step, next) = match engine.step_below_gate(&set, d, &g.r) {
            Ok(x) => x,
            Err(Error::NoIncrement { sigma }) => break Outcome::NoIncrement { sigma },
            Err(e) => return Err(e),
        };
        d = step.d_out;
        steps.push(step);
        set = next;
        taken += 1;
    };
    Ok(IterationTrace {
        start: TraceStart {
            poly: h_label(engine),
            a_size: a.size() as u64,
            n,
            delta,
            d0: q0,
            gamma,
            budget,
            floor,
            config: engine.config.clone(),
        },
        steps,
        outcome: outcome.name().to_string(),
        outcome_detail: outcome,
    })
}

fn h_label(engine: &Engine) -> String {
    engine.factory.poly().pretty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{greedy_avoider, GapMode};

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn edge_examples() {
        let l = 900;
        let packed = IndexSet::from_predicate(l, |x| x <= 100);
        let iv = edge_case_check(&packed).unwrap();
        assert_eq!((iv.lo, iv.hi, iv.count), (1, 100, 100));
        assert!((iv.density - 9.0 * packed.sigma()).abs() < 1e-12);
        assert!(edge_case_check(&IndexSet::from_predicate(l, |x| x % 2 == 0)).is_none());
        assert!(edge_case_check(&IndexSet::from_predicate(l, |x| x <= l / 2)).is_none());
        let right = IndexSet::from_predicate(l, |x| x > 850);
        assert_eq!(edge_case_check(&right).unwrap().hi, l);
    }

    #[test]
    fn densest_block_partition() {
        let b = IndexSet::from_predicate(3000, |x| x % 3 == 0);
        let p = densest_block(&b, 3, 100).unwrap();
        assert_eq!((p.step, p.len, p.count), (3, 100, 100));
        assert_eq!(p.first(), 3);
        // Blocks never exceed L / step and cover every term once.
        let b = IndexSet::from_predicate(1000, |x| x % 7 < 3);
        let p = densest_block(&b, 7, 40).unwrap();
        assert!(p.len <= 1000 / 7 && p.len >= 20);
    }

    #[test]
    fn concentration_on_multiples_of_three() {
        let b = IndexSet::from_predicate(3000, |x| x % 3 == 0);
        let mut f = AuxFactory::new(&p(&[-1, 0, 1])).unwrap();
        let c = concentration_step(&b, &mut f, 0.3, 2.25).unwrap();
        assert_eq!(c.q, 3);
        assert_eq!(c.lambda_q, 3);
        assert!((c.progression.density() - 3.0 * b.sigma()).abs() < 1e-12);
    }

    #[test]
    fn full_interval_is_structure() {
        let h = p(&[0, -1, 1]);
        let trace = run_iteration(&IndexSet::full(2000), &h, IncrementConfig::for_poly(&h)).unwrap();
        assert_eq!(trace.outcome, "StructureFound");
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn greedy_set_moves_past_step_zero() {
        let h = p(&[0, -1, 1]);
        let a = greedy_avoider(&h, 10_000, GapMode::Primes);
        let trace = run_iteration(&a, &h, IncrementConfig::for_poly(&h)).unwrap();
        assert!(!trace.steps.is_empty(), "{}", trace.to_json());
        assert_eq!(trace.steps[0].r_before, 0.0);
        assert!(trace.violations().is_empty(), "{:?}", trace.violations());
        let again = run_iteration(&a, &h, IncrementConfig::for_poly(&h)).unwrap();
        assert_eq!(trace.to_json(), again.to_json());
    }

    #[test]
    fn pigeonhole_pass() {
        let h = p(&[0, -1, 1]);
        let mut cfg = IncrementConfig::for_poly(&h);
        cfg.q0 = 2;
        let a = greedy_avoider(&h, 4000, GapMode::Primes);
        let trace = run_iteration(&a, &h, cfg).unwrap();
        let first = &trace.steps[0];
        assert_eq!(first.branch, Branch::Pigeonhole);
        assert!(first.sigma_out >= first.sigma_in);
        assert!(first.l_out * 2 * first.lambda_q >= 4000 - first.lambda_q);
        assert!(trace.violations().is_empty(), "{:?}", trace.violations());
    }
}
