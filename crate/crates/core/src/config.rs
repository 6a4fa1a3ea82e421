//! Experiment configuration: `key = value` lines, overridable from flags.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::ExceptionalConfig;
use crate::increment::IncrementConfig;
use crate::poly::IntPoly;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub poly: IntPoly,
    pub epsilon: f64,
    /// Moment order and `H_d` cut-off; `2^k + 6` unless overridden.
    pub s_param: u64,
    pub c2: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    pub c1: f64,
    pub exceptional: Option<ExceptionalConfig>,
    #[serde(rename = "N")]
    pub n: Option<u64>,
    #[serde(rename = "L")]
    pub l: Option<u64>,
    pub seed: u64,
    pub threshold: f64,
    pub density_ceiling: f64,
    pub length_floor: Option<u64>,
    pub budget: Option<u64>,
    pub mode: Option<String>,
}

pub const DEFAULT_SEED: u64 = 0x5EED_0001;

impl ExperimentConfig {
    pub fn for_poly(poly: IntPoly) -> Self {
        let k = poly.degree().min(16) as u32;
        Self {
            poly,
            epsilon: 0.5,
            s_param: (1u64 << k) + 6,
            c2: 1.0 / 64.0,
            c0: 1.0,
            c1: 1.0,
            exceptional: None,
            n: None,
            l: None,
            seed: DEFAULT_SEED,
            threshold: 1.0 / 8.0,
            density_ceiling: 0.9,
            length_floor: None,
            budget: None,
            mode: None,
        }
    }

    /// `K = 2^(10k)`, or `None` past 64 bits.
    pub fn k_param(&self) -> Option<u64> {
        1u64.checked_shl(10 * self.poly.degree() as u32)
    }

    /// `Q(δ) = exp(C₀ δ^(-(k+ε-1)))`.
    pub fn q_of_delta(&self, delta: f64) -> f64 {
        let k = self.poly.degree() as f64;
        (self.c0 * delta.powf(-(k + self.epsilon - 1.0))).exp()
    }

    pub fn increment(&self) -> IncrementConfig {
        IncrementConfig {
            s: self.s_param,
            epsilon: self.epsilon,
            c2: self.c2,
            budget_c: self.c0,
            threshold: self.threshold,
            density_ceiling: self.density_ceiling,
            length_floor: self.length_floor,
            q0: self.exceptional.as_ref().map_or(1, |e| e.q0),
            budget: self.budget,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epsilon", self.epsilon),
            ("c2", self.c2),
            ("C0", self.c0),
            ("c1", self.c1),
            ("threshold", self.threshold),
            ("density_ceiling", self.density_ceiling),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.s_param == 0 {
            return Err(Error::InvalidArgument("s must be positive".into()));
        }
        Ok(())
    }

    /// Apply `key = value` pairs. `poly` must be set here or already.
    pub fn apply(&mut self, pairs: &BTreeMap<String, String>) -> Result<()> {
        let mut s_given = false;
        for (key, value) in pairs {
            let v = value.as_str();
            match key.as_str() {
                "poly" => self.poly = v.parse()?,
                "epsilon" => self.epsilon = num(key, v)?,
                "s" | "s_param" => {
                    self.s_param = num(key, v)?;
                    s_given = true;
                }
                "c2" => self.c2 = num(key, v)?,
                "C0" | "c0" => self.c0 = num(key, v)?,
                "c1" => self.c1 = num(key, v)?,
                "N" | "n" => self.n = Some(num(key, v)?),
                "L" | "l" => self.l = Some(num(key, v)?),
                "seed" => self.seed = num(key, v)?,
                "threshold" => self.threshold = num(key, v)?,
                "density_ceiling" => self.density_ceiling = num(key, v)?,
                "length_floor" => self.length_floor = Some(num(key, v)?),
                "budget" => self.budget = if v == "auto" { None } else { Some(num(key, v)?) },
                "mode" => self.mode = Some(v.to_string()),
                "q0" | "rho" | "chi" => {}
                _ => return Err(Error::InvalidArgument(format!("unknown config key {key:?}"))),
            }
        }
        if !s_given && pairs.contains_key("poly") {
            let k = self.poly.degree().min(16) as u32;
            self.s_param = (1u64 << k) + 6;
        }
        if let Some(q0) = pairs.get("q0") {
            let q0: u64 = num("q0", q0)?;
            let rho = pairs.get("rho").map(|r| num("rho", r)).transpose()?.unwrap_or(0.0);
            let chi = match pairs.get("chi") {
                Some(c) => c
                    .split(',')
                    .map(|x| num::<f64>("chi", x.trim()))
                    .collect::<Result<Vec<_>>>()?,
                None => vec![0.0; q0 as usize],
            };
            self.exceptional = Some(ExceptionalConfig::new(q0, rho, chi)?);
        }
        self.validate()
    }

    pub fn from_file(path: &Path, fallback_poly: Option<IntPoly>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
        let pairs = parse_pairs(&text)?;
        let poly = match (pairs.get("poly"), fallback_poly) {
            (Some(p), _) => p.parse()?,
            (None, Some(p)) => p,
            (None, None) => return Err(Error::InvalidArgument("config has no poly".into())),
        };
        let mut cfg = Self::for_poly(poly);
        cfg.apply(&pairs)?;
        Ok(cfg)
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value {v:?} for {key}")))
}

/// `key = value` per line; `#` starts a comment, blank lines are skipped.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("line {}: expected key = value", no + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}
