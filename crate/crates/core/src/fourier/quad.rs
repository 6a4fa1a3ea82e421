//! Gauss–Legendre panels for `∫ w(x) e(h(x) β) dx`.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::e;
use crate::poly::{big_to_f64, IntPoly};

const NODES: usize = 16;
const MAX_PANELS: usize = 1 << 22;

/// Nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NODES;
        let mut xs = Vec::with_capacity(n);
        let mut ws = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            xs.push(x);
            ws.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        (xs, ws)
    })
}

/// `h` as `f64` coefficients for fast evaluation inside panels.
fn float_coeffs(h: &IntPoly) -> Vec<f64> {
    h.coeffs().iter().map(big_to_f64).collect()
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn panels_integral(
    c: &[f64],
    beta: f64,
    lo: f64,
    hi: f64,
    panels: usize,
    weight: &dyn Fn(f64) -> f64,
) -> Complex64 {
    let (xs, ws) = gauss_legendre();
    let width = (hi - lo) / panels as f64;
    let mut re = crate::numeric::KahanSum::new();
    let mut im = crate::numeric::KahanSum::new();
    for j in 0..panels {
        let a = lo + j as f64 * width;
        let mid = a + width / 2.0;
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in xs.iter().zip(ws) {
            let t = mid + width / 2.0 * x;
            let phase = horner(c, t) * beta;
            acc += e(phase - phase.floor()) * (w * weight(t));
        }
        acc *= width / 2.0;
        re.add(acc.re);
        im.add(acc.im);
    }
    Complex64::new(re.value(), im.value())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub re: f64,
    pub im: f64,
    pub panels: usize,
    /// `|I_n - I_{n/2}| / max(|I_n|, 1e-300)` at the final panel count.
    pub doubling_change: f64,
}

impl QuadResult {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Total variation of `h` on `[lo, hi]`, which bounds the number of
/// oscillations of `e(h β)` by `|β|` times it.
fn variation(c: &[f64], lo: f64, hi: f64) -> f64 {
    let n = 2048;
    let mut prev = horner(c, lo);
    let mut tv = 0.0;
    for i in 1..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let v = horner(c, x);
        tv += (v - prev).abs();
        prev = v;
    }
    tv
}

/// `∫_lo^hi w(x) e(h(x) β) dx` on uniform panels sized to the local
/// oscillation, doubled until two consecutive panel counts agree to `tol`.
pub fn oscillatory_integral_weighted(
    h: &IntPoly,
    beta: f64,
    lo: f64,
    hi: f64,
    tol: f64,
    weight: &dyn Fn(f64) -> f64,
) -> QuadResult {
    if hi <= lo {
        return QuadResult {
            re: 0.0,
            im: 0.0,
            panels: 0,
            doubling_change: 0.0,
        };
    }
    let c = float_coeffs(h);
    let oscillations = beta.abs() * variation(&c, lo, hi);
    let mut panels = ((2.0 * oscillations).ceil() as usize).clamp(4, MAX_PANELS / 2);
    let mut prev = panels_integral(&c, beta, lo, hi, panels, weight);
    loop {
        panels *= 2;
        let cur = panels_integral(&c, beta, lo, hi, panels, weight);
        let change = (cur - prev).norm() / cur.norm().max(1e-300);
        if change < tol || panels >= MAX_PANELS {
            return QuadResult {
                re: cur.re,
                im: cur.im,
                panels,
                doubling_change: change,
            };
        }
        prev = cur;
    }
}

/// `∫_lo^hi e(h(x) β) dx`.
pub fn oscillatory_integral(h: &IntPoly, beta: f64, lo: f64, hi: f64) -> QuadResult {
    oscillatory_integral_weighted(h, beta, lo, hi, 1e-12, &|_| 1.0)
}
