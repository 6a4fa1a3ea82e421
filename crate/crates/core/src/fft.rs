//! Thin wrappers over `rustfft` with the sign conventions used here.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    // Plans are cached per length inside the planner.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn next_pow2_at_least(n: u64) -> usize {
    n.max(1).next_power_of_two() as usize
}

/// `out[t] = Σ_x f[x] e^(-2πi x t / n)`.
pub fn forward(f: &[Complex64], n: usize) -> Vec<Complex64> {
    assert!(f.len() <= n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..f.len()].copy_from_slice(f);
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n)).process(&mut buf);
    buf
}

/// `out[x] = Σ_t F[t] e^(2πi x t / n)` (no `1/n` factor).
pub fn inverse(f: &[Complex64], n: usize) -> Vec<Complex64> {
    assert!(f.len() <= n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..f.len()].copy_from_slice(f);
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n)).process(&mut buf);
    buf
}

pub fn real_forward(f: &[f64], n: usize) -> Vec<Complex64> {
    let c: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    forward(&c, n)
}

/// `c[g] = Σ_x f[x] f[x + g]` for `0 ≤ g < f.len()`, via a zero-padded FFT
/// of length at least `2 f.len()` so that no lag wraps around.
pub fn autocorrelation(f: &[f64]) -> Vec<f64> {
    let n = next_pow2_at_least(2 * f.len() as u64);
    let spec = real_forward(f, n);
    let power: Vec<Complex64> = spec.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
    // Σ_t |F(t)|^2 e^{2πi g t/n} / n = Σ_x f[x] f[x+g].
    let back = inverse(&power, n);
    back[..f.len()].iter().map(|z| z.re / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn autocorrelation_matches_direct() {
        let f = [1.0, 0.0, 1.0, 1.0, 0.0, 1.0];
        let c = autocorrelation(&f);
        for g in 0..f.len() {
            let direct: f64 = (0..f.len() - g).map(|x| f[x] * f[x + g]).sum();
            assert!((c[g] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_sign_convention() {
        let mut f = vec![Complex64::new(0.0, 0.0); 4];
        f[1] = Complex64::new(1.0, 0.0);
        let out = forward(&f, 4);
        // e^{-2πi t/4} at t = 1 is -i.
        assert!((out[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }
}
