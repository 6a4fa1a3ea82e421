use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::{BalanceFn, Frequency};
use crate::counting::IndexSet;
use crate::error::{Error, Result};
use crate::fft;
use crate::intersective::AuxData;
use crate::numeric::KahanSum;
use crate::primes::WeightedPrimes;

/// `Σ ν(x) e(h_d(x) α)` over a fixed list of terms, evaluated repeatedly.
#[derive(Clone, Debug)]
pub struct WeylSum {
    terms: Vec<(i128, f64)>,
}

impl WeylSum {
    /// Terms `x ∈ [1, X]` (the sum `S_X`).
    pub fn prefix(aux: &AuxData, wp: &WeightedPrimes, x_max: u64) -> Result<Self> {
        if x_max > wp.extent() {
            return Err(Error::Precondition(format!(
                "X = {x_max} exceeds the weighted range [1, {}]",
                wp.extent()
            )));
        }
        let terms = (1..=x_max)
            .filter(|&x| wp.nu_at(x) > 0.0)
            .map(|x| {
                let v = aux.h_d.eval_i64(x as i64).to_i128().expect("h_d(x) fits in i128");
                (v, wp.nu_at(x))
            })
            .collect();
        Ok(Self { terms })
    }

    /// Terms `x ∈ H_d`.
    pub fn over_h(wp: &WeightedPrimes) -> Self {
        let terms = wp
            .range
            .set
            .iter()
            .zip(&wp.range.values)
            .filter(|(&x, _)| wp.nu_at(x) > 0.0)
            .map(|(&x, &v)| (v as i128, wp.nu_at(x)))
            .collect();
        Self { terms }
    }

    pub fn eval(&self, alpha: Frequency) -> Complex64 {
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for &(h, nu) in &self.terms {
            let z = alpha.phase(h) * nu;
            re.add(z.re);
            im.add(z.im);
        }
        Complex64::new(re.value(), im.value())
    }

    pub fn at_zero(&self) -> f64 {
        self.terms.iter().map(|t| t.1).collect::<KahanSum>().value()
    }
}

/// `S_X(α) = Σ_{x=1}^{X} ν_d(x) e(h_d(x) α)`.
pub fn weyl_sum(aux: &AuxData, wp: &WeightedPrimes, x_max: u64, alpha: Frequency) -> Result<Complex64> {
    Ok(WeylSum::prefix(aux, wp, x_max)?.eval(alpha))
}

/// Both sides of the cyclic orthogonality identity with period `T ≥ 2L`:
/// `(1/T) Σ_t |f̂_B(t/T)|^2 S(t/T)` and `Σ_{x, y ∈ H} f_B(x) f_B(x + h_d(y)) ν(y)`.
pub fn orthogonality_sides(b: &IndexSet, wp: &WeightedPrimes, grid: usize) -> Result<(f64, f64)> {
    let l = b.length();
    if (grid as u64) < 2 * l {
        return Err(Error::GridTooCoarse { grid, len: l });
    }
    let f = BalanceFn::new(b);
    let values = f.values();
    let spec = f.transform_grid(grid)?;
    let mut lags = vec![Complex64::new(0.0, 0.0); grid];
    for (&y, &g) in wp.range.set.iter().zip(&wp.range.values) {
        lags[g as usize % grid] += wp.nu_at(y);
    }
    // inverse() carries the e(+g t/T) sign that S needs.
    let s = fft::inverse(&lags, grid);
    let mut fourier = KahanSum::new();
    for (z, w) in spec.iter().zip(&s) {
        fourier.add(z.norm_sqr() * w.re);
    }
    let fourier = fourier.value() / grid as f64;

    let mut direct = KahanSum::new();
    for (&y, &g) in wp.range.set.iter().zip(&wp.range.values) {
        let nu = wp.nu_at(y);
        if nu == 0.0 {
            continue;
        }
        let g = g as usize;
        let mut acc = KahanSum::new();
        for x in 0..values.len().saturating_sub(g) {
            acc.add(values[x] * values[x + g]);
        }
        direct.add(nu * acc.value());
    }
    Ok((fourier, direct.value()))
}
