//! Overflow-safe summation helpers shared by the series evaluators.
//!
//! Series in this crate are generated in log space: each term is a pair
//! `(log |t_k|, t_k / |t_k|)`. Summation shifts every exponent by the running
//! maximum before exponentiating and accumulates with Neumaier compensation.

use num_complex::Complex64;

/// Neumaier (improved Kahan-Babuska) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Componentwise Neumaier accumulator for complex sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierComplex {
    re: Neumaier,
    im: Neumaier,
}

impl NeumaierComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// A complex number stored as `mantissa * exp(log_scale)`.
///
/// Used wherever kernels and Bargmann functions overflow `f64` (for example
/// `exp(|z|^2)` at `|z| = 50`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub log_scale: f64,
    pub mantissa: Complex64,
}

impl ScaledComplex {
    pub fn zero() -> Self {
        Self {
            log_scale: 0.0,
            mantissa: Complex64::new(0.0, 0.0),
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self {
            log_scale: 0.0,
            mantissa: z,
        }
    }

    /// `ln |value|`; `-inf` for an exact zero.
    pub fn ln_abs(&self) -> f64 {
        let m = self.mantissa.norm();
        if m == 0.0 {
            f64::NEG_INFINITY
        } else {
            m.ln() + self.log_scale
        }
    }

    /// The value as an ordinary complex number (may overflow or underflow).
    pub fn to_complex(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    /// `value * exp(shift)` without forming the intermediate.
    pub fn shifted(&self, shift: f64) -> Self {
        Self {
            log_scale: self.log_scale + shift,
            mantissa: self.mantissa,
        }
    }
}

/// `ln Σ exp(l_k)` with max-shift and compensated accumulation.
pub fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let mut acc = Neumaier::new();
    for &l in logs {
        acc.add((l - max).exp());
    }
    max + acc.value().ln()
}

/// Sums complex terms given as `(ln |t_k|, unit phase of t_k)`.
pub fn sum_log_terms(terms: &[(f64, Complex64)]) -> ScaledComplex {
    let max = terms
        .iter()
        .map(|t| t.0)
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return ScaledComplex::zero();
    }
    let mut acc = NeumaierComplex::new();
    for &(l, phase) in terms {
        let d = l - max;
        // Terms this far below the maximum cannot change a double.
        if d > -745.0 {
            acc.add(phase * d.exp());
        }
    }
    ScaledComplex {
        log_scale: max,
        mantissa: acc.value(),
    }
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Least-squares line `y = slope * x + intercept`; returns
/// `(slope, intercept, rms_residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Median of a non-empty slice (average of the two middle values for even length).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
