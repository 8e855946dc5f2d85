//! Order and type of entire functions.
//!
//! For `M(R) = max_{|z|=R} |F(z)|` the order is `r = limsup ln ln M / ln R`
//! and the type `s = limsup ln M / R^r`. Finite-sample surrogates:
//!
//! * [`estimate_order_type`] fits `ln ln M(R)` against `ln R` over the larger
//!   half of a radius grid, then takes the median of `ln M / R^r` over the
//!   same half.
//! * [`order_type_from_coefficients`] works from Taylor coefficients alone
//!   and serves as an independent cross-check.
//!
//! Everything is done with `ln M`, never `M`.

use crate::bargmann::BargmannFunction;
use crate::error::{Error, Result};
use crate::family::{GrowthExponents, RhoFamily};
use crate::numeric::{linear_fit, median, sum_log_terms};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

/// Something whose modulus can be evaluated in log form anywhere in the plane.
pub trait EntireFunction {
    /// `ln |F(z)|`; `-inf` at a zero.
    fn log_modulus(&self, z: Complex64) -> f64;
}

impl EntireFunction for BargmannFunction {
    fn log_modulus(&self, z: Complex64) -> f64 {
        self.evaluate_scaled(z).ln_abs()
    }
}

/// Adapts a closure `z ↦ ln |F(z)|`.
pub struct LogModulusFn<F>(pub F);

impl<F: Fn(Complex64) -> f64> EntireFunction for LogModulusFn<F> {
    fn log_modulus(&self, z: Complex64) -> f64 {
        (self.0)(z)
    }
}

/// A Taylor series `Σ c_n z^n` stored as `(ln |c_n|, phase)`, long enough to
/// be evaluated accurately on `|z| <= r_max`.
#[derive(Debug, Clone)]
pub struct TaylorSeries {
    log_abs: Vec<f64>,
    phases: Vec<Complex64>,
    r_max: f64,
}

const TAYLOR_CAP: usize = 20_000_000;
const TAYLOR_CUT: f64 = 40.0;

impl TaylorSeries {
    /// Generates coefficients from `coeff(n) = (ln |c_n|, phase)` until the
    /// terms at radius `r_max` are past their peak and negligible.
    pub fn generate<C>(coeff: C, r_max: f64) -> Result<Self>
    where
        C: Fn(u64) -> (f64, Complex64),
    {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::InvalidInput(format!("r_max = {r_max} must be > 0")));
        }
        let lr = r_max.ln();
        let mut log_abs = Vec::new();
        let mut phases = Vec::new();
        let mut max = f64::NEG_INFINITY;
        let mut prev = f64::NEG_INFINITY;
        for n in 0..TAYLOR_CAP as u64 {
            let (l, ph) = coeff(n);
            log_abs.push(l);
            phases.push(ph);
            if l == f64::NEG_INFINITY {
                continue;
            }
            let t = l + n as f64 * lr;
            max = max.max(t);
            if t < prev && t < max - TAYLOR_CUT && n > 8 {
                return Ok(Self {
                    log_abs,
                    phases,
                    r_max,
                });
            }
            prev = t;
        }
        Err(Error::NonConvergent {
            what: format!("Taylor series sized for radius {r_max}"),
            iterations: TAYLOR_CAP,
        })
    }

    /// `c_n = ρ(n)^{-1/2}`: the extremal function of a family, whose growth
    /// is `(𝔞(ρ), 𝔟(ρ))`.
    pub fn extremal(family: &RhoFamily, r_max: f64) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        Self::generate(|n| (-0.5 * family.log_rho(n), one), r_max)
    }

    /// The untruncated coherent Bargmann function `N(|ζ|²)^{-1/2} K_ρ(ζ, z)`.
    pub fn coherent(family: &RhoFamily, zeta: Complex64, r_max: f64) -> Result<Self> {
        let ln_n = family.log_normalization(zeta.norm_sqr())?;
        let lz = zeta.norm().ln();
        let th = zeta.arg();
        Self::generate(
            |n| {
                let lzn = if n == 0 { 0.0 } else { n as f64 * lz };
                (
                    lzn - family.log_rho(n) - 0.5 * ln_n,
                    Complex64::from_polar(1.0, n as f64 * th),
                )
            },
            r_max,
        )
    }

    pub fn from_bargmann(f: &BargmannFunction) -> Self {
        let (log_abs, phases) = f.log_taylor_coefficients().unzip();
        Self {
            log_abs,
            phases,
            r_max: f64::INFINITY,
        }
    }

    pub fn len(&self) -> usize {
        self.log_abs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_abs.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn log_abs_coefficients(&self) -> &[f64] {
        &self.log_abs
    }
}

impl EntireFunction for TaylorSeries {
    fn log_modulus(&self, z: Complex64) -> f64 {
        let r = z.norm();
        if r == 0.0 {
            return self.log_abs.first().copied().unwrap_or(f64::NEG_INFINITY);
        }
        let lr = r.ln();
        let th = z.arg();
        let mut terms = Vec::with_capacity(self.log_abs.len());
        let mut max = f64::NEG_INFINITY;
        let mut prev = f64::NEG_INFINITY;
        for (n, (&l, &p)) in self.log_abs.iter().zip(&self.phases).enumerate() {
            if l == f64::NEG_INFINITY {
                continue;
            }
            let t = l + n as f64 * lr;
            max = max.max(t);
            terms.push((t, p * Complex64::from_polar(1.0, n as f64 * th)));
            if t < prev && t < max - TAYLOR_CUT && n > 8 {
                break;
            }
            prev = t;
        }
        sum_log_terms(&terms).ln_abs()
    }
}

/// Minimum number of equally spaced angles for [`max_modulus`].
pub const MIN_ANGULAR_SAMPLES: usize = 64;
const GOLDEN_ITERATIONS: usize = 40;

/// `ln M(R)`: the best of `angular_samples` equally spaced angles (θ = 0
/// included), refined by golden-section search between its neighbours.
pub fn max_modulus<F: EntireFunction + ?Sized>(f: &F, r: f64, angular_samples: usize) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!("radius {r} must be > 0")));
    }
    if angular_samples < MIN_ANGULAR_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "angular_samples = {angular_samples} < {MIN_ANGULAR_SAMPLES}"
        )));
    }
    let h = 2.0 * PI / angular_samples as f64;
    let at = |th: f64| f.log_modulus(Complex64::from_polar(r, th));
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 0..angular_samples {
        let th = h * k as f64;
        let v = at(th);
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::domain(
                "max_modulus",
                format!("non-finite evaluation at R = {r}, θ = {th}"),
            ));
        }
        if v > best.1 {
            best = (th, v);
        }
    }
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best.0 - h, best.0 + h);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let (mut fc, mut fd) = (at(c), at(d));
    for _ in 0..GOLDEN_ITERATIONS {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = at(d);
        }
    }
    let refined = fc.max(fd);
    if refined.is_nan() {
        return Err(Error::domain("max_modulus", "non-finite evaluation during refinement"));
    }
    Ok(best.1.max(refined))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum GrowthMethod {
    MaxModulus,
    Coefficients,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthProfile {
    pub order: f64,
    #[serde(rename = "type")]
    pub type_: f64,
    pub fit_residual: f64,
    /// Radii of the max-modulus samples (empty for the coefficient method).
    pub radii: Vec<f64>,
    /// `ln M(R)` at each radius.
    pub log_max_modulus: Vec<f64>,
    /// Number of samples (radii or hull edges) in the tail window of the fit.
    pub window: usize,
    pub method: GrowthMethod,
}

impl GrowthProfile {
    /// Writes the `(R, ln M(R))` table as CSV.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "R,log_M")?;
        for (r, l) in self.radii.iter().zip(&self.log_max_modulus) {
            writeln!(w, "{r},{l}")?;
        }
        Ok(())
    }
}

/// `n` radii in geometric progression from `r_min` to `r_max`.
pub fn geometric_radii(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    let q = (r_max / r_min).ln() / (n - 1) as f64;
    (0..n).map(|k| r_min * (q * k as f64).exp()).collect()
}

/// Coefficient budget behind [`family_radii`]: the series at `R_max` peaks
/// around index `𝔞𝔟R^𝔞`.
const PEAK_INDEX_BUDGET: f64 = 25_000.0;

/// Default radius grid for a family with exponents (𝔞, 𝔟): 16 geometric
/// points from 2 (or `R_max/100` if smaller) up to `R_max`, where `R_max`
/// keeps the peak coefficient index within budget and is at most 10⁴.
pub fn family_radii(e: &GrowthExponents) -> Vec<f64> {
    let r_max = (PEAK_INDEX_BUDGET / (e.a * e.b)).powf(1.0 / e.a).min(1e4);
    let r_min = 2f64.min(r_max / 100.0);
    geometric_radii(r_min, r_max, 16)
}

/// How order and type are read off the `(R, ln M)` table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthFit {
    /// `ln M ≈ s R^r + κ ln R + c`; accurate for smooth growth with a power
    /// prefactor.
    PowerModel,
    /// Straight line of `ln ln M` against `ln R`, type as the median of
    /// `ln M / R^r`; robust for irregular `M`, such as products over
    /// scattered zeros.
    LogLogLine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthConfig {
    pub angular_samples: usize,
    pub fit: GrowthFit,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self {
            angular_samples: 64,
            fit: GrowthFit::PowerModel,
        }
    }
}

/// Order and type from `ln M(R)` on a radius grid.
pub fn estimate_order_type<F: EntireFunction + ?Sized>(
    f: &F,
    radii: &[f64],
    cfg: &GrowthConfig,
) -> Result<GrowthProfile> {
    if radii.len() < 8 {
        return Err(Error::Precondition(format!(
            "need at least 8 radii, got {}",
            radii.len()
        )));
    }
    let mut radii = radii.to_vec();
    radii.sort_by(|a, b| a.total_cmp(b));
    if radii[radii.len() - 1] / radii[0] < 100.0 * (1.0 - 1e-9) {
        return Err(Error::Precondition(
            "radius grid must span at least two decades".into(),
        ));
    }
    let log_m: Vec<f64> = radii
        .iter()
        .map(|&r| max_modulus(f, r, cfg.angular_samples))
        .collect::<Result<_>>()?;
    for (k, w) in log_m.windows(2).enumerate() {
        if w[1] < w[0] - 1e-9 * w[0].abs().max(1.0) {
            return Err(Error::Precondition(format!(
                "M(R) decreases between R = {} and R = {}; not entire-like data",
                radii[k],
                radii[k + 1]
            )));
        }
    }
    fit_profile(radii, log_m, cfg.fit)
}

/// Fits order and type to an already computed `(R, ln M(R))` table.
///
/// On the upper half of the grid `ln M` is fitted by `s R^r + κ ln R + c`:
/// the power prefactor `R^κ` and the constant are what keeps a straight
/// `ln ln M` against `ln R` line from being asymptotic on finite grids. The
/// `ln ln M` slope seeds a one-dimensional search over `r`; `(s, κ, c)` are
/// linear least squares for each `r`. `fit_residual` is the RMS misfit
/// relative to the largest `ln M`.
pub fn profile_from_log_m(radii: Vec<f64>, log_m: Vec<f64>) -> Result<GrowthProfile> {
    fit_profile(radii, log_m, GrowthFit::PowerModel)
}

/// [`profile_from_log_m`] with an explicit fit.
pub fn fit_profile(radii: Vec<f64>, log_m: Vec<f64>, fit: GrowthFit) -> Result<GrowthProfile> {
    let half = radii.len() / 2;
    let tail: Vec<usize> = (half..radii.len()).filter(|&k| log_m[k] > 0.0).collect();
    if tail.len() < 4 {
        return Err(Error::Degenerate(
            "ln M(R) is not positive on the upper half of the radii".into(),
        ));
    }
    let xs: Vec<f64> = tail.iter().map(|&k| radii[k].ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|&k| log_m[k]).collect();
    let lly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (slope, _, ll_residual) = linear_fit(&xs, &lly);
    let scale = ys.iter().copied().fold(0.0, f64::max);
    let model = |r: f64| -> Option<(f64, f64)> {
        let a = nalgebra::DMatrix::from_fn(xs.len(), 3, |i, j| match j {
            0 => (r * xs[i]).exp(),
            1 => xs[i],
            _ => 1.0,
        });
        let b = nalgebra::DVector::from_column_slice(&ys);
        let sol = a.clone().svd(true, true).solve(&b, 1e-14).ok()?;
        let res = (&a * &sol - b).norm() / (xs.len() as f64).sqrt();
        (sol[0] > 0.0).then_some((sol[0], res / scale))
    };
    let fallback = || {
        let ratios: Vec<f64> = tail.iter().map(|&k| log_m[k] / radii[k].powf(slope)).collect();
        (slope.max(0.0), median(&ratios).max(0.0), ll_residual)
    };
    let (order, type_, residual) = if fit == GrowthFit::PowerModel && slope > 0.05 {
        // Grid on log r over [r0/3, 3 r0], then golden-section refinement.
        let (lo, hi) = ((slope / 3.0).ln(), (slope * 3.0).ln());
        let cost = |lr: f64| model(lr.exp()).map(|m| m.1).unwrap_or(f64::INFINITY);
        let grid = 240;
        let mut best = (f64::INFINITY, lo);
        for i in 0..=grid {
            let lr = lo + (hi - lo) * i as f64 / grid as f64;
            let c = cost(lr);
            if c < best.0 {
                best = (c, lr);
            }
        }
        let step = (hi - lo) / grid as f64;
        let (mut a, mut b) = (best.1 - step, best.1 + step);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..60 {
            let (c1, c2) = (b - g * (b - a), a + g * (b - a));
            if cost(c1) < cost(c2) {
                b = c2;
            } else {
                a = c1;
            }
        }
        let r = (0.5 * (a + b)).exp();
        match model(r) {
            Some((s, res)) if res.is_finite() => (r, s, res),
            _ => fallback(),
        }
    } else {
        fallback()
    };
    Ok(GrowthProfile {
        order,
        type_,
        fit_residual: residual,
        window: tail.len(),
        radii,
        log_max_modulus: log_m,
        method: GrowthMethod::MaxModulus,
    })
}

/// Order and type from `ln |c_n|` alone (`-inf` marks a zero coefficient).
///
/// With `L_n = -ln |c_n|`, a function of order `r` and type `s` has
/// `dL/dn ≈ (ln n - ln(s r))/r`. The slopes of the lower convex hull of
/// `(n, L_n)` (which skips lacunary gaps) are regressed on `ln n` over the
/// upper half of the hull: the slope gives `1/r`, the intercept `-ln(s r)/r`.
pub fn order_type_from_coefficients(log_abs_c: &[f64]) -> Result<GrowthProfile> {
    let pts: Vec<(f64, f64)> = log_abs_c
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_finite())
        .map(|(n, &l)| (n as f64, -l))
        .collect();
    if pts.is_empty() {
        return Err(Error::Degenerate("all coefficients are zero".into()));
    }
    if pts.len() < 30 {
        return Err(Error::Precondition(format!(
            "need at least 30 nonzero coefficients, got {}",
            pts.len()
        )));
    }
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b if it lies on or above the chord a-p.
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let edges: Vec<(f64, f64)> = hull
        .windows(2)
        .map(|w| (0.5 * (w[0].0 + w[1].0), (w[1].1 - w[0].1) / (w[1].0 - w[0].0)))
        .collect();
    let n_last = pts[pts.len() - 1].0;
    let tail: Vec<&(f64, f64)> = edges.iter().filter(|e| e.0 >= 0.5 * n_last).collect();
    if tail.len() < 3 {
        return Err(Error::Degenerate(
            "too few hull edges in the upper half of the coefficients".into(),
        ));
    }
    let xs: Vec<f64> = tail.iter().map(|e| e.0.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|e| e.1).collect();
    let (inv_r, intercept, residual) = linear_fit(&xs, &ys);
    if !(inv_r > 0.0) {
        return Err(Error::Degenerate(
            "coefficients do not decay faster than geometrically".into(),
        ));
    }
    let order = 1.0 / inv_r;
    let type_ = (-intercept * order).exp() / order;
    Ok(GrowthProfile {
        order,
        type_,
        fit_residual: residual,
        radii: Vec::new(),
        log_max_modulus: Vec::new(),
        window: tail.len(),
        method: GrowthMethod::Coefficients,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Membership {
    /// Order below 𝔞, or order 𝔞 and type below 𝔟: inside the Bargmann space.
    InsideB1,
    /// Order 𝔞 and type 𝔟: growth alone does not decide membership.
    BoundaryBMinusB1,
    OutsideB,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipConfig {
    pub order_tol: f64,
    pub type_tol: f64,
    pub max_residual: f64,
}

impl Default for MembershipConfig {
    fn default() -> Self {
        Self {
            order_tol: 0.05,
            type_tol: 0.05,
            max_residual: 0.05,
        }
    }
}

/// Places a growth profile relative to `𝔅₁(a, b) ⊂ 𝔅(a, b)`.
pub fn membership(p: &GrowthProfile, a: f64, b: f64, cfg: &MembershipConfig) -> Result<Membership> {
    if !(p.fit_residual <= cfg.max_residual) {
        return Err(Error::Indeterminate(format!(
            "growth fit residual {} exceeds {}",
            p.fit_residual, cfg.max_residual
        )));
    }
    let same_order = (p.order - a).abs() <= cfg.order_tol;
    Ok(if p.order < a - cfg.order_tol || (same_order && p.type_ < b - cfg.type_tol) {
        Membership::InsideB1
    } else if same_order && (p.type_ - b).abs() <= cfg.type_tol {
        Membership::BoundaryBMinusB1
    } else {
        Membership::OutsideB
    })
}
