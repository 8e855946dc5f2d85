//! Over- and undercompleteness of discrete coherent-state sets.
//!
//! A set `{|ζ_N;ρ⟩}` whose labels have density `(t, δ)` is overcomplete when
//! `(t, δ) ≻ (𝔞, 𝔟𝔞)` and undercomplete when `t < 𝔞`. In the undercomplete
//! case an orthogonal state is built explicitly: its Bargmann function is the
//! canonical product `P(z) = z^m Π E(z/ζ_N*, p)`, which vanishes at every
//! `ζ_N*` and therefore at every overlap `⟨ζ_N;ρ|P⟩ ∝ P(ζ_N*)`.
//!
//! Finite Gram and rank diagnostics corroborate verdicts at a fixed Fock
//! truncation; they are never a proof.

use crate::bargmann::BargmannFunction;
use crate::error::{Error, Result};
use crate::family::{GrowthExponents, RhoFamily};
use crate::growth::{
    estimate_order_type, geometric_radii, EntireFunction, GrowthConfig, GrowthFit, GrowthProfile,
};
use crate::numeric::{linear_fit, log_sum_exp};
use crate::sequences::{Density, PointSequence, SequenceKind};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    Overcomplete,
    Undercomplete,
    Boundary,
}

/// Which coordinate of the lexicographic comparison decided the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonPath {
    OrderAbove,
    OrderBelow,
    OrderEqualDensityAbove,
    OrderEqualDensityBelow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub family: String,
    pub a: f64,
    pub b: f64,
    pub critical_delta: f64,
    pub t: f64,
    pub delta: f64,
    pub path: ComparisonPath,
    pub tolerance_t: f64,
    pub tolerance_delta_rel: f64,
    pub rationale: String,
    /// Present for boundary verdicts only.
    pub caveat: Option<String>,
}

pub const BOUNDARY_CAVEAT: &str = "density alone does not decide this case: sequences with the same \
density can give an overcomplete or an undercomplete set, so we can not state general results";

const NON_INTEGRAL_ADVISORY: &str = "for non-integral order a finer criterion with an \
order-dependent constant exists; it is not evaluated here";

/// Equality bands used by [`classify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyTolerance {
    pub t: f64,
    pub delta_rel: f64,
}

impl ClassifyTolerance {
    /// For densities known exactly from the generator parameters.
    pub const EXACT: Self = Self {
        t: 1e-9,
        delta_rel: 1e-9,
    };
    /// For densities estimated from counts.
    pub const ESTIMATED: Self = Self {
        t: 0.02,
        delta_rel: 0.03,
    };

    pub fn for_density(d: &Density) -> Self {
        if d.is_exact() {
            Self::EXACT
        } else {
            Self::ESTIMATED
        }
    }
}

/// Decides over/undercompleteness from the density of the labels.
pub fn classify(family: &RhoFamily, density: &Density, tol: &ClassifyTolerance) -> Result<Verdict> {
    let e = family.growth_exponents()?;
    if !density.is_exact() && density.residual > tol.t {
        return Err(Error::Indeterminate(format!(
            "density estimate residual {} exceeds the order tolerance {}; refine the radius grid",
            density.residual, tol.t
        )));
    }
    classify_exponents(family.name(), &e, density, tol)
}

/// [`classify`] against explicitly supplied exponents.
pub fn classify_exponents(
    family: &str,
    e: &GrowthExponents,
    density: &Density,
    tol: &ClassifyTolerance,
) -> Result<Verdict> {
    let crit = e.critical_delta();
    let (t, delta) = (density.t, density.delta);
    let (kind, path, rationale, caveat) = if t > e.a + tol.t {
        (
            VerdictKind::Overcomplete,
            ComparisonPath::OrderAbove,
            format!("t = {t} > a = {}", e.a),
            None,
        )
    } else if t < e.a - tol.t {
        (
            VerdictKind::Undercomplete,
            ComparisonPath::OrderBelow,
            format!("t = {t} < a = {}", e.a),
            None,
        )
    } else {
        if (delta - crit).abs() <= tol.delta_rel * crit.max(delta) {
            return Err(Error::Indeterminate(format!(
                "t = {t} matches a = {} and delta = {delta} is within tolerance of b*a = {crit}; \
                 a tighter density estimate is needed",
                e.a
            )));
        }
        if delta > crit {
            (
                VerdictKind::Overcomplete,
                ComparisonPath::OrderEqualDensityAbove,
                format!("t = {t} = a and delta = {delta} > b*a = {crit}"),
                None,
            )
        } else {
            let mut caveat = BOUNDARY_CAVEAT.to_string();
            if e.a.fract() != 0.0 {
                caveat.push_str("; ");
                caveat.push_str(NON_INTEGRAL_ADVISORY);
            }
            (
                VerdictKind::Boundary,
                ComparisonPath::OrderEqualDensityBelow,
                format!("t = {t} = a and delta = {delta} <= b*a = {crit}"),
                Some(caveat),
            )
        }
    };
    Ok(Verdict {
        kind,
        family: family.to_string(),
        a: e.a,
        b: e.b,
        critical_delta: crit,
        t,
        delta,
        path,
        tolerance_t: tol.t,
        tolerance_delta_rel: tol.delta_rel,
        rationale,
        caveat,
    })
}

/// `ln E(w, p)` for `w = z/zero`, with an exact-zero flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFactor {
    /// `ln E`; the real part is `ln |E|`, `-inf` at an exact zero.
    pub log: Complex64,
    pub is_zero: bool,
}

/// Weierstrass elementary factor `E(w, p) = (1 - w) exp(w + w²/2 + … + w^p/p)`
/// in log form, `w = z/zero`.
///
/// For `|w| < 1/2` the sum `-Σ_{k>p} w^k/k` is used directly, so the
/// cancellation between `ln(1-w)` and the exponent is avoided.
pub fn weierstrass_factor(z: Complex64, zero: Complex64, p: u32) -> Result<LogFactor> {
    if zero.norm() == 0.0 {
        return Err(Error::InvalidInput(
            "zero at the origin; use the multiplicity m instead".into(),
        ));
    }
    Ok(log_factor(z / zero, p))
}

fn log_factor(w: Complex64, p: u32) -> LogFactor {
    if w == Complex64::new(1.0, 0.0) {
        return LogFactor {
            log: Complex64::new(f64::NEG_INFINITY, 0.0),
            is_zero: true,
        };
    }
    let r = w.norm();
    if r < 0.5 {
        let mut wk = w.powu(p + 1);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut k = (p + 1) as f64;
        loop {
            let term = wk / k;
            sum -= term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
            wk *= w;
            k += 1.0;
        }
        return LogFactor {
            log: sum,
            is_zero: false,
        };
    }
    let mut log = (Complex64::new(1.0, 0.0) - w).ln();
    let mut wk = Complex64::new(1.0, 0.0);
    for k in 1..=p {
        wk *= w;
        log += wk / k as f64;
    }
    LogFactor {
        log,
        is_zero: false,
    }
}

/// `P(z) = z^m Π_N E(z/ζ_N, p)` with the zeros given directly.
#[derive(Debug, Clone)]
pub struct CanonicalProduct {
    zeros: Vec<Complex64>,
    genus: u32,
    origin_multiplicity: u32,
}

impl CanonicalProduct {
    pub fn new(zeros: Vec<Complex64>, genus: u32, origin_multiplicity: u32) -> Result<Self> {
        if zeros.iter().any(|z| z.norm() == 0.0) {
            return Err(Error::InvalidInput(
                "zero at the origin; use the multiplicity m instead".into(),
            ));
        }
        Ok(Self {
            zeros,
            genus,
            origin_multiplicity,
        })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    /// `ln P(z)` (`-inf` real part at a zero).
    pub fn log_value(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        if self.origin_multiplicity > 0 {
            if z.norm() == 0.0 {
                return Complex64::new(f64::NEG_INFINITY, 0.0);
            }
            acc += z.ln() * self.origin_multiplicity as f64;
        }
        for &zeta in &self.zeros {
            let f = log_factor(z / zeta, self.genus);
            if f.is_zero {
                return Complex64::new(f64::NEG_INFINITY, 0.0);
            }
            acc += f.log;
        }
        acc
    }
}

impl EntireFunction for CanonicalProduct {
    fn log_modulus(&self, z: Complex64) -> f64 {
        self.log_value(z).re
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessConfig {
    /// Radii for the circle-sampled Taylor extraction.
    pub extraction_radii: usize,
    /// Samples per circle are `oversampling · (taylor_degree + 1)` rounded up
    /// to a power of two.
    pub oversampling: usize,
    /// Largest Fock mass allowed in the top tenth of the amplitudes.
    pub max_tail_mass: f64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self {
            extraction_radii: 48,
            oversampling: 4,
            max_tail_mass: 1e-16,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub family: String,
    pub genus_p: u32,
    pub origin_multiplicity_m: u32,
    pub truncation_n: usize,
    pub taylor_degree: usize,
    /// `‖f‖` for `f_n = c_n √ρ(n)` before normalisation (`ln` in `log_norm`).
    pub norm: f64,
    pub log_norm: f64,
    pub max_orthogonality_residual: f64,
    pub orthogonality_residuals: Vec<f64>,
    /// Taylor coefficients of `P`, unnormalised.
    pub taylor_coefficients: Vec<[f64; 2]>,
    /// Estimated absolute error of each extracted coefficient.
    pub coefficient_errors: Vec<f64>,
    pub growth: Option<GrowthProfile>,
    pub growth_error: Option<String>,
    #[serde(skip)]
    pub witness: BargmannFunction,
    #[serde(skip)]
    pub product: CanonicalProduct,
}

impl WitnessReport {
    pub fn taylor(&self) -> Vec<Complex64> {
        self.taylor_coefficients
            .iter()
            .map(|c| Complex64::new(c[0], c[1]))
            .collect()
    }
}

/// Default genus: the smallest `p >= ⌊t⌋` with `p + 1 > t`.
pub fn default_genus(t: f64) -> u32 {
    let p = t.floor().max(0.0) as u32;
    if (p + 1) as f64 > t {
        p
    } else {
        p + 1
    }
}

/// Builds a state orthogonal to every `|ζ_N;ρ⟩`, `N <= truncation_n`.
///
/// Zeros of the witness are placed at `ζ_N*`. The construction is refused
/// unless the sequence is undercomplete for the family (finite explicit
/// lists count as density order 0).
pub fn build_witness(
    family: &RhoFamily,
    seq: &PointSequence,
    p: Option<u32>,
    m: u32,
    truncation_n: usize,
    taylor_degree: usize,
    cfg: &WitnessConfig,
) -> Result<WitnessReport> {
    if truncation_n == 0 || taylor_degree == 0 {
        return Err(Error::InvalidInput(
            "truncation and Taylor degree must be positive".into(),
        ));
    }
    let e = family.growth_exponents()?;
    let finite = seq.kind() == SequenceKind::Explicit;
    let density = match seq.nominal_density() {
        Some(d) => d,
        None => Density::exact(0.0, seq.len() as f64),
    };
    if !finite {
        let v = classify_exponents(family.name(), &e, &density, &ClassifyTolerance::EXACT);
        match v {
            Ok(v) if v.kind == VerdictKind::Undercomplete => {}
            Ok(v) => {
                return Err(Error::Precondition(format!(
                    "no orthogonal state can exist: the set is {:?} ({})",
                    v.kind, v.rationale
                )))
            }
            Err(err) => {
                return Err(Error::Precondition(format!(
                    "no witness for an undecided set: {err}"
                )))
            }
        }
    }
    let p = p.unwrap_or_else(|| default_genus(density.t));
    let seq = seq.truncated(truncation_n);
    let truncation_n = seq.len();
    if !finite {
        check_genus(&seq, density.t, p)?;
    }
    let zeros: Vec<Complex64> = seq.points().iter().map(|z| z.conj()).collect();
    let product = CanonicalProduct::new(zeros.clone(), p, m)?;

    let (log_c, errs) = extract_taylor(&product, &seq, taylor_degree, cfg);
    let terms: Vec<(f64, Complex64)> = log_c.clone();
    let log_f2: Vec<f64> = terms
        .iter()
        .enumerate()
        .map(|(n, &(l, _))| 2.0 * l + family.log_rho(n as u64))
        .collect();
    let log_norm = 0.5 * log_sum_exp(&log_f2);
    if !log_norm.is_finite() {
        return Err(Error::Degenerate("witness has vanishing coefficients".into()));
    }
    let top = (taylor_degree + 1) - (taylor_degree + 1).div_ceil(10);
    let tail_mass = log_sum_exp(&log_f2[top..]) - 2.0 * log_norm;
    if tail_mass.exp() > cfg.max_tail_mass {
        return Err(Error::TruncationTooSmall {
            given: taylor_degree + 1,
            required: 2 * (taylor_degree + 1),
            tail_mass: tail_mass.exp(),
        });
    }
    let witness = BargmannFunction::from_taylor_log(family, &terms)?;

    let residuals: Vec<f64> = zeros
        .iter()
        .map(|&zs| {
            let v = witness.evaluate_scaled(zs).ln_abs();
            let ln_n = family.log_normalization(zs.norm_sqr())?;
            Ok((v - 0.5 * ln_n).exp())
        })
        .collect::<Result<_>>()?;
    let max_res = residuals.iter().copied().fold(0.0, f64::max);

    let (growth, growth_error) = {
        let r_max = seq.reach() / 2.0;
        let radii = geometric_radii(r_max / 100.0, r_max, 16);
        let cfg = GrowthConfig {
            fit: GrowthFit::LogLogLine,
            ..GrowthConfig::default()
        };
        match estimate_order_type(&product, &radii, &cfg) {
            Ok(g) => (Some(g), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    Ok(WitnessReport {
        family: family.name().to_string(),
        genus_p: p,
        origin_multiplicity_m: m,
        truncation_n,
        taylor_degree,
        norm: log_norm.exp(),
        log_norm,
        max_orthogonality_residual: max_res,
        orthogonality_residuals: residuals,
        taylor_coefficients: log_c
            .iter()
            .map(|&(l, ph)| {
                let c = ph * l.exp();
                [c.re, c.im]
            })
            .collect(),
        coefficient_errors: errs,
        growth,
        growth_error,
        witness,
        product,
    })
}

/// `Σ |ζ_N|^{-(p+1)}` must converge: `p + 1 > t`, and the terms on the upper
/// half of the included points must decay faster than `1/N`.
fn check_genus(seq: &PointSequence, t: f64, p: u32) -> Result<()> {
    if (p + 1) as f64 <= t {
        return Err(Error::Precondition(format!(
            "genus p = {p} too small for order t = {t}: Σ|ζ|^-(p+1) diverges"
        )));
    }
    let mods = seq.moduli();
    let n = mods.len();
    if n < 16 {
        return Ok(());
    }
    let idx: Vec<usize> = (n / 2..n).collect();
    let xs: Vec<f64> = idx.iter().map(|&k| ((k + 1) as f64).ln()).collect();
    let ys: Vec<f64> = idx
        .iter()
        .map(|&k| -((p + 1) as f64) * mods[k].ln())
        .collect();
    let (slope, _, _) = linear_fit(&xs, &ys);
    if slope >= -1.0 {
        return Err(Error::Precondition(format!(
            "Σ|ζ|^-(p+1) with p = {p} does not converge on the sequence tail (decay exponent {slope})"
        )));
    }
    Ok(())
}

/// Taylor coefficients of `P` up to `degree` from samples on several circles.
/// Each coefficient is taken from the circle with the smallest Cauchy-type
/// error estimate `ε · max|P| / R^n`; coefficients below that estimate are
/// set to zero. Returns `(ln |c_n|, phase)` and the estimated absolute errors.
fn extract_taylor(
    product: &CanonicalProduct,
    seq: &PointSequence,
    degree: usize,
    cfg: &WitnessConfig,
) -> (Vec<(f64, Complex64)>, Vec<f64>) {
    let samples = (cfg.oversampling * (degree + 1)).next_power_of_two();
    let r_lo = seq.moduli()[0] * 1e-2;
    let r_hi = seq.reach() * 4.0;
    let radii = geometric_radii(r_lo, r_hi, cfg.extraction_radii.max(2));
    let fft = FftPlanner::<f64>::new().plan_fft_forward(samples);
    let eps_ln = (f64::EPSILON * samples as f64).ln();
    let mut best: Vec<(f64, (f64, Complex64))> =
        vec![(f64::INFINITY, (f64::NEG_INFINITY, Complex64::new(1.0, 0.0))); degree + 1];
    for &r in &radii {
        let logs: Vec<Complex64> = (0..samples)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / samples as f64;
                product.log_value(Complex64::from_polar(r, th))
            })
            .collect();
        let lmax = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        if !lmax.is_finite() {
            continue;
        }
        let mut buf: Vec<Complex64> = logs
            .iter()
            .map(|l| {
                if l.re == f64::NEG_INFINITY {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar((l.re - lmax).exp(), l.im)
                }
            })
            .collect();
        fft.process(&mut buf);
        let lr = r.ln();
        for n in 0..=degree {
            let err = eps_ln + lmax - n as f64 * lr;
            if err < best[n].0 {
                let x = buf[n] / samples as f64;
                let m = x.norm();
                let l = if m == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    m.ln() + lmax - n as f64 * lr
                };
                let ph = if m == 0.0 { Complex64::new(1.0, 0.0) } else { x / m };
                best[n] = (err, (l, ph));
            }
        }
    }
    let errs = best.iter().map(|b| b.0.exp()).collect();
    // Coefficients at or below their own error estimate are roundoff.
    let coeffs = best
        .into_iter()
        .map(|(err, (l, ph))| if l <= err { (f64::NEG_INFINITY, Complex64::new(1.0, 0.0)) } else { (l, ph) })
        .collect();
    (coeffs, errs)
}

#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub matrix: DMatrix<Complex64>,
    /// Index pairs of coincident points (the matrix is singular by construction).
    pub duplicates: Vec<(usize, usize)>,
}

impl GramMatrix {
    pub fn has_duplicates(&self) -> bool {
        !self.duplicates.is_empty()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

pub const DEFAULT_MAX_GRAM_POINTS: usize = 400;

/// `G_ij = ⟨z_i;ρ|z_j;ρ⟩`.
pub fn gram_matrix(family: &RhoFamily, points: &[Complex64], max_points: usize) -> Result<GramMatrix> {
    if points.is_empty() {
        return Err(Error::InvalidInput("no points".into()));
    }
    if points.len() > max_points {
        return Err(Error::Precondition(format!(
            "{} points exceed the configured maximum {max_points}",
            points.len()
        )));
    }
    let n = points.len();
    let mut g = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut duplicates = Vec::new();
    for i in 0..n {
        g[(i, i)] = Complex64::new(1.0, 0.0);
        for j in i + 1..n {
            if points[i] == points[j] {
                duplicates.push((i, j));
            }
            let v = family.overlap(points[i], points[j])?;
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(GramMatrix {
        matrix: g,
        duplicates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankConfig {
    /// Singular values below `rank_rel · σ_max` do not count towards the rank.
    pub rank_rel: f64,
    /// Largest Fock tail mass beyond `fock_dim` allowed for any point.
    pub max_tail_mass: f64,
}

impl Default for RankConfig {
    fn default() -> Self {
        Self {
            rank_rel: 1e-8,
            max_tail_mass: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankDiagnostic {
    pub singular_values: Vec<f64>,
    pub numerical_rank: usize,
    /// `min_{‖f‖=1} ‖V f‖` over the truncated space: the `fock_dim`-th
    /// singular value, zero when there are fewer points than dimensions.
    pub residual_vector_norm: f64,
    pub max_tail_mass: f64,
    pub fock_dim: usize,
}

impl RankDiagnostic {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k,sigma")?;
        for (k, s) in self.singular_values.iter().enumerate() {
            writeln!(w, "{},{}", k + 1, s)?;
        }
        Ok(())
    }
}

/// Rows `z_i^n / √(ρ(n) N_ρ(|z_i|²))`, `n < fock_dim`.
pub fn state_matrix(family: &RhoFamily, points: &[Complex64], fock_dim: usize) -> Result<DMatrix<Complex64>> {
    let mut v = DMatrix::from_element(points.len(), fock_dim, Complex64::new(0.0, 0.0));
    for (i, &z) in points.iter().enumerate() {
        let ln_n = family.log_normalization(z.norm_sqr())?;
        let lr = z.norm().ln();
        for n in 0..fock_dim {
            let l = if n == 0 { 0.0 } else { n as f64 * lr };
            let m = (l - 0.5 * family.log_rho(n as u64) - 0.5 * ln_n).exp();
            v[(i, n)] = Complex64::from_polar(m, n as f64 * z.arg());
        }
    }
    Ok(v)
}

/// Fock mass of `|z;ρ⟩` beyond level `fock_dim`.
fn fock_tail(family: &RhoFamily, z: Complex64, fock_dim: usize) -> Result<f64> {
    let x = z.norm_sqr();
    if x == 0.0 {
        return Ok(0.0);
    }
    let ln_n = family.log_normalization(x)?;
    let lx = x.ln();
    let logs: Vec<f64> = (0..fock_dim)
        .map(|n| n as f64 * lx - family.log_rho(n as u64) - ln_n)
        .collect();
    Ok((1.0 - log_sum_exp(&logs).exp()).max(0.0))
}

/// Singular values of the truncated state matrix and the derived rank data.
pub fn finite_rank_diagnostic(
    family: &RhoFamily,
    points: &[Complex64],
    fock_dim: usize,
    cfg: &RankConfig,
) -> Result<RankDiagnostic> {
    if fock_dim < 8 {
        return Err(Error::Precondition(format!("fock_dim = {fock_dim} < 8")));
    }
    if points.is_empty() {
        return Err(Error::InvalidInput("no points".into()));
    }
    let mut worst_tail: f64 = 0.0;
    let mut worst_point = points[0];
    for &z in points {
        let t = fock_tail(family, z, fock_dim)?;
        if t > worst_tail {
            worst_tail = t;
            worst_point = z;
        }
    }
    if worst_tail > cfg.max_tail_mass {
        let required = (fock_dim..)
            .find(|&d| fock_tail(family, worst_point, d).map(|t| t <= cfg.max_tail_mass).unwrap_or(true))
            .unwrap_or(fock_dim);
        return Err(Error::TruncationTooSmall {
            given: fock_dim,
            required,
            tail_mass: worst_tail,
        });
    }
    let v = state_matrix(family, points, fock_dim)?;
    let mut sv: Vec<f64> = v.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let smax = sv[0];
    let rank = sv.iter().filter(|&&s| s > cfg.rank_rel * smax).count();
    let residual = if points.len() >= fock_dim {
        sv[fock_dim - 1]
    } else {
        0.0
    };
    Ok(RankDiagnostic {
        singular_values: sv,
        numerical_rank: rank,
        residual_vector_norm: residual,
        max_tail_mass: worst_tail,
        fock_dim,
    })
}

/// `‖V f_D‖ / ‖f_D‖` for the witness projected onto the first `fock_dim`
/// levels: an upper bound for the smallest singular value of `V`.
pub fn projected_witness_residual(
    family: &RhoFamily,
    points: &[Complex64],
    fock_dim: usize,
    witness: &BargmannFunction,
) -> Result<f64> {
    let v = state_matrix(family, points, fock_dim)?;
    let mut f = nalgebra::DVector::from_element(fock_dim, Complex64::new(0.0, 0.0));
    for (n, a) in witness.fock_amplitudes().iter().take(fock_dim).enumerate() {
        f[n] = *a;
    }
    let norm = f.norm();
    if norm == 0.0 {
        return Err(Error::Degenerate("witness vanishes on the truncated space".into()));
    }
    // Overlaps are ⟨z_i|f⟩ = Σ conj(V_in) f_n.
    Ok((v.conjugate() * f).norm() / norm)
}
