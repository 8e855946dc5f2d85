//! States as entire functions: `F(z;ρ) = Σ f_n z^n / √ρ(n)`.
//!
//! A [`BargmannFunction`] carries a finite Fock vector `f_0..f_{D-1}` and the
//! family it is represented in. Taylor coefficients `c_n = f_n/√ρ(n)` are kept
//! as `(ln |c_n|, phase)` so evaluation stays finite where `ρ(n)` does not.

use crate::error::{Error, Result};
use crate::family::RhoFamily;
use crate::numeric::{log_sum_exp, sum_log_terms, NeumaierComplex, ScaledComplex};
use crate::quad::{integrate_half_line_dominated, QuadConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::io::{BufRead, Write};

/// Fock tail mass a coherent truncation may drop.
pub const COHERENT_TAIL_MASS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct BargmannFunction {
    family: RhoFamily,
    amplitudes: Vec<Complex64>,
    log_abs_coeff: Vec<f64>,
    phases: Vec<Complex64>,
}

fn unit_phase(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / r
    }
}

impl BargmannFunction {
    /// Builds `F` from Fock amplitudes `f_0..f_{D-1}`.
    pub fn from_fock(family: &RhoFamily, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidInput("empty Fock amplitude sequence".into()));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite Fock amplitude".into()));
        }
        let log_abs_coeff = amplitudes
            .iter()
            .enumerate()
            .map(|(n, a)| {
                let m = a.norm();
                if m == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    m.ln() - 0.5 * family.log_rho(n as u64)
                }
            })
            .collect();
        let phases = amplitudes.iter().map(|&a| unit_phase(a)).collect();
        Ok(Self {
            family: family.clone(),
            amplitudes,
            log_abs_coeff,
            phases,
        })
    }

    /// Builds the normalised state whose Taylor coefficients are proportional
    /// to `exp(l_n) · phase_n`, with `terms[n] = (l_n, phase_n)`.
    ///
    /// Works entirely in log space, so coefficients far outside the `f64`
    /// range are fine as long as their ratios are meaningful.
    pub fn from_taylor_log(family: &RhoFamily, terms: &[(f64, Complex64)]) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("empty Taylor coefficient sequence".into()));
        }
        let log_f: Vec<f64> = terms
            .iter()
            .enumerate()
            .map(|(n, &(l, _))| l + 0.5 * family.log_rho(n as u64))
            .collect();
        let log_norm = 0.5 * log_sum_exp(&log_f.iter().map(|l| 2.0 * l).collect::<Vec<_>>());
        if !log_norm.is_finite() {
            return Err(Error::Degenerate("Taylor coefficients are all zero".into()));
        }
        let amplitudes: Vec<Complex64> = log_f
            .iter()
            .zip(terms)
            .map(|(&lf, &(_, ph))| unit_phase(ph) * (lf - log_norm).exp())
            .collect();
        let log_abs_coeff = terms.iter().map(|&(l, _)| l - log_norm).collect();
        let phases = terms.iter().map(|&(_, ph)| unit_phase(ph)).collect();
        Ok(Self {
            family: family.clone(),
            amplitudes,
            log_abs_coeff,
            phases,
        })
    }

    /// Unit vector `e_n`: `F(z) = z^n/√ρ(n)`.
    pub fn fock_state(family: &RhoFamily, n: usize) -> Self {
        let mut a = vec![Complex64::new(0.0, 0.0); n + 1];
        a[n] = Complex64::new(1.0, 0.0);
        Self::from_fock(family, a).expect("non-empty")
    }

    pub fn vacuum(family: &RhoFamily) -> Self {
        Self::fock_state(family, 0)
    }

    /// The coherent state `|ζ;ρ⟩` as `F(z) = N_ρ(|ζ|²)^{-1/2} K_ρ(ζ, z)`,
    /// truncated to `truncation` Fock levels.
    ///
    /// Fails when the dropped tail carries more than [`COHERENT_TAIL_MASS`];
    /// the error reports the smallest adequate truncation.
    pub fn coherent(family: &RhoFamily, zeta: Complex64, truncation: usize) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::InvalidInput("truncation must be >= 1".into()));
        }
        let x = zeta.norm_sqr();
        if x == 0.0 {
            let mut a = vec![Complex64::new(0.0, 0.0); truncation];
            a[0] = Complex64::new(1.0, 0.0);
            return Self::from_fock(family, a);
        }
        let mass = coherent_mass_profile(family, x)?;
        let tail = mass.tail(truncation);
        if tail >= COHERENT_TAIL_MASS {
            return Err(Error::TruncationTooSmall {
                given: truncation,
                required: mass.required_truncation(COHERENT_TAIL_MASS),
                tail_mass: tail,
            });
        }
        let log_n = family.log_normalization(x)?;
        let lr = zeta.norm().ln();
        let th = zeta.arg();
        let amplitudes = (0..truncation)
            .map(|n| {
                let l = n as f64 * lr - 0.5 * family.log_rho(n as u64) - 0.5 * log_n;
                Complex64::from_polar(l.exp(), n as f64 * th)
            })
            .collect();
        Self::from_fock(family, amplitudes)
    }

    /// Smallest truncation for which [`BargmannFunction::coherent`] succeeds.
    pub fn coherent_truncation(family: &RhoFamily, zeta: Complex64) -> Result<usize> {
        let x = zeta.norm_sqr();
        if x == 0.0 {
            return Ok(1);
        }
        Ok(coherent_mass_profile(family, x)?.required_truncation(COHERENT_TAIL_MASS))
    }

    pub fn family(&self) -> &RhoFamily {
        &self.family
    }

    pub fn truncation(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn fock_amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `(ln |c_n|, phase_n)` with `c_n = f_n/√ρ(n)`.
    pub fn log_taylor_coefficients(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.log_abs_coeff.iter().copied().zip(self.phases.iter().copied())
    }

    /// `c_n` as ordinary numbers (underflow to zero is possible for large n).
    pub fn taylor_coefficients(&self) -> Vec<Complex64> {
        self.log_taylor_coefficients()
            .map(|(l, ph)| ph * l.exp())
            .collect()
    }

    /// `Σ |f_n|²`.
    pub fn norm_sqr(&self) -> f64 {
        let mut acc = crate::numeric::Neumaier::new();
        for a in &self.amplitudes {
            acc.add(a.norm_sqr());
        }
        acc.value()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-10
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::Degenerate("cannot normalise the zero vector".into()));
        }
        let a = self.amplitudes.iter().map(|&f| f / n).collect();
        Self::from_fock(&self.family, a)
    }

    fn log_terms(&self, z: Complex64) -> Vec<(f64, Complex64)> {
        let r = z.norm();
        let lr = r.ln();
        let rot = unit_phase(z);
        let mut ph = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(self.log_abs_coeff.len());
        for (n, (&l, &p)) in self.log_abs_coeff.iter().zip(&self.phases).enumerate() {
            let lz = if n == 0 { 0.0 } else { n as f64 * lr };
            out.push((l + lz, p * ph));
            ph *= rot;
            if n % 64 == 63 {
                // Re-anchor the rotating phase against drift.
                ph = Complex64::from_polar(1.0, (n + 1) as f64 * z.arg());
            }
        }
        out
    }

    /// `F(z)` in scaled form; never overflows.
    pub fn evaluate_scaled(&self, z: Complex64) -> ScaledComplex {
        if z.norm() == 0.0 {
            return ScaledComplex::from_complex(self.amplitudes[0]);
        }
        sum_log_terms(&self.log_terms(z))
    }

    /// `F(z)`. At `z = 0` this is exactly `f_0`.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.evaluate_scaled(z).to_complex()
    }

    /// `F(z)` together with a rounding-error bound `D·ε·Σ|c_n z^n|`.
    ///
    /// The truncated sum is the function itself, so no series tail enters.
    pub fn evaluate_with_error(&self, z: Complex64) -> (Complex64, f64) {
        if z.norm() == 0.0 {
            return (self.amplitudes[0], 0.0);
        }
        let terms = self.log_terms(z);
        let value = sum_log_terms(&terms).to_complex();
        let abs = log_sum_exp(&terms.iter().map(|t| t.0).collect::<Vec<_>>()).exp();
        (value, terms.len() as f64 * f64::EPSILON * abs)
    }

    fn check_family(&self, other: &Self) -> Result<()> {
        if self.family != other.family {
            return Err(Error::FamilyMismatch(
                self.family.name().to_string(),
                other.family.name().to_string(),
            ));
        }
        Ok(())
    }

    /// `(G, F) = Σ g_n* f_n` over the common truncation.
    pub fn inner_product_series(g: &Self, f: &Self) -> Result<Complex64> {
        g.check_family(f)?;
        let mut acc = NeumaierComplex::new();
        for (a, b) in g.amplitudes.iter().zip(&f.amplitudes) {
            acc.add(a.conj() * b);
        }
        Ok(acc.value())
    }

    /// `(G, F) = (1/π) ∫ W_ρ(|z|²) G(z)* F(z) d²z` with a trapezoidal rule in
    /// the angle and adaptive quadrature in `x = |z|²`.
    pub fn inner_product_quadrature(g: &Self, f: &Self, cfg: &InnerQuadConfig) -> Result<Complex64> {
        g.check_family(f)?;
        let d = g.truncation().max(f.truncation());
        let nodes = cfg.angular_nodes.unwrap_or((2 * d + 2).max(64));
        if nodes < 2 * d - 1 {
            return Err(Error::Precondition(format!(
                "{nodes} angular nodes cannot resolve truncation {d} (need >= {})",
                2 * d - 1
            )));
        }
        // The weight must exist before any work is done.
        g.family.log_weight(1.0)?;
        let tables = AngularTables::new(g, f, nodes);
        let radial = |x: f64| -> (f64, f64, f64) {
            let lw = match g.family.log_weight(x) {
                Ok(v) => v,
                Err(_) => return (0.0, 0.0, 0.0),
            };
            let (avg, env, lscale) = tables.angular_average(x.sqrt());
            let s = (lw + lscale).exp();
            (avg.re * s, avg.im * s, env * s)
        };
        let re = integrate_half_line_dominated(|x| radial(x).0, |x| radial(x).2, &cfg.quad)?;
        let im = integrate_half_line_dominated(|x| radial(x).1, |x| radial(x).2, &cfg.quad)?;
        Ok(Complex64::new(re.value, im.value))
    }

    /// Largest `|F(z)|² / (K_ρ(z*, z)·(F, F))` over `samples` points drawn
    /// uniformly from the disk `|z| <= radius`.
    pub fn pointwise_bound_check(&self, samples: usize, radius: f64, seed: u64) -> Result<f64> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput(format!("radius {radius} must be >= 0")));
        }
        let ln_ff = self.norm_sqr().ln();
        if !ln_ff.is_finite() {
            return Err(Error::Degenerate("zero state".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..samples {
            let r = radius * rng.gen::<f64>().sqrt();
            let th = 2.0 * PI * rng.gen::<f64>();
            let z = Complex64::from_polar(r, th);
            let lf = self.evaluate_scaled(z).ln_abs();
            let lk = self.family.log_normalization(r * r)?;
            worst = worst.max(2.0 * lf - lk - ln_ff);
        }
        Ok(worst.exp())
    }

    /// Writes `n,re,im` lines (with a header line).
    pub fn write_fock_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,re,im")?;
        for (n, a) in self.amplitudes.iter().enumerate() {
            writeln!(w, "{n},{},{}", a.re, a.im)?;
        }
        Ok(())
    }

    /// Reads amplitudes written by [`BargmannFunction::write_fock_csv`].
    /// Missing indices are zero; the header line is optional.
    pub fn read_fock_csv<R: BufRead>(family: &RhoFamily, r: R) -> Result<Self> {
        let mut amps: Vec<Complex64> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || (lineno == 0 && t.starts_with('n')) {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                input: line.clone(),
                position: 0,
                msg: format!("line {}: {msg}", lineno + 1),
            };
            let fields: Vec<&str> = t.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(bad("expected `n,re,im`"));
            }
            let n: usize = fields[0].parse().map_err(|_| bad("bad index"))?;
            let re: f64 = fields[1].parse().map_err(|_| bad("bad real part"))?;
            let im: f64 = fields[2].parse().map_err(|_| bad("bad imaginary part"))?;
            if n >= amps.len() {
                amps.resize(n + 1, Complex64::new(0.0, 0.0));
            }
            amps[n] = Complex64::new(re, im);
        }
        Self::from_fock(family, amps)
    }

    /// Writes `re(z),im(z),re(F),im(F)` for each point.
    pub fn write_grid_csv<W: Write>(&self, points: &[Complex64], mut w: W) -> Result<()> {
        writeln!(w, "re(z),im(z),re(F),im(F)")?;
        for &z in points {
            let v = self.evaluate(z);
            writeln!(w, "{},{},{},{}", z.re, z.im, v.re, v.im)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerQuadConfig {
    pub quad: QuadConfig,
    /// Defaults to `max(64, 2D + 2)`.
    pub angular_nodes: Option<usize>,
}

impl Default for InnerQuadConfig {
    fn default() -> Self {
        Self {
            quad: QuadConfig {
                rel_tol: 1e-10,
                ..QuadConfig::default()
            },
            angular_nodes: None,
        }
    }
}

/// Precomputed `e^{inθ_k}` tables for both functions.
struct AngularTables<'a> {
    g: &'a BargmannFunction,
    f: &'a BargmannFunction,
    rot: Vec<Vec<Complex64>>,
}

impl<'a> AngularTables<'a> {
    fn new(g: &'a BargmannFunction, f: &'a BargmannFunction, nodes: usize) -> Self {
        let d = g.truncation().max(f.truncation());
        let rot = (0..nodes)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / nodes as f64;
                (0..d)
                    .map(|n| Complex64::from_polar(1.0, n as f64 * th))
                    .collect()
            })
            .collect();
        Self { g, f, rot }
    }

    fn scaled_coeffs(h: &BargmannFunction, r: f64) -> (Vec<Complex64>, f64) {
        let lr = r.ln();
        let logs: Vec<f64> = h
            .log_abs_coeff
            .iter()
            .enumerate()
            .map(|(n, &l)| if n == 0 { l } else { l + n as f64 * lr })
            .collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let c = logs
            .iter()
            .zip(&h.phases)
            .map(|(&l, &p)| p * (l - max).exp())
            .collect();
        (c, max)
    }

    /// Mean over the nodes of `G* F` and of `|G||F|` at radius `r`, as
    /// mantissas with a shared log scale.
    fn angular_average(&self, r: f64) -> (Complex64, f64, f64) {
        let (cg, lg) = Self::scaled_coeffs(self.g, r);
        let (cf, lf) = Self::scaled_coeffs(self.f, r);
        let mut acc = NeumaierComplex::new();
        let mut env = 0.0;
        for row in &self.rot {
            let mut vg = Complex64::new(0.0, 0.0);
            for (c, e) in cg.iter().zip(row) {
                vg += c * e;
            }
            let mut vf = Complex64::new(0.0, 0.0);
            for (c, e) in cf.iter().zip(row) {
                vf += c * e;
            }
            acc.add(vg.conj() * vf);
            env += vg.norm() * vf.norm();
        }
        let m = self.rot.len() as f64;
        (acc.value() / m, env / m, lg + lf)
    }
}

/// Per-level weights `x^n/(ρ(n) N_ρ(x))` of the coherent state at `x = |ζ|²`.
struct MassProfile {
    /// `suffix[n] = Σ_{k>=n} weight_k`.
    suffix: Vec<f64>,
}

impl MassProfile {
    fn tail(&self, d: usize) -> f64 {
        self.suffix.get(d).copied().unwrap_or(0.0)
    }

    fn required_truncation(&self, mass: f64) -> usize {
        (1..=self.suffix.len())
            .find(|&d| self.tail(d) < mass)
            .unwrap_or(self.suffix.len())
    }
}

fn coherent_mass_profile(family: &RhoFamily, x: f64) -> Result<MassProfile> {
    const CAP: usize = 10_000_000;
    let lx = x.ln();
    let mut logs = Vec::new();
    let mut max = f64::NEG_INFINITY;
    let mut prev = f64::NEG_INFINITY;
    for n in 0..CAP as u64 {
        let l = n as f64 * lx - family.log_rho(n);
        if l == f64::NEG_INFINITY && n > 0 {
            break;
        }
        max = max.max(l);
        logs.push(l);
        // Far enough below the peak that the remaining mass is below 1e-20.
        if l < prev && l < max - 60.0 {
            break;
        }
        prev = l;
        if n as usize == CAP - 1 {
            return Err(Error::NonConvergent {
                what: format!("coherent mass profile of `{}`", family.name()),
                iterations: CAP,
            });
        }
    }
    let ln_total = log_sum_exp(&logs);
    let mut suffix = vec![0.0; logs.len() + 1];
    for n in (0..logs.len()).rev() {
        suffix[n] = suffix[n + 1] + (logs[n] - ln_total).exp();
    }
    Ok(MassProfile { suffix })
}
