//! Coherent-state families parameterised by a positive sequence `ρ(n)` with
//! `ρ(0) = 1`.
//!
//! A family fixes the states `|z;ρ⟩ = N_ρ(|z|²)^{-1/2} Σ z^n/√ρ(n) |n⟩`, the
//! normalisation `N_ρ(x) = Σ x^n/ρ(n)`, the reproducing kernel
//! `K_ρ(ζ, z) = Σ (ζz)^n/ρ(n)` and, when known, the radial weight `W_ρ` whose
//! moments reproduce `ρ(n)`.
//!
//! Four named families carry closed forms:
//!
//! | name                | ρ(n)                          | N_ρ(x)                        | W_ρ(x)                               |
//! |---------------------|-------------------------------|-------------------------------|--------------------------------------|
//! | `factorial`         | n!                            | e^x                           | e^{-x}                               |
//! | `factorial_squared` | (n!)²                         | I₀(2√x)                       | 2K₀(2√x)                             |
//! | `rho2`              | (n!)³√π / (2Γ(n+3/2))         | I₀(√x)² + 2√x I₀(√x) I₁(√x)   | K₀(√x)²                              |
//! | `mittag_leffler`    | Γ(αn+β)/Γ(β)                  | Γ(β) E_{α,β}(x)               | x^{(β-α)/α} e^{-x^{1/α}} / (αΓ(β))   |
//!
//! Everything is computed in log space: `log_rho`, `log_normalization` and
//! `log_weight` stay finite long after their exponentials overflow.

use crate::error::{Error, Result};
use crate::numeric::{sum_log_terms, log_sum_exp, ScaledComplex};
use crate::quad::{integrate_half_line, QuadConfig, QuadResult};
use crate::specfun::{
    bessel_i_scaled, bessel_k0, lgamma, log_bessel_i, log_bessel_k0, log_mittag_leffler,
};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

/// Hard cap on series length; reaching it means the series does not converge.
const SERIES_CAP: usize = 10_000_000;
/// Terms this far (in natural log) below the running maximum are dropped once
/// the series is past its peak.
const SERIES_CUT: f64 = 40.0;

type LogRhoFn = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyKind {
    Factorial,
    FactorialSquared,
    Rho2,
    MittagLeffler { alpha: f64, beta: f64 },
    Custom,
}

/// The pair (𝔞, 𝔟): `W_ρ(|z|²) ~ exp(-2𝔟|z|^𝔞)` as `|z| → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthExponents {
    pub a: f64,
    pub b: f64,
}

impl GrowthExponents {
    /// Critical density `𝔟·𝔞` at order `t = 𝔞`.
    pub fn critical_delta(&self) -> f64 {
        self.a * self.b
    }
}

/// A coherent-state family. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct RhoFamily {
    kind: FamilyKind,
    name: String,
    custom: Option<LogRhoFn>,
    exponents: Option<GrowthExponents>,
}

impl fmt::Debug for RhoFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RhoFamily")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("exponents", &self.exponents)
            .finish()
    }
}

impl PartialEq for RhoFamily {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.name == other.name
    }
}

impl RhoFamily {
    /// `ρ₀(n) = n!`: the standard coherent states.
    pub fn factorial() -> Self {
        Self::named(FamilyKind::Factorial, "factorial")
    }

    /// `ρ₁(n) = (n!)²`.
    pub fn factorial_squared() -> Self {
        Self::named(FamilyKind::FactorialSquared, "factorial_squared")
    }

    /// `ρ₂(n) = (n!)³ √π / (2Γ(n + 3/2))`.
    pub fn rho2() -> Self {
        Self::named(FamilyKind::Rho2, "rho2")
    }

    /// `ρ₃(n) = Γ(αn + β)/Γ(β)`, `α, β > 0`.
    pub fn mittag_leffler(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "mittag_leffler family needs alpha, beta > 0 (got {alpha}, {beta})"
            )));
        }
        Ok(Self::named(
            FamilyKind::MittagLeffler { alpha, beta },
            &format!("mittag_leffler({alpha},{beta})"),
        ))
    }

    fn named(kind: FamilyKind, name: &str) -> Self {
        let mut fam = Self {
            kind,
            name: name.to_string(),
            custom: None,
            exponents: None,
        };
        fam.exponents = fam.tabulated_exponents();
        fam
    }

    /// A user-supplied family given by `n ↦ ln ρ(n)`.
    ///
    /// Rejects sequences with `ρ(0) ≠ 1` and sequences whose normalisation
    /// series has a finite radius of convergence (checked on a fixed grid).
    pub fn custom<F>(name: &str, log_rho: F, exponents: Option<GrowthExponents>) -> Result<Self>
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        let l0 = log_rho(0);
        if l0.abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "custom family `{name}`: ln ρ(0) = {l0}, expected 0"
            )));
        }
        check_entire_convergence(name, &log_rho)?;
        if let Some(e) = exponents {
            if !(e.a > 0.0 && e.b > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "custom family `{name}`: growth exponents must be positive"
                )));
            }
        }
        Ok(Self {
            kind: FamilyKind::Custom,
            name: name.to_string(),
            custom: Some(Arc::new(log_rho)),
            exponents,
        })
    }

    /// The four families with closed forms, in the order they are usually listed.
    pub fn named_families() -> Vec<RhoFamily> {
        vec![
            Self::factorial(),
            Self::factorial_squared(),
            Self::rho2(),
            Self::mittag_leffler(2.0, 1.0).expect("valid parameters"),
        ]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn has_closed_forms(&self) -> bool {
        self.kind != FamilyKind::Custom
    }

    /// `ln ρ(n)`.
    pub fn log_rho(&self, n: u64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let nf = n as f64;
        match self.kind {
            FamilyKind::Factorial => lgamma(nf + 1.0),
            FamilyKind::FactorialSquared => 2.0 * lgamma(nf + 1.0),
            FamilyKind::Rho2 => {
                3.0 * lgamma(nf + 1.0) + 0.5 * PI.ln() - 2f64.ln() - lgamma(nf + 1.5)
            }
            FamilyKind::MittagLeffler { alpha, beta } => {
                lgamma(alpha * nf + beta) - lgamma(beta)
            }
            FamilyKind::Custom => (self.custom.as_ref().expect("custom family"))(n),
        }
    }

    /// `ρ(n)`; errors when it overflows `f64` (use [`RhoFamily::log_rho`]).
    pub fn rho(&self, n: u64) -> Result<f64> {
        let v = self.log_rho(n).exp();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain(
                "rho",
                format!("ρ({n}) of `{}` overflows f64; use log_rho", self.name),
            ))
        }
    }

    /// `ln N_ρ(x)` from the closed form when one exists, else from the series.
    pub fn log_normalization(&self, x: f64) -> Result<f64> {
        check_nonneg("normalization", x)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        match self.kind {
            FamilyKind::Factorial => Ok(x),
            FamilyKind::FactorialSquared => log_bessel_i(0, 2.0 * x.sqrt()),
            FamilyKind::Rho2 => {
                let r = x.sqrt();
                let i0 = bessel_i_scaled(0, r)?;
                let i1 = bessel_i_scaled(1, r)?;
                Ok((i0 * i0 + 2.0 * r * i0 * i1).ln() + 2.0 * r)
            }
            FamilyKind::MittagLeffler { alpha, beta } => {
                Ok(lgamma(beta) + log_mittag_leffler(alpha, beta, x)?)
            }
            FamilyKind::Custom => self.log_normalization_series(x),
        }
    }

    /// `N_ρ(x) = Σ x^n/ρ(n)`.
    pub fn normalization(&self, x: f64) -> Result<f64> {
        let v = self.log_normalization(x)?.exp();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain(
                "normalization",
                format!("N_ρ({x}) overflows f64; use log_normalization"),
            ))
        }
    }

    /// `ln N_ρ(x)` by direct log-space summation of the defining series.
    pub fn log_normalization_series(&self, x: f64) -> Result<f64> {
        check_nonneg("normalization", x)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        let lx = x.ln();
        let logs = self.series_log_terms(|n| n as f64 * lx, "normalization series")?;
        Ok(log_sum_exp(&logs))
    }

    /// Generates `l_n = g(n) - ln ρ(n)` until the series is past its peak and
    /// negligible. `g(n)` is `n ln |w|`.
    fn series_log_terms<G: Fn(u64) -> f64>(&self, g: G, what: &str) -> Result<Vec<f64>> {
        let mut logs = Vec::new();
        let mut max = f64::NEG_INFINITY;
        let mut prev = f64::NEG_INFINITY;
        for n in 0..SERIES_CAP as u64 {
            let l = g(n) - self.log_rho(n);
            if l == f64::NEG_INFINITY && n > 0 {
                // Finite table with no extension: the series terminates.
                return Ok(logs);
            }
            max = max.max(l);
            logs.push(l);
            if l < prev && l < max - SERIES_CUT {
                return Ok(logs);
            }
            prev = l;
        }
        Err(Error::NonConvergent {
            what: format!("{what} of `{}`", self.name),
            iterations: SERIES_CAP,
        })
    }

    /// Reproducing kernel `K_ρ(ζ, z) = Σ (ζz)^n/ρ(n)` in scaled form.
    pub fn kernel_scaled(&self, zeta: Complex64, z: Complex64) -> Result<ScaledComplex> {
        let w = zeta * z;
        let r = w.norm();
        if r == 0.0 {
            return Ok(ScaledComplex::from_complex(Complex64::new(1.0, 0.0)));
        }
        let lr = r.ln();
        let theta = w.arg();
        let logs = self.series_log_terms(|n| n as f64 * lr, "kernel series")?;
        let terms: Vec<(f64, Complex64)> = logs
            .iter()
            .enumerate()
            .map(|(n, &l)| (l, Complex64::from_polar(1.0, n as f64 * theta)))
            .collect();
        Ok(sum_log_terms(&terms))
    }

    /// `K_ρ(ζ, z)`; may overflow for large `|ζz|` (use [`RhoFamily::kernel_scaled`]).
    pub fn kernel(&self, zeta: Complex64, z: Complex64) -> Result<Complex64> {
        let k = self.kernel_scaled(zeta, z)?.to_complex();
        if k.re.is_finite() && k.im.is_finite() {
            Ok(k)
        } else {
            Err(Error::domain("kernel", "value overflows f64; use kernel_scaled"))
        }
    }

    /// `⟨z1;ρ|z2;ρ⟩ = K_ρ(z1*, z2) / √(N_ρ(|z1|²) N_ρ(|z2|²))`.
    pub fn overlap(&self, z1: Complex64, z2: Complex64) -> Result<Complex64> {
        let k = self.kernel_scaled(z1.conj(), z2)?;
        let ln1 = self.log_normalization(z1.norm_sqr())?;
        let ln2 = self.log_normalization(z2.norm_sqr())?;
        Ok(k.mantissa * (k.log_scale - 0.5 * (ln1 + ln2)).exp())
    }

    /// `ln W_ρ(x)` for `x > 0`.
    pub fn log_weight(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::domain("weight", format!("x = {x} must be > 0")));
        }
        match self.kind {
            FamilyKind::Factorial => Ok(-x),
            FamilyKind::FactorialSquared => Ok(2f64.ln() + log_bessel_k0(2.0 * x.sqrt())?),
            FamilyKind::Rho2 => Ok(2.0 * log_bessel_k0(x.sqrt())?),
            FamilyKind::MittagLeffler { alpha, beta } => Ok((beta - alpha) / alpha * x.ln()
                - x.powf(1.0 / alpha)
                - alpha.ln()
                - lgamma(beta)),
            FamilyKind::Custom => Err(Error::UnsupportedWeight(self.name.clone())),
        }
    }

    /// Radial weight `W_ρ(x)`, `x = |z|²`, with `∫_0^∞ x^n W_ρ(x) dx = ρ(n)`.
    pub fn weight(&self, x: f64) -> Result<f64> {
        match self.kind {
            FamilyKind::FactorialSquared if x > 0.0 && x.is_finite() => {
                Ok(2.0 * bessel_k0(2.0 * x.sqrt())?)
            }
            FamilyKind::Rho2 if x > 0.0 && x.is_finite() => {
                let k = bessel_k0(x.sqrt())?;
                Ok(k * k)
            }
            _ => Ok(self.log_weight(x)?.exp()),
        }
    }

    /// `W̃_ρ(x) = W_ρ(x) N_ρ(x) / π`, the density in the resolution of the identity.
    pub fn tilde_weight(&self, x: f64) -> Result<f64> {
        Ok((self.log_weight(x)? + self.log_normalization(x)?).exp() / PI)
    }

    /// Tabulated (𝔞, 𝔟), or those supplied for a custom family.
    pub fn growth_exponents(&self) -> Result<GrowthExponents> {
        self.exponents
            .ok_or_else(|| Error::MissingExponents(self.name.clone()))
    }

    fn tabulated_exponents(&self) -> Option<GrowthExponents> {
        match self.kind {
            FamilyKind::Factorial => Some(GrowthExponents { a: 2.0, b: 0.5 }),
            FamilyKind::FactorialSquared | FamilyKind::Rho2 => {
                Some(GrowthExponents { a: 1.0, b: 1.0 })
            }
            // W ~ exp(-|z|^{2/α}) = exp(-2·(1/2)·|z|^{2/α}).
            FamilyKind::MittagLeffler { alpha, .. } => Some(GrowthExponents {
                a: 2.0 / alpha,
                b: 0.5,
            }),
            FamilyKind::Custom => None,
        }
    }

    /// Computes the moment `∫_0^∞ x^n W_ρ(x) dx` and compares it with `ρ(n)`.
    pub fn moment_check(&self, n: u32, cfg: &MomentConfig) -> Result<MomentCheck> {
        if n > cfg.n_max {
            return Err(Error::Precondition(format!(
                "moment order {n} exceeds the configured reach n_max = {}",
                cfg.n_max
            )));
        }
        if !self.has_closed_forms() {
            return Err(Error::UnsupportedWeight(self.name.clone()));
        }
        let log_rho = self.log_rho(n as u64);
        // Scale by 1/ρ(n) so the integral is O(1) whatever n is.
        let quad = integrate_half_line(
            |x| match self.log_weight(x) {
                Ok(lw) => (n as f64 * x.ln() + lw - log_rho).exp(),
                Err(_) => 0.0,
            },
            &cfg.quad,
        )?;
        let expected = log_rho.exp();
        Ok(MomentCheck {
            n,
            computed: quad.value * expected,
            expected,
            relative_error: (quad.value - 1.0).abs(),
            quad,
        })
    }

    /// Loads a custom family from a table of `n, ln ρ(n)` lines.
    ///
    /// The first non-empty line must declare how the table is extended past
    /// its last entry: `# extension: linear` extrapolates the increments
    /// `ln ρ(n) - ln ρ(n-1)` linearly from the last two, `# extension: none`
    /// ends the series at the final entry. Optional `# exponents: a b` gives
    /// (𝔞, 𝔟).
    pub fn load_custom(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let name = format!("custom({})", path.display());
        Self::parse_custom_table(&name, &text)
    }

    pub fn parse_custom_table(name: &str, text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::InvalidInput(format!("{name}: empty table")))?;
        let policy = parse_header_value(header, "extension").ok_or_else(|| Error::Parse {
            input: header.to_string(),
            position: 0,
            msg: "first line must be `# extension: linear|none`".into(),
        })?;
        let extension = match policy.as_str() {
            "linear" => Extension::Linear,
            "none" => Extension::None,
            other => {
                return Err(Error::Parse {
                    input: header.to_string(),
                    position: header.find(other).unwrap_or(0),
                    msg: format!("unknown extension policy `{other}`"),
                })
            }
        };
        let mut exponents = None;
        let mut table: Vec<f64> = Vec::new();
        for (lineno, line) in lines {
            let t = line.trim();
            if t.starts_with('#') {
                if let Some(v) = parse_header_value(t, "exponents") {
                    let nums: Vec<f64> = v
                        .split_whitespace()
                        .map(|s| s.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| Error::Parse {
                            input: line.to_string(),
                            position: 0,
                            msg: format!("bad exponents: {e}"),
                        })?;
                    if nums.len() != 2 {
                        return Err(Error::Parse {
                            input: line.to_string(),
                            position: 0,
                            msg: "expected `# exponents: a b`".into(),
                        });
                    }
                    exponents = Some(GrowthExponents {
                        a: nums[0],
                        b: nums[1],
                    });
                }
                continue;
            }
            let fields: Vec<&str> = t
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let bad = |msg: String| Error::Parse {
                input: line.to_string(),
                position: 0,
                msg: format!("line {}: {msg}", lineno + 1),
            };
            if fields.len() != 2 {
                return Err(bad("expected `n, ln_rho`".into()));
            }
            let n: usize = fields[0].parse().map_err(|e| bad(format!("index: {e}")))?;
            let l: f64 = fields[1].parse().map_err(|e| bad(format!("value: {e}")))?;
            if n != table.len() {
                return Err(bad(format!("expected index {}, found {n}", table.len())));
            }
            table.push(l);
        }
        if table.len() < 3 && extension == Extension::Linear {
            return Err(Error::InvalidInput(format!(
                "{name}: linear extension needs at least three table entries"
            )));
        }
        let table = Arc::new(table);
        let log_rho = move |n: u64| tabulated_log_rho(&table, extension, n);
        Self::custom(name, log_rho, exponents)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Extension {
    Linear,
    None,
}

fn tabulated_log_rho(table: &[f64], extension: Extension, n: u64) -> f64 {
    let len = table.len();
    if (n as usize) < len {
        return table[n as usize];
    }
    match extension {
        Extension::None => f64::INFINITY,
        Extension::Linear => {
            let last = table[len - 1];
            let d1 = table[len - 1] - table[len - 2];
            let d0 = table[len - 2] - table[len - 3];
            let slope = d1 - d0;
            // Sum of increments d1 + k·slope for k = 1..=m.
            let m = (n as usize - (len - 1)) as f64;
            last + m * d1 + slope * m * (m + 1.0) / 2.0
        }
    }
}

fn parse_header_value(line: &str, key: &str) -> Option<String> {
    let t = line.trim().strip_prefix('#')?.trim();
    let rest = t.strip_prefix(key)?.trim_start().strip_prefix(':')?;
    Some(rest.trim().to_string())
}

fn check_nonneg(func: &'static str, x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(func, format!("x = {x} must be >= 0")));
    }
    Ok(())
}

/// `ln ρ(n) - n ln x` must grow without bound for every `x`; checked on a grid
/// of `x` by requiring growth across the last doublings of `n`.
fn check_entire_convergence<F: Fn(u64) -> f64>(name: &str, log_rho: &F) -> Result<()> {
    for &x in &[1e-2_f64, 1.0, 1e2, 1e4] {
        let lx = x.ln();
        let d = |n: u64| log_rho(n) - n as f64 * lx;
        let (a, b, c) = (d(1 << 18), d(1 << 19), d(1 << 20));
        let ok = (c == f64::INFINITY) || (c > b && b > a && c > 50.0);
        if !ok || log_rho(1).is_nan() {
            return Err(Error::InvalidInput(format!(
                "custom family `{name}`: Σ x^n/ρ(n) does not converge at x = {x}"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentConfig {
    pub quad: QuadConfig,
    pub n_max: u32,
}

impl Default for MomentConfig {
    fn default() -> Self {
        Self {
            quad: QuadConfig::default(),
            n_max: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCheck {
    pub n: u32,
    pub computed: f64,
    pub expected: f64,
    pub relative_error: f64,
    pub quad: QuadResult,
}

/// Time evolution of a coherent label: `z ↦ z e^{iτω}`.
pub fn evolve_label(z: Complex64, tau: f64, omega: f64) -> Complex64 {
    z * Complex64::from_polar(1.0, tau * omega)
}

/// `ρ₂(n)/ρ₁(n) = (√π/2) n!/Γ(n + 3/2)` evaluated in log space.
pub fn rho_ratio_asymptotics(n: u64) -> f64 {
    let r2 = RhoFamily::rho2();
    let r1 = RhoFamily::factorial_squared();
    (r2.log_rho(n) - r1.log_rho(n)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_i, gamma};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    fn all() -> Vec<RhoFamily> {
        vec![
            RhoFamily::factorial(),
            RhoFamily::factorial_squared(),
            RhoFamily::rho2(),
            RhoFamily::mittag_leffler(2.0, 1.0).unwrap(),
            RhoFamily::mittag_leffler(0.5, 1.5).unwrap(),
        ]
    }

    #[test]
    fn rho_values() {
        assert!(close(RhoFamily::factorial().rho(5).unwrap(), 120.0, 1e-12));
        assert_eq!(RhoFamily::rho2().rho(0).unwrap(), 1.0);
        // ρ₂(1) = (√π/2)/Γ(5/2) = 2/3.
        assert!(close(RhoFamily::rho2().rho(1).unwrap(), 2.0 / 3.0, 1e-13));
        let ml = RhoFamily::mittag_leffler(2.0, 1.0).unwrap();
        assert!(close(ml.rho(3).unwrap(), gamma(7.0).unwrap(), 1e-12));
        assert!(close(ml.rho(3).unwrap(), 720.0, 1e-12));
        let big = RhoFamily::factorial();
        assert!(big.rho(200).is_err());
        assert!(big.log_rho(200).is_finite());
        for f in all() {
            assert_eq!(f.log_rho(0), 0.0);
            for n in 1..50 {
                assert!(f.log_rho(n).is_finite());
            }
        }
    }

    #[test]
    fn normalization_examples() {
        let f = RhoFamily::factorial();
        assert!(close(f.normalization(1.0).unwrap(), std::f64::consts::E, 1e-14));
        let sq = RhoFamily::factorial_squared();
        assert!(close(sq.normalization(4.0).unwrap(), bessel_i(0, 4.0).unwrap(), 1e-13));
        for fam in all() {
            assert_eq!(fam.normalization(0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn closed_form_normalization_matches_series() {
        for fam in all() {
            for &x in &[0.1_f64, 1.0, 10.0, 50.0, 2500.0] {
                if let FamilyKind::MittagLeffler { alpha, .. } = fam.kind() {
                    // Series peak sits near n = x^{1/α}/α.
                    if x.powf(1.0 / alpha) / alpha > 1e6 {
                        continue;
                    }
                }
                let c = fam.log_normalization(x).unwrap();
                let s = fam.log_normalization_series(x).unwrap();
                // Relative agreement of N itself: |e^{c-s} - 1| ≈ |c - s|.
                assert!((c - s).abs() < 1e-8, "{} at {x}: {c} vs {s}", fam.name());
            }
        }
    }

    #[test]
    fn kernel_examples() {
        let f = RhoFamily::factorial();
        let one = Complex64::new(1.0, 0.0);
        assert!((f.kernel(one, one).unwrap() - std::f64::consts::E).norm() < 1e-14);
        for fam in all() {
            let k = fam.kernel(Complex64::new(0.0, 0.0), Complex64::new(3.0, -1.0)).unwrap();
            assert_eq!(k, one);
        }
        let sq = RhoFamily::factorial_squared();
        let k = sq.kernel(one, one).unwrap();
        assert!((k.re - bessel_i(0, 2.0).unwrap()).abs() < 1e-14 && k.im.abs() < 1e-15);
    }

    #[test]
    fn kernel_diagonal_is_normalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for fam in all() {
            for _ in 0..100 {
                let r = 5.0 * rng.gen::<f64>().sqrt();
                let z = Complex64::from_polar(r, rng.gen::<f64>() * 2.0 * PI);
                let k = fam.kernel_scaled(z.conj(), z).unwrap();
                let ln = fam.log_normalization(z.norm_sqr()).unwrap();
                let ratio = k.mantissa * (k.log_scale - ln).exp();
                assert!((ratio - 1.0).norm() < 1e-10, "{}", fam.name());
            }
        }
    }

    #[test]
    fn overlap_examples_and_bounds() {
        let f = RhoFamily::factorial();
        let o = f.overlap(Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)).unwrap();
        assert!((o.re - (-2f64).exp()).abs() < 1e-14 && o.im.abs() < 1e-15);
        // factorial_squared, z1 = 1, z2 = -1: Σ(-1)^n/(n!)² / I₀(2).
        let sq = RhoFamily::factorial_squared();
        let mut alt = 0.0;
        let mut fact = 1.0;
        for n in 0..40 {
            if n > 0 {
                fact *= n as f64;
            }
            alt += if n % 2 == 0 { 1.0 } else { -1.0 } / (fact * fact);
        }
        let o = sq.overlap(Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)).unwrap();
        assert!((o.re - alt / bessel_i(0, 2.0).unwrap()).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for fam in all() {
            for _ in 0..200 {
                let z1 = Complex64::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
                let z2 = Complex64::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
                assert!(fam.overlap(z1, z2).unwrap().norm() <= 1.0 + 1e-12);
                assert!((fam.overlap(z1, z1).unwrap() - 1.0).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn weight_examples() {
        assert!(close(RhoFamily::factorial().weight(1.0).unwrap(), (-1f64).exp(), 1e-15));
        let sq = RhoFamily::factorial_squared();
        assert!(close(sq.weight(4.0).unwrap(), 2.0 * bessel_k0(4.0).unwrap(), 1e-14));
        let ml11 = RhoFamily::mittag_leffler(1.0, 1.0).unwrap();
        for &x in &[0.3, 1.0, 7.0] {
            assert!(close(ml11.weight(x).unwrap(), (-x).exp(), 1e-13));
        }
        let custom = RhoFamily::custom("c", |n| 2.0 * lgamma(n as f64 + 1.0), None).unwrap();
        assert!(matches!(custom.weight(1.0), Err(Error::UnsupportedWeight(_))));
        for fam in all() {
            let x = 3.0;
            let lhs = fam.weight(x).unwrap();
            let rhs = PI * fam.tilde_weight(x).unwrap() / fam.normalization(x).unwrap();
            assert!(close(lhs, rhs, 1e-12));
        }
    }

    #[test]
    fn moments_reproduce_rho() {
        let cfg = MomentConfig::default();
        let f = RhoFamily::factorial().moment_check(3, &cfg).unwrap();
        assert!(close(f.computed, 6.0, 1e-8));
        let sq = RhoFamily::factorial_squared().moment_check(2, &cfg).unwrap();
        assert!(close(sq.computed, 4.0, 1e-6));
        let r2 = RhoFamily::rho2().moment_check(1, &cfg).unwrap();
        assert!(close(r2.computed, 2.0 / 3.0, 1e-6));
        for fam in all() {
            for n in 0..=10 {
                let m = fam.moment_check(n, &cfg).unwrap();
                assert!(m.relative_error < 1e-6, "{} n={n}: {m:?}", fam.name());
            }
        }
        assert!(RhoFamily::factorial().moment_check(13, &cfg).is_err());
    }

    #[test]
    fn growth_exponent_table() {
        let e = RhoFamily::factorial().growth_exponents().unwrap();
        assert_eq!((e.a, e.b), (2.0, 0.5));
        let e = RhoFamily::rho2().growth_exponents().unwrap();
        assert_eq!((e.a, e.b), (1.0, 1.0));
        let e = RhoFamily::mittag_leffler(2.0, 1.5).unwrap().growth_exponents().unwrap();
        assert_eq!((e.a, e.b), (1.0, 0.5));
        // α = β = 1 is the factorial family.
        let e = RhoFamily::mittag_leffler(1.0, 1.0).unwrap().growth_exponents().unwrap();
        assert_eq!((e.a, e.b), (2.0, 0.5));
        let c = RhoFamily::custom("c", |n| lgamma(n as f64 + 1.0), None).unwrap();
        assert!(matches!(c.growth_exponents(), Err(Error::MissingExponents(_))));
    }

    #[test]
    fn weight_decay_matches_exponents() {
        for fam in all() {
            let e = fam.growth_exponents().unwrap();
            let mut prev_err = f64::INFINITY;
            for k in 0..8 {
                let r = 10f64 * 4f64.powi(k);
                if r.powf(e.a) > 1e250 {
                    break;
                }
                let ratio = fam.log_weight(r * r).unwrap() / r.powf(e.a);
                let err = (ratio + 2.0 * e.b).abs();
                assert!(err < prev_err + 1e-12, "{}", fam.name());
                prev_err = err;
            }
            assert!(prev_err < 0.02, "{}: {prev_err}", fam.name());
        }
    }

    #[test]
    fn evolution_rotates_labels() {
        let z = evolve_label(Complex64::new(1.0, 0.0), PI, 1.0);
        assert!((z + 1.0).norm() < 1e-15);
        assert_eq!(evolve_label(Complex64::new(2.0, 0.0), 0.0, 3.7), Complex64::new(2.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for fam in all() {
            for _ in 0..20 {
                let z1 = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let z2 = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let (tau, omega) = (rng.gen_range(-5.0..5.0), rng.gen_range(0.1..2.0));
                let e1 = evolve_label(z1, tau, omega);
                assert!((e1.norm() - z1.norm()).abs() <= 1e-15 * z1.norm().max(1.0));
                let before = fam.overlap(z1, z2).unwrap();
                let after = fam.overlap(e1, evolve_label(z2, tau, omega)).unwrap();
                assert!((before.norm() - after.norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rho_ratio_values() {
        assert_eq!(rho_ratio_asymptotics(0), 1.0);
        assert!(close(rho_ratio_asymptotics(1), 2.0 / 3.0, 1e-13));
        let n = 10_000.0_f64;
        let lead = 0.5 * PI.sqrt() / n.sqrt();
        assert!(close(rho_ratio_asymptotics(10_000), lead, 0.01));
    }

    #[test]
    fn custom_families_validated() {
        assert!(RhoFamily::custom("bad0", |n| n as f64 + 1.0, None).is_err());
        // Geometric ρ(n) = 2^n: finite radius of convergence.
        assert!(RhoFamily::custom("geom", |n| n as f64 * 2f64.ln(), None).is_err());
        let c = RhoFamily::custom("fact", |n| lgamma(n as f64 + 1.0), None).unwrap();
        assert!(close(c.normalization(3.0).unwrap(), 3f64.exp(), 1e-12));
    }

    #[test]
    fn custom_table_parsing() {
        let mut text = String::from("# extension: linear\n# exponents: 2 0.5\n");
        for n in 0..40u64 {
            text.push_str(&format!("{n}, {}\n", lgamma(n as f64 + 1.0)));
        }
        let fam = RhoFamily::parse_custom_table("t", &text).unwrap();
        assert_eq!(fam.growth_exponents().unwrap().a, 2.0);
        assert!(close(fam.normalization(2.0).unwrap(), 2f64.exp(), 1e-12));
        assert!(RhoFamily::parse_custom_table("t", "0, 0\n1, 0\n").is_err());
        assert!(RhoFamily::parse_custom_table("t", "# extension: cubic\n0, 0\n").is_err());
        let none = RhoFamily::parse_custom_table("t", "# extension: none\n0, 0\n1, 0\n2, 0.69\n")
            .unwrap();
        assert!(close(none.normalization(1.0).unwrap(), 1.0 + 1.0 + 0.5016, 1e-3));
    }
}
