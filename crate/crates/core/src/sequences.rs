//! Point sequences in the plane and their density `(t, δ)`.
//!
//! `n(R)` counts points with `|ζ| < R`; the density is
//! `t = limsup ln n(R)/ln R`, `δ = limsup n(R)/R^t`. The generated kinds:
//!
//! * rectangular lattice with cell area `A` (spacing `√A`, origin dropped):
//!   density `(2, π/A)`;
//! * one-dimensional lattice `±ℓ, ±2ℓ, …`: density `(1, 2/ℓ)`;
//! * radial `|ζ_N| = (N/δ)^{1/t}`: density `(t, δ)`;
//! * radial-log `|ζ_N| = N^s`: density `(1/s, 1)`.
//!
//! Moduli are stored apart from the points, so phases never influence counts.

use crate::error::{Error, Result};
use crate::numeric::{linear_fit, median};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::cmp::Ordering;
use std::f64::consts::PI;
use std::io::{BufRead, Write};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceKind {
    RectangularLattice { area: f64 },
    OneDLattice { spacing: f64 },
    Radial { t: f64, delta: f64 },
    RadialLog { s: f64 },
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum PhasePolicy {
    /// Lattices keep their geometry, radial sequences lie on the positive axis,
    /// explicit points are kept as given.
    Zero,
    /// Every point gets an independent phase uniform in `[0, 2π)` from a
    /// ChaCha8 stream seeded with `seed`.
    SeededRandom { seed: u64 },
}

/// Name of the generator behind [`PhasePolicy::SeededRandom`].
pub const PHASE_RNG: &str = "ChaCha8";

#[derive(Debug, Clone, PartialEq)]
pub struct PointSequence {
    kind: SequenceKind,
    phase: PhasePolicy,
    points: Vec<Complex64>,
    moduli: Vec<f64>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidInput(format!("{name} = {v} must be positive and finite")));
    }
    Ok(())
}

impl PointSequence {
    /// The first `count` points of a generated sequence, by non-decreasing modulus.
    pub fn generate(kind: SequenceKind, phase: PhasePolicy, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidInput("count must be >= 1".into()));
        }
        let (points, moduli) = match kind {
            SequenceKind::RectangularLattice { area } => {
                positive("area", area)?;
                rectangular_lattice(area, count)
            }
            SequenceKind::OneDLattice { spacing } => {
                positive("spacing", spacing)?;
                let mut pts = Vec::with_capacity(count);
                let mut mods = Vec::with_capacity(count);
                for i in 0..count {
                    let k = (i / 2 + 1) as f64;
                    let m = k * spacing;
                    pts.push(Complex64::new(if i % 2 == 0 { m } else { -m }, 0.0));
                    mods.push(m);
                }
                (pts, mods)
            }
            SequenceKind::Radial { t, delta } => {
                positive("t", t)?;
                positive("delta", delta)?;
                let mods: Vec<f64> = (1..=count)
                    .map(|n| (n as f64 / delta).powf(1.0 / t))
                    .collect();
                (mods.iter().map(|&m| Complex64::new(m, 0.0)).collect(), mods)
            }
            SequenceKind::RadialLog { s } => {
                positive("s", s)?;
                let mods: Vec<f64> = (1..=count).map(|n| (n as f64).powf(s)).collect();
                (mods.iter().map(|&m| Complex64::new(m, 0.0)).collect(), mods)
            }
            SequenceKind::Explicit => {
                return Err(Error::InvalidInput(
                    "explicit sequences are built with PointSequence::explicit".into(),
                ))
            }
        };
        let mut seq = Self {
            kind,
            phase: PhasePolicy::Zero,
            points,
            moduli,
        };
        seq.apply_phases(phase);
        Ok(seq)
    }

    /// An explicit list of nonzero points, reordered by `(modulus, arg)`.
    pub fn explicit(points: Vec<Complex64>, phase: PhasePolicy) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("empty point list".into()));
        }
        if let Some(i) = points.iter().position(|z| z.norm() == 0.0) {
            return Err(Error::InvalidInput(format!(
                "point {i} is the origin; zeros at the origin are handled by the multiplicity m"
            )));
        }
        if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite point".into()));
        }
        let mut pts = points;
        pts.sort_by(|a, b| {
            a.norm()
                .total_cmp(&b.norm())
                .then_with(|| arg_key(*a).total_cmp(&arg_key(*b)))
        });
        let moduli = pts.iter().map(|z| z.norm()).collect();
        let mut seq = Self {
            kind: SequenceKind::Explicit,
            phase: PhasePolicy::Zero,
            points: pts,
            moduli,
        };
        seq.apply_phases(phase);
        Ok(seq)
    }

    fn apply_phases(&mut self, phase: PhasePolicy) {
        self.phase = phase;
        if let PhasePolicy::SeededRandom { seed } = phase {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for (p, &m) in self.points.iter_mut().zip(&self.moduli) {
                let th = 2.0 * PI * rng.gen::<f64>();
                *p = Complex64::from_polar(m, th);
            }
        }
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn phase_policy(&self) -> PhasePolicy {
        self.phase
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn moduli(&self) -> &[f64] {
        &self.moduli
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest modulus; `count_in_disk` is exact for every `R` up to here.
    pub fn reach(&self) -> f64 {
        *self.moduli.last().expect("non-empty")
    }

    /// The sequence with its first `k` points removed.
    pub fn drop_leading(&self, k: usize) -> Result<Self> {
        if k >= self.len() {
            return Err(Error::InvalidInput(format!(
                "cannot drop {k} of {} points",
                self.len()
            )));
        }
        Ok(Self {
            kind: self.kind,
            phase: self.phase,
            points: self.points[k..].to_vec(),
            moduli: self.moduli[k..].to_vec(),
        })
    }

    /// Complex-conjugated points (same moduli, same order of moduli).
    pub fn conjugated(&self) -> Self {
        Self {
            kind: self.kind,
            phase: self.phase,
            points: self.points.iter().map(|z| z.conj()).collect(),
            moduli: self.moduli.clone(),
        }
    }

    /// The first `k` points (`k` capped at the length).
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.len()).max(1);
        Self {
            kind: self.kind,
            phase: self.phase,
            points: self.points[..k].to_vec(),
            moduli: self.moduli[..k].to_vec(),
        }
    }

    /// The density the generator was built for (`None` for explicit lists).
    pub fn nominal_density(&self) -> Option<Density> {
        let (t, delta) = match self.kind {
            SequenceKind::RectangularLattice { area } => (2.0, PI / area),
            SequenceKind::OneDLattice { spacing } => (1.0, 2.0 / spacing),
            SequenceKind::Radial { t, delta } => (t, delta),
            SequenceKind::RadialLog { s } => (1.0 / s, 1.0),
            SequenceKind::Explicit => return None,
        };
        Some(Density::exact(t, delta))
    }

    /// Rough length needed to cover radius `r`, from the nominal density.
    fn required_length(&self, r: f64) -> usize {
        match self.nominal_density() {
            Some(d) => (d.delta * r.powf(d.t) * 1.05).ceil() as usize + 8,
            None => self.len() + 1,
        }
    }

    /// `n(R)`: the number of points with `|ζ| < R`.
    pub fn count_in_disk(&self, r: f64) -> Result<usize> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidInput(format!("radius {r} must be > 0")));
        }
        if r > self.reach() {
            return Err(Error::InsufficientLength {
                len: self.len(),
                reach: self.reach(),
                radius: r,
                required: self.required_length(r),
            });
        }
        Ok(self.moduli.partition_point(|&m| m < r))
    }

    /// `N,re,im,modulus` lines with `N` starting at 1.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "N,re,im,modulus")?;
        for (i, (z, m)) in self.points.iter().zip(&self.moduli).enumerate() {
            writeln!(w, "{},{},{},{}", i + 1, z.re, z.im, m)?;
        }
        Ok(())
    }

    /// Reads an explicit sequence from `re,im` or `N,re,im[,modulus]` lines.
    pub fn read_csv<R: BufRead>(r: R, phase: PhasePolicy) -> Result<Self> {
        let mut pts = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = t.split(',').map(str::trim).collect();
            let nums: std::result::Result<Vec<f64>, _> =
                fields.iter().map(|f| f.parse::<f64>()).collect();
            let nums = match nums {
                Ok(v) => v,
                // A header line.
                Err(_) if lineno == 0 => continue,
                Err(e) => {
                    return Err(Error::Parse {
                        input: line.clone(),
                        position: 0,
                        msg: format!("line {}: {e}", lineno + 1),
                    })
                }
            };
            let z = match nums.len() {
                2 => Complex64::new(nums[0], nums[1]),
                3 | 4 => Complex64::new(nums[1], nums[2]),
                _ => {
                    return Err(Error::Parse {
                        input: line.clone(),
                        position: 0,
                        msg: format!("line {}: expected `re,im` or `N,re,im`", lineno + 1),
                    })
                }
            };
            pts.push(z);
        }
        Self::explicit(pts, phase)
    }
}

fn arg_key(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

fn rectangular_lattice(area: f64, count: usize) -> (Vec<Complex64>, Vec<f64>) {
    let h = area.sqrt();
    // Collect the full disk N² + M² <= b², large enough to hold `count` points.
    let mut b = ((count as f64 / PI).sqrt() + 2.0).ceil() as i64;
    let mut cells: Vec<(i64, i64)>;
    loop {
        let b2 = b * b;
        cells = Vec::new();
        for n in -b..=b {
            for m in -b..=b {
                let k = n * n + m * m;
                if k > 0 && k <= b2 {
                    cells.push((n, m));
                }
            }
        }
        if cells.len() >= count {
            break;
        }
        b += b / 4 + 1;
    }
    cells.sort_by(|&(n1, m1), &(n2, m2)| {
        (n1 * n1 + m1 * m1).cmp(&(n2 * n2 + m2 * m2)).then_with(|| {
            let a1 = arg_key(Complex64::new(n1 as f64, m1 as f64));
            let a2 = arg_key(Complex64::new(n2 as f64, m2 as f64));
            a1.total_cmp(&a2)
        })
    });
    cells.truncate(count);
    let pts = cells
        .iter()
        .map(|&(n, m)| Complex64::new(h * n as f64, h * m as f64))
        .collect();
    let mods = cells
        .iter()
        .map(|&(n, m)| h * ((n * n + m * m) as f64).sqrt())
        .collect();
    (pts, mods)
}

/// A point-sequence density `(t, δ)`, compared lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Density {
    pub t: f64,
    pub delta: f64,
    /// Uncertainty of `t` (zero for exact parameters).
    pub residual: f64,
    /// Uncertainty of `δ` (zero for exact parameters).
    pub delta_residual: f64,
    /// Radii used in the estimate (empty for exact parameters).
    pub radii: Vec<f64>,
}

impl Density {
    pub fn exact(t: f64, delta: f64) -> Self {
        Self {
            t,
            delta,
            residual: 0.0,
            delta_residual: 0.0,
            radii: Vec::new(),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self).map_err(|e| Error::InvalidInput(e.to_string()))
    }
}

/// Equality tolerances for [`compare`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityTolerance {
    /// Absolute tolerance on `t`.
    pub t: f64,
    /// Tolerance on `δ` relative to the larger of the two.
    pub delta_rel: f64,
}

impl DensityTolerance {
    pub const EXACT: Self = Self {
        t: 1e-9,
        delta_rel: 1e-9,
    };
}

impl Default for DensityTolerance {
    fn default() -> Self {
        Self::EXACT
    }
}

/// Lexicographic comparison: `t` first, then `δ`, with explicit equality bands.
pub fn compare(d1: &Density, d2: &Density, tol: &DensityTolerance) -> Ordering {
    if (d1.t - d2.t).abs() > tol.t {
        return d1.t.total_cmp(&d2.t);
    }
    let scale = d1.delta.abs().max(d2.delta.abs());
    if (d1.delta - d2.delta).abs() <= tol.delta_rel * scale {
        Ordering::Equal
    } else {
        d1.delta.total_cmp(&d2.delta)
    }
}

/// Default radius grid: 16 geometric points over the two decades below the reach.
pub fn default_density_radii(seq: &PointSequence) -> Vec<f64> {
    let r_max = seq.reach() * (1.0 - 1e-9);
    crate::growth::geometric_radii(r_max / 100.0, r_max, 16)
}

/// Estimates `(t, δ)` from `n(R)` on a radius grid.
///
/// `t` is the least-squares slope of `ln n` against `ln R` on the upper half
/// of the grid and `δ` the median of `n/R^t` there. The reported residuals
/// add to the fit's RMS how far the estimate moves when the whole grid or
/// only its top quarter is used, which captures finite-size offsets in `n(R)`.
pub fn estimate_density(seq: &PointSequence, radii: &[f64]) -> Result<Density> {
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
    let counts: Vec<usize> = radii
        .iter()
        .map(|&r| seq.count_in_disk(r))
        .collect::<Result<_>>()?;
    if counts[0] == counts[counts.len() - 1] {
        return Err(Error::Degenerate("n(R) is constant over the radius grid".into()));
    }
    let usable: Vec<usize> = (0..radii.len()).filter(|&k| counts[k] > 0).collect();
    let half = radii.len() / 2;
    let tail: Vec<usize> = usable.iter().copied().filter(|&k| k >= half).collect();
    if tail.len() < 4 {
        return Err(Error::Degenerate(
            "too few nonzero counts on the upper half of the radii".into(),
        ));
    }
    let fit = |idx: &[usize]| {
        let xs: Vec<f64> = idx.iter().map(|&k| radii[k].ln()).collect();
        let ys: Vec<f64> = idx.iter().map(|&k| (counts[k] as f64).ln()).collect();
        linear_fit(&xs, &ys)
    };
    let (t, _, rms) = fit(&tail);
    let (t_all, _, _) = if usable.len() >= 2 { fit(&usable) } else { (t, 0.0, 0.0) };
    let top = &tail[tail.len() - tail.len().div_ceil(2).max(2)..];
    let (t_top, _, _) = fit(top);
    let ratio = |idx: &[usize]| {
        median(
            &idx.iter()
                .map(|&k| counts[k] as f64 / radii[k].powf(t))
                .collect::<Vec<_>>(),
        )
    };
    let delta = ratio(&tail);
    let delta_all = ratio(&usable);
    let delta_top = ratio(top);
    let residual = rms + (t - t_all).abs() + (t - t_top).abs();
    let delta_residual = delta * residual * radii[radii.len() - 1].ln().abs()
        + (delta - delta_all).abs()
        + (delta - delta_top).abs();
    Ok(Density {
        t,
        delta,
        residual,
        delta_residual,
        radii,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(kind: SequenceKind, count: usize) -> PointSequence {
        PointSequence::generate(kind, PhasePolicy::Zero, count).unwrap()
    }

    fn density_ok(d: &Density, t: f64, delta: f64) -> bool {
        (d.t - t).abs() <= 0.02 && (d.delta - delta).abs() <= 0.03 * delta
    }

    #[test]
    fn generation_examples() {
        let r = gen(SequenceKind::Radial { t: 2.0, delta: 1.0 }, 4);
        let want = [1.0, 2f64.sqrt(), 3f64.sqrt(), 2.0];
        for (m, w) in r.moduli().iter().zip(want) {
            assert!((m - w).abs() < 1e-15);
        }
        let l = gen(SequenceKind::OneDLattice { spacing: 1.0 }, 10);
        assert_eq!(l.moduli(), &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0, 5.0, 5.0]);
        let lat = gen(SequenceKind::RectangularLattice { area: PI }, 400);
        let n = lat.count_in_disk(10.0).unwrap() as f64;
        assert!((n - 100.0).abs() < 4.0 * 10.0, "{n}");
        assert!(lat.moduli().iter().all(|&m| m > 0.0));
        assert!(lat.moduli().windows(2).all(|w| w[0] <= w[1]));
        assert!(PointSequence::generate(SequenceKind::Radial { t: -1.0, delta: 1.0 }, PhasePolicy::Zero, 3).is_err());
        assert!(PointSequence::generate(SequenceKind::OneDLattice { spacing: 1.0 }, PhasePolicy::Zero, 0).is_err());
    }

    #[test]
    fn lattice_is_complete_up_to_reach() {
        let a = 0.7;
        let lat = gen(SequenceKind::RectangularLattice { area: a }, 3000);
        let r = lat.reach() * 0.999;
        let h = a.sqrt();
        let b = (r / h).ceil() as i64 + 1;
        let mut brute = 0;
        for n in -b..=b {
            for m in -b..=b {
                let z = h * ((n * n + m * m) as f64).sqrt();
                if (n, m) != (0, 0) && z < r {
                    brute += 1;
                }
            }
        }
        assert_eq!(lat.count_in_disk(r).unwrap(), brute);
    }

    #[test]
    fn count_examples() {
        let r = gen(SequenceKind::Radial { t: 2.0, delta: 1.0 }, 20);
        assert_eq!(r.count_in_disk(2.5).unwrap(), 6);
        let l = gen(SequenceKind::OneDLattice { spacing: 2.0 }, 20);
        assert_eq!(l.count_in_disk(7.0).unwrap(), 6);
        assert_eq!(l.count_in_disk(1.0).unwrap(), 0);
        // Points exactly on the circle are excluded.
        assert_eq!(l.count_in_disk(6.0).unwrap(), 4);
        match l.count_in_disk(100.0) {
            Err(Error::InsufficientLength { required, .. }) => assert!(required >= 100),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn radial_counts_follow_boundary_convention() {
        for &(t, delta) in &[(1.0, 1.0), (2.0, 1.0), (3.0, 0.5), (1.5, 2.5)] {
            let s = gen(SequenceKind::Radial { t, delta }, 5000);
            let mut prev = 0;
            for k in 1..200 {
                // Generic radii, away from the lattice moduli themselves.
                let r = s.reach() * (k as f64 + 0.371) / 201.0;
                let n = s.count_in_disk(r).unwrap();
                let x: f64 = delta * r.powf(t);
                assert!(n == x.ceil() as usize - 1 || n == x.floor() as usize, "{t} {delta} {r}");
                assert!(n >= prev);
                prev = n;
            }
        }
    }

    #[test]
    fn density_examples() {
        let lat = gen(SequenceKind::RectangularLattice { area: PI / 2.0 }, 21_000);
        let radii = crate::growth::geometric_radii(1.0, 100.0, 16);
        let d = estimate_density(&lat, &radii).unwrap();
        assert!(density_ok(&d, 2.0, 2.0), "{d:?}");
        let rad = PointSequence::generate(
            SequenceKind::Radial { t: 3.0, delta: 0.5 },
            PhasePolicy::SeededRandom { seed: 7 },
            600_000,
        )
        .unwrap();
        let d = estimate_density(&rad, &default_density_radii(&rad)).unwrap();
        assert!(density_ok(&d, 3.0, 0.5), "{d:?}");
        let line = gen(SequenceKind::OneDLattice { spacing: 0.5 }, 2000);
        let d = estimate_density(&line, &default_density_radii(&line)).unwrap();
        assert!(density_ok(&d, 1.0, 4.0), "{d:?}");
        let rl = gen(SequenceKind::RadialLog { s: 0.5 }, 100_000);
        let d = estimate_density(&rl, &default_density_radii(&rl)).unwrap();
        assert!(density_ok(&d, 2.0, 1.0), "{d:?}");
    }

    #[test]
    fn density_is_phase_invariant() {
        let kinds = [
            SequenceKind::RectangularLattice { area: 1.3 },
            SequenceKind::OneDLattice { spacing: 0.7 },
            SequenceKind::Radial { t: 1.5, delta: 2.0 },
            SequenceKind::RadialLog { s: 0.8 },
        ];
        for kind in kinds {
            let a = PointSequence::generate(kind, PhasePolicy::Zero, 5000).unwrap();
            let b = PointSequence::generate(kind, PhasePolicy::SeededRandom { seed: 3 }, 5000).unwrap();
            assert_ne!(a.points(), b.points());
            let radii = default_density_radii(&a);
            assert_eq!(estimate_density(&a, &radii).unwrap(), estimate_density(&b, &radii).unwrap());
        }
    }

    #[test]
    fn density_is_prefix_stable() {
        let kinds = [
            SequenceKind::RectangularLattice { area: PI / 2.0 },
            SequenceKind::OneDLattice { spacing: 0.5 },
            SequenceKind::Radial { t: 1.0, delta: 1.0 },
            SequenceKind::Radial { t: 2.0, delta: 1.0 },
            SequenceKind::Radial { t: 3.0, delta: 0.5 },
        ];
        for kind in kinds {
            let s = gen(kind, 100_000);
            let radii = default_density_radii(&s);
            let a = estimate_density(&s, &radii).unwrap();
            let b = estimate_density(&s.drop_leading(50).unwrap(), &radii).unwrap();
            let tol_t = a.residual.max(b.residual);
            let tol_d = a.delta_residual.max(b.delta_residual);
            assert!((a.t - b.t).abs() < tol_t, "{kind:?}: {a:?} {b:?}");
            assert!((a.delta - b.delta).abs() < tol_d, "{kind:?}: {a:?} {b:?}");
        }
    }

    #[test]
    fn degenerate_density() {
        let s = PointSequence::explicit(vec![Complex64::new(1.0, 0.0); 3], PhasePolicy::Zero)
            .unwrap();
        let radii = crate::growth::geometric_radii(0.001, 0.5, 10);
        assert!(matches!(estimate_density(&s, &radii), Err(Error::Degenerate(_))));
        assert!(PointSequence::explicit(vec![Complex64::new(0.0, 0.0)], PhasePolicy::Zero).is_err());
    }

    #[test]
    fn compare_examples() {
        let tol = DensityTolerance::EXACT;
        let d = Density::exact;
        assert_eq!(compare(&d(1.0, 5.0), &d(2.0, 0.1), &tol), Ordering::Less);
        assert_eq!(compare(&d(2.0, 1.0), &d(2.0, 3.0), &tol), Ordering::Less);
        assert_eq!(compare(&d(2.0, 1.0), &d(2.0, 1.0), &tol), Ordering::Equal);
        assert_eq!(compare(&d(2.0, 3.0), &d(2.0, 1.0), &tol), Ordering::Greater);
    }

    #[test]
    fn explicit_ordering_and_csv() {
        let pts = vec![Complex64::new(0.0, 2.0), Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)];
        let s = PointSequence::explicit(pts, PhasePolicy::Zero).unwrap();
        assert_eq!(s.points()[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.points()[1], Complex64::new(-1.0, 0.0));
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = PointSequence::read_csv(&buf[..], PhasePolicy::Zero).unwrap();
        assert_eq!(back.points(), s.points());
        assert_eq!(s.conjugated().points()[2], Complex64::new(0.0, -2.0));
    }
}
