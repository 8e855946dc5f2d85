use genbargmann::bargmann::{BargmannFunction, InnerQuadConfig};
use genbargmann::completeness::{
    build_witness, classify, finite_rank_diagnostic, gram_matrix, projected_witness_residual,
    ClassifyTolerance, RankConfig, VerdictKind, WitnessConfig,
};
use genbargmann::family::RhoFamily;
use genbargmann::growth::{
    estimate_order_type, geometric_radii, order_type_from_coefficients, GrowthConfig, LogModulusFn,
    TaylorSeries,
};
use genbargmann::sequences::{default_density_radii, estimate_density, Density, PhasePolicy, PointSequence, SequenceKind};
use genbargmann::specfun::{bessel_i, bessel_k0, log_mittag_leffler};
use genbargmann::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn family(i: usize) -> RhoFamily {
    RhoFamily::named_families().swap_remove(i % 4)
}

fn point(max_r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max_r, 0.0..std::f64::consts::TAU).prop_map(|(r, th)| Complex64::from_polar(r, th))
}

fn amplitudes(dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Complex64::new(a, b)), 1..=dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bessel_monotone_and_positive(x in 0.01..80.0f64, dx in 1e-3..5.0f64) {
        let (i0, i1) = (bessel_i(0, x).unwrap(), bessel_i(0, x + dx).unwrap());
        prop_assert!(i0 > 0.0 && i1 > i0);
        let (k0, k1) = (bessel_k0(x).unwrap(), bessel_k0(x + dx).unwrap());
        prop_assert!(k1 > 0.0 && k1 < k0);
    }

    #[test]
    fn mittag_leffler_one_one_is_exp(y in 0.0..100.0f64) {
        let l = log_mittag_leffler(1.0, 1.0, y).unwrap();
        prop_assert!((l - y).abs() <= 1e-9 * y.max(1.0));
    }

    #[test]
    fn kernel_diagonal_is_normalization(i in 0usize..4, z in point(5.0)) {
        let f = family(i);
        let k = f.kernel_scaled(z.conj(), z).unwrap();
        let n = f.log_normalization(z.norm_sqr()).unwrap();
        prop_assert!((k.ln_abs() - n).exp_m1().abs() < 1e-10);
        prop_assert!(k.mantissa.im.abs() <= 1e-12 * k.mantissa.norm());
    }

    #[test]
    fn overlaps_are_bounded(i in 0usize..4, z1 in point(8.0), z2 in point(8.0)) {
        let ov = family(i).overlap(z1, z2).unwrap();
        prop_assert!(ov.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn evaluation_at_origin_is_first_amplitude(i in 0usize..4, a in amplitudes(12)) {
        let f = family(i);
        let s = BargmannFunction::from_fock(&f, a.clone()).unwrap();
        prop_assert_eq!(s.evaluate(Complex64::new(0.0, 0.0)), a[0]);
    }

    #[test]
    fn series_inner_product_is_sesquilinear(
        i in 0usize..4,
        a in amplitudes(10),
        b in amplitudes(10),
        c in amplitudes(10),
        lam in (-2.0..2.0f64, -2.0..2.0f64),
    ) {
        let f = family(i);
        let lam = Complex64::new(lam.0, lam.1);
        let (fa, fb, fc) = (
            BargmannFunction::from_fock(&f, a.clone()).unwrap(),
            BargmannFunction::from_fock(&f, b.clone()).unwrap(),
            BargmannFunction::from_fock(&f, c.clone()).unwrap(),
        );
        let ip = |x: &BargmannFunction, y: &BargmannFunction| BargmannFunction::inner_product_series(x, y).unwrap();
        let ab = ip(&fa, &fb);
        prop_assert!((ab - ip(&fb, &fa).conj()).norm() <= 1e-10 * ab.norm().max(1.0));
        let n = b.len().max(c.len());
        let comb: Vec<Complex64> = (0..n)
            .map(|k| b.get(k).copied().unwrap_or_default() + lam * c.get(k).copied().unwrap_or_default())
            .collect();
        let lhs = ip(&fa, &BargmannFunction::from_fock(&f, comb).unwrap());
        let rhs = ab + lam * ip(&fa, &fc);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn pointwise_bound_holds(i in 0usize..4, a in amplitudes(30), seed in 0u64..1000) {
        let s = BargmannFunction::from_fock(&family(i), a).unwrap();
        prop_assert!(s.pointwise_bound_check(32, 4.0, seed).unwrap() <= 1.0 + 1e-9);
    }

    #[test]
    fn count_in_disk_is_monotone(t in 0.5..3.0f64, delta in 0.2..5.0f64, r1 in 0.1..1.0f64, r2 in 0.1..1.0f64) {
        let s = PointSequence::generate(SequenceKind::Radial { t, delta }, PhasePolicy::Zero, 4000).unwrap();
        let (a, b) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let (na, nb) = (
            s.count_in_disk(a * s.reach()).unwrap(),
            s.count_in_disk(b * s.reach()).unwrap(),
        );
        prop_assert!(na <= nb);
        let x = delta * (b * s.reach()).powf(t);
        prop_assert!(nb == x.ceil() as usize - 1 || nb == x.floor() as usize);
    }

    #[test]
    fn classify_is_monotone(t in 0.5..3.0f64, d1 in 0.05..4.0f64, d2 in 0.05..4.0f64, i in 0usize..4) {
        let f = family(i);
        let rank = |k: VerdictKind| match k {
            VerdictKind::Undercomplete => 0,
            VerdictKind::Boundary => 1,
            VerdictKind::Overcomplete => 2,
        };
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let v = |d| classify(&f, &Density::exact(t, d), &ClassifyTolerance::EXACT).map(|v| rank(v.kind));
        if let (Ok(a), Ok(b)) = (v(lo), v(hi)) {
            prop_assert!(a <= b);
        }
        let e = f.growth_exponents().unwrap();
        let w = |t| classify(&f, &Density::exact(t, lo), &ClassifyTolerance::EXACT).map(|v| rank(v.kind));
        if let (Ok(a), Ok(b)) = (w(e.a - 0.1), w(e.a + 0.1)) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn gram_is_hermitian_psd(i in 0usize..4, pts in prop::collection::vec(point(3.0), 1..40)) {
        let g = gram_matrix(&family(i), &pts, 400).unwrap();
        let m = &g.matrix;
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                prop_assert!((m[(r, c)] - m[(c, r)].conj()).norm() < 1e-14);
            }
        }
        prop_assert!(g.eigenvalues()[0] >= -1e-10);
    }

    #[test]
    fn witness_bounds_smallest_singular_value(pts in prop::collection::vec(point(1.5), 5..45)) {
        prop_assume!(pts.iter().all(|z| z.norm() > 1e-3));
        let f = RhoFamily::factorial();
        let seq = PointSequence::explicit(pts.clone(), PhasePolicy::Zero).unwrap();
        let w = build_witness(&f, &seq, Some(0), 0, pts.len(), 80, &WitnessConfig::default()).unwrap();
        let d = finite_rank_diagnostic(&f, seq.points(), 30, &RankConfig::default()).unwrap();
        let cert = projected_witness_residual(&f, seq.points(), 30, &w.witness).unwrap();
        prop_assert!(d.residual_vector_norm <= cert + 1e-12, "{} > {}", d.residual_vector_norm, cert);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn density_is_phase_invariant(kind in (0usize..4, 0.3..3.0f64), seed in any::<u64>()) {
        let k = match kind.0 {
            0 => SequenceKind::RectangularLattice { area: kind.1 },
            1 => SequenceKind::OneDLattice { spacing: kind.1 },
            2 => SequenceKind::Radial { t: kind.1, delta: 1.0 },
            _ => SequenceKind::RadialLog { s: kind.1 / 3.0 + 0.2 },
        };
        let a = PointSequence::generate(k, PhasePolicy::Zero, 3000).unwrap();
        let b = PointSequence::generate(k, PhasePolicy::SeededRandom { seed }, 3000).unwrap();
        let radii = default_density_radii(&a);
        prop_assert_eq!(estimate_density(&a, &radii).unwrap(), estimate_density(&b, &radii).unwrap());
    }

    #[test]
    fn series_and_quadrature_inner_products_agree(i in 0usize..3, a in amplitudes(24), b in amplitudes(24)) {
        // The three families with closed-form weights.
        let f = family(i);
        let (fa, fb) = (
            BargmannFunction::from_fock(&f, a).unwrap(),
            BargmannFunction::from_fock(&f, b).unwrap(),
        );
        let s = BargmannFunction::inner_product_series(&fa, &fb).unwrap();
        let cfg = InnerQuadConfig { angular_nodes: Some(64), ..InnerQuadConfig::default() };
        let q = BargmannFunction::inner_product_quadrature(&fa, &fb, &cfg).unwrap();
        let scale = (fa.norm_sqr() * fb.norm_sqr()).sqrt();
        prop_assert!((s - q).norm() <= 1e-6 * scale, "{s} {q}");
    }

    #[test]
    fn dense_sets_refuse_witnesses(area in 0.3..3.1f64, i in 0usize..3) {
        let f = RhoFamily::factorial();
        let kinds = [
            SequenceKind::RectangularLattice { area },
            SequenceKind::Radial { t: 2.5, delta: area },
            SequenceKind::Radial { t: 2.0, delta: 1.05 + area },
        ];
        let seq = PointSequence::generate(kinds[i], PhasePolicy::Zero, 50).unwrap();
        let v = classify(&f, &seq.nominal_density().unwrap(), &ClassifyTolerance::EXACT).unwrap();
        prop_assert_eq!(v.kind, VerdictKind::Overcomplete);
        let r = build_witness(&f, &seq, None, 0, 50, 60, &WitnessConfig::default());
        prop_assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn undercomplete_witness_is_orthogonal(t in 0.5..1.0f64, delta in 0.5..2.0f64, seed in any::<u64>()) {
        let f = RhoFamily::factorial();
        let full = PointSequence::generate(SequenceKind::Radial { t, delta }, PhasePolicy::SeededRandom { seed }, 200).unwrap();
        let v = classify(&f, &full.nominal_density().unwrap(), &ClassifyTolerance::EXACT).unwrap();
        prop_assert_eq!(v.kind, VerdictKind::Undercomplete);
        let inside = full.moduli().iter().filter(|&&m| m <= 20.0).count();
        prop_assume!(inside >= 1);
        let w = build_witness(&f, &full, None, 0, inside, 300, &WitnessConfig::default()).unwrap();
        prop_assert!(w.max_orthogonality_residual < 1e-8, "{}", w.max_orthogonality_residual);
    }

    #[test]
    fn coherent_state_estimators_agree(re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let f = RhoFamily::factorial();
        let z = Complex64::new(re, im);
        let radii = geometric_radii(2.0, 200.0, 16);
        let t = TaylorSeries::coherent(&f, z, 200.0).unwrap();
        let mm = estimate_order_type(&t, &radii, &GrowthConfig::default()).unwrap();
        let co = order_type_from_coefficients(t.log_abs_coefficients()).unwrap();
        prop_assert!((mm.order - co.order).abs() <= 0.05, "{mm:?} {co:?}");
        prop_assert!((mm.type_ - co.type_).abs() <= 0.1 * co.type_, "{mm:?} {co:?}");
    }
}

#[test]
fn synthetic_exponentials_recover_order_and_type() {
    let radii = geometric_radii(1.0, 100.0, 16);
    let mut n = 0;
    for r in [0.5, 1.0, 2.0, 3.0] {
        for s in [0.3, 1.0, 2.0] {
            let f = LogModulusFn(move |z: Complex64| s * z.norm().powf(r));
            let g = estimate_order_type(&f, &radii, &GrowthConfig::default()).unwrap();
            assert!((g.order - r).abs() <= 0.05 && (g.type_ - s).abs() <= 0.1 * s, "{r} {s} {g:?}");
            n += 1;
        }
    }
    // Integral orders as genuine entire functions exp(s z^r).
    for r in [1u32, 2, 3] {
        for s in [0.5, 1.5] {
            let f = LogModulusFn(move |z: Complex64| s * z.powu(r).re);
            let g = estimate_order_type(&f, &radii, &GrowthConfig::default()).unwrap();
            assert!((g.order - r as f64).abs() <= 0.05 && (g.type_ - s).abs() <= 0.1 * s, "{r} {s} {g:?}");
            n += 1;
        }
    }
    assert!(n >= 18);
}

#[test]
fn weight_decay_matches_exponents() {
    for f in RhoFamily::named_families() {
        let e = f.growth_exponents().unwrap();
        let mut prev = f64::INFINITY;
        for x in geometric_radii(10.0, 1e3, 12) {
            let ratio = f.log_weight(x * x).unwrap() / x.powf(e.a);
            let dev = (ratio + 2.0 * e.b).abs();
            assert!(dev <= prev * 1.01 + 1e-12, "{} x={x}: {ratio}", f.name());
            prev = dev;
        }
        assert!(prev < 2e-2 * e.b, "{}: {prev}", f.name());
    }
}
