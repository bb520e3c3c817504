use proptest::prelude::*;

use zeta_moment::contour::{lemma26_pointwise_with, PoleOffset, FROZEN_CONSTANTS, GeometryRegion};
use zeta_moment::estermann::{estermann_continued, estermann_direct, EstermannPoint, Sign};
use zeta_moment::kernel::KernelCdf;
use zeta_moment::moment::{
    gcd_sum, gcd_sum_brute, integrand, main_term, main_term_unsymmetrized, poly_eval, DirichletPolynomial,
    MollifiedIntegrand, DEFAULT_B0,
};
use zeta_moment::specialfn::{chi_factor, reduce_fraction, zeta, ZetaMode};
use zeta_moment::Complex64;

fn coeffs(max: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex64::new(a, b)), 1..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_eval_matches_naive_sum(a in coeffs(30), re in -1.0..3.0f64, im in -50.0..50.0f64) {
        let s = Complex64::new(re, im);
        let p = DirichletPolynomial::custom(a.clone()).unwrap();
        let naive: Complex64 = a.iter().enumerate().map(|(i, x)| x * Complex64::new((i + 1) as f64, 0.0).powc(-s)).sum();
        let scale: f64 = a.iter().enumerate().map(|(i, x)| x.norm() * ((i + 1) as f64).powf(-re)).sum();
        prop_assert!((poly_eval(&p, s) - naive).norm() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn integrand_is_nonnegative(a in coeffs(8), t in 0.0..400.0f64) {
        let mi = MollifiedIntegrand::new(DirichletPolynomial::custom(a).unwrap());
        prop_assert!(integrand(&mi, t).unwrap() >= 0.0);
    }

    #[test]
    fn main_term_is_real(a in coeffs(10), t in 50.0..5000.0f64) {
        let p = DirichletPolynomial::custom(a).unwrap();
        let full = main_term_unsymmetrized(&p, t, DEFAULT_B0);
        let paired = main_term(&p, t, DEFAULT_B0);
        let scale = paired.abs().max(full.norm()).max(1.0);
        prop_assert!(full.im.abs() <= 1e-12 * scale);
        prop_assert!((full.re - paired).abs() <= 1e-11 * scale);
    }

    #[test]
    fn gcd_grouping_matches_brute_force(m in 1usize..=200) {
        let b = gcd_sum_brute(m);
        prop_assert!((gcd_sum(m) - b).abs() <= 1e-13 * b);
    }

    #[test]
    fn zeta_functional_equation(re in -2.0..3.0f64, im in -40.0..40.0f64) {
        let s = Complex64::new(re, im);
        prop_assume!((s - 1.0).norm() > 0.1 && s.norm() > 0.1);
        let lhs = zeta(Complex64::new(1.0, 0.0) - s, ZetaMode::EulerMaclaurin).unwrap();
        let rhs = chi_factor(s).unwrap() * zeta(s, ZetaMode::EulerMaclaurin).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1.0));
    }

    #[test]
    fn zeta_commutes_with_conjugation(re in -1.0..3.0f64, im in 0.5..60.0f64) {
        let s = Complex64::new(re, im);
        let a = zeta(s, ZetaMode::Auto).unwrap();
        let b = zeta(s.conj(), ZetaMode::Auto).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn riemann_siegel_matches_euler_maclaurin(t in 30.0..3000.0f64) {
        let s = Complex64::new(0.5, t);
        let rs = zeta(s, ZetaMode::RiemannSiegel).unwrap();
        let em = zeta(s, ZetaMode::EulerMaclaurin).unwrap();
        prop_assert!((rs - em).norm() <= 1e-5);
    }

    #[test]
    fn modular_inverse_is_inverse(h in 0u64..500, k in 1u64..500) {
        let f = reduce_fraction(h, k).unwrap();
        prop_assert_eq!(f.h_star * f.gcd, h);
        prop_assert_eq!((f.h_bar_star * f.h_star) % f.k_star, 1 % f.k_star);
    }

    #[test]
    fn estermann_continuation_extends_series(h in 0u64..12, k in 1u64..12, re in 2.5..4.0f64, im in -10.0..10.0f64) {
        let p = EstermannPoint::new(Complex64::new(re, im), reduce_fraction(h, k).unwrap(), Sign::Plus);
        let direct = estermann_direct(&p, 20_000).unwrap();
        let cont = estermann_continued(&p).unwrap();
        prop_assert!((direct.value - cont).norm() <= direct.tail_bound + 1e-11);
    }

    #[test]
    fn omega_stays_in_unit_band(t in -200.0..1200.0f64) {
        let cdf = KernelCdf::new(1000.0);
        let w = cdf.omega(t, 0.0, 1000.0);
        // the kernel is complex; its imaginary part only survives near the edges
        prop_assert!(w.re >= -1e-9 && w.re <= 1.0 + 1e-9 && w.im.abs() <= 0.1 / 1000f64.sqrt());
        let split = cdf.omega(t, 0.0, 400.0) + cdf.omega(t, 400.0, 1000.0);
        prop_assert!((split - w).norm() <= 1e-12);
    }

    #[test]
    fn geometry_bounds_hold_off_the_edge(theta in 0.01..0.5f64, frac in 0.0..1.0f64, x in 0.0..10.0f64, c in 1.05..1.95f64) {
        let delta = (theta * frac).max(1e-6);
        let pt = lemma26_pointwise_with(x, delta, theta, c, PoleOffset::default(), &FROZEN_CONSTANTS).unwrap();
        if pt.region != GeometryRegion::Edge {
            prop_assert!(pt.failures.is_empty(), "{:?}", pt);
        }
    }
}
