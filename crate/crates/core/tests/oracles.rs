//! Values frozen from an independent 30-digit mpmath evaluation.

use zeta_moment::estermann::{estermann_continued, hurwitz_zeta, EstermannPoint, Sign};
use zeta_moment::moment::{script_m_value, DirichletPolynomial};
use zeta_moment::specialfn::{log_gamma, reduce_fraction, zeta, ZetaMode};
use zeta_moment::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn close(got: Complex64, want: Complex64, tol: f64) {
    assert!((got - want).norm() <= tol * want.norm().max(1.0), "{got} vs {want}");
}

#[test]
fn zeta_values() {
    let cases = [
        (c(0.5, 100.0), c(2.692_619_885_681_324, -0.020_386_029_602_598_16), ZetaMode::Auto),
        (c(0.5, 100.0), c(2.692_619_885_681_324, -0.020_386_029_602_598_16), ZetaMode::EulerMaclaurin),
        (c(0.5, 1000.0), c(0.356_334_367_194_396_05, 0.931_997_831_232_993_7), ZetaMode::RiemannSiegel),
        (c(2.0, 3.0), c(0.798_021_985_146_275_7, -0.113_744_308_052_938_5), ZetaMode::Auto),
        (c(-1.5, 7.0), c(0.816_176_772_836_566_8, 1.019_644_372_020_443), ZetaMode::Auto),
        (c(0.5, 0.0), c(-1.460_354_508_809_586_8, 0.0), ZetaMode::Auto),
    ];
    for (s, want, mode) in cases {
        // Auto takes Riemann–Siegel on the critical line above height 30
        let rs = mode == ZetaMode::RiemannSiegel || (mode == ZetaMode::Auto && s.re == 0.5 && s.im >= 30.0);
        let tol = if rs { 1e-7 } else { 1e-11 };
        close(zeta(s, mode).unwrap(), want, tol);
    }
}

#[test]
fn hurwitz_and_log_gamma_values() {
    close(hurwitz_zeta(c(1.5, 2.0), 1.0 / 3.0).unwrap(), c(-2.816_697_234_823_374_4, 3.660_809_590_670_215), 1e-11);
    close(hurwitz_zeta(c(0.5, 10.0), 0.75).unwrap(), c(-0.824_665_162_987_16, 0.954_578_748_056_053_4), 1e-11);
    close(log_gamma(c(100.5, 50.0)).unwrap(), c(349.410_420_914_661_8, 232.202_025_647_296), 1e-14);
    close(log_gamma(c(3.0, -4.0)).unwrap(), c(-1.756_626_784_603_784_2, -4.742_664_438_034_658), 1e-13);
    close(log_gamma(c(-0.5, 0.0)).unwrap(), c(1.265_512_123_484_645_4, -std::f64::consts::PI), 1e-13);
}

#[test]
fn estermann_values() {
    let third = reduce_fraction(1, 3).unwrap();
    let d = estermann_continued(&EstermannPoint::new(c(2.0, 1.0), third, Sign::Plus)).unwrap();
    close(d, c(-0.849_637_314_399_916_4, 0.586_225_637_198_141_1), 1e-11);
    let d0 = estermann_continued(&EstermannPoint::new(c(0.0, 0.0), third, Sign::Plus)).unwrap();
    close(d0, c(0.25, 0.096_225_044_864_937_63), 1e-11);
}

#[test]
fn script_m_single_term() {
    let p = DirichletPolynomial::ones(1).unwrap();
    close(script_m_value(&p, c(1.5, 0.0)).unwrap(), c(6.824_504_962_419_627, 0.0), 1e-11);
}

#[test]
fn sharp_moment_values() {
    use zeta_moment::moment::{sharp_moment, MollifiedIntegrand, MomentOptions};
    // mpmath ζ under 16-point Gauss–Legendre, four panels per unit length
    let mi = MollifiedIntegrand::new(DirichletPolynomial::ones(1).unwrap());
    let opts = MomentOptions::default();
    let i100 = sharp_moment(&mi, 0.0, 100.0, &opts).unwrap().i_numeric;
    assert!((i100 / 295.635_099_054_719_1 - 1.0).abs() < 1e-9, "{i100}");
    let i1000 = sharp_moment(&mi, 0.0, 1000.0, &opts).unwrap().i_numeric;
    assert!((i1000 / 5212.507_763_337_782 - 1.0).abs() < 1e-8, "{i1000}");
}
