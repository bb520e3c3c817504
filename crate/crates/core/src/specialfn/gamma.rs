use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use super::bernoulli_2k;
use crate::error::{Error, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
/// Stirling terms used once `Re w` has been shifted past [`SHIFT_TARGET`].
const STIRLING_TERMS: usize = 12;
const SHIFT_TARGET: f64 = 10.0;

/// The Stirling correction `Σ_{k=1}^{12} B_{2k} / (2k(2k−1) w^{2k−1})`.
///
/// Accurate to double precision for `|w| ≥ 10` away from the negative axis.
pub fn stirling_series(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..=STIRLING_TERMS {
        let kk = k as f64;
        sum += pow * (bernoulli_2k(k) / (2.0 * kk * (2.0 * kk - 1.0)));
        pow *= inv2;
    }
    sum
}

/// Principal branch of `log Γ(z)`, analytic off the negative real axis.
///
/// On the negative real axis the value is the limit from the upper half-plane,
/// so `log_gamma(-0.5)` has imaginary part `-π`.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain(format!("log_gamma of non-finite {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole(format!("{z}")));
    }
    if z.im < 0.0 {
        return log_gamma(z.conj()).map(|v| v.conj());
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < SHIFT_TARGET {
        shift += w.ln();
        w += 1.0;
    }
    Ok((w - 0.5) * w.ln() - w + HALF_LN_2PI + stirling_series(w) - shift)
}

/// `log(e^λ Γ(λ + ix) λ^{−λ−ix})`, computed without forming either factor.
///
/// The real part is the log-magnitude of the smoothing-kernel integrand at
/// offset `x = u − t`; the imaginary part is its argument. Requires `λ ≥ 10`
/// so the Stirling series converges to double precision.
pub fn scaled_kernel_exponent(lambda: f64, x: f64) -> Complex64 {
    let tau = x / lambda;
    let half_l1p = 0.5 * tau.mul_add(tau, 0.0).ln_1p();
    let at = tau.atan();
    let s = stirling_series(Complex64::new(lambda, x));
    let re = -0.5 * lambda.ln() + HALF_LN_2PI + (lambda - 0.5) * half_l1p - x * at + s.re;
    // λ·atan τ − x cancels to O(x³/λ²); sum the cancelling parts first
    let im = (lambda * at - x) - 0.5 * at + x * half_l1p + s.im;
    Complex64::new(re, im)
}

/// `λ + Re log Γ(λ + ix) − λ log λ`, the log-magnitude of `e^λ Γ(λ+ix) λ^{−λ−ix}`.
pub fn stirling_magnitude_exponent(lambda: f64, x: f64) -> f64 {
    scaled_kernel_exponent(lambda, x).re
}

/// A logarithm of `cos w` that stays accurate when `|Im w|` is large.
///
/// Not the principal branch in general; intended for exponentiation.
pub fn log_cos(w: Complex64) -> Complex64 {
    let i = Complex64::i();
    if w.im >= 0.0 {
        -i * w + (1.0 + (2.0 * i * w).exp()).ln() - LN_2
    } else {
        i * w + (1.0 + (-2.0 * i * w).exp()).ln() - LN_2
    }
}

/// A logarithm of `sin w`; see [`log_cos`].
pub fn log_sin(w: Complex64) -> Complex64 {
    log_cos(w - PI / 2.0)
}

/// `cot w` without overflow for large `|Im w|`.
pub fn cot(w: Complex64) -> Complex64 {
    let i = Complex64::i();
    if w.im > 0.0 {
        let e = (2.0 * i * w).exp();
        i * (e + 1.0) / (e - 1.0)
    } else if w.im < 0.0 {
        let e = (-2.0 * i * w).exp();
        i * (1.0 + e) / (1.0 - e)
    } else {
        Complex64::new(1.0 / w.re.tan(), 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_gamma_known_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(log_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-15);
        let half = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - 0.5 * PI.ln()).abs() < 1e-14 && half.im == 0.0);
        // Γ(10) = 362880
        assert!((log_gamma(c(10.0, 0.0)).unwrap().re - 362_880f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn log_gamma_poles_are_errors() {
        for n in 0..5 {
            assert!(matches!(log_gamma(c(-(n as f64), 0.0)), Err(Error::Pole(_))));
        }
    }

    #[test]
    fn log_gamma_negative_axis_branch() {
        // Γ(−1/2) = −2√π
        let v = log_gamma(c(-0.5, 0.0)).unwrap();
        assert!((v.re - (2.0 * PI.sqrt()).ln()).abs() < 1e-14);
        assert!((v.im + PI).abs() < 1e-14);
    }

    #[test]
    fn log_gamma_mpmath_reference() {
        // reference values from mpmath.loggamma at 30 digits
        let cases = [
            (c(1000.0, 50.0), c(5903.970319094514, 345.38359832187776)),
            (c(0.25, 15.0), c(-23.319984172604716, 25.228748424304993)),
            (c(-3.7, 2.2), c(-7.2597693499705797, -9.9401884510785500)),
            (c(100.5, -7.0), c(361.19074219161462, -32.241928608580343)),
        ];
        for (z, want) in cases {
            let got = log_gamma(z).unwrap();
            assert!((got - want).norm() < 1e-11 * (1.0 + want.norm()), "z={z}: {got} vs {want}");
        }
    }

    #[test]
    fn scaled_exponent_matches_direct_log_gamma() {
        for &(lambda, x) in &[(1e4, 100.0), (50.0, -30.0), (1e3, 44.7)] {
            let lg = log_gamma(c(lambda, x)).unwrap();
            let direct = lambda + lg - c(lambda, x) * lambda.ln();
            let e = scaled_kernel_exponent(lambda, x);
            assert!((e.re - direct.re).abs() < 1e-8);
            let dphi = (e.im - direct.im).rem_euclid(2.0 * PI);
            assert!(dphi.min(2.0 * PI - dphi) < 1e-8);
        }
    }

    #[test]
    fn log_trig_helpers_agree_with_direct_for_moderate_arguments() {
        for &w in &[c(0.3, 0.2), c(-1.2, -0.7), c(2.0, 5.0), c(0.1, 0.0)] {
            assert!((log_cos(w).exp() - w.cos()).norm() < 1e-14 * (1.0 + w.cos().norm()));
            assert!((log_sin(w).exp() - w.sin()).norm() < 1e-14 * (1.0 + w.sin().norm()));
            assert!((cot(w) - w.cos() / w.sin()).norm() < 1e-13 * (1.0 + cot(w).norm()));
        }
        // e^{-2000} would underflow; the log stays finite
        let big = log_cos(c(0.4, 2000.0));
        assert!((big.re - (2000.0 - LN_2)).abs() < 1e-12);
    }
}
