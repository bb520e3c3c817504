use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::{log_cos, log_gamma, log_sin};
use super::bernoulli_2k;
use crate::error::{Error, Result};

/// Evaluation method for [`zeta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ZetaMode {
    EulerMaclaurin,
    RiemannSiegel,
    #[default]
    Auto,
}

/// Below this height `Auto` uses Euler–Maclaurin even on the critical line.
const RS_THRESHOLD: f64 = 30.0;
const EM_CORRECTIONS: usize = 20;

/// Hurwitz zeta `ζ(s, a) = Σ_{n≥0} (n + a)^{−s}` by Euler–Maclaurin summation.
///
/// Valid for all `s ≠ 1` and `a > 0`. Callers validate the range of `a`.
pub fn hurwitz_em(s: Complex64, a: f64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("1".into()));
    }
    let n = 30f64.max(2.0 * s.im.abs()).max(s.norm() + 10.0).ceil() as usize;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let term = (-s * (j as f64 + a).ln()).exp();
        // Kahan summation keeps the partial sum exact to a few ulps
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let x_pow = (-s * lx).exp(); // x^{-s}
    let mut tail = x_pow * x / (s - 1.0) + 0.5 * x_pow;
    // B_{2k}/(2k)! · s(s+1)…(s+2k−2) · x^{−s−2k+1}
    let mut rising = s; // s(s+1)…(s+2k−2)
    let mut xp = x_pow / x;
    let mut fact = 2.0; // (2k)!
    for k in 1..=EM_CORRECTIONS {
        let term = rising * xp * (bernoulli_2k(k) / fact);
        tail += term;
        if term.norm() < 1e-17 * tail.norm().max(sum.norm()) {
            break;
        }
        let kk = k as f64;
        rising *= (s + 2.0 * kk - 1.0) * (s + 2.0 * kk);
        xp /= x * x;
        fact *= (2.0 * kk + 1.0) * (2.0 * kk + 2.0);
    }
    Ok(sum + tail)
}

/// Riemann zeta function.
///
/// `EulerMaclaurin` works everywhere except the pole. `RiemannSiegel` is
/// restricted to `Re s = 1/2`, `|Im s| ≥ 30` and uses the main sum of length
/// `⌊√(t/2π)⌋` with the corrections `C₀ … C₄`. `Auto` picks Riemann–Siegel on
/// the critical line above height 30 and Euler–Maclaurin elsewhere.
pub fn zeta(s: Complex64, mode: ZetaMode) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("1".into()));
    }
    let on_line = s.re == 0.5 && s.im.abs() >= RS_THRESHOLD;
    match mode {
        ZetaMode::EulerMaclaurin => zeta_em(s),
        ZetaMode::RiemannSiegel => {
            if !on_line {
                return Err(Error::domain(format!(
                    "Riemann–Siegel needs Re s = 1/2 and |Im s| ≥ {RS_THRESHOLD}, got {s}"
                )));
            }
            Ok(riemann_siegel(s.im))
        }
        ZetaMode::Auto if on_line => Ok(riemann_siegel(s.im)),
        ZetaMode::Auto => zeta_em(s),
    }
}

fn zeta_em(s: Complex64) -> Result<Complex64> {
    hurwitz_em(s, 1.0)
}

/// `θ(t) = Im log Γ(1/4 + it/2) − (t/2) log π`.
pub(crate) fn rs_theta(t: f64) -> f64 {
    let lg = log_gamma(Complex64::new(0.25, 0.5 * t)).expect("no pole off the real axis");
    lg.im - 0.5 * t * PI.ln()
}

/// Ψ(p) and its derivatives up to order 12 at a real `p`.
///
/// `Ψ(p) = cos(2π(p² − p − 1/16)) / cos(2πp)` is entire but has removable
/// 0/0 points at `p ∈ 1/4 + ℤ/2`. Derivatives come from a Cauchy integral on
/// a circle whose radius is chosen to keep every node away from those points.
fn psi_derivatives(p: f64) -> [f64; 13] {
    const NODES: usize = 64;
    let psi = |z: Complex64| (2.0 * PI * (z * z - z - 1.0 / 16.0)).cos() / (2.0 * PI * z).cos();
    // distance from the circle |z − p| = r to the nearest removable point
    let clearance = |r: f64| {
        (-4..=6)
            .map(|k| ((p - (0.25 + 0.5 * k as f64)).abs() - r).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let radius = (0..=40)
        .map(|i| 0.3 + 0.01 * i as f64)
        .max_by(|a, b| clearance(*a).total_cmp(&clearance(*b)))
        .expect("non-empty radius grid");
    let values: Vec<(f64, Complex64)> = (0..NODES)
        .map(|j| {
            let phi = 2.0 * PI * (j as f64 + 0.5) / NODES as f64;
            (phi, psi(p + Complex64::from_polar(radius, phi)))
        })
        .collect();
    let mut out = [0.0; 13];
    let mut fact = 1.0;
    for (n, slot) in out.iter_mut().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        let a: Complex64 = values
            .iter()
            .map(|&(phi, v)| v * Complex64::from_polar(1.0, -(n as f64) * phi))
            .sum::<Complex64>()
            / NODES as f64;
        *slot = fact * a.re / radius.powi(n as i32);
    }
    out
}

/// `ζ(1/2 + it)` by the Riemann–Siegel formula, `|t| ≥ 30`.
fn riemann_siegel(t: f64) -> Complex64 {
    if t < 0.0 {
        return riemann_siegel(-t).conj();
    }
    let a = (t / (2.0 * PI)).sqrt();
    let n = a.floor() as usize;
    let p = a - n as f64;
    let theta = rs_theta(t);
    let mut z = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        z += (theta - t * kf.ln()).cos() / kf.sqrt();
    }
    z *= 2.0;

    let d = psi_derivatives(p);
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    let pi8 = pi4 * pi4;
    let c = [
        d[0],
        -d[3] / (96.0 * pi2),
        d[2] / (64.0 * pi2) + d[6] / (18432.0 * pi4),
        -d[1] / (64.0 * pi2) - d[5] / (3840.0 * pi4) - d[9] / (5_308_416.0 * pi6),
        d[0] / (128.0 * pi2)
            + 19.0 * d[4] / (24576.0 * pi4)
            + 11.0 * d[8] / (5_898_240.0 * pi6)
            + d[12] / (2_038_431_744.0 * pi8),
    ];
    let inv_sqrt_a = 1.0 / a.sqrt();
    let mut rem = 0.0;
    let mut scale = inv_sqrt_a; // (t/2π)^{-1/4 - k/2}
    for ck in c {
        rem += ck * scale;
        scale /= a;
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    z += sign * rem;
    Complex64::from_polar(z, -theta)
}

fn near_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() < 1e-14 * (1.0 + r.abs())).then_some(r as i64)
}

/// `χ(1 − s) = 2 (2π)^{−s} Γ(s) cos(πs/2)`, so that `ζ(1 − s) = χ(1 − s) ζ(s)`.
///
/// Fails at the poles `s ∈ {0, −2, −4, …}`; the removable points at negative
/// odd integers return their limit.
pub fn chi_factor(s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::domain(format!("chi_factor of non-finite {s}")));
    }
    let ln_2pi = (2.0 * PI).ln();
    if s.im == 0.0 {
        if let Some(m) = near_integer(s.re) {
            if m <= 0 && m % 2 == 0 {
                return Err(Error::Pole(format!("{s}")));
            }
        }
    }
    let half = s * (PI / 2.0);
    let log_chi = if s.re >= 0.5 {
        LN_2 - s * ln_2pi + log_gamma(s)? + log_cos(half)
    } else {
        // Γ(s) cos(πs/2) = π / (2 sin(πs/2) Γ(1−s))
        -s * ln_2pi + PI.ln() - log_sin(half) - log_gamma(1.0 - s)?
    };
    let v = log_chi.exp();
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::domain(format!("chi_factor overflows at {s}")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeta_classical_values() {
        let z2 = zeta(c(2.0, 0.0), ZetaMode::EulerMaclaurin).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-14 && z2.im.abs() < 1e-15);
        let zm1 = zeta(c(-1.0, 0.0), ZetaMode::Auto).unwrap();
        assert!((zm1.re + 1.0 / 12.0).abs() < 1e-12);
        let z0 = zeta(c(0.0, 0.0), ZetaMode::Auto).unwrap();
        assert!((z0.re + 0.5).abs() < 1e-12);
        // mpmath.zeta(0.5)
        let zh = zeta(c(0.5, 0.0), ZetaMode::Auto).unwrap();
        assert!((zh.re + 1.460_354_508_809_586_8).abs() < 1e-13);
        assert!(matches!(zeta(c(1.0, 0.0), ZetaMode::Auto), Err(Error::Pole(_))));
    }

    #[test]
    fn hurwitz_half_and_zero() {
        let v = hurwitz_em(c(2.0, 0.0), 0.5).unwrap();
        assert!((v.re - PI * PI / 2.0).abs() < 1e-13);
        let v0 = hurwitz_em(c(0.0, 0.0), 1.0 / 3.0).unwrap();
        assert!((v0.re - 1.0 / 6.0).abs() < 1e-13);
    }

    #[test]
    fn zeta_mpmath_reference_off_line() {
        // mpmath.zeta at 30 digits
        let cases = [
            (c(0.5, 100.0), c(2.6926198856813239, -0.020386029602598162)),
            (c(2.5, -40.0), c(0.91558495550640225, 0.095058510567124646)),
            (c(-1.5, 3.0), c(0.20132883054215033, 0.097149743015620041)),
        ];
        for (s, want) in cases {
            let got = zeta(s, ZetaMode::EulerMaclaurin).unwrap();
            assert!((got - want).norm() < 1e-11, "s={s}: {got} vs {want}");
        }
    }

    #[test]
    fn riemann_siegel_matches_euler_maclaurin() {
        for i in 0..40 {
            let t = 30.0 + 12.3 * i as f64;
            let rs = zeta(c(0.5, t), ZetaMode::RiemannSiegel).unwrap();
            let em = zeta(c(0.5, t), ZetaMode::EulerMaclaurin).unwrap();
            assert!((rs - em).norm() < 1e-6, "t={t}: {rs} vs {em}");
        }
        let neg = zeta(c(0.5, -77.0), ZetaMode::RiemannSiegel).unwrap();
        let em = zeta(c(0.5, -77.0), ZetaMode::EulerMaclaurin).unwrap();
        assert!((neg - em).norm() < 1e-6);
    }

    #[test]
    fn riemann_siegel_rejects_off_line() {
        assert!(zeta(c(0.6, 100.0), ZetaMode::RiemannSiegel).is_err());
        assert!(zeta(c(0.5, 10.0), ZetaMode::RiemannSiegel).is_err());
    }

    #[test]
    fn chi_known_values() {
        let v = chi_factor(c(2.0, 0.0)).unwrap();
        assert!((v.re + 1.0 / (2.0 * PI * PI)).abs() < 1e-15);
        let h = chi_factor(c(0.5, 0.0)).unwrap();
        assert!((h - 1.0).norm() < 1e-14);
        let m1 = chi_factor(c(-1.0, 0.0)).unwrap();
        assert!((m1.re + 2.0 * PI * PI).abs() < 1e-12);
        for t in [10.0, 50.0, 100.0, 1e4] {
            assert!((chi_factor(c(0.5, t)).unwrap().norm() - 1.0).abs() < 1e-10);
        }
        assert!(matches!(chi_factor(c(0.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(chi_factor(c(-4.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn psi_derivatives_near_removable_points() {
        // Ψ(1/4) by l'Hôpital: the numerator's derivative over the denominator's
        let d = psi_derivatives(0.25);
        let num = -(2.0 * PI * (2.0 * 0.25 - 1.0)) * (2.0 * PI * (0.0625 - 0.25 - 0.0625)).sin();
        let den = -(2.0 * PI) * (PI / 2.0).sin();
        assert!((d[0] - num / den).abs() < 1e-12);
        // smooth in p across the removable point
        let a = psi_derivatives(0.25 - 1e-7)[1];
        let b = psi_derivatives(0.25 + 1e-7)[1];
        assert!((a - b).abs() < 1e-5);
    }
}
