//! Integrals along the rays `L_{±δ} = {x e^{±iδ} : x > 0}`.
//!
//! On each ray the substitution `v = e^{x ± iδ}` turns the integrand into an
//! analytic function of `x` that decays doubly exponentially on the right and
//! exponentially on the left, so the trapezoidal rule on `ℝ` converges
//! geometrically. The step comes from the width `d` of the strip of
//! analyticity (the pole `v = 1` sits at distance `δ`) and the integrand's
//! size on the strip edges.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ContourParams, ScaledComplex};
use crate::dd::{Dd, DdComplex};
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::quad::{adaptive, adaptive_real, count_nodes, AdaptiveOptions};
use crate::specialfn::{zeta, ZetaMode};

/// Result of a ray-pair integral. `value` carries the exponent offset `−λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayIntegral {
    pub value: ScaledComplex,
    /// `value / (2πi e^{−λ})`.
    pub normalized: Complex64,
    /// Difference between the step-`h` and step-`2h` sums, on the normalized scale.
    pub error: f64,
    /// `log` of the largest integrand modulus on the normalized scale.
    pub amplification: f64,
    pub nodes: usize,
}

/// Smallest `δ` accepted; below it the rays graze the pole.
const MIN_DELTA: f64 = 1e-7;

struct RayGrid {
    h: f64,
    j_lo: i64,
    j_hi: i64,
    amplification: f64,
}

/// Log-modulus of `e^{λ} v^{s₁} e^{−λv} / (v − 1)` at `v = e^{x+iφ}`.
fn log_modulus(lambda: f64, u: f64, x: f64, phi: f64) -> f64 {
    let ex = x.exp();
    let dist = (ex * ex - 2.0 * ex * phi.cos() + 1.0).sqrt();
    (lambda + 0.5) * x - u * phi - lambda * ex * phi.cos() + lambda - dist.ln()
}

/// Chooses truncation and step for one ray so that the discarded part is
/// below `e^{−cut}` on the normalized scale.
fn ray_grid(lambda: f64, u: f64, phi: f64, cut: f64) -> Result<RayGrid> {
    let delta = phi.abs();
    if delta < MIN_DELTA {
        return Err(Error::Geometry(format!("δ = {delta:e} puts the ray within resolution of v = 1")));
    }
    if delta >= PI / 2.0 {
        return Err(Error::Geometry(format!(
            "δ = {delta} leaves e^{{−λv}} without decay along the ray; the ray integral diverges"
        )));
    }
    let x_peak = ((lambda + 0.5) / (lambda * delta.cos())).ln();
    let m = |x: f64| log_modulus(lambda, u, x, phi);
    let step = 0.25;
    let mut lo = x_peak.min(0.0);
    while m(lo) > -cut || m(lo - step) > -cut {
        lo -= step;
    }
    let mut hi = x_peak.max(0.0);
    while m(hi) > -cut || m(hi + step) > -cut {
        hi += step;
    }
    // half the distance to the nearer of the pole and the imaginary axis
    let d = 0.5 * delta.min(PI / 2.0 - delta);
    let n_scan = (((hi - lo) / (0.1 * d.min(0.1))).ceil() as usize).max(200);
    let mut amplification = f64::NEG_INFINITY;
    let mut strip = f64::NEG_INFINITY;
    for k in 0..=n_scan {
        let x = lo + (hi - lo) * k as f64 / n_scan as f64;
        amplification = amplification.max(m(x));
        let edge_phi = phi.signum() * (delta + d);
        let inner_phi = phi.signum() * (delta - d);
        strip = strip.max(log_modulus(lambda, u, x, edge_phi)).max(log_modulus(lambda, u, x, inner_phi));
    }
    let h = 2.0 * PI * d / (strip.max(0.0) + cut + (hi - lo).ln().max(0.0) + 2.0);
    // a power of two makes every node j·h exact; rounded nodes would jitter
    // by an ulp, which the steep integrand turns into visible error
    let h = 2f64.powi(h.log2().floor() as i32);
    Ok(RayGrid { h, j_lo: (lo / h).floor() as i64, j_hi: (hi / h).ceil() as i64, amplification })
}

fn check_amplification(amplification: f64, limit: f64) -> Result<()> {
    if amplification > limit {
        return Err(Error::Geometry(format!(
            "ray integrand reaches e^{amplification:.1} against an O(1) result; cancellation exceeds working precision"
        )));
    }
    Ok(())
}

/// `∫_{L_δ} − ∫_{L_{−δ}}` of `v^{s₁} e^{−λv} / (v(v−1)) dv`, which the residue
/// theorem puts at `−2πi e^{−λ}`.
///
/// Summed in double-double, so angles with `e^{−λ log cos δ + |u|δ}` up to
/// about `e^{50}` still resolve the `O(1)` result.
pub fn residue_pair(p: &ContourParams) -> Result<RayIntegral> {
    let delta = p.delta_ray;
    let mut total = [DdComplex::ZERO, DdComplex::ZERO];
    let mut nodes = 0;
    let mut amplification = f64::NEG_INFINITY;
    for (sign, weight) in [(1.0, Dd::ONE), (-1.0, -Dd::ONE)] {
        let phi = sign * delta;
        let grid = ray_grid(p.lambda, p.u, phi, 80.0)?;
        check_amplification(grid.amplification, 50.0)?;
        amplification = amplification.max(grid.amplification);
        let (sin_phi, cos_phi) = Dd::from(phi).sin_cos();
        let a = Dd::from(p.lambda + 0.5);
        let lam = Dd::from(p.lambda);
        let phi_dd = Dd::from(phi);
        let mut sums = [DdComplex::ZERO, DdComplex::ZERO];
        for j in grid.j_lo..=grid.j_hi {
            let x = j as f64 * grid.h;
            let xd = Dd::from(x);
            let ex = xd.exp();
            let re = a.mul_f64(x) - phi_dd.mul_f64(p.u) - lam * ex * cos_phi + lam;
            let im = a * phi_dd + Dd::from(p.u).mul_f64(x) - lam * ex * sin_phi;
            let num = DdComplex::new(re, im).exp();
            let den = DdComplex::new(ex * cos_phi - Dd::ONE, ex * sin_phi);
            let term = num / den;
            sums[0] = sums[0] + term;
            if j % 2 == 0 {
                sums[1] = sums[1] + term;
            }
        }
        nodes += (grid.j_hi - grid.j_lo + 1) as usize;
        let hh = Dd::from(grid.h);
        let h2 = Dd::from(2.0 * grid.h);
        for (k, step) in [(0, hh), (1, h2)] {
            let s = DdComplex::new(sums[k].re * step * weight, sums[k].im * step * weight);
            total[k] = total[k] + s;
        }
    }
    count_nodes(nodes);
    Ok(finish(total[0].to_c64(), total[1].to_c64(), p.lambda, amplification, nodes))
}

fn finish(fine: Complex64, coarse: Complex64, lambda: f64, amplification: f64, nodes: usize) -> RayIntegral {
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    RayIntegral {
        value: ScaledComplex::new(-lambda, fine),
        normalized: fine / two_pi_i,
        error: (fine - coarse).norm() / (2.0 * PI),
        amplification,
        nodes,
    }
}

/// The default ray angle for [`k_integral`]: `min(π/8, 2/|u|)`, which keeps
/// the amplification `e^{|u|δ}` at most `e²`.
pub fn default_k_delta(u: f64) -> f64 {
    (PI / 8.0).min(2.0 / u.abs().max(1e-300))
}

/// `K = ∫_{L_δ} v^{s₁}e^{−λv} log(−i(v−1)) / (v(v−1)) dv
///    − ∫_{L_{−δ}} v^{s₁}e^{−λv} log(i(v−1)) / (v(v−1)) dv`
/// with principal logarithms, carried with exponent offset `−λ`.
pub fn k_integral(p: &ContourParams, delta: f64) -> Result<RayIntegral> {
    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    let mut nodes = 0;
    let mut amplification = f64::NEG_INFINITY;
    for sign in [1.0, -1.0] {
        let phi = sign * delta;
        let grid = ray_grid(p.lambda, p.u, phi, 40.0)?;
        check_amplification(grid.amplification, 20.0)?;
        amplification = amplification.max(grid.amplification);
        let rot = Complex64::new(0.0, -sign);
        let (sin_phi, cos_phi) = phi.sin_cos();
        let mut s_fine = Complex64::new(0.0, 0.0);
        let mut s_coarse = Complex64::new(0.0, 0.0);
        for j in grid.j_lo..=grid.j_hi {
            let x = j as f64 * grid.h;
            let ex = x.exp();
            let re = (p.lambda + 0.5) * x - p.u * phi - p.lambda * ex * cos_phi + p.lambda;
            let im = (p.lambda + 0.5) * phi + p.u * x - p.lambda * ex * sin_phi;
            let vm1 = Complex64::new(ex * cos_phi - 1.0, ex * sin_phi);
            let term = Complex64::from_polar(re.exp(), im) * (rot * vm1).ln() / vm1;
            s_fine += term;
            if j % 2 == 0 {
                s_coarse += term;
            }
        }
        nodes += (grid.j_hi - grid.j_lo + 1) as usize;
        fine += s_fine * grid.h * sign;
        coarse += s_coarse * (2.0 * grid.h) * sign;
    }
    count_nodes(nodes);
    Ok(finish(fine, coarse, p.lambda, amplification, nodes))
}

/// `∫_A^∞ e^{ix}/x dx` from the integration-by-parts series
/// `i e^{iA} Σ n! / (i^n A^{n+1})`, summed to its smallest term.
fn oscillatory_tail(a: f64) -> Complex64 {
    let mut term = Complex64::new(1.0 / a, 0.0);
    let mut sum = term;
    let minus_i = Complex64::new(0.0, -1.0);
    let mut n = 1.0;
    loop {
        let next = term * minus_i * (n / a);
        if next.norm() >= term.norm() || next.norm() < 1e-20 * sum.norm() {
            break;
        }
        sum += next;
        term = next;
        n += 1.0;
    }
    Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, a) * sum
}

/// `c₀ = ∫₀¹ (1 − cos x)/x dx − ∫₁^∞ cos x / x dx`, which equals Euler's
/// constant.
pub fn c0_constant() -> f64 {
    c0_constant_split(1.0, 200.5)
}

/// `c₀` assembled as `∫₀^s (1−cos x)/x − log s − ∫_s^A cos x/x − Re∫_A^∞ e^{ix}/x`.
///
/// # Panics
/// If `split` is not in `(0, far)` or `far < 50`.
pub fn c0_constant_split(split: f64, far: f64) -> f64 {
    assert!(split > 0.0 && split < far && far >= 50.0, "need 0 < split < far, far ≥ 50");
    let opts = AdaptiveOptions { abs_tol: 1e-16, rel_tol: 1e-15, max_intervals: 20_000 };
    let near = |x: f64| {
        let s = (0.5 * x).sin();
        2.0 * s * s / x
    };
    let (head, _) = adaptive_real(near, 0.0, split, &[], opts).expect("smooth integrand");
    let breaks: Vec<f64> = (1..).map(|k| k as f64 * PI).take_while(|&b| b < far).collect();
    let (mid, _) = adaptive_real(|x| x.cos() / x, split, far, &breaks, opts).expect("smooth integrand");
    head - split.ln() - mid - oscillatory_tail(far).re
}

/// Euler's constant from the Laurent expansion of `ζ` at `s = 1`: the
/// symmetric mean `(ζ(1+h) + ζ(1−h))/2 = γ + O(h²)`, Richardson-extrapolated
/// over `h = 0.02, 0.01`.
pub fn euler_gamma_from_zeta() -> Result<f64> {
    let g = |h: f64| -> Result<f64> {
        let a = zeta(Complex64::new(1.0 + h, 0.0), ZetaMode::EulerMaclaurin)?.re;
        let b = zeta(Complex64::new(1.0 - h, 0.0), ZetaMode::EulerMaclaurin)?.re;
        Ok(0.5 * (a + b))
    };
    let coarse = g(0.02)?;
    let fine = g(0.01)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `e^y − 1 − y` without cancellation.
fn expm1_minus_linear(y: f64) -> f64 {
    if y.abs() < 0.1 {
        let mut term = y * y / 2.0;
        let mut sum = term;
        let mut k = 3.0;
        while term.abs() > 1e-18 * sum.abs() {
            term *= y / k;
            sum += term;
            k += 1.0;
        }
        sum
    } else {
        y.exp_m1() - y
    }
}

/// `2 sinh(x/2) − x` without cancellation.
fn two_sinh_half_minus(x: f64) -> f64 {
    if x.abs() < 0.5 {
        // Σ_{k≥1} x^{2k+1} / (4^k (2k+1)!)
        let x2 = x * x / 4.0;
        let mut term = x;
        let mut sum = 0.0;
        let mut k = 1.0;
        loop {
            term *= x2 / ((2.0 * k) * (2.0 * k + 1.0));
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break sum;
            }
            k += 1.0;
        }
    } else {
        2.0 * (0.5 * x).sinh() - x
    }
}

/// `1/x − e^{E}/(2 sinh(x/2))` with `E = −λ(e^{±x} − 1 ∓ x)`.
fn reciprocal_defect(lambda: f64, x: f64, sign: f64) -> f64 {
    let e = -lambda * expm1_minus_linear(sign * x);
    let sh = 2.0 * (0.5 * x).sinh();
    (two_sinh_half_minus(x) - x * e.exp_m1()) / (x * sh)
}

/// The remainder `P` in `K = 2πi e^{−λ}(log u + c₀ + P)`, evaluated from its
/// representation as four real half-line integrals (the `ε → 0` limit of the
/// indented-contour form). Independent of the ray quadrature.
pub fn p_remainder(lambda: f64, u: f64) -> Result<Complex64> {
    if !(u > 0.0) {
        return Err(Error::domain("p_remainder needs u > 0"));
    }
    // beyond x_max both exponential terms are below e^{-60}
    let mut x_max = 1.0;
    while -lambda * expm1_minus_linear(-x_max) > -60.0 {
        x_max += 0.05;
    }
    let cos_part = |x: f64| reciprocal_defect(lambda, x, -1.0) + reciprocal_defect(lambda, x, 1.0);
    let sin_part = |x: f64| {
        // g₋ − g₊ = e^{E₊} expm1(E₋ − E₊) / (2 sinh(x/2)), E₋ − E₊ = 2λ(sinh x − x)
        let e_plus = -lambda * expm1_minus_linear(x);
        let diff = 2.0 * lambda * (two_sinh_half_minus(2.0 * x) / 2.0);
        e_plus.exp() * diff.exp_m1() / (2.0 * (0.5 * x).sinh())
    };
    let f = |x: f64| {
        if x == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let (s, c) = (u * x).sin_cos();
        Complex64::new(0.5 * c * cos_part(x), 0.5 * s * sin_part(x))
    };
    let period = 2.0 * PI / u;
    let n_breaks = (x_max / period).ceil() as usize;
    let breaks: Vec<f64> = (1..n_breaks).map(|k| k as f64 * period).collect();
    let opts = AdaptiveOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 50_000 };
    let body = adaptive(f, 0.0, x_max, &breaks, opts)?;
    // past x_max only the cos(ux)/x pieces survive: ½·2·∫ cos(ux)/x
    let tail = oscillatory_tail(u * x_max).re;
    Ok(body.value + Complex64::new(tail, 0.0))
}

/// Fit of `K/(2πi e^{−λ}) − log u` against `{1, u⁻¹, u⁻², u⁻³, u⁻⁴}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    /// Intercept; estimates `c₀`.
    pub c0_est: f64,
    /// Coefficient of `u⁻¹`, fitted as a control (absent in theory).
    pub c1: Complex64,
    /// Estimates of `c₂, c₃, c₄`.
    pub higher_coeffs: Vec<Complex64>,
    /// Largest absolute residual over the family.
    pub residual: f64,
    /// Imaginary part of the intercept (should vanish).
    pub c0_imag: f64,
}

/// Fits the `u`-expansion of `K` over a family with common `λ`.
///
/// The basis is scaled by the smallest `u` to keep the design well
/// conditioned; clustered `u` still trip [`Error::Fit`].
pub fn k_asymptotic_fit(family: &[ContourParams]) -> Result<AsymptoticFit> {
    let mut us: Vec<f64> = family.iter().map(|p| p.u).collect();
    us.sort_by(f64::total_cmp);
    us.dedup();
    if us.len() < 6 {
        return Err(Error::Fit(format!("need ≥ 6 distinct u values, got {}", us.len())));
    }
    if us[0] <= 0.0 || us[us.len() - 1] < 10.0 * us[0] {
        return Err(Error::Fit("u values must be positive and span a decade".into()));
    }
    let lambda = family[0].lambda;
    if family.iter().any(|p| p.lambda != lambda) {
        return Err(Error::Fit("family must share λ".into()));
    }
    let u0 = us[0];
    let mut rows = Vec::new();
    let mut y_re = Vec::new();
    let mut y_im = Vec::new();
    for p in family {
        let k = k_integral(p, default_k_delta(p.u))?;
        let y = k.normalized - p.u.ln();
        let r = u0 / p.u;
        rows.push((0..5).map(|n| r.powi(n)).collect::<Vec<f64>>());
        y_re.push(y.re);
        y_im.push(y.im);
    }
    let fr = least_squares(&rows, &y_re)?;
    let fi = least_squares(&rows, &y_im)?;
    let coeff = |n: usize| Complex64::new(fr.coeffs[n], fi.coeffs[n]) * u0.powi(n as i32);
    let residual = fr
        .residuals
        .iter()
        .zip(&fi.residuals)
        .map(|(a, b)| a.hypot(*b))
        .fold(0.0, f64::max);
    Ok(AsymptoticFit {
        c0_est: fr.coeffs[0],
        c1: coeff(1),
        higher_coeffs: (2..5).map(coeff).collect(),
        residual,
        c0_imag: fi.coeffs[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::EULER_GAMMA;

    fn params(lambda: f64, u: f64, delta: f64) -> ContourParams {
        ContourParams::new(lambda, u, 1.5, delta, 10.0, 100.0).unwrap()
    }

    #[test]
    fn residue_pair_values() {
        for (lambda, u, delta) in [(50.0, 10.0, PI / 6.0), (50.0, 10.0, PI / 3.0), (20.0, 0.0, PI / 4.0)] {
            let r = residue_pair(&params(lambda, u, delta)).unwrap();
            assert!((r.normalized + 1.0).norm() < 1e-8, "{lambda} {u} {delta}: {}", r.normalized);
        }
    }

    #[test]
    fn residue_pair_rejects_bad_rays() {
        assert!(matches!(residue_pair(&params(50.0, 10.0, PI / 2.0)), Err(Error::Geometry(_))));
        assert!(matches!(residue_pair(&params(50.0, 10.0, 1e-9)), Err(Error::Geometry(_))));
    }

    #[test]
    fn c0_is_euler_gamma() {
        assert!((c0_constant() - EULER_GAMMA).abs() < 1e-10);
        assert!((c0_constant_split(2.0, 200.5) - c0_constant()).abs() < 1e-12);
        assert!((euler_gamma_from_zeta().unwrap() - EULER_GAMMA).abs() < 1e-8);
    }

    #[test]
    fn oscillatory_tail_matches_quadrature() {
        let opts = AdaptiveOptions { abs_tol: 1e-15, rel_tol: 1e-13, max_intervals: 20_000 };
        // ∫_50^∞ = ∫_50^300 + ∫_300^∞
        let breaks: Vec<f64> = (16..96).map(|k| k as f64 * PI).collect();
        let mid = adaptive(|x| Complex64::from_polar(1.0 / x, x), 50.0, 300.0, &breaks, opts).unwrap();
        let want = mid.value + oscillatory_tail(300.0);
        assert!((oscillatory_tail(50.0) - want).norm() < 1e-12);
    }

    #[test]
    fn k_matches_remainder_formula() {
        for u in [100.0, 300.0] {
            let p = params(100.0, u, 0.3);
            let k = k_integral(&p, default_k_delta(u)).unwrap();
            let pr = p_remainder(100.0, u).unwrap();
            let lhs = k.normalized - u.ln() - EULER_GAMMA;
            assert!((lhs - pr).norm() < 1e-8, "u={u}: {lhs} vs {pr}");
        }
    }

    #[test]
    fn k_tracks_log_u() {
        let k200 = k_integral(&params(100.0, 200.0, 0.3), default_k_delta(200.0)).unwrap().normalized;
        let want = 200f64.ln() + EULER_GAMMA;
        assert!((k200 - want).norm() < 0.02 * want);
        let k1000 = k_integral(&params(100.0, 1000.0, 0.3), default_k_delta(1000.0)).unwrap().normalized;
        let want = 1000f64.ln() + EULER_GAMMA;
        assert!((k1000 - want).norm() < 0.002 * want);
        let k400 = k_integral(&params(100.0, 400.0, 0.3), default_k_delta(400.0)).unwrap().normalized;
        assert!(((k400 - k200).re - 2f64.ln()).abs() < 0.01 * 2f64.ln());
    }

    #[test]
    fn k_conjugates_under_u_reflection() {
        let a = k_integral(&params(100.0, 300.0, 0.3), 0.005).unwrap().normalized;
        let b = k_integral(&params(100.0, -300.0, 0.3), 0.005).unwrap().normalized;
        assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn fit_recovers_c0_without_u_inverse_term() {
        let us = [100.0, 150.0, 200.0, 300.0, 400.0, 500.0, 700.0, 1000.0];
        let fam: Vec<_> = us.iter().map(|&u| params(100.0, u, 0.3)).collect();
        let fit = k_asymptotic_fit(&fam).unwrap();
        assert!(fit.c1.norm() <= 1e-3, "{}", fit.c1);
        assert!(fit.residual <= 1e-5);
        assert!((fit.c0_est - c0_constant()).abs() <= 1e-4);
    }

    #[test]
    fn fit_rejects_clustered_family() {
        let fam: Vec<_> = (0..8).map(|k| params(100.0, 100.0 + k as f64, 0.3)).collect();
        assert!(matches!(k_asymptotic_fit(&fam), Err(Error::Fit(_))));
    }
}
