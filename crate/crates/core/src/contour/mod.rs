//! Mellin and contour identities around `s₁ = λ + 1/2 + iu`: the transform
//! `J(y)`, the Gamma integral, the ray pair around the pole at `v = 1`, the
//! logarithmic ray integral `K` and its constant `c₀`, the pointwise geometry
//! of the ray `L_δ`, and the small-scale double integral `W`.

mod geometry;
mod rays;
mod smallscale;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{adaptive, AdaptiveOptions};
use crate::specialfn::{chi_factor, log_gamma};

pub use geometry::{
    calibrate_lemma26, lemma26_pointwise, lemma26_pointwise_with, lemma26_sweep, GeometryRegion, Lemma26Constants,
    Lemma26Point, PoleOffset, SweepSummary, FROZEN_CONSTANTS,
};
pub use rays::{
    c0_constant, c0_constant_split, default_k_delta, euler_gamma_from_zeta, k_asymptotic_fit, k_integral,
    p_remainder, residue_pair, AsymptoticFit, RayIntegral,
};
pub use smallscale::{w_smallscale, w_trend, LambdaRule, WResult, WTrend, WVariant};

/// Parameters shared by the contour identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourParams {
    pub lambda: f64,
    pub u: f64,
    /// `s₁ = λ + 1/2 + iu`.
    pub s1: Complex64,
    /// Line abscissa `c = 1 + η`.
    pub c: f64,
    pub eta: f64,
    /// Ray angle `δ` of `L_δ`.
    pub delta_ray: f64,
    pub beta: f64,
    /// The height `T` entering `θ` (and `δ = 1/T` for `W`).
    pub big_t: f64,
    /// `θ = (2β log T / λ)^{1/2}`.
    pub theta: f64,
}

impl ContourParams {
    pub fn new(lambda: f64, u: f64, c: f64, delta_ray: f64, beta: f64, big_t: f64) -> Result<Self> {
        if !(lambda >= 10.0 && lambda.is_finite()) {
            return Err(Error::domain(format!("λ = {lambda} below 10")));
        }
        if !u.is_finite() {
            return Err(Error::domain("u must be finite"));
        }
        if !(c > 1.0 && c < 2.0) {
            return Err(Error::domain(format!("c = {c} outside (1, 2)")));
        }
        if !(delta_ray > 0.0 && delta_ray <= PI / 2.0) {
            return Err(Error::domain(format!("δ = {delta_ray} outside (0, π/2]")));
        }
        if !(beta >= 1.0) {
            return Err(Error::domain(format!("β = {beta} below 1")));
        }
        if !(big_t > 1.0) {
            return Err(Error::domain(format!("T = {big_t} must exceed 1")));
        }
        Ok(Self {
            lambda,
            u,
            s1: Complex64::new(lambda + 0.5, u),
            c,
            eta: c - 1.0,
            delta_ray,
            beta,
            big_t,
            theta: (2.0 * beta * big_t.ln() / lambda).sqrt(),
        })
    }

    /// Convenience constructor with `c = 3/2`, `δ = π/6`, `β = 10`, `T = max(u, 2)`.
    pub fn simple(lambda: f64, u: f64) -> Result<Self> {
        Self::new(lambda, u, 1.5, PI / 6.0, 10.0, u.abs().max(2.0))
    }

    pub fn with_u(&self, u: f64) -> Result<Self> {
        Self::new(self.lambda, u, self.c, self.delta_ray, self.beta, self.big_t)
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.lambda, self.u, self.c, delta, self.beta, self.big_t)
    }

    pub fn with_c(&self, c: f64) -> Result<Self> {
        Self::new(self.lambda, self.u, c, self.delta_ray, self.beta, self.big_t)
    }
}

/// A complex number stored as `mantissa · e^{exponent}`, for quantities like
/// `Γ(s₁) λ^{−s₁}` whose size is far outside the `f64` range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledComplex {
    pub exponent: f64,
    pub mantissa: Complex64,
}

impl ScaledComplex {
    pub fn new(exponent: f64, mantissa: Complex64) -> Self {
        Self { exponent, mantissa }
    }

    /// `e^{log}` with the real part of `log` moved into the exponent.
    pub fn from_log(log: Complex64) -> Self {
        Self { exponent: log.re, mantissa: Complex64::from_polar(1.0, log.im) }
    }

    /// Re-expresses the value against another exponent.
    pub fn mantissa_at(&self, exponent: f64) -> Complex64 {
        self.mantissa * (self.exponent - exponent).exp()
    }

    pub fn add(&self, other: &ScaledComplex) -> ScaledComplex {
        let e = self.exponent.max(other.exponent);
        ScaledComplex { exponent: e, mantissa: self.mantissa_at(e) + other.mantissa_at(e) }
    }

    /// Plain value; may overflow or underflow.
    pub fn to_c64(&self) -> Complex64 {
        self.mantissa * self.exponent.exp()
    }

    /// `log |value|`.
    pub fn ln_norm(&self) -> f64 {
        self.exponent + self.mantissa.norm().ln()
    }

    /// `|self − other| / |other|`.
    pub fn rel_diff(&self, other: &ScaledComplex) -> f64 {
        let e = other.exponent;
        (self.mantissa_at(e) - other.mantissa).norm() / other.mantissa.norm()
    }
}

/// `J(y) = Γ(s₁)[(λ − 2πiy)^{−s₁} + (λ + 2πiy)^{−s₁}]`, the closed form of
/// `∫₀^∞ v^{s₁} e^{−λv}(e^{2πiyv} + e^{−2πiyv}) dv/v`.
pub fn j_closed(y: f64, p: &ContourParams) -> Result<ScaledComplex> {
    let lg = log_gamma(p.s1)?;
    let w = 2.0 * PI * y;
    let a = ScaledComplex::from_log(lg - p.s1 * Complex64::new(p.lambda, -w).ln());
    let b = ScaledComplex::from_log(lg - p.s1 * Complex64::new(p.lambda, w).ln());
    Ok(a.add(&b))
}

/// A line integral with its quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineIntegral {
    pub value: ScaledComplex,
    /// Quadrature error estimate relative to `|value|`.
    pub rel_quad_error: f64,
    /// Estimated omitted tail relative to `|value|`.
    pub rel_tail: f64,
    pub evaluations: usize,
}

/// `J(y) = (1/2πi) ∫_(c) Γ(s₁−s) λ^{−(s₁−s)} χ(1−s) y^{−s} ds`, truncated to
/// `|Im s| ≤ t_cut`.
///
/// The tail is estimated from the Gaussian-like decay `exp(−(τ−u)²/2λ)` of
/// `Γ(s₁−s)λ^{s−s₁}`; a tail above `1e-12` of the result is a
/// [`Error::Truncation`].
pub fn j_contour(y: f64, p: &ContourParams, t_cut: f64) -> Result<LineIntegral> {
    if !(y > 0.0) {
        return Err(Error::domain(format!("y = {y} must be positive")));
    }
    let ln_lambda = p.lambda.ln();
    let ln_y = y.ln();
    let scale = (log_gamma(p.s1)? - p.s1 * ln_lambda).re;
    let mut failure = None;
    let log_integrand = |tau: f64| -> Result<Complex64> {
        let s = Complex64::new(p.c, tau);
        let w = p.s1 - s;
        Ok(log_gamma(w)? - w * ln_lambda + chi_factor(s)?.ln() - s * ln_y)
    };
    let mut f = |tau: f64| -> Complex64 {
        match log_integrand(tau) {
            Ok(l) => (l - scale).exp(),
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let sd = p.lambda.sqrt();
    let breaks: Vec<f64> = (-12..=12).map(|k| p.u + k as f64 * sd).collect();
    let opts = AdaptiveOptions { abs_tol: 0.0, rel_tol: 1e-11, max_intervals: 20_000 };
    let edge = f(t_cut).norm() + f(-t_cut).norm();
    let q = adaptive(&mut f, -t_cut, t_cut, &breaks, opts)?;
    if let Some(e) = failure {
        return Err(e);
    }
    // (1/2πi) ∫ … i dτ
    let mantissa = q.value / (2.0 * PI);
    let norm = mantissa.norm();
    // edge magnitude times the decay length of the Gaussian envelope
    let rel_tail = edge * sd / (2.0 * PI) / norm;
    if rel_tail > 1e-12 {
        return Err(Error::Truncation(format!(
            "t_cut = {t_cut} leaves an estimated relative tail {rel_tail:.2e}"
        )));
    }
    Ok(LineIntegral {
        value: ScaledComplex::new(scale, mantissa),
        rel_quad_error: q.error / (2.0 * PI) / norm,
        rel_tail,
        evaluations: q.evaluations,
    })
}

/// Numeric `∫₀^∞ v^{s₁−1} e^{−λv} dv` against `λ^{−s₁} Γ(s₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaIntegralCheck {
    pub numeric: ScaledComplex,
    pub closed: ScaledComplex,
    pub residual: f64,
}

/// Evaluates the Gamma integral in `x = log v`, where the integrand
/// `exp(s₁x − λeˣ)` is a smooth bump of width `λ^{−1/2}`.
pub fn gamma_integral(p: &ContourParams) -> Result<GammaIntegralCheck> {
    let a = p.lambda + 0.5;
    let x_peak = (a / p.lambda).ln();
    let m = a * x_peak - p.lambda * x_peak.exp();
    let g = |x: f64| a * x - p.lambda * x.exp() - m;
    // walk out until the envelope is below e^{-80}
    let width = 1.0 / p.lambda.sqrt();
    let mut lo = x_peak;
    while g(lo) > -80.0 {
        lo -= width;
    }
    let mut hi = x_peak;
    while g(hi) > -80.0 {
        hi += width;
    }
    let f = |x: f64| Complex64::from_polar(g(x).exp(), p.u * x);
    let breaks: Vec<f64> = (1..40).map(|k| lo + (hi - lo) * k as f64 / 40.0).collect();
    let opts = AdaptiveOptions { abs_tol: 0.0, rel_tol: 1e-11, max_intervals: 20_000 };
    let q = adaptive(f, lo, hi, &breaks, opts)?;
    let numeric = ScaledComplex::new(m, q.value);
    let closed = ScaledComplex::from_log(log_gamma(p.s1)? - p.s1 * p.lambda.ln());
    let residual = numeric.rel_diff(&closed);
    Ok(GammaIntegralCheck { numeric, closed, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_derive_consistently() {
        let p = ContourParams::new(100.0, 50.0, 1.5, 0.3, 10.0, 1000.0).unwrap();
        assert_eq!(p.s1, Complex64::new(100.5, 50.0));
        assert!((p.eta - 0.5).abs() < 1e-15);
        assert!((p.theta - (20.0 * 1000f64.ln() / 100.0).sqrt()).abs() < 1e-15);
        assert!(ContourParams::new(100.0, 0.0, 2.0, 0.3, 10.0, 10.0).is_err());
        assert!(ContourParams::new(100.0, 0.0, 1.5, 0.0, 10.0, 10.0).is_err());
    }

    #[test]
    fn j_closed_at_zero_is_twice_gamma_integral() {
        let p = ContourParams::simple(100.0, 50.0).unwrap();
        let j = j_closed(0.0, &p).unwrap();
        let g = ScaledComplex::from_log(log_gamma(p.s1).unwrap() - p.s1 * p.lambda.ln());
        let twice = ScaledComplex::new(g.exponent, g.mantissa * 2.0);
        assert!(j.rel_diff(&twice) < 1e-15);
    }

    #[test]
    fn j_closed_is_even_in_y() {
        let p = ContourParams::simple(100.0, 50.0).unwrap();
        for y in [1.0, 5.0, 10.0] {
            assert!(j_closed(y, &p).unwrap().rel_diff(&j_closed(-y, &p).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn j_contour_matches_closed_form() {
        let p = ContourParams::simple(100.0, 50.0).unwrap();
        let line = j_contour(3.0, &p, 200.0).unwrap();
        let closed = j_closed(3.0, &p).unwrap();
        assert!(line.value.rel_diff(&closed) < 1e-8, "{}", line.value.rel_diff(&closed));
    }

    #[test]
    fn j_contour_real_when_u_is_zero() {
        let p = ContourParams::simple(50.0, 0.0).unwrap().with_c(1.2).unwrap();
        let line = j_contour(1.0, &p, 120.0).unwrap();
        assert!(line.value.mantissa.im.abs() < 1e-10 * line.value.mantissa.norm());
    }

    #[test]
    fn j_contour_reports_truncation() {
        let p = ContourParams::simple(100.0, 50.0).unwrap();
        assert!(matches!(j_contour(3.0, &p, 60.0), Err(Error::Truncation(_))));
    }

    #[test]
    fn gamma_integral_residuals() {
        for (lambda, u, tol) in [(10.0, 0.0, 1e-10), (100.0, 30.0, 1e-9), (1000.0, 100.0, 1e-8)] {
            let r = gamma_integral(&ContourParams::simple(lambda, u).unwrap()).unwrap();
            assert!(r.residual < tol, "λ={lambda} u={u}: {}", r.residual);
        }
    }
}
