//! The Gamma smoothing kernel
//! `ω(t, T₁, T₂) = e^λ/(2π) ∫_{T₁}^{T₂} Γ(λ + (u−t)i) λ^{−(λ+(u−t)i)} du`.
//!
//! The integrand is handled through its log, [`scaled_kernel_exponent`], so
//! `e^λ` and `Γ(λ + ix)` never materialize. It is a near-Gaussian of width
//! `√λ` in `u − t`; beyond `12√λ` its modulus is below `e^{−72}` and the
//! range is clipped there.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::specialfn::scaled_kernel_exponent;

/// Half-width of the clipped integration range, in units of `√λ`.
pub const CLIP_SIGMAS: f64 = 12.0;
/// Floor below which window bounds are not asserted.
pub const BOUND_FLOOR: f64 = 1e-12;
const PANEL_SIGMAS: f64 = 0.25;
const NODES: usize = 20;

/// Parameters of the kernel and of its window check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub lambda: f64,
    pub t1: f64,
    pub t2: f64,
    pub alpha: f64,
    /// `Δ = (2αλ log T)^{1/2}` with `T = t2`.
    pub delta_margin: f64,
}

impl KernelParams {
    pub fn new(lambda: f64, t1: f64, t2: f64, alpha: f64) -> Result<Self> {
        if !(lambda >= 10.0 && lambda <= 1e8) {
            return Err(Error::domain(format!("λ = {lambda} outside [10, 1e8]")));
        }
        if !(t1 < t2) || !t1.is_finite() || !t2.is_finite() {
            return Err(Error::domain(format!("window [{t1}, {t2}] is empty")));
        }
        if t2 <= 1.0 {
            return Err(Error::domain("T = t2 must exceed 1 for log T > 0"));
        }
        if !(alpha >= 1.0) {
            return Err(Error::domain(format!("α = {alpha} below 1")));
        }
        let delta_margin = (2.0 * alpha * lambda * t2.ln()).sqrt();
        Ok(Self { lambda, t1, t2, alpha, delta_margin })
    }

    /// `max(T^{−α}, 1e−12)`.
    pub fn bound(&self) -> f64 {
        self.t2.powf(-self.alpha).max(BOUND_FLOOR)
    }

    /// True when `T^{−α}` is below the floor and the floor is asserted instead.
    pub fn bound_is_floored(&self) -> bool {
        self.t2.powf(-self.alpha) < BOUND_FLOOR
    }

    /// `ε` with `λ = T^{2−ε}`.
    pub fn implied_epsilon(&self) -> f64 {
        2.0 - self.lambda.ln() / self.t2.ln()
    }

    /// Same kernel on another window.
    pub fn with_window(&self, t1: f64, t2: f64) -> Result<Self> {
        Self::new(self.lambda, t1, t2, self.alpha)
    }
}

/// The kernel integrand `e^λ Γ(λ+ix) λ^{−λ−ix} / (2π)` at offset `x = u − t`.
pub fn kernel_density(lambda: f64, x: f64) -> Complex64 {
    scaled_kernel_exponent(lambda, x).exp() / (2.0 * PI)
}

fn gl_integral(rule: &GaussLegendre, lambda: f64, a: f64, b: f64) -> Complex64 {
    if a >= b {
        return Complex64::new(0.0, 0.0);
    }
    rule.integrate_complex(a, b, |x| kernel_density(lambda, x))
}

/// `∫_a^b` of the kernel density in `x = u − t`, with composite Gauss–Legendre
/// panels of width `√λ/4` aligned to the grid `x = j √λ/4`, plus an error
/// estimate from the 10-node rule on the same panels.
fn density_integral(lambda: f64, a: f64, b: f64) -> (Complex64, f64) {
    let r = CLIP_SIGMAS * lambda.sqrt();
    let (a, b) = (a.max(-r), b.min(r));
    if a >= b {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let high = GaussLegendre::new(NODES);
    let low = GaussLegendre::new(NODES / 2);
    let w = PANEL_SIGMAS * lambda.sqrt();
    let first = (a / w).floor() as i64;
    let last = (b / w).ceil() as i64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for j in first..last {
        let pa = (j as f64 * w).max(a);
        let pb = ((j + 1) as f64 * w).min(b);
        if pa >= pb {
            continue;
        }
        let hi = gl_integral(&high, lambda, pa, pb);
        let lo = gl_integral(&low, lambda, pa, pb);
        total += hi;
        err += (hi - lo).norm();
    }
    (total, err)
}

/// `ω(t, T₁, T₂)` and an estimate of its quadrature error.
pub fn omega_with_error(t: f64, p: &KernelParams) -> (Complex64, f64) {
    density_integral(p.lambda, p.t1 - t, p.t2 - t)
}

/// `ω(t, T₁, T₂)`.
pub fn omega(t: f64, p: &KernelParams) -> Complex64 {
    omega_with_error(t, p).0
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Gaussian approximation `Φ((T₂−t)/√λ) − Φ((T₁−t)/√λ)`.
pub fn omega_gaussian(t: f64, p: &KernelParams) -> f64 {
    let s = p.lambda.sqrt();
    normal_cdf((p.t2 - t) / s) - normal_cdf((p.t1 - t) / s)
}

/// Cumulative kernel mass `G(y) = ∫_{−12√λ}^{y}` of the density, tabulated at
/// panel edges so that `ω(t) = G(T₂−t) − G(T₁−t)` costs one partial panel per
/// endpoint.
#[derive(Debug, Clone)]
pub struct KernelCdf {
    lambda: f64,
    width: f64,
    start: f64,
    prefix: Vec<Complex64>,
    rule: GaussLegendre,
}

impl KernelCdf {
    pub fn new(lambda: f64) -> Self {
        let r = CLIP_SIGMAS * lambda.sqrt();
        let width = PANEL_SIGMAS * lambda.sqrt();
        let panels = (2.0 * r / width).round() as usize;
        let rule = GaussLegendre::new(NODES);
        let mut prefix = Vec::with_capacity(panels + 1);
        let mut acc = Complex64::new(0.0, 0.0);
        prefix.push(acc);
        for j in 0..panels {
            let a = -r + j as f64 * width;
            acc += gl_integral(&rule, lambda, a, a + width);
            prefix.push(acc);
        }
        Self { lambda, width, start: -r, prefix, rule }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Total clipped mass, `≈ 1`.
    pub fn total(&self) -> Complex64 {
        *self.prefix.last().expect("at least one edge")
    }

    /// `G(y)`.
    pub fn cdf(&self, y: f64) -> Complex64 {
        if y <= self.start {
            return Complex64::new(0.0, 0.0);
        }
        let pos = (y - self.start) / self.width;
        let j = pos.floor() as usize;
        if j >= self.prefix.len() - 1 {
            return self.total();
        }
        let a = self.start + j as f64 * self.width;
        self.prefix[j] + gl_integral(&self.rule, self.lambda, a, y)
    }

    /// `ω(t)` on the window `[t1, t2]`.
    pub fn omega(&self, t: f64, t1: f64, t2: f64) -> Complex64 {
        self.cdf(t2 - t) - self.cdf(t1 - t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Interior,
    Exterior,
    Edge,
}

/// One row of [`kernel_window_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowRow {
    pub t: f64,
    pub omega: Complex64,
    /// `|ω − 1|` for interior points, `|ω|` otherwise.
    pub deviation: f64,
    pub region: Region,
    pub quad_error: f64,
    /// `None` for edge points.
    pub pass: Option<bool>,
}

pub fn classify(t: f64, p: &KernelParams) -> Region {
    let d = p.delta_margin;
    if t >= p.t1 + d && t <= p.t2 - d {
        Region::Interior
    } else if t <= p.t1 - d || t >= p.t2 + d {
        Region::Exterior
    } else {
        Region::Edge
    }
}

/// Evaluates `ω` on `grid` and checks interior points against `|ω−1| ≤ bound`
/// and exterior points against `|ω| ≤ bound`, `bound = max(T^{−α}, 1e−12)`.
pub fn kernel_window_report(p: &KernelParams, grid: &[f64]) -> Vec<WindowRow> {
    let bound = p.bound();
    crate::par_map(grid, |&t| {
        let (w, err) = omega_with_error(t, p);
        let region = classify(t, p);
        let deviation = match region {
            Region::Interior => (w - 1.0).norm(),
            _ => w.norm(),
        };
        let pass = (region != Region::Edge).then_some(deviation <= bound);
        WindowRow { t, omega: w, deviation, region, quad_error: err, pass }
    })
}

/// Fails with [`Error::Verification`] listing every interior or exterior
/// point that violates its bound.
pub fn verify_window(rows: &[WindowRow]) -> Result<()> {
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.pass == Some(false))
        .map(|r| format!("t = {} ({:?}, deviation {:.3e})", r.t, r.region, r.deviation))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Verification(format!("window bound violated at {}", bad.join(", "))))
    }
}

/// Argument of the kernel integrand at `(t, u)`, in `(−π, π]`.
pub fn omega_argument(t: f64, u: f64, lambda: f64) -> f64 {
    let phi = scaled_kernel_exponent(lambda, u - t).im;
    let r = phi.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// The two-term approximation `(t−u)/(2λ) − (t−u)³/(6λ²)` of the argument.
pub fn omega_argument_approx(t: f64, u: f64, lambda: f64) -> f64 {
    let d = t - u;
    d / (2.0 * lambda) - d.powi(3) / (6.0 * lambda * lambda)
}
