//! The small-scale double integral
//! `W = ∫_{L_δ} ∫_(c) e^λ v^{s₁} e^{−λv} (1+|s|) Γ(s) cot(πs) e^{−πis/2} (v−1)^{s−1} ds dv/v`
//! and its variants.
//!
//! With `s = c + it` the inner integrand is `k(t) e^{(c−1+it)L}` where
//! `L = log(v − 1)` is the only dependence on `v`. The kernel `k` is
//! tabulated once on a uniform `t` grid; for each outer node the inner
//! integral is then a sum `Σ k(t_j) ζ^j` with `ζ = e^{iΔL}`, accumulated by
//! recurrence. The integrand is analytic in a strip around the real `t`
//! axis and decays at both ends, so the uniform rule converges geometrically
//! in `1/Δ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ContourParams;
use crate::error::{Error, Result};
use crate::quad::{adaptive, count_nodes, AdaptiveOptions};
use crate::specialfn::{cot, log_gamma, log_sin};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WVariant {
    /// `cot(πs)` and `e^{−πis/2}` on `L_δ`.
    #[default]
    Standard,
    /// `1/sin(πs)` in place of `cot(πs)`.
    NoCos,
    /// `L_{−δ}` with `e^{+πis/2}`.
    Mirror,
}

impl WVariant {
    fn ray_sign(self) -> f64 {
        match self {
            WVariant::Mirror => -1.0,
            _ => 1.0,
        }
    }

    /// Exponential rates `σ` folded into the tabulated kernel on the
    /// `t > 0` and `t < 0` sides, so that neither `k(t)e^{σt}` nor
    /// `e^{it(L+iσ)}` leaves the `f64` range.
    fn shifts(self) -> (f64, f64) {
        match self {
            WVariant::Standard | WVariant::NoCos => (0.0, -PI),
            WVariant::Mirror => (PI, 0.0),
        }
    }
}

/// Result of [`w_smallscale`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WResult {
    pub value: Complex64,
    /// Outer quadrature error estimate.
    pub quad_error: f64,
    /// Set when the inner `t` range was cut before the integrand decayed,
    /// or an outer panel ran out of budget.
    pub partial: bool,
    /// `|t|` range used for the inner integral.
    pub t_limit: f64,
    pub outer_evaluations: usize,
    pub inner_terms: u64,
}

/// Inner-kernel step. The strip of analyticity has half-width `1/2` (poles
/// of `cot(πs)` at integer `s`), so the discretisation error is about
/// `e^{−π/Δ}` times the integrand size on the strip.
const T_STEP: f64 = 1.0 / 32.0;
const MAX_KERNEL_NODES: usize = 8_000_000;

struct Kernel {
    /// `k(t_j) e^{σ₊ t_j} Δ` for `j ≥ 0`.
    forward: Vec<Complex64>,
    /// `k(t_j) e^{σ₋ t_j} Δ` for `j = −1, −2, …`.
    backward: Vec<Complex64>,
    sigma: (f64, f64),
}

fn log_kernel(t: f64, c: f64, variant: WVariant) -> Result<Complex64> {
    let s = Complex64::new(c, t);
    let pis = s * PI;
    let factor = match variant {
        WVariant::NoCos => -log_sin(pis),
        _ => cot(pis).ln(),
    };
    let phase = match variant {
        WVariant::Mirror => Complex64::new(0.0, 0.5) * pis,
        _ => Complex64::new(0.0, -0.5) * pis,
    };
    // ds = i dt
    Ok((1.0 + s.norm()).ln() + log_gamma(s)? + factor + phase + Complex64::new(0.0, PI / 2.0))
}

fn build_kernel(c: f64, variant: WVariant, t_limit: f64) -> Result<Kernel> {
    let n = (t_limit / T_STEP).ceil() as usize;
    if n > MAX_KERNEL_NODES {
        return Err(Error::Budget(format!("inner range |t| ≤ {t_limit:.0} needs {n} nodes per side")));
    }
    let sigma = variant.shifts();
    let ln_step = T_STEP.ln();
    let side = |sign: f64, shift: f64, start: usize| -> Result<Vec<Complex64>> {
        (start..=n)
            .map(|j| {
                let t = sign * j as f64 * T_STEP;
                Ok((log_kernel(t, c, variant)? + shift * t + ln_step).exp())
            })
            .collect()
    };
    Ok(Kernel { forward: side(1.0, sigma.0, 0)?, backward: side(-1.0, sigma.1, 1)?, sigma })
}

/// `Σ_j kernel_j e^{i t_j (L + iσ)}` along one side, stopping once the terms
/// have stayed below `1e-18` of the largest for a while. Returns the sum,
/// the number of terms, and whether the table ran out first.
fn side_sum(kernel: &[Complex64], first_t: f64, dt: f64, l: Complex64) -> (Complex64, usize, bool) {
    let i = Complex64::new(0.0, 1.0);
    let step = (i * dt * l).exp();
    let mut w = (i * first_t * l).exp();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut largest: f64 = 0.0;
    let mut quiet = 0;
    for (j, k) in kernel.iter().enumerate() {
        if j > 0 {
            if j % 512 == 0 {
                w = (i * (first_t + j as f64 * dt) * l).exp();
            } else {
                w *= step;
            }
        }
        let term = k * w;
        sum += term;
        let m = term.norm();
        largest = largest.max(m);
        if m < 1e-18 * largest {
            quiet += 1;
            if quiet >= 64 {
                return (sum, j + 1, false);
            }
        } else {
            quiet = 0;
        }
    }
    let last = kernel.last().map_or(0.0, |k| (k * w).norm());
    (sum, kernel.len(), last > 1e-12 * largest)
}

/// `∫_(c) k(t) (v−1)^{s−1} ds` at `L = log(v − 1)`.
fn inner(kernel: &Kernel, c: f64, l: Complex64) -> (Complex64, usize, bool) {
    let i = Complex64::new(0.0, 1.0);
    let (f, nf, cut_f) = side_sum(&kernel.forward, 0.0, T_STEP, l + i * kernel.sigma.0);
    let (b, nb, cut_b) = side_sum(&kernel.backward, -T_STEP, -T_STEP, l + i * kernel.sigma.1);
    ((l * (c - 1.0)).exp() * (f + b), nf + nb, cut_f || cut_b)
}

fn outer_log_weight(p: &ContourParams, x: f64, sign: f64) -> Complex64 {
    let z = Complex64::new(x.ln(), sign * p.delta_ray);
    p.lambda + p.s1 * z - p.lambda * z.exp() - x.ln()
}

/// The double integral `W` at the parameters in `p` (with `δ = p.delta_ray`).
///
/// `t_cut` caps `|Im s|`; `None` picks the range from the decay rate of the
/// inner integrand over the outer nodes. `x_max` caps the outer ray; `None`
/// stops where `e^λ|v^{s₁}e^{−λv}|` falls below `e^{−40}`.
pub fn w_smallscale(p: &ContourParams, variant: WVariant, t_cut: Option<f64>, x_max: Option<f64>) -> Result<WResult> {
    let sign = variant.ray_sign();
    let delta = p.delta_ray;
    let log_w = |x: f64| outer_log_weight(p, x, sign).re + x.ln();
    let peak = log_w((p.lambda + 0.5) / (p.lambda * delta.cos()));
    let mut lo = 1.0;
    while log_w(lo) - peak > -40.0 {
        lo *= 0.98;
    }
    let mut hi = 1.0;
    while log_w(hi) - peak > -40.0 {
        hi *= 1.02;
    }
    if let Some(xm) = x_max {
        if !(xm > 1.0) {
            return Err(Error::domain(format!("x_max = {xm} must exceed 1")));
        }
        hi = hi.min(xm);
    }
    let v_minus_one = |x: f64| Complex64::from_polar(x, sign * delta) - 1.0;
    // slowest decay of the inner integrand over the outer range
    let b_hi = v_minus_one(hi).arg().abs();
    let b_lo = v_minus_one(lo).arg().abs();
    let rate = b_hi.min(PI - b_lo).min(b_lo).min(PI - b_hi);
    let auto = 60.0 / rate;
    let t_limit = t_cut.map_or(auto, |tc| tc.min(auto));
    let kernel = build_kernel(p.c, variant, t_limit)?;

    // panels: geometric about x = 1 down to scale δ, uniform at scale 1/|u| elsewhere
    let mut breaks = vec![1.0];
    let mut r = delta;
    while r < 0.5 {
        breaks.push(1.0 + r);
        breaks.push(1.0 - r);
        r *= 2.0;
    }
    let spacing = (2.0 / p.u.abs().max(1.0)).min(0.02);
    let mut x = lo;
    while x < hi {
        breaks.push(x);
        x += spacing;
    }
    breaks.retain(|&b| b > lo && b < hi);
    breaks.push(lo);
    breaks.push(hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let panels: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).collect();

    let integrand = |x: f64| -> (Complex64, usize, bool) {
        let (i, n, cut) = inner(&kernel, p.c, v_minus_one(x).ln());
        (outer_log_weight(p, x, sign).exp() * i, n, cut)
    };
    let scale = panels
        .iter()
        .map(|&(a, b)| integrand(0.5 * (a + b)).0.norm() * (b - a))
        .fold(0.0, f64::max);
    let n_panels = panels.len() as f64;
    let results = crate::par_map(&panels, |&(a, b)| {
        let mut terms = 0u64;
        let mut cut = false;
        let opts = AdaptiveOptions { abs_tol: 1e-10 * scale / n_panels.sqrt(), rel_tol: 1e-9, max_intervals: 64 };
        let q = adaptive(
            |x| {
                let (v, n, c) = integrand(x);
                terms += n as u64;
                cut |= c;
                v
            },
            a,
            b,
            &[],
            opts,
        );
        (q, terms, cut)
    });
    let mut value = Complex64::new(0.0, 0.0);
    let mut quad_error = 0.0;
    let mut partial = false;
    let mut outer_evaluations = 0;
    let mut inner_terms = 0;
    for (q, terms, cut) in results {
        inner_terms += terms;
        partial |= cut;
        match q {
            Ok(q) => {
                value += q.value;
                quad_error += q.error;
                outer_evaluations += q.evaluations;
            }
            Err(Error::Budget(_)) => partial = true,
            Err(e) => return Err(e),
        }
    }
    count_nodes(inner_terms as usize);
    Ok(WResult { value, quad_error, partial, t_limit, outer_evaluations, inner_terms })
}

/// `|W|` over a grid of heights `T` with `u = T`, `δ = 1/T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WTrend {
    pub big_t: Vec<f64>,
    pub modulus: Vec<f64>,
    /// `|W| / (log T / T)^c`.
    pub normalized: Vec<f64>,
    /// `|W(T_{k+1})| / |W(T_k)|`.
    pub ratios: Vec<f64>,
    /// The same ratio for `(log T / T)^c`.
    pub bound_ratios: Vec<f64>,
    /// Every ratio within a factor `3` of the bound's ratio.
    pub within_band: bool,
    pub partial: bool,
}

/// How `λ` is tied to `T` along a trend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaRule {
    Fixed(f64),
    /// `λ = T^e`.
    Power(f64),
}

impl LambdaRule {
    pub fn lambda(self, big_t: f64) -> f64 {
        match self {
            LambdaRule::Fixed(l) => l,
            LambdaRule::Power(e) => big_t.powf(e),
        }
    }
}

pub fn w_trend(rule: LambdaRule, c: f64, heights: &[f64], variant: WVariant) -> Result<WTrend> {
    let mut modulus = Vec::new();
    let mut partial = false;
    for &t in heights {
        let p = ContourParams::new(rule.lambda(t), t, c, 1.0 / t, 10.0, t)?;
        let w = w_smallscale(&p, variant, None, None)?;
        partial |= w.partial;
        modulus.push(w.value.norm());
    }
    let bound = |t: f64| (t.ln() / t).powf(c);
    let normalized = heights.iter().zip(&modulus).map(|(&t, m)| m / bound(t)).collect();
    let ratios: Vec<f64> = modulus.windows(2).map(|w| w[1] / w[0]).collect();
    let bound_ratios: Vec<f64> = heights.windows(2).map(|w| bound(w[1]) / bound(w[0])).collect();
    let within_band = ratios.iter().zip(&bound_ratios).all(|(r, e)| r / e <= 3.0 && e / r <= 3.0);
    Ok(WTrend { big_t: heights.to_vec(), modulus, normalized, ratios, bound_ratios, within_band, partial })
}
