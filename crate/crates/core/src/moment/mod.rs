//! Second moments of `ζ·A` on the critical line: the integrand, sharp and
//! kernel-smoothed moments, the main term and its density, the Dirichlet
//! series `𝓜(s)` with its supremum `V`, the gcd sum, and the error scan.

mod gcd;
mod poly;
mod scan;
mod script;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{kernel_density, KernelCdf, KernelParams, CLIP_SIGMAS};
use crate::quad::GaussLegendre;
use crate::specialfn::{reduce_fraction, zeta, ZetaMode};
use crate::EULER_GAMMA;

pub use gcd::{gcd_sum, gcd_sum_brute, gcd_sum_upper_bound};
pub use poly::{poly_eval, DirichletPolynomial, MollifierKind};
pub use scan::{error_scan, ScanCell, ScanFit, ScanReport};
pub use script::{script_m, script_m_value, v_sup, ScriptMPoint, VSup};

/// `b₀ = 2γ`.
pub const DEFAULT_B0: f64 = 2.0 * EULER_GAMMA;
/// Default cap on quadrature nodes per moment.
pub const DEFAULT_MAX_NODES: usize = 2_000_000;
const ORDER: usize = 16;
/// `Auto` keeps Euler–Maclaurin up to this height inside the integrand. The
/// truncated Riemann–Siegel series is ~4e-8 off at t = 100 and ~5e-10 at 500,
/// which would otherwise bias moments over short ranges.
const INTEGRAND_RS_FROM: f64 = 500.0;

/// `|ζ(1/2+it)|² |A(1/2+it)|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifiedIntegrand {
    pub poly: DirichletPolynomial,
    pub zeta_mode: ZetaMode,
}

impl MollifiedIntegrand {
    pub fn new(poly: DirichletPolynomial) -> Self {
        Self { poly, zeta_mode: ZetaMode::Auto }
    }
}

pub fn integrand(mi: &MollifiedIntegrand, t: f64) -> Result<f64> {
    let s = Complex64::new(0.5, t);
    let mode = match mi.zeta_mode {
        ZetaMode::Auto if t.abs() < INTEGRAND_RS_FROM => ZetaMode::EulerMaclaurin,
        m => m,
    };
    let z = zeta(s, mode)?;
    let a = poly_eval(&mi.poly, s);
    Ok(z.norm_sqr() * a.norm_sqr())
}

/// Quadrature controls for the moment integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentOptions {
    /// Nodes per unit length; `None` uses one 16-node panel per mean zero
    /// spacing `2π / log(t/2π)`.
    pub nodes_per_unit: Option<f64>,
    pub max_nodes: usize,
    pub b0: f64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self { nodes_per_unit: None, max_nodes: DEFAULT_MAX_NODES, b0: DEFAULT_B0 }
    }
}

/// A sharp moment over `[t_lo, t_hi]` with the main term of the same range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub t_lo: f64,
    pub t_hi: f64,
    pub i_numeric: f64,
    /// `main_term(t_hi) − main_term(t_lo)`.
    pub main_term: f64,
    /// `i_numeric − main_term`.
    pub error_term: f64,
    pub b0_used: f64,
    pub quadrature_nodes: usize,
    pub est_quadrature_error: f64,
}

/// A quadrature value with its order-halving error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub est_error: f64,
    pub nodes: usize,
}

/// Mean zero spacing `2π / log(t/2π)`, floored at `t = 2πe`.
fn zero_spacing(t: f64) -> f64 {
    2.0 * PI / (t / (2.0 * PI)).max(std::f64::consts::E).ln()
}

/// Panel-wise 16-node Gauss–Legendre with an 8-node estimate on each panel.
fn panel_integral<F>(a: f64, b: f64, width: f64, max_nodes: usize, f: F) -> Result<Integral>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    if a == b {
        return Ok(Integral { value: 0.0, est_error: 0.0, nodes: 0 });
    }
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let nodes = panels * (ORDER + ORDER / 2);
    if nodes > max_nodes {
        let pieces = nodes.div_ceil(max_nodes);
        return Err(Error::Budget(format!(
            "[{a}, {b}] needs {nodes} nodes (cap {max_nodes}); split into at least {pieces} ranges"
        )));
    }
    let high = GaussLegendre::new(ORDER);
    let low = GaussLegendre::new(ORDER / 2);
    let h = (b - a) / panels as f64;
    let idx: Vec<usize> = (0..panels).collect();
    let parts = crate::par_map(&idx, |&j| -> Result<(f64, f64)> {
        let pa = a + h * j as f64;
        let pb = if j + 1 == panels { b } else { pa + h };
        let mut err = None;
        let mut g = |x: f64| match f(x) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        };
        let hi = high.integrate(pa, pb, &mut g);
        let lo = low.integrate(pa, pb, &mut g);
        match err {
            Some(e) => Err(e),
            None => Ok((hi, (hi - lo).abs())),
        }
    });
    let mut value = 0.0;
    let mut est_error = 0.0;
    for p in parts {
        let (v, e) = p?;
        value += v;
        est_error += e;
    }
    Ok(Integral { value, est_error, nodes })
}

fn panel_width(t_hi: f64, opts: &MomentOptions) -> Result<f64> {
    let spacing = zero_spacing(t_hi);
    match opts.nodes_per_unit {
        None => Ok(spacing),
        Some(n) => {
            let need = 4.0 / spacing;
            if !(n >= need) {
                return Err(Error::domain(format!(
                    "{n} nodes per unit is below 4 per mean zero spacing ({need:.3})"
                )));
            }
            Ok((ORDER as f64 / n).min(spacing))
        }
    }
}

/// `∫_{t_lo}^{t_hi} |ζA(1/2+it)|² dt` with the matching main term.
pub fn sharp_moment(mi: &MollifiedIntegrand, t_lo: f64, t_hi: f64, opts: &MomentOptions) -> Result<MomentReport> {
    if !(t_lo >= 0.0 && t_hi >= t_lo) {
        return Err(Error::domain(format!("need 0 ≤ t_lo ≤ t_hi, got [{t_lo}, {t_hi}]")));
    }
    let width = panel_width(t_hi, opts)?;
    let q = panel_integral(t_lo, t_hi, width, opts.max_nodes, |t| integrand(mi, t))?;
    let main = main_term(&mi.poly, t_hi, opts.b0) - main_term(&mi.poly, t_lo, opts.b0);
    let i_numeric = q.value.max(0.0);
    Ok(MomentReport {
        t_lo,
        t_hi,
        i_numeric,
        main_term: main,
        error_term: i_numeric - main,
        b0_used: opts.b0,
        quadrature_nodes: q.nodes,
        est_quadrature_error: q.est_error,
    })
}

/// `∫_{t_lo}^{t_hi} Re ω(t, T₁, T₂) |ζA(1/2+it)|² dt` with the kernel and
/// window of `kp`.
///
/// The range must cover the window widened by `12√λ` (clipped at `0`).
pub fn smoothed_moment(
    mi: &MollifiedIntegrand,
    kp: &KernelParams,
    t_lo: f64,
    t_hi: f64,
    opts: &MomentOptions,
) -> Result<Integral> {
    let slack = CLIP_SIGMAS * kp.lambda.sqrt();
    if t_lo > (kp.t1 - slack).max(0.0) || t_hi < kp.t2 + slack {
        return Err(Error::domain(format!(
            "range [{t_lo}, {t_hi}] does not cover the window [{}, {}] plus {slack:.1}",
            kp.t1, kp.t2
        )));
    }
    let cdf = KernelCdf::new(kp.lambda);
    let width = panel_width(t_hi, opts)?.min(0.25 * kp.lambda.sqrt());
    panel_integral(t_lo, t_hi, width, opts.max_nodes, |t| {
        let w = cdf.omega(t, kp.t1, kp.t2).re;
        if w.abs() < 1e-300 {
            return Ok(0.0);
        }
        Ok(w * integrand(mi, t)?)
    })
}

/// One `(h, k)` term's bracket weight `a(h)ā(k)(h,k)/(hk)` and `log((h,k)²/(hk))`.
fn pair_terms(poly: &DirichletPolynomial) -> Vec<(Complex64, f64)> {
    let m = poly.m_max();
    let mut out = Vec::new();
    for h in 1..=m {
        let ah = poly.coeff(h);
        if ah == Complex64::new(0.0, 0.0) {
            continue;
        }
        for k in 1..=m {
            let ak = poly.coeff(k);
            if ak == Complex64::new(0.0, 0.0) {
                continue;
            }
            let g = reduce_fraction(h as u64, k as u64).expect("k ≥ 1").gcd as f64;
            let hk = (h * k) as f64;
            out.push((ah * ak.conj() * g / hk, (g * g / hk).ln()));
        }
    }
    out
}

/// Hermitian-paired sum `Σ_{h,k} a(h)ā(k)(h,k)/(hk) · f(log((h,k)²/hk))`,
/// summing `h ≤ k` and doubling real parts of the off-diagonal pairs.
fn paired_sum(poly: &DirichletPolynomial, f: impl Fn(f64) -> f64) -> f64 {
    let m = poly.m_max();
    let mut total = 0.0;
    for h in 1..=m {
        let ah = poly.coeff(h);
        if ah == Complex64::new(0.0, 0.0) {
            continue;
        }
        for k in h..=m {
            let ak = poly.coeff(k);
            if ak == Complex64::new(0.0, 0.0) {
                continue;
            }
            let g = reduce_fraction(h as u64, k as u64).expect("k ≥ 1").gcd as f64;
            let hk = (h * k) as f64;
            let w = (ah * ak.conj()).re * g / hk * f((g * g / hk).ln());
            total += if h == k { w } else { 2.0 * w };
        }
    }
    total
}

/// `T Σ_{h,k≤M} a(h)ā(k)/(hk) · (h,k) (log(T(h,k)²/(2πhk)) + b₀ − 1)`;
/// `0` at `T = 0`.
pub fn main_term(poly: &DirichletPolynomial, t_total: f64, b0: f64) -> f64 {
    if t_total == 0.0 {
        return 0.0;
    }
    let lt = (t_total / (2.0 * PI)).ln();
    t_total * paired_sum(poly, |l| lt + l + b0 - 1.0)
}

/// The same double sum without Hermitian pairing; its imaginary part
/// measures the asymmetry that pairing removes.
pub fn main_term_unsymmetrized(poly: &DirichletPolynomial, t_total: f64, b0: f64) -> Complex64 {
    let lt = (t_total / (2.0 * PI)).ln();
    pair_terms(poly).iter().map(|&(w, l)| w * (lt + l + b0 - 1.0)).sum::<Complex64>() * t_total
}

/// `Σ a(h)ā(k)/(hk) · (h,k)(log(u(h,k)²/(2πhk)) + b₀)`, the `T`-derivative
/// of [`main_term`].
pub fn g_main(poly: &DirichletPolynomial, u: f64, b0: f64) -> f64 {
    let lu = (u / (2.0 * PI)).ln();
    paired_sum(poly, |l| lu + l + b0)
}

/// `𝔤(u)` as the kernel-weighted local average
/// `∫ Re[e^λΓ(λ+i(u−t))λ^{−λ−i(u−t)}]/(2π) · |ζA(1/2+it)|² dt`
/// over `|t − u| ≤ 12√λ`.
pub fn g_numeric(mi: &MollifiedIntegrand, u: f64, lambda: f64, opts: &MomentOptions) -> Result<Integral> {
    let r = CLIP_SIGMAS * lambda.sqrt();
    let width = panel_width(u + r, opts)?.min(0.25 * lambda.sqrt());
    panel_integral(u - r, u + r, width, opts.max_nodes, |t| {
        Ok(kernel_density(lambda, u - t).re * integrand(mi, t)?)
    })
}

/// [`g_numeric`] with the integrand replaced by `1`: the kernel mass.
pub fn g_numeric_unit(u: f64, lambda: f64) -> Result<Integral> {
    let r = CLIP_SIGMAS * lambda.sqrt();
    panel_integral(u - r, u + r, 0.25 * lambda.sqrt(), usize::MAX, |t| Ok(kernel_density(lambda, u - t).re))
}
