//! Browser bindings: the kernel window, the mollified integrand along the
//! critical line, and the growth of the gcd sum.

use wasm_bindgen::prelude::*;
use zeta_moment::kernel::{KernelCdf, CLIP_SIGMAS};
use zeta_moment::moment::{gcd_sum, integrand, main_term, DirichletPolynomial, MollifiedIntegrand, MollifierKind, DEFAULT_B0};

fn js_err(e: zeta_moment::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn kind(name: &str) -> Result<MollifierKind, JsError> {
    match name {
        "ones" => Ok(MollifierKind::Ones),
        "moebius" => Ok(MollifierKind::Moebius),
        "smoothed-moebius" => Ok(MollifierKind::SmoothedMoebius),
        _ => Err(JsError::new(&format!("unknown mollifier {name:?}"))),
    }
}

/// `ω(t)` on `n` points spanning the window `[t1, t2]` plus `12√λ` on each
/// side, as interleaved `[t, Re ω, Im ω, …]`.
#[wasm_bindgen]
pub fn kernel_profile(lambda: f64, t1: f64, t2: f64, n: usize) -> Result<Vec<f64>, JsError> {
    if !(10.0..=1e8).contains(&lambda) || !(t2 > t1) || n < 2 || n > 20_000 {
        return Err(JsError::new("need 10 ≤ λ ≤ 1e8, t1 < t2 and 2 ≤ n ≤ 20000"));
    }
    let cdf = KernelCdf::new(lambda);
    let pad = CLIP_SIGMAS * lambda.sqrt();
    let (a, b) = (t1 - pad, t2 + pad);
    let mut out = Vec::with_capacity(3 * n);
    for i in 0..n {
        let t = a + (b - a) * i as f64 / (n - 1) as f64;
        let w = cdf.omega(t, t1, t2);
        out.extend([t, w.re, w.im]);
    }
    Ok(out)
}

/// `|ζ(1/2+it)A(1/2+it)|²` on `n` points of `[t_lo, t_hi]`, as `[t, value, …]`.
#[wasm_bindgen]
pub fn integrand_profile(mollifier: &str, m: usize, t_lo: f64, t_hi: f64, n: usize) -> Result<Vec<f64>, JsError> {
    if !(t_lo >= 0.0 && t_hi > t_lo && t_hi <= 1e5) || n < 2 || n > 20_000 || m == 0 || m > 1000 {
        return Err(JsError::new("need 0 ≤ t_lo < t_hi ≤ 1e5, 2 ≤ n ≤ 20000 and 1 ≤ M ≤ 1000"));
    }
    let poly = DirichletPolynomial::preset(kind(mollifier)?, m).map_err(js_err)?;
    let mi = MollifiedIntegrand::new(poly);
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let t = t_lo + (t_hi - t_lo) * i as f64 / (n - 1) as f64;
        out.extend([t, integrand(&mi, t).map_err(js_err)?]);
    }
    Ok(out)
}

/// Main term `T Σ a(h)ā(k)(h,k)/(hk)(log(T(h,k)²/2πhk) + 2γ − 1)`.
#[wasm_bindgen]
pub fn moment_main_term(mollifier: &str, m: usize, t: f64) -> Result<f64, JsError> {
    let poly = DirichletPolynomial::preset(kind(mollifier)?, m).map_err(js_err)?;
    Ok(main_term(&poly, t, DEFAULT_B0))
}

/// `Σ_{h,k≤M} (h,k)/(hk)` against `log³M` at `points` values of `M` spaced
/// geometrically up to `m_max`, as `[M, sum, log³M, …]`.
#[wasm_bindgen]
pub fn gcd_growth(m_max: usize, points: usize) -> Result<Vec<f64>, JsError> {
    if !(2..=1_000_000).contains(&m_max) || !(2..=200).contains(&points) {
        return Err(JsError::new("need 2 ≤ M ≤ 1e6 and 2 ≤ points ≤ 200"));
    }
    let mut out = Vec::with_capacity(3 * points);
    let mut last = 0;
    for i in 0..points {
        let m = ((m_max as f64).powf(i as f64 / (points - 1) as f64)).round().max(2.0) as usize;
        if m == last {
            continue;
        }
        last = m;
        out.extend([m as f64, gcd_sum(m), (m as f64).ln().powi(3)]);
    }
    Ok(out)
}
