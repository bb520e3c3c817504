//! The Estermann function `D(s, h/k) = Σ d(n) e(nh/k) n^{−s}`, the divisor
//! exponential sum `S(x, h/k)` and the identity linking them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{adaptive, AdaptiveOptions};
use crate::specialfn::{cot, hurwitz_em, log_gamma, log_sin, reduce_fraction, ArithmeticTable, ReducedFraction};
use crate::EULER_GAMMA;

/// Largest direct-series length the tolerance-driven variant will sieve.
pub const DIRECT_MAX_TERMS: u64 = 20_000_000;

/// Hurwitz zeta `ζ(s, a)` for `a ∈ (0, 1]`.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::domain(format!("Hurwitz parameter a = {a} outside (0, 1]")));
    }
    hurwitz_em(s, a)
}

/// `e(θ) = exp(2πiθ)` at `θ = j/k`, exact in the residue `j mod k`.
fn e_frac(j: u64, k: u64) -> Complex64 {
    let r = j % k;
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / k as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

/// The point `(s, ±h*/k*)` at which `D` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstermannPoint {
    pub s: Complex64,
    pub frac: ReducedFraction,
    pub sign: Sign,
}

impl EstermannPoint {
    pub fn new(s: Complex64, frac: ReducedFraction, sign: Sign) -> Self {
        Self { s, frac, sign }
    }

    /// The point `(s, ±h̄*/k*)` built from the inverse numerator of `frac`.
    pub fn inverse(s: Complex64, frac: ReducedFraction, sign: Sign) -> Self {
        let inv = reduce_fraction(frac.h_bar_star % frac.k_star, frac.k_star)
            .expect("k* is positive");
        Self { s, frac: inv, sign }
    }

    /// Numerator reduced into `[0, k*)` with the sign applied.
    fn residue(&self) -> u64 {
        let k = self.frac.k_star;
        let h = self.frac.h_star % k;
        match self.sign {
            Sign::Plus => h,
            Sign::Minus => (k - h) % k,
        }
    }
}

/// A truncated series with a certified bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms: u64,
    pub tail_bound: f64,
}

/// Bound on `Σ_{n>N} d(n) n^{−σ}` for `σ > 1`, by partial summation with
/// `Σ_{n≤x} d(n) ≤ x(log x + 1)`.
pub fn divisor_tail_bound(n: u64, sigma: f64) -> f64 {
    let nf = n.max(1) as f64;
    let e = sigma - 1.0;
    sigma * nf.powf(-e) * ((nf.ln() + 1.0) / e + 1.0 / (e * e))
}

/// Direct partial sum `Σ_{n≤n_max} d(n) e(nh/k) n^{−s}` with its tail bound.
pub fn estermann_direct(p: &EstermannPoint, n_max: u64) -> Result<SeriesValue> {
    if p.s.re <= 1.0 {
        return Err(Error::Region(format!("direct series needs Re s > 1, got {}", p.s)));
    }
    let table = ArithmeticTable::new(n_max as usize);
    let k = p.frac.k_star;
    let h = p.residue();
    let mut sum = Complex64::new(0.0, 0.0);
    // add from the smallest terms up
    for n in (1..=n_max).rev() {
        let d = f64::from(table.divisor_counts()[n as usize]);
        sum += e_frac(n * h, k) * (-p.s * (n as f64).ln()).exp() * d;
    }
    Ok(SeriesValue { value: sum, terms: n_max, tail_bound: divisor_tail_bound(n_max, p.s.re) })
}

/// Direct series with the length chosen so the certified tail is below `tol`.
///
/// Refuses with [`Error::Truncation`] when that needs more than
/// [`DIRECT_MAX_TERMS`] terms.
pub fn estermann_direct_tol(p: &EstermannPoint, tol: f64) -> Result<SeriesValue> {
    if p.s.re <= 1.0 {
        return Err(Error::Region(format!("direct series needs Re s > 1, got {}", p.s)));
    }
    let mut n = 16u64;
    while divisor_tail_bound(n, p.s.re) > tol {
        n *= 2;
        if n > DIRECT_MAX_TERMS {
            return Err(Error::Truncation(format!(
                "tail below {tol:e} at Re s = {} needs more than {DIRECT_MAX_TERMS} terms",
                p.s.re
            )));
        }
    }
    estermann_direct(p, n)
}

/// `D(s, h/k) = k^{−2s} Σ_{α,β=1}^{k} e(αβh/k) ζ(s, α/k) ζ(s, β/k)`, valid
/// for every `s ≠ 1`.
pub fn estermann_continued(p: &EstermannPoint) -> Result<Complex64> {
    if p.s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("1 (double pole of D)".into()));
    }
    let k = p.frac.k_star;
    let h = p.residue();
    let kf = k as f64;
    let zetas: Vec<Complex64> =
        (1..=k).map(|a| hurwitz_em(p.s, a as f64 / kf)).collect::<Result<_>>()?;
    let phases: Vec<Complex64> = (0..k).map(|j| e_frac(j, k)).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for (a, za) in zetas.iter().enumerate() {
        let alpha = a as u64 + 1;
        let mut inner = Complex64::new(0.0, 0.0);
        for (b, zb) in zetas.iter().enumerate() {
            let beta = b as u64 + 1;
            inner += phases[((alpha * beta % k) * h % k) as usize] * zb;
        }
        total += za * inner;
    }
    Ok(total * (-2.0 * p.s * kf.ln()).exp())
}

/// Point `x` (with `Im x > 0`) and fraction at which `S(x, h/k)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumPoint {
    pub x: Complex64,
    pub frac: ReducedFraction,
    /// `z = −2πix`.
    pub z: Complex64,
}

impl SumPoint {
    pub fn new(x: Complex64, frac: ReducedFraction) -> Result<Self> {
        if x.im <= 0.0 {
            return Err(Error::Divergence(format!("S(x, h/k) needs Im x > 0, got {x}")));
        }
        Ok(Self { x, frac, z: Complex64::new(0.0, -2.0 * PI) * x })
    }
}

/// `S(x, h/k) = Σ_{n≤n_max} d(n) e(nh/k) e^{2πinx}` with a tail bound from
/// `d(n) ≤ 2√n`.
pub fn s_sum(p: &SumPoint, n_max: u64) -> Result<SeriesValue> {
    if p.x.im <= 0.0 {
        return Err(Error::Divergence(format!("S(x, h/k) needs Im x > 0, got {}", p.x)));
    }
    let q = (-2.0 * PI * p.x.im).exp();
    let table = ArithmeticTable::new(n_max as usize);
    let k = p.frac.k_star;
    let h = p.frac.h_star % k;
    let step = (Complex64::new(0.0, 2.0 * PI) * p.x).exp();
    let mut pow = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..=n_max {
        pow *= step;
        sum += e_frac(n * h, k) * pow * f64::from(table.divisor_counts()[n as usize]);
    }
    let n1 = (n_max + 1) as f64;
    let rho = q * ((n1 + 1.0) / n1).sqrt();
    let tail_bound = if rho < 1.0 { 2.0 * n1.sqrt() * q.powf(n1) / (1.0 - rho) } else { f64::INFINITY };
    Ok(SeriesValue { value: sum, terms: n_max, tail_bound })
}

/// [`s_sum`] with the length chosen so the tail bound is below `1e-17`.
pub fn s_sum_auto(p: &SumPoint) -> Result<SeriesValue> {
    if p.x.im <= 0.0 {
        return Err(Error::Divergence(format!("S(x, h/k) needs Im x > 0, got {}", p.x)));
    }
    let q = (-2.0 * PI * p.x.im).exp();
    let mut n = 1u64;
    loop {
        let n1 = (n + 1) as f64;
        let rho = q * ((n1 + 1.0) / n1).sqrt();
        if rho < 1.0 && 2.0 * n1.sqrt() * q.powf(n1) / (1.0 - rho) < 1e-17 {
            break;
        }
        n += 1;
        if n > DIRECT_MAX_TERMS {
            return Err(Error::Truncation(format!("Im x = {} too small", p.x.im)));
        }
    }
    s_sum(p, n)
}

/// Power of `2π` in the line integral of the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoPiPower {
    /// `(2π)^{−s}`, as printed.
    Single,
    /// `(2π)^{−2s}`, as produced by the functional equation of `D`.
    Double,
}

/// Normalization of the line integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `−i ∫`, the `1/2πi` and a factor `2π` absorbed.
    MinusI,
    /// `−i/(2πi) ∫`, an extra explicit `1/2πi`.
    ExtraInvTwoPiI,
}

/// Numerator of the constant term `D(0, ·/k*)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantNumerator {
    /// `D(0, h*/k*)`.
    Direct,
    /// `D(0, h̄*/k*)`.
    Inverse,
}

/// One way of reading the identity's right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IdentityReading {
    pub two_pi_power: TwoPiPower,
    pub normalization: Normalization,
    pub constant: ConstantNumerator,
}

impl Default for IdentityReading {
    fn default() -> Self {
        Self {
            two_pi_power: TwoPiPower::Double,
            normalization: Normalization::MinusI,
            constant: ConstantNumerator::Direct,
        }
    }
}

impl IdentityReading {
    pub fn all() -> Vec<IdentityReading> {
        let mut out = Vec::new();
        for two_pi_power in [TwoPiPower::Double, TwoPiPower::Single] {
            for normalization in [Normalization::MinusI, Normalization::ExtraInvTwoPiI] {
                for constant in [ConstantNumerator::Direct, ConstantNumerator::Inverse] {
                    out.push(IdentityReading { two_pi_power, normalization, constant });
                }
            }
        }
        out
    }
}

/// Both sides of the identity at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: Complex64,
    pub polar_term: Complex64,
    pub constant_term: Complex64,
    pub line_integral: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    /// Error estimate of the line-integral quadrature.
    pub quad_error: f64,
    /// `|integrand|` at `|Im s| = t_cut` over its maximum on the line.
    pub edge_ratio: f64,
}

/// Checks
/// `S(x, h/k) = (γ − log z − 2 log k*)/(z k*) + D(0, h*/k*)
///   − i ∫_(c) (2π)^{−2s} Γ(s) k*^{2s−1} / sin(πs) · (D(s, h̄*/k*) + cos(πs) D(s, −h̄*/k*)) z^{s−1} ds`
/// with the line integral truncated at `|Im s| ≤ t_cut`. `reading` selects
/// the variants of the printed formula.
pub fn estermann_identity_check(
    p: &SumPoint,
    c: f64,
    t_cut: f64,
    reading: IdentityReading,
) -> Result<IdentityCheck> {
    if !(c > 1.0 && c < 2.0) {
        return Err(Error::domain(format!("line abscissa c = {c} outside (1, 2)")));
    }
    let z = p.z;
    let log_z = z.ln();
    // the integrand decays like exp(−|τ|(π/2 − |arg z|))
    let decay = PI / 2.0 - log_z.im.abs();
    if decay <= 0.0 {
        return Err(Error::Branch(format!("|arg z| = {} ≥ π/2, line integral diverges", log_z.im.abs())));
    }
    let lhs = s_sum_auto(p)?.value;
    let k = p.frac.k_star;
    let kf = k as f64;
    let polar_term = (EULER_GAMMA - log_z - 2.0 * kf.ln()) / (z * kf);
    let const_frac = match reading.constant {
        ConstantNumerator::Direct => p.frac,
        ConstantNumerator::Inverse => reduce_fraction(p.frac.h_bar_star % k, k)?,
    };
    let constant_term =
        estermann_continued(&EstermannPoint::new(Complex64::new(0.0, 0.0), const_frac, Sign::Plus))?;

    let ln_2pi = (2.0 * PI).ln();
    let power = match reading.two_pi_power {
        TwoPiPower::Single => 1.0,
        TwoPiPower::Double => 2.0,
    };
    let mut failure: Option<Error> = None;
    let mut integrand = |tau: f64| -> Complex64 {
        let s = Complex64::new(c, tau);
        let eval = || -> Result<Complex64> {
            let dp = estermann_continued(&EstermannPoint::inverse(s, p.frac, Sign::Plus))?;
            let dm = estermann_continued(&EstermannPoint::inverse(s, p.frac, Sign::Minus))?;
            let common = (-power * s * ln_2pi + (2.0 * s - 1.0) * kf.ln() + (s - 1.0) * log_z + log_gamma(s)?)
                .exp();
            let ps = s * PI;
            Ok(common * ((-log_sin(ps)).exp() * dp + cot(ps) * dm))
        };
        match eval() {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let edge = integrand(t_cut).norm().max(integrand(-t_cut).norm());
    let peak = integrand(0.0).norm().max(1e-300);
    let opts = AdaptiveOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 4000 };
    let breaks: Vec<f64> = [-10.0, -3.0, 0.0, 3.0, 10.0].into_iter().filter(|b: &f64| b.abs() < t_cut).collect();
    let q = adaptive(&mut integrand, -t_cut, t_cut, &breaks, opts)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let norm = match reading.normalization {
        Normalization::MinusI => Complex64::new(0.0, -1.0),
        Normalization::ExtraInvTwoPiI => Complex64::new(0.0, -1.0) / Complex64::new(0.0, 2.0 * PI),
    };
    // ds = i dτ on the vertical line
    let line_integral = norm * Complex64::i() * q.value;
    let rhs = polar_term + constant_term + line_integral;
    Ok(IdentityCheck {
        lhs,
        polar_term,
        constant_term,
        line_integral,
        rhs,
        residual: (lhs - rhs).norm(),
        quad_error: q.error,
        edge_ratio: edge / peak,
    })
}

/// The reading with the smallest residual, together with all residuals.
pub fn resolve_identity_reading(
    p: &SumPoint,
    c: f64,
    t_cut: f64,
) -> Result<(IdentityReading, Vec<(IdentityReading, f64)>)> {
    let mut table = Vec::new();
    for reading in IdentityReading::all() {
        table.push((reading, estermann_identity_check(p, c, t_cut, reading)?.residual));
    }
    let best = table
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|r| r.0)
        .expect("eight readings");
    Ok((best, table))
}

/// `|D(0, h*/k*)|` against `k*(log 2k*)²` for one reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantBound {
    pub h_star: u64,
    pub k_star: u64,
    pub modulus: f64,
    pub bound: f64,
}

/// `|D(0, h/k)|` and its bound for every reduced `h/k` with `k ≤ k_max`.
pub fn d0_bound_sweep(k_max: u64) -> Result<Vec<ConstantBound>> {
    let mut out = Vec::new();
    for k in 1..=k_max {
        for h in 0..k {
            let f = reduce_fraction(h, k)?;
            if f.k_star != k {
                continue;
            }
            let v = estermann_continued(&EstermannPoint::new(Complex64::new(0.0, 0.0), f, Sign::Plus))?;
            let kf = k as f64;
            out.push(ConstantBound { h_star: f.h_star, k_star: k, modulus: v.norm(), bound: kf * (2.0 * kf).ln().powi(2) });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn point(s: Complex64, h: u64, k: u64) -> EstermannPoint {
        EstermannPoint::new(s, reduce_fraction(h, k).unwrap(), Sign::Plus)
    }

    #[test]
    fn hurwitz_domain() {
        assert!(hurwitz_zeta(c(2.0, 0.0), 0.0).is_err());
        assert!(hurwitz_zeta(c(2.0, 0.0), 1.5).is_err());
        assert!(matches!(hurwitz_zeta(c(1.0, 0.0), 0.5), Err(Error::Pole(_))));
    }

    #[test]
    fn zero_fraction_is_zeta_squared() {
        let z2 = PI.powi(4) / 36.0;
        let v = estermann_continued(&point(c(2.0, 0.0), 0, 1)).unwrap();
        assert!((v.re - z2).abs() < 1e-13);
        let d = estermann_direct(&point(c(2.0, 0.0), 0, 1), 1000).unwrap();
        assert!((d.value.re - z2).abs() <= d.tail_bound);
    }

    #[test]
    fn half_fraction_within_certified_tail() {
        // the true truncation error here is about 6e-5, so only the bound is asserted
        let p = point(c(2.0, 0.0), 1, 2);
        let cont = estermann_continued(&p).unwrap();
        let direct = estermann_direct(&p, 100_000).unwrap();
        assert!((cont - direct.value).norm() <= direct.tail_bound);
    }

    #[test]
    fn direct_matches_continued_at_three() {
        let p = point(c(3.0, 0.0), 1, 3);
        let cont = estermann_continued(&p).unwrap();
        let direct = estermann_direct(&p, 200_000).unwrap();
        assert!((cont - direct.value).norm() < 1e-9);
    }

    #[test]
    fn direct_refuses_outside_region() {
        assert!(matches!(estermann_direct(&point(c(1.0, 3.0), 1, 2), 10), Err(Error::Region(_))));
        assert!(matches!(estermann_direct_tol(&point(c(1.01, 0.0), 1, 2), 1e-9), Err(Error::Truncation(_))));
    }

    #[test]
    fn continued_conjugation_and_periodicity() {
        let s = c(0.5, 10.0);
        let a = estermann_continued(&point(s, 2, 5)).unwrap();
        let b = estermann_continued(&point(s.conj(), 3, 5)).unwrap();
        assert!((a - b.conj()).norm() < 1e-10 * (1.0 + a.norm()));
        let f = reduce_fraction(2, 5).unwrap();
        let m = estermann_continued(&EstermannPoint::new(s.conj(), f, Sign::Minus)).unwrap();
        assert!((m - b).norm() < 1e-12 * (1.0 + b.norm()));
    }

    #[test]
    fn d0_half_within_bound() {
        let v = estermann_continued(&point(c(0.0, 0.0), 1, 2)).unwrap();
        assert!(v.norm() <= 2.0 * 4f64.ln().powi(2));
    }

    #[test]
    fn s_sum_examples() {
        let p = SumPoint::new(c(0.0, 1.0), reduce_fraction(0, 1).unwrap()).unwrap();
        let v = s_sum(&p, 10).unwrap();
        let brute: f64 = (1..=40).map(|n| divisor_d_f(n) * (-2.0 * PI * n as f64).exp()).sum();
        assert!((v.value.re - brute).abs() < 1e-15);
        assert!(v.tail_bound < 1e-20);
        assert!(matches!(SumPoint::new(c(1.0, 0.0), reduce_fraction(0, 1).unwrap()), Err(Error::Divergence(_))));
    }

    fn divisor_d_f(n: u64) -> f64 {
        crate::specialfn::divisor_d(n).unwrap() as f64
    }
}
