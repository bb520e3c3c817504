use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DirichletPolynomial;
use crate::error::{Error, Result};
use crate::estermann::{divisor_tail_bound, estermann_continued, EstermannPoint, Sign};
use crate::specialfn::{reduce_fraction, ArithmeticTable, ReducedFraction};

/// Largest partial sum used for the direct cross-check.
pub const DIRECT_CAP: u64 = 1 << 21;

/// `𝓜(s)` with a direct partial sum checked against it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScriptMPoint {
    pub s: Complex64,
    /// Exact value through the continued Estermann functions.
    pub value: Complex64,
    /// Length of the direct partial sum.
    pub n_trunc: u64,
    /// Certified bound on what the partial sum omits.
    pub tail_bound: f64,
    pub direct: Complex64,
}

/// `(h̄*, k*)` classes with their summed weights `a(h)ā(k)(hk)^{s−1}(h,k)^{1−2s}`.
fn classes(p: &DirichletPolynomial, s: Complex64) -> BTreeMap<(u64, u64), (ReducedFraction, Complex64)> {
    let m = p.m_max();
    let mut out: BTreeMap<(u64, u64), (ReducedFraction, Complex64)> = BTreeMap::new();
    for h in 1..=m {
        let ah = p.coeff(h);
        if ah == Complex64::new(0.0, 0.0) {
            continue;
        }
        for k in 1..=m {
            let ak = p.coeff(k);
            if ak == Complex64::new(0.0, 0.0) {
                continue;
            }
            let f = reduce_fraction(h as u64, k as u64).expect("k ≥ 1");
            let w = ah * ak.conj()
                * ((s - 1.0) * ((h * k) as f64).ln()).exp()
                * ((1.0 - 2.0 * s) * (f.gcd as f64).ln()).exp();
            let key = (f.h_bar_star % f.k_star, f.k_star);
            out.entry(key).or_insert((f, Complex64::new(0.0, 0.0))).1 += w;
        }
    }
    out
}

fn check_region(s: Complex64) -> Result<()> {
    if !(s.re > 1.0) {
        return Err(Error::Divergence(format!("𝓜(s) needs Re s > 1, got {s}")));
    }
    Ok(())
}

/// `𝓜(s) = Σ_{h,k} a(h)ā(k)(hk)^{s−1}(h,k)^{1−2s} D(s, h̄*/k*)`.
pub fn script_m_value(p: &DirichletPolynomial, s: Complex64) -> Result<Complex64> {
    check_region(s)?;
    let mut total = Complex64::new(0.0, 0.0);
    for (_, (f, w)) in classes(p, s) {
        total += w * estermann_continued(&EstermannPoint::inverse(s, f, Sign::Plus))?;
    }
    Ok(total)
}

/// [`script_m_value`] with a direct partial sum of
/// `Σ d(n) n^{−s} Σ_{h,k} … e(nh̄*/k*)` long enough to bring the certified
/// tail below `tol`, capped at [`DIRECT_CAP`] terms. The two must agree to
/// within the tail bound.
pub fn script_m(p: &DirichletPolynomial, s: Complex64, tol: f64) -> Result<ScriptMPoint> {
    check_region(s)?;
    let value = script_m_value(p, s)?;
    let cls = classes(p, s);
    let c = s.re;
    let weight: f64 = {
        let m = p.m_max();
        let mut b = 0.0;
        for h in 1..=m {
            for k in 1..=m {
                let g = reduce_fraction(h as u64, k as u64).expect("k ≥ 1").gcd as f64;
                b += (p.coeff(h) * p.coeff(k)).norm() * ((h * k) as f64).powf(c - 1.0) * g.powf(1.0 - 2.0 * c);
            }
        }
        b
    };
    let mut n = 64u64;
    while n < DIRECT_CAP && weight * divisor_tail_bound(n, c) > tol {
        n *= 2;
    }
    let direct = direct_sum(&cls, s, n);
    let tail_bound = weight * divisor_tail_bound(n, c);
    let gap = (direct - value).norm();
    if gap > tail_bound + 1e-10 * value.norm().max(1.0) {
        return Err(Error::Verification(format!(
            "𝓜({s}): direct sum of {n} terms is {gap:e} from the continued value, tail bound {tail_bound:e}"
        )));
    }
    Ok(ScriptMPoint { s, value, n_trunc: n, tail_bound, direct })
}

fn direct_sum(cls: &BTreeMap<(u64, u64), (ReducedFraction, Complex64)>, s: Complex64, n_max: u64) -> Complex64 {
    // the inner sum depends on n only through n mod k*
    let mut by_k: BTreeMap<u64, Vec<Complex64>> = BTreeMap::new();
    for (&(hb, k), &(_, w)) in cls {
        let row = by_k.entry(k).or_insert_with(|| vec![Complex64::new(0.0, 0.0); k as usize]);
        for (r, slot) in row.iter_mut().enumerate() {
            *slot += w * Complex64::from_polar(1.0, 2.0 * PI * ((r as u64 * hb) % k) as f64 / k as f64);
        }
    }
    let table = ArithmeticTable::new(n_max as usize);
    let d = table.divisor_counts();
    let mut total = Complex64::new(0.0, 0.0);
    for n in (1..=n_max).rev() {
        let inner: Complex64 = by_k.iter().map(|(&k, row)| row[(n % k) as usize]).sum();
        total += inner * f64::from(d[n as usize]) * (-s * (n as f64).ln()).exp();
    }
    total
}

/// `V = sup_{|t|≤M} |𝓜(c+it)|` with the maximizing `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VSup {
    pub value: f64,
    pub t_star: f64,
    pub evaluations: usize,
}

/// Grid over `[−M, M]` at `grid_step`, then golden-section refinement in the
/// neighbourhoods of the three largest grid values.
pub fn v_sup(p: &DirichletPolynomial, c: f64, grid_step: f64) -> Result<VSup> {
    check_region(Complex64::new(c, 0.0))?;
    if !(grid_step > 0.0) {
        return Err(Error::domain("grid step must be positive"));
    }
    let m = p.m_max() as f64;
    let n = (2.0 * m / grid_step).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| -m + 2.0 * m * i as f64 / n as f64).collect();
    let f = |t: f64| script_m_value(p, Complex64::new(c, t)).map(|z| z.norm());
    let vals = crate::par_map(&grid, |&t| f(t)).into_iter().collect::<Result<Vec<f64>>>()?;
    let mut evaluations = grid.len();
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]).then(i.cmp(&j)));
    let h = 2.0 * m / n as f64;
    let mut best = VSup { value: vals[order[0]], t_star: grid[order[0]], evaluations: 0 };
    for &i in order.iter().take(3) {
        let (mut a, mut b) = ((grid[i] - h).max(-m), (grid[i] + h).min(m));
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = b - r * (b - a);
        let mut x2 = a + r * (b - a);
        let (mut f1, mut f2) = (f(x1)?, f(x2)?);
        evaluations += 2;
        while b - a > 1e-9 * (1.0 + m) {
            if f1 >= f2 {
                b = x2;
                (x2, f2) = (x1, f1);
                x1 = b - r * (b - a);
                f1 = f(x1)?;
            } else {
                a = x1;
                (x1, f1) = (x2, f2);
                x2 = a + r * (b - a);
                f2 = f(x2)?;
            }
            evaluations += 1;
        }
        for (t, v) in [(x1, f1), (x2, f2)] {
            if v > best.value {
                best.value = v;
                best.t_star = t;
            }
        }
    }
    best.evaluations = evaluations;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::{zeta, ZetaMode};

    #[test]
    fn single_term_is_zeta_squared() {
        let p = DirichletPolynomial::ones(1).unwrap();
        for c in [1.2, 1.5, 2.0] {
            let z = zeta(Complex64::new(c, 0.0), ZetaMode::Auto).unwrap();
            let v = script_m_value(&p, Complex64::new(c, 0.0)).unwrap();
            assert!((v - z * z).norm() < 1e-11 * z.norm_sqr());
        }
        let s = Complex64::new(1.5, 0.7);
        let z = zeta(s, ZetaMode::Auto).unwrap();
        assert!((script_m_value(&p, s).unwrap() - z * z).norm() < 1e-11);
    }

    #[test]
    fn direct_sum_agrees_within_tail() {
        let p = DirichletPolynomial::ones(2).unwrap();
        let pt = script_m(&p, Complex64::new(1.5, 0.0), 1e-3).unwrap();
        assert!(pt.n_trunc >= 1 << 20);
        assert!((pt.direct - pt.value).norm() <= pt.tail_bound);
        let mo = DirichletPolynomial::moebius(6).unwrap();
        let pt = script_m(&mo, Complex64::new(1.8, 2.5), 1e-4).unwrap();
        assert!((pt.direct - pt.value).norm() <= pt.tail_bound);
    }

    #[test]
    fn doubling_truncation_moves_less_than_tail() {
        let p = DirichletPolynomial::moebius(4).unwrap();
        let s = Complex64::new(1.6, 1.0);
        let cls = classes(&p, s);
        let a = direct_sum(&cls, s, 1 << 14);
        let b = direct_sum(&cls, s, 1 << 15);
        let weight: f64 = cls.values().map(|(_, w)| w.norm()).sum();
        assert!((a - b).norm() < weight * divisor_tail_bound(1 << 14, 1.6));
    }

    #[test]
    fn phase_is_periodic() {
        let p = DirichletPolynomial::ones(6).unwrap();
        let s = Complex64::new(1.5, 0.0);
        for (&(hb, k), _) in &classes(&p, s) {
            for n in 1..30u64 {
                let e = |n: u64| Complex64::from_polar(1.0, 2.0 * PI * (n * hb) as f64 / k as f64);
                assert!((e(n) - e(n + k * 60)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn sup_for_single_term_is_at_origin() {
        let p = DirichletPolynomial::ones(1).unwrap();
        let v = v_sup(&p, 1.5, 0.05).unwrap();
        let z = zeta(Complex64::new(1.5, 0.0), ZetaMode::Auto).unwrap().re;
        assert!((v.value - z * z).abs() < 1e-9 * z * z);
        assert!(v.t_star.abs() < 1e-4);
        let coarse = v_sup(&p, 1.5, 0.1).unwrap();
        assert!((coarse.value - v.value).abs() <= 1e-3 * v.value);
    }

    #[test]
    fn sup_dominates_real_point_and_rejects_divergent_line() {
        let p = DirichletPolynomial::moebius(4).unwrap();
        let v = v_sup(&p, 1.4, 0.05).unwrap();
        assert!(v.value >= script_m_value(&p, Complex64::new(1.4, 0.0)).unwrap().norm());
        assert!(matches!(v_sup(&p, 1.0, 0.1), Err(Error::Divergence(_))));
        assert!(matches!(script_m(&p, Complex64::new(0.9, 0.0), 1e-3), Err(Error::Divergence(_))));
    }
}
