//! Pointwise geometry of the ray `v = x e^{iδ}` relative to the pole `v = 1`:
//! `|v − 1|^{c−1} = a(x, δ)` and `arg(v − 1) = b(x, δ)`, with the region
//! inequalities used to bound the small-scale integral.

use serde::{Deserialize, Serialize};

use super::ContourParams;
use crate::error::{Error, Result};

/// The point subtracted from `x` in `a(x, δ) = ((x − a)² + 2x(1 − cos δ))^{(c−1)/2}`.
///
/// Only `1` makes `a` the distance to the pole; other values are available
/// for sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleOffset(pub f64);

impl Default for PoleOffset {
    fn default() -> Self {
        PoleOffset(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryRegion {
    /// `x ≤ 1 − θ`
    Low,
    /// `|x − 1| ≤ θ`
    Mid,
    /// `x ≥ 1 + θ`
    High,
    /// Within a relative `1e-9` of `|x − 1| = θ`; not asserted.
    Edge,
}

/// Explicit constants for the region inequalities.
///
/// `a_low`, `a_mid`, `a_high` bound `|v−1|`, `|v−1|/θ` and `|v−1|/x`; the
/// bound on `a` itself is `max(1, constant)` since `c − 1 ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma26Constants {
    pub a_low: f64,
    pub a_mid: f64,
    pub a_high: f64,
    /// `b ≥ mid_lower · δ/θ` on the middle region.
    pub mid_lower: f64,
    /// `b ≤ π − mid_upper · δ/θ` on the middle region.
    pub mid_upper: f64,
    /// `b ≤ π − low_upper · xδ` on the low region.
    pub low_upper: f64,
    /// `b ≤ high_upper · δ/θ` on the high region.
    pub high_upper: f64,
}

/// Constants from [`calibrate_lemma26`] on the grid `θ ∈ [0.01, 0.5]`,
/// `δ/θ ∈ [1e-4, 1]`, `x ∈ (0, 20]`, rounded outward.
pub const FROZEN_CONSTANTS: Lemma26Constants = Lemma26Constants {
    a_low: 1.0,
    a_mid: 1.6,
    a_high: 1.0,
    mid_lower: 0.75,
    mid_upper: 0.4,
    low_upper: 0.95,
    high_upper: 1.5,
};

/// Evaluation of `a`, `b` at one point with the region checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma26Point {
    pub x: f64,
    pub delta: f64,
    pub a: f64,
    pub b: f64,
    pub region: GeometryRegion,
    /// Names of the inequalities that failed (empty when all hold).
    pub failures: Vec<String>,
    /// `None` on the edge band.
    pub bounds_ok: Option<bool>,
}

fn raw_ab(x: f64, delta: f64, offset: PoleOffset) -> (f64, f64) {
    let sd = delta.sin();
    // 1 − cos δ = 2 sin²(δ/2)
    let one_minus_cos = 2.0 * (0.5 * delta).sin().powi(2);
    let dist2 = (x - offset.0).powi(2) + 2.0 * x * one_minus_cos;
    // x cos δ − 1 written as (x − 1) − x(1 − cos δ) to keep it exact near x = 1
    let b = (x * sd).atan2((x - 1.0) - x * one_minus_cos);
    (dist2.sqrt(), b)
}

fn classify(x: f64, theta: f64) -> GeometryRegion {
    let gap = (x - 1.0).abs() - theta;
    if gap.abs() <= 1e-9 * theta {
        GeometryRegion::Edge
    } else if gap < 0.0 {
        GeometryRegion::Mid
    } else if x < 1.0 {
        GeometryRegion::Low
    } else {
        GeometryRegion::High
    }
}

/// `a`, `b` and the region checks with explicit constants and pole offset.
pub fn lemma26_pointwise_with(
    x: f64,
    delta: f64,
    theta: f64,
    c: f64,
    offset: PoleOffset,
    k: &Lemma26Constants,
) -> Result<Lemma26Point> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("x = {x} must be positive")));
    }
    if !(delta > 0.0 && delta < std::f64::consts::FRAC_PI_2) {
        return Err(Error::domain(format!("δ = {delta} outside (0, π/2)")));
    }
    let (dist, b) = raw_ab(x, delta, offset);
    let a = dist.powf(c - 1.0);
    let region = classify(x, theta);
    let pi = std::f64::consts::PI;
    let r = delta / theta;
    let bound = |kk: f64| kk.max(1.0);
    let mut failures = Vec::new();
    if b <= delta {
        failures.push("b > δ".to_string());
    }
    match region {
        GeometryRegion::Low => {
            if a > bound(k.a_low) {
                failures.push("a ≪ 1".to_string());
            }
            if b > pi - k.low_upper * x * delta {
                failures.push("b ≤ π − Cxδ".to_string());
            }
        }
        GeometryRegion::Mid => {
            if a > bound(k.a_mid) * theta.powf(c - 1.0) {
                failures.push("a ≪ θ^{c−1}".to_string());
            }
            if b < k.mid_lower * r {
                failures.push("b ≫ δ/θ".to_string());
            }
            if b > pi - k.mid_upper * r {
                failures.push("b ≤ π − Cδ/θ".to_string());
            }
        }
        GeometryRegion::High => {
            if a > bound(k.a_high) * x.powf(c - 1.0) {
                failures.push("a ≪ x^{c−1}".to_string());
            }
            if b > k.high_upper * r {
                failures.push("b ≤ δ/θ".to_string());
            }
        }
        GeometryRegion::Edge => {}
    }
    let bounds_ok = (region != GeometryRegion::Edge).then_some(failures.is_empty());
    Ok(Lemma26Point { x, delta, a, b, region, failures, bounds_ok })
}

/// [`lemma26_pointwise_with`] using `θ`, `c` from `p`, the pole at `1`, and
/// [`FROZEN_CONSTANTS`].
pub fn lemma26_pointwise(x: f64, delta: f64, p: &ContourParams) -> Result<Lemma26Point> {
    lemma26_pointwise_with(x, delta, p.theta, p.c, PoleOffset::default(), &FROZEN_CONSTANTS)
}

/// Tightest constants valid on every `(x, δ, θ)` triple supplied, with the
/// region boundaries excluded. Upper-type constants are the sup of the
/// relevant ratio, lower-type ones the inf.
pub fn calibrate_lemma26(points: &[(f64, f64, f64)]) -> Lemma26Constants {
    let pi = std::f64::consts::PI;
    let mut k = Lemma26Constants {
        a_low: 0.0,
        a_mid: 0.0,
        a_high: 0.0,
        mid_lower: f64::INFINITY,
        mid_upper: f64::INFINITY,
        low_upper: f64::INFINITY,
        high_upper: 0.0,
    };
    for &(x, delta, theta) in points {
        let (dist, b) = raw_ab(x, delta, PoleOffset::default());
        let r = delta / theta;
        match classify(x, theta) {
            GeometryRegion::Low => {
                k.a_low = k.a_low.max(dist);
                k.low_upper = k.low_upper.min((pi - b) / (x * delta));
            }
            GeometryRegion::Mid => {
                k.a_mid = k.a_mid.max(dist / theta);
                k.mid_lower = k.mid_lower.min(b / r);
                k.mid_upper = k.mid_upper.min((pi - b) / r);
            }
            GeometryRegion::High => {
                k.a_high = k.a_high.max(dist / x);
                k.high_upper = k.high_upper.max(b / r);
            }
            GeometryRegion::Edge => {}
        }
    }
    k
}

/// Counts over a sweep of [`lemma26_pointwise_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SweepSummary {
    pub points: usize,
    pub edges: usize,
    pub violations: usize,
}

/// Runs the pointwise checks over `(x, δ, θ)` triples.
pub fn lemma26_sweep(
    points: &[(f64, f64, f64)],
    c: f64,
    offset: PoleOffset,
    k: &Lemma26Constants,
) -> Result<SweepSummary> {
    let mut s = SweepSummary::default();
    for &(x, delta, theta) in points {
        let pt = lemma26_pointwise_with(x, delta, theta, c, offset, k)?;
        s.points += 1;
        match pt.bounds_ok {
            None => s.edges += 1,
            Some(false) => s.violations += 1,
            Some(true) => {}
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// The calibration grid the frozen constants were read from.
    fn calibration_grid() -> Vec<(f64, f64, f64)> {
        let mut pts = Vec::new();
        for i in 0..=20 {
            let theta = 0.01 * 50f64.powf(i as f64 / 20.0);
            for j in 0..=16 {
                let delta = theta * 1e-4f64 * 1e4f64.powf(j as f64 / 16.0);
                for m in 1..=400 {
                    pts.push((0.05 * m as f64, delta, theta));
                }
                for m in -40..=40 {
                    pts.push((1.0 + theta * m as f64 / 40.0 * 1.2, delta, theta));
                }
            }
        }
        pts
    }

    #[test]
    fn frozen_constants_cover_calibration() {
        let k = calibrate_lemma26(&calibration_grid());
        assert!(k.a_low <= FROZEN_CONSTANTS.a_low);
        assert!(k.a_mid <= FROZEN_CONSTANTS.a_mid);
        assert!(k.a_high <= FROZEN_CONSTANTS.a_high);
        assert!(k.high_upper <= FROZEN_CONSTANTS.high_upper);
        assert!(k.mid_lower >= FROZEN_CONSTANTS.mid_lower);
        assert!(k.mid_upper >= FROZEN_CONSTANTS.mid_upper);
        assert!(k.low_upper >= FROZEN_CONSTANTS.low_upper);
    }

    #[test]
    fn examples() {
        let p = ContourParams::new(100.0, 50.0, 1.5, 0.3, 10.0, 3.0).unwrap();
        let pt = lemma26_pointwise(2.0, 0.01, &p).unwrap();
        assert!((pt.a - 1.0).abs() < 1e-4);
        assert!((pt.b - (2.0 * 0.01f64.sin() / (2.0 * 0.01f64.cos() - 1.0)).atan()).abs() < 1e-13);
        let pt = lemma26_pointwise(0.5, 0.01, &p).unwrap();
        let want = PI - (0.5 * 0.01f64.sin() / (1.0 - 0.5 * 0.01f64.cos())).atan();
        assert!((pt.b - want).abs() < 1e-13);
        assert!(PI - pt.b <= 2.0 * 0.5 * 0.01 * 1.001);
        // at x = 1 the angle is π/2 + δ/2 (inscribed angle), not π/2
        let pt = lemma26_pointwise(1.0, 0.01, &p).unwrap();
        assert!((pt.b - (PI / 2.0 + 0.005)).abs() < 1e-15);
    }

    #[test]
    fn edge_band_is_not_asserted() {
        let p = ContourParams::new(100.0, 50.0, 1.5, 0.3, 10.0, 3.0).unwrap();
        let pt = lemma26_pointwise(1.0 + p.theta, 0.01, &p).unwrap();
        assert_eq!(pt.region, GeometryRegion::Edge);
        assert_eq!(pt.bounds_ok, None);
    }

    #[test]
    fn shifted_pole_breaks_distance_reading() {
        // with the offset moved off the pole, a at x = 1 no longer shrinks with δ
        let k = FROZEN_CONSTANTS;
        let at_pole = lemma26_pointwise_with(1.0, 1e-4, 0.1, 1.5, PoleOffset(1.0), &k).unwrap();
        let moved = lemma26_pointwise_with(1.0, 1e-4, 0.1, 1.5, PoleOffset(0.5), &k).unwrap();
        assert!(at_pole.a < 0.02);
        assert!(moved.a > 0.7);
    }

    #[test]
    fn independent_grid_has_no_violations() {
        // 10⁴ points off the calibration lattice
        let mut pts = Vec::new();
        for i in 0..10 {
            let theta = 0.013 + 0.047 * i as f64;
            for j in 0..10 {
                let delta = theta * (0.00017 + 0.097 * j as f64);
                for m in 0..100 {
                    let x = if m < 50 { 1.0 + theta * (m as f64 - 24.7) / 20.0 } else { 0.031 + 0.173 * (m - 50) as f64 };
                    pts.push((x, delta, theta));
                }
            }
        }
        assert_eq!(pts.len(), 10_000);
        for c in [1.1, 1.5, 1.9] {
            let s = lemma26_sweep(&pts, c, PoleOffset::default(), &FROZEN_CONSTANTS).unwrap();
            assert_eq!(s.violations, 0, "c = {c}: {s:?}");
        }
    }
}
