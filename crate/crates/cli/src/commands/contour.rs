use std::f64::consts::PI;

use serde::Serialize;
use zeta_moment::contour::{
    c0_constant, gamma_integral, j_closed, j_contour, k_asymptotic_fit, k_integral, default_k_delta, lemma26_sweep,
    residue_pair, w_trend, ContourParams, LambdaRule, PoleOffset, WVariant, FROZEN_CONSTANTS,
};

use super::{check, Prepared};
use crate::args::{ContourArgs, ContourSuite, Variant};
use crate::output::{num, Outcome, Table};

#[derive(Serialize)]
#[serde(tag = "suite", rename_all = "kebab-case")]
enum Input {
    JCrosscheck { lambda: f64, u: Vec<f64>, y: Vec<f64>, c: f64, tol: f64 },
    Residue { lambda: f64, u: Vec<f64>, delta: Vec<f64>, tol: f64 },
    KFit { lambda: f64, u: Vec<f64>, tol: f64 },
    Gamma { pairs: Vec<(f64, f64)>, tol: f64 },
    Geometry { c: Vec<f64> },
    WTrend { c: f64, big_t: Vec<f64>, lambda_power: f64, variant: Variant },
}

fn single(v: Option<Vec<f64>>, default: f64, what: &str) -> Result<f64, crate::ConfigError> {
    match v {
        None => Ok(default),
        Some(v) if v.len() == 1 => Ok(v[0]),
        Some(_) => Err(crate::ConfigError(format!("this suite takes a single {what}"))),
    }
}

pub fn prepare(a: ContourArgs) -> anyhow::Result<Prepared> {
    let suite = a.suite.unwrap_or(ContourSuite::JCrosscheck);
    let input = match suite {
        ContourSuite::JCrosscheck => Input::JCrosscheck {
            lambda: single(a.lambda, 100.0, "--lambda")?,
            u: a.u.unwrap_or_else(|| vec![0.0, 25.0, 50.0]),
            y: a.y.unwrap_or_else(|| vec![3.0, 4.0, 5.0]),
            c: single(a.c, 1.5, "--c")?,
            tol: a.tol.unwrap_or(1e-7),
        },
        ContourSuite::Residue => Input::Residue {
            lambda: single(a.lambda, 50.0, "--lambda")?,
            u: a.u.unwrap_or_else(|| vec![10.0]),
            delta: a.delta.unwrap_or_else(|| vec![PI / 8.0, PI / 4.0, PI / 3.0]),
            tol: a.tol.unwrap_or(1e-8),
        },
        ContourSuite::KFit => Input::KFit {
            lambda: single(a.lambda, 100.0, "--lambda")?,
            u: a.u.unwrap_or_else(|| vec![100.0, 150.0, 200.0, 300.0, 400.0, 500.0, 700.0, 1000.0]),
            tol: a.tol.unwrap_or(1e-3),
        },
        ContourSuite::Gamma => {
            let l = a.lambda.unwrap_or_else(|| vec![10.0, 100.0, 1000.0]);
            let u = a.u.unwrap_or_else(|| vec![0.0, 30.0, 100.0]);
            check(l.len() == u.len(), "gamma pairs --lambda with --u; lengths differ")?;
            Input::Gamma { pairs: l.into_iter().zip(u).collect(), tol: a.tol.unwrap_or(1e-8) }
        }
        ContourSuite::Geometry => Input::Geometry { c: a.c.unwrap_or_else(|| vec![1.1, 1.5, 1.9]) },
        ContourSuite::WTrend => {
            let big_t = a.big_t.unwrap_or_else(|| vec![40.0, 80.0, 160.0, 320.0]);
            check(big_t.len() >= 2 && big_t.windows(2).all(|w| w[0] < w[1]), "--T needs at least two ascending heights")?;
            Input::WTrend {
                c: single(a.c, 1.5, "--c")?,
                big_t,
                lambda_power: a.lambda_power.unwrap_or(1.9),
                variant: a.variant.unwrap_or(Variant::Standard),
            }
        }
    };
    validate(&input)?;
    Ok(Prepared::new("contour", input, run))
}

fn validate(inp: &Input) -> anyhow::Result<()> {
    match inp {
        Input::JCrosscheck { lambda, u, y, c, .. } => {
            check(y.iter().all(|&y| y > 0.0), "--y must be positive")?;
            for &u in u {
                ContourParams::simple(*lambda, u)?.with_c(*c)?;
            }
        }
        Input::Residue { lambda, u, delta, .. } => {
            for &u in u {
                for &d in delta {
                    ContourParams::simple(*lambda, u)?.with_delta(d)?;
                }
            }
        }
        Input::KFit { lambda, u, .. } => {
            for &u in u {
                ContourParams::simple(*lambda, u)?;
            }
        }
        Input::Gamma { pairs, .. } => {
            for &(l, u) in pairs {
                ContourParams::simple(l, u)?;
            }
        }
        Input::Geometry { c } => check(c.iter().all(|&c| c > 1.0 && c < 2.0), "--c must lie in (1, 2)")?,
        Input::WTrend { c, big_t, lambda_power, .. } => {
            check(*c > 1.0 && *c < 2.0, "--c must lie in (1, 2)")?;
            check(big_t[0] > 1.0 && *lambda_power > 0.0, "--T must exceed 1 and --lambda-power be positive")?;
        }
    }
    Ok(())
}

/// 10⁴ points: ten widths θ, ten ray angles δ < θ, and a hundred x values
/// split between the pole neighbourhood and the far field.
fn geometry_grid() -> Vec<(f64, f64, f64)> {
    let mut pts = Vec::with_capacity(10_000);
    for i in 0..10 {
        let theta = 0.021 + 0.043 * i as f64;
        for j in 0..10 {
            let delta = theta * (0.0011 + 0.089 * j as f64);
            for m in 0..100 {
                let x = if m < 50 { 1.0 + theta * (m as f64 - 24.3) / 19.0 } else { 0.047 + 0.161 * (m - 50) as f64 };
                pts.push((x, delta, theta));
            }
        }
    }
    pts
}

fn run(inp: Input) -> anyhow::Result<Outcome> {
    match inp {
        Input::JCrosscheck { lambda, u, y, c, tol } => {
            let mut t = Table::new("j_crosscheck", &["u", "y", "log_scale", "re_line", "im_line", "re_closed", "im_closed", "rel_diff", "evaluations"]);
            let mut worst = 0.0f64;
            for &u in &u {
                let p = ContourParams::simple(lambda, u)?.with_c(c)?;
                for &y in &y {
                    let line = j_contour(y, &p, u.abs() + 150.0)?;
                    let closed = j_closed(y, &p)?;
                    let e = line.value.exponent;
                    let (lm, cm) = (line.value.mantissa, closed.mantissa_at(e));
                    let d = line.value.rel_diff(&closed);
                    worst = worst.max(d);
                    t.push(vec![num(u), num(y), num(e), num(lm.re), num(lm.im), num(cm.re), num(cm.im), num(d), line.evaluations.to_string()]);
                }
            }
            Ok(Outcome { tables: vec![t], pass: Some(worst <= tol), summary: format!("max relative difference {worst:.2e}") })
        }
        Input::Residue { lambda, u, delta, tol } => {
            let mut t = Table::new("residue", &["u", "delta", "re_normalized", "im_normalized", "abs_error", "step_error", "log_amplification", "nodes"]);
            let mut worst = 0.0f64;
            for &u in &u {
                for &d in &delta {
                    let r = residue_pair(&ContourParams::simple(lambda, u)?.with_delta(d)?)?;
                    let e = (r.normalized + 1.0).norm();
                    worst = worst.max(e);
                    t.push(vec![num(u), num(d), num(r.normalized.re), num(r.normalized.im), num(e), num(r.error), num(r.amplification), r.nodes.to_string()]);
                }
            }
            Ok(Outcome {
                tables: vec![t],
                pass: Some(worst <= tol),
                summary: format!("ray pair over 2πi e^(−λ): max distance from −1 is {worst:.2e}"),
            })
        }
        Input::KFit { lambda, u, tol } => {
            let fam = u.iter().map(|&u| ContourParams::simple(lambda, u)?.with_delta(0.3)).collect::<zeta_moment::Result<Vec<_>>>()?;
            let mut t = Table::new("k_values", &["u", "re_k", "im_k", "re_k_minus_log_u", "error"]);
            for p in &fam {
                let k = k_integral(p, default_k_delta(p.u))?;
                t.push(vec![num(p.u), num(k.normalized.re), num(k.normalized.im), num(k.normalized.re - p.u.ln()), num(k.error)]);
            }
            let fit = k_asymptotic_fit(&fam)?;
            let c0 = c0_constant();
            let mut f = Table::new("k_fit", &["param", "re", "im"]);
            f.push(vec!["c0".into(), num(fit.c0_est), num(fit.c0_imag)]);
            f.push(vec!["c1".into(), num(fit.c1.re), num(fit.c1.im)]);
            for (i, h) in fit.higher_coeffs.iter().enumerate() {
                f.push(vec![format!("c{}", i + 2), num(h.re), num(h.im)]);
            }
            f.push(vec!["c0_constant".into(), num(c0), num(0.0)]);
            f.push(vec!["max_residual".into(), num(fit.residual), num(0.0)]);
            let pass = fit.c1.norm() <= tol && (fit.c0_est - c0).abs() <= 1e-4;
            Ok(Outcome {
                tables: vec![t, f],
                pass: Some(pass),
                summary: format!("|c1| = {:.2e}, fitted c0 = {:.8}, c0 = {c0:.10}", fit.c1.norm(), fit.c0_est),
            })
        }
        Input::Gamma { pairs, tol } => {
            let mut t = Table::new("gamma", &["lambda", "u", "residual"]);
            let mut worst = 0.0f64;
            for (l, u) in pairs {
                let r = gamma_integral(&ContourParams::simple(l, u)?)?;
                worst = worst.max(r.residual);
                t.push(vec![num(l), num(u), num(r.residual)]);
            }
            Ok(Outcome { tables: vec![t], pass: Some(worst <= tol), summary: format!("max residual {worst:.2e}") })
        }
        Input::Geometry { c } => {
            let pts = geometry_grid();
            let mut t = Table::new("geometry", &["c", "points", "edge_points", "violations"]);
            let mut total = 0;
            for &c in &c {
                let s = lemma26_sweep(&pts, c, PoleOffset::default(), &FROZEN_CONSTANTS)?;
                total += s.violations;
                t.push(vec![num(c), s.points.to_string(), s.edges.to_string(), s.violations.to_string()]);
            }
            Ok(Outcome { tables: vec![t], pass: Some(total == 0), summary: format!("{total} violations over {} points per c", pts.len()) })
        }
        Input::WTrend { c, big_t, lambda_power, variant } => {
            let v = match variant {
                Variant::Standard => WVariant::Standard,
                Variant::NoCos => WVariant::NoCos,
                Variant::Mirror => WVariant::Mirror,
            };
            let tr = w_trend(LambdaRule::Power(lambda_power), c, &big_t, v)?;
            let mut t = Table::new("w_trend", &["T", "abs_w", "normalized", "ratio", "bound_ratio"]);
            for i in 0..tr.big_t.len() {
                let (r, b) = if i == 0 { (String::new(), String::new()) } else { (num(tr.ratios[i - 1]), num(tr.bound_ratios[i - 1])) };
                t.push(vec![num(tr.big_t[i]), num(tr.modulus[i]), num(tr.normalized[i]), r, b]);
            }
            let decreasing = tr.modulus.windows(2).all(|w| w[1] < w[0]);
            Ok(Outcome {
                tables: vec![t],
                pass: Some(decreasing && tr.within_band && !tr.partial),
                summary: format!("decreasing: {decreasing}, within band: {}, partial: {}", tr.within_band, tr.partial),
            })
        }
    }
}
