use serde::Serialize;
use zeta_moment::estermann::{
    d0_bound_sweep, estermann_identity_check, ConstantNumerator, IdentityReading, Normalization, SumPoint, TwoPiPower,
};
use zeta_moment::specialfn::reduce_fraction;
use zeta_moment::Complex64;

use super::{check, Prepared};
use crate::args::{EstermannArgs, EstermannSuite};
use crate::output::{num, Outcome, Table};
use crate::ConfigError;

#[derive(Serialize)]
#[serde(tag = "suite", rename_all = "kebab-case")]
enum Input {
    Identity { points: Vec<(f64, u64, u64)>, c: f64, t_cut: f64, all_readings: bool, tol: f64 },
    D0Bound { k_max: u64 },
}

fn parse_frac(s: &str) -> Result<(u64, u64), ConfigError> {
    let bad = || ConfigError(format!("fraction {s:?} is not of the form h/k"));
    let (h, k) = s.split_once('/').ok_or_else(bad)?;
    let h: u64 = h.trim().parse().map_err(|_| bad())?;
    let k: u64 = k.trim().parse().map_err(|_| bad())?;
    if k == 0 {
        return Err(bad());
    }
    Ok((h, k))
}

pub fn prepare(a: EstermannArgs) -> anyhow::Result<Prepared> {
    let input = match a.suite.unwrap_or(EstermannSuite::Identity) {
        EstermannSuite::Identity => {
            let xs = a.x_im.unwrap_or_else(|| vec![0.5, 0.5, 1.0]);
            let fr = a.frac.unwrap_or_else(|| vec!["0/1".into(), "1/2".into(), "1/3".into()]);
            check(xs.len() == fr.len(), "--x-im and --frac must have the same length")?;
            check(xs.iter().all(|&x| x > 0.0), "--x-im must be positive")?;
            let mut points = Vec::new();
            for (x, f) in xs.into_iter().zip(&fr) {
                let (h, k) = parse_frac(f)?;
                points.push((x, h, k));
            }
            let c = a.c.unwrap_or(1.5);
            check(c > 1.0 && c < 2.0, "--c must lie in (1, 2)")?;
            let t_cut = a.t_cut.unwrap_or(60.0);
            check(t_cut > 0.0, "--t-cut must be positive")?;
            Input::Identity { points, c, t_cut, all_readings: a.all_readings, tol: a.tol.unwrap_or(1e-5) }
        }
        EstermannSuite::D0Bound => {
            let k_max = a.k_max.unwrap_or(40);
            check((1..=2000).contains(&k_max), "--k-max must be in 1..=2000")?;
            Input::D0Bound { k_max }
        }
    };
    Ok(Prepared::new("estermann", input, run))
}

fn reading_name(r: IdentityReading) -> String {
    let p = match r.two_pi_power {
        TwoPiPower::Double => "2pi^-2s",
        TwoPiPower::Single => "2pi^-s",
    };
    let n = match r.normalization {
        Normalization::MinusI => "minus-i",
        Normalization::ExtraInvTwoPiI => "over-2pi-i",
    };
    let c = match r.constant {
        ConstantNumerator::Direct => "direct",
        ConstantNumerator::Inverse => "inverse",
    };
    format!("{p}/{n}/{c}")
}

fn run(inp: Input) -> anyhow::Result<Outcome> {
    match inp {
        Input::Identity { points, c, t_cut, all_readings, tol } => {
            let mut table = Table::new(
                "estermann_identity",
                &["im_x", "h", "k", "reading", "re_lhs", "im_lhs", "re_rhs", "im_rhs", "residual", "quad_error"],
            );
            let readings = if all_readings { IdentityReading::all() } else { vec![IdentityReading::default()] };
            let mut worst = 0.0f64;
            for &(x, h, k) in &points {
                let p = SumPoint::new(Complex64::new(0.0, x), reduce_fraction(h, k)?)?;
                for &r in &readings {
                    let chk = estermann_identity_check(&p, c, t_cut, r)?;
                    if r == IdentityReading::default() {
                        worst = worst.max(chk.residual);
                    }
                    table.push(vec![
                        num(x),
                        h.to_string(),
                        k.to_string(),
                        reading_name(r),
                        num(chk.lhs.re),
                        num(chk.lhs.im),
                        num(chk.rhs.re),
                        num(chk.rhs.im),
                        num(chk.residual),
                        num(chk.quad_error),
                    ]);
                }
            }
            Ok(Outcome {
                tables: vec![table],
                pass: Some(worst <= tol),
                summary: format!("worst residual {worst:.2e} (tolerance {tol:.0e})"),
            })
        }
        Input::D0Bound { k_max } => {
            let sweep = d0_bound_sweep(k_max)?;
            let mut table = Table::new("estermann_d0", &["h", "k", "modulus", "bound", "ok"]);
            let mut broken = 0;
            for b in &sweep {
                let ok = b.modulus <= b.bound;
                broken += usize::from(!ok);
                table.push(vec![b.h_star.to_string(), b.k_star.to_string(), num(b.modulus), num(b.bound), ok.to_string()]);
            }
            Ok(Outcome {
                tables: vec![table],
                pass: Some(broken == 0),
                summary: format!("{} fractions with k* ≤ {k_max}, {broken} above the bound", sweep.len()),
            })
        }
    }
}
