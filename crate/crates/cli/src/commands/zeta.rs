use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use zeta_moment::specialfn::{chi_factor, zeta, ZetaMode};
use zeta_moment::Complex64;

use super::{check, Prepared};
use crate::args::{Mode, ZetaArgs};
use crate::output::{num, Outcome, Table};

#[derive(Serialize)]
struct Input {
    points: Vec<(f64, f64)>,
    mode: Mode,
    check_functional: bool,
    tol: f64,
}

pub fn prepare(a: ZetaArgs, seed: u64) -> anyhow::Result<Prepared> {
    let sigma = a.sigma.unwrap_or(0.5);
    let mut points = Vec::new();
    let ts = match (&a.t, &a.s, a.random) {
        (None, None, None) => Some(vec![0.0, 14.134_725_141_734_693, 100.0]),
        _ => a.t.clone(),
    };
    for t in ts.unwrap_or_default() {
        points.push((sigma, t));
    }
    for s in a.s.unwrap_or_default() {
        points.push((s, 0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..a.random.unwrap_or(0) {
        points.push((rng.gen_range(-1.0..2.0), rng.gen_range(0.0..100.0)));
    }
    check(points.iter().all(|p| p.0.is_finite() && p.1.is_finite()), "points must be finite")?;
    check(!points.iter().any(|&p| p == (1.0, 0.0)), "s = 1 is the pole of ζ")?;
    let input = Input {
        points,
        mode: a.mode.unwrap_or(Mode::Auto),
        check_functional: a.check_functional,
        tol: a.tol.unwrap_or(1e-8),
    };
    check(input.tol > 0.0, "--tol must be positive")?;
    Ok(Prepared::new("zeta", input, run))
}

fn run(inp: Input) -> anyhow::Result<Outcome> {
    let mode = match inp.mode {
        Mode::Auto => ZetaMode::Auto,
        Mode::Em => ZetaMode::EulerMaclaurin,
        Mode::Rs => ZetaMode::RiemannSiegel,
    };
    let mut table = Table::new(
        "zeta",
        &["re_s", "im_s", "re_zeta", "im_zeta", "abs_zeta", "re_chi", "im_chi", "fe_residual"],
    );
    let mut worst = 0.0f64;
    for &(re, im) in &inp.points {
        let s = Complex64::new(re, im);
        let z = zeta(s, mode)?;
        let chi = chi_factor(s)?;
        // ζ(1−s) = χ(s) ζ(s), both sides by Euler–Maclaurin
        let lhs = zeta(1.0 - s, ZetaMode::EulerMaclaurin)?;
        let rhs = chi * zeta(s, ZetaMode::EulerMaclaurin)?;
        let res = (lhs - rhs).norm() / lhs.norm().max(1.0);
        worst = worst.max(res);
        table.push(vec![num(re), num(im), num(z.re), num(z.im), num(z.norm()), num(chi.re), num(chi.im), num(res)]);
    }
    let pass = inp.check_functional.then_some(worst <= inp.tol);
    Ok(Outcome { tables: vec![table], pass, summary: format!("{} points, worst functional-equation residual {worst:.2e}", inp.points.len()) })
}
