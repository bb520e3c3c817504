use serde::Serialize;
use zeta_moment::kernel::{kernel_window_report, verify_window, KernelParams, Region};

use super::{check, Prepared};
use crate::args::KernelArgs;
use crate::output::{num, Outcome, Table};

#[derive(Serialize)]
struct Input {
    lambda: f64,
    t1: f64,
    t2: f64,
    alpha: f64,
    t: Vec<f64>,
}

pub fn prepare(a: KernelArgs) -> anyhow::Result<Prepared> {
    let t1 = a.t1.unwrap_or(0.0);
    let t2 = a.t2.unwrap_or(1000.0);
    let grid = a.t.unwrap_or_else(|| {
        let n = ((t2 - t1 + 1000.0) / 5.0).round() as usize;
        (0..=n).map(|i| t1 - 500.0 + 5.0 * i as f64).collect()
    });
    check(grid.iter().all(|t| t.is_finite()), "--t must be finite")?;
    let input = Input { lambda: a.lambda.unwrap_or(1000.0), t1, t2, alpha: a.alpha.unwrap_or(2.0), t: grid };
    // validate now so bad parameters are configuration errors
    KernelParams::new(input.lambda, input.t1, input.t2, input.alpha)?;
    Ok(Prepared::new("kernel", input, run))
}

fn run(inp: Input) -> anyhow::Result<Outcome> {
    let p = KernelParams::new(inp.lambda, inp.t1, inp.t2, inp.alpha)?;
    if p.bound_is_floored() {
        eprintln!("warning: T^-α = {:.1e} is below the noise floor; checking against {:.1e}", inp.t2.powf(-inp.alpha), p.bound());
    }
    let rows = kernel_window_report(&p, &inp.t);
    let mut table = Table::new("kernel", &["t", "re_omega", "im_omega", "deviation", "region", "quad_error", "pass"]);
    for r in &rows {
        let region = match r.region {
            Region::Interior => "interior",
            Region::Exterior => "exterior",
            Region::Edge => "edge",
        };
        let pass = r.pass.map_or("", |b| if b { "true" } else { "false" });
        table.push(vec![num(r.t), num(r.omega.re), num(r.omega.im), num(r.deviation), region.into(), num(r.quad_error), pass.into()]);
    }
    let verdict = verify_window(&rows);
    let worst = rows.iter().filter(|r| r.pass.is_some()).map(|r| r.deviation).fold(0.0, f64::max);
    let summary = match &verdict {
        Ok(()) => format!("{} points, worst deviation {worst:.2e} against bound {:.1e}", rows.len(), p.bound()),
        Err(e) => e.to_string(),
    };
    Ok(Outcome { tables: vec![table], pass: Some(verdict.is_ok()), summary })
}
