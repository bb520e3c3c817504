use serde::Serialize;
use zeta_moment::moment::{error_scan, MomentOptions, DEFAULT_B0, DEFAULT_MAX_NODES};

use super::moment::{kind_name, preset_kind};
use super::{check, Prepared};
use crate::args::{Mollifier, ScanArgs};
use crate::output::{num, Outcome, Table};

#[derive(Serialize)]
struct Input {
    mollifier: Mollifier,
    m: Vec<usize>,
    big_t: Vec<f64>,
    b0: f64,
    max_nodes: usize,
    max_m_exponent: f64,
}

pub fn prepare(a: ScanArgs) -> anyhow::Result<Prepared> {
    let input = Input {
        mollifier: a.mollifier.unwrap_or(Mollifier::Moebius),
        m: a.m.unwrap_or_else(|| vec![2, 4, 8]),
        big_t: a.big_t.unwrap_or_else(|| vec![500.0, 1000.0]),
        b0: a.b0.unwrap_or(DEFAULT_B0),
        max_nodes: a.max_nodes.unwrap_or(DEFAULT_MAX_NODES),
        max_m_exponent: a.max_m_exponent.unwrap_or(2.5),
    };
    check(!input.m.is_empty() && input.m.windows(2).all(|w| w[0] < w[1]) && input.m[0] >= 1, "--M must be ascending and positive")?;
    check(!input.big_t.is_empty() && input.big_t.windows(2).all(|w| w[0] < w[1]) && input.big_t[0] > 0.0, "--T must be ascending and positive")?;
    check(
        input.mollifier != Mollifier::SmoothedMoebius || input.m[0] >= 2,
        "smoothed-moebius needs M ≥ 2",
    )?;
    Ok(Prepared::new("scan", input, run))
}

fn run(inp: Input) -> anyhow::Result<Outcome> {
    let opts = MomentOptions { nodes_per_unit: None, max_nodes: inp.max_nodes, b0: inp.b0 };
    let kind = preset_kind(inp.mollifier);
    let rep = error_scan(kind, &inp.big_t, &inp.m, &opts)?;
    let mut cells = Table::new("scan_cells", &["T", "M", "i_numeric", "main_term", "error_term", "rel_error", "failure"]);
    for c in &rep.cells {
        match (&c.report, &c.failure) {
            (Some(r), _) => cells.push(vec![
                num(c.t),
                c.m.to_string(),
                num(r.i_numeric),
                num(r.main_term),
                num(r.error_term),
                num((r.error_term / r.main_term).abs()),
                String::new(),
            ]),
            (None, f) => cells.push(vec![
                num(c.t),
                c.m.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("\"{}\"", f.as_deref().unwrap_or("").replace('"', "'")),
            ]),
        }
    }
    let mut fit = Table::new("scan_fit", &["param", "value", "ci95"]);
    let mut pass = rep.cells.iter().all(|c| c.report.is_some());
    let mut summary = format!("{} {} cells", rep.cells.len(), kind_name(kind));
    match (&rep.fit, &rep.fit_failure) {
        (Some(f), _) => {
            if let Some(a) = f.m_exponent {
                fit.push(vec!["m_exponent".into(), num(a.value), num(a.ci95)]);
                pass &= a.value <= inp.max_m_exponent;
                summary.push_str(&format!(", M exponent {:.3} ± {:.3}", a.value, a.ci95));
            }
            if let Some(b) = f.t_exponent {
                fit.push(vec!["t_exponent".into(), num(b.value), num(b.ci95)]);
                summary.push_str(&format!(", T exponent {:.3} ± {:.3}", b.value, b.ci95));
            }
            fit.push(vec!["intercept".into(), num(f.intercept), String::new()]);
        }
        (None, reason) => {
            summary.push_str(&format!(", no fit: {}", reason.as_deref().unwrap_or("")));
        }
    }
    Ok(Outcome { tables: vec![cells, fit], pass: Some(pass), summary })
}
