use serde::Serialize;
use sha2::{Digest, Sha256};
use zeta_moment::moment::{
    g_main, g_numeric, sharp_moment, DirichletPolynomial, MollifiedIntegrand, MollifierKind, MomentOptions,
    DEFAULT_B0, DEFAULT_MAX_NODES,
};

use super::{check, Prepared};
use crate::args::{Mollifier, MomentArgs};
use crate::output::{num, Outcome, Table};
use crate::ConfigError;

#[derive(Serialize)]
struct Input {
    mollifier: String,
    m: usize,
    /// sha256 of the coefficient file, when one was given.
    coeff_hash: Option<String>,
    t_lo: f64,
    big_t: f64,
    b0: f64,
    nodes_per_unit: Option<f64>,
    max_nodes: usize,
    max_rel_error: f64,
    g_at: Vec<f64>,
    lambda: f64,
    g_tol: f64,
}

pub fn preset_kind(m: Mollifier) -> MollifierKind {
    match m {
        Mollifier::Ones => MollifierKind::Ones,
        Mollifier::Moebius => MollifierKind::Moebius,
        Mollifier::SmoothedMoebius => MollifierKind::SmoothedMoebius,
    }
}

pub fn kind_name(k: MollifierKind) -> &'static str {
    match k {
        MollifierKind::Ones => "ones",
        MollifierKind::Moebius => "moebius",
        MollifierKind::SmoothedMoebius => "smoothed-moebius",
        MollifierKind::Custom => "custom",
    }
}

pub fn prepare(a: MomentArgs) -> anyhow::Result<Prepared> {
    let (poly, coeff_hash) = match &a.coeff_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            (DirichletPolynomial::parse(&text)?, Some(hex::encode(Sha256::digest(text.as_bytes()))))
        }
        None => (DirichletPolynomial::preset(preset_kind(a.mollifier.unwrap_or(Mollifier::Ones)), a.m.unwrap_or(1))?, None),
    };
    let input = Input {
        mollifier: kind_name(poly.kind()).into(),
        m: poly.m_max(),
        coeff_hash,
        t_lo: a.t_lo.unwrap_or(0.0),
        big_t: a.big_t.unwrap_or(1000.0),
        b0: a.b0.unwrap_or(DEFAULT_B0),
        nodes_per_unit: a.nodes_per_unit,
        max_nodes: a.max_nodes.unwrap_or(DEFAULT_MAX_NODES),
        max_rel_error: a.max_rel_error.unwrap_or(0.1),
        g_at: a.g_at.unwrap_or_default(),
        lambda: a.lambda.unwrap_or(1000.0),
        g_tol: a.g_tol.unwrap_or(0.02),
    };
    check(input.t_lo >= 0.0 && input.big_t > input.t_lo, "need 0 ≤ --t-lo < --T")?;
    check(input.big_t <= 1e4 || input.max_nodes > DEFAULT_MAX_NODES, "T above 1e4 needs an explicit --max-nodes above the default")?;
    check(input.b0.is_finite() && input.max_rel_error > 0.0 && input.g_tol > 0.0, "tolerances must be positive")?;
    check(input.g_at.iter().all(|&u| u >= 50.0), "--g-at points must be at least 50")?;
    check(input.lambda >= 10.0, "--lambda must be at least 10")?;
    Ok(Prepared::new("moment", input, move |i| run(i, poly)))
}

fn run(inp: Input, poly: DirichletPolynomial) -> anyhow::Result<Outcome> {
    let opts = MomentOptions { nodes_per_unit: inp.nodes_per_unit, max_nodes: inp.max_nodes, b0: inp.b0 };
    let mi = MollifiedIntegrand::new(poly);
    let r = sharp_moment(&mi, inp.t_lo, inp.big_t, &opts)?;
    let rel = (r.error_term / r.main_term).abs();
    let mut t = Table::new(
        "moment",
        &["kind", "M", "t_lo", "t_hi", "i_numeric", "main_term", "error_term", "rel_error", "b0", "nodes", "est_quad_error"],
    );
    t.push(vec![
        inp.mollifier.clone(),
        inp.m.to_string(),
        num(r.t_lo),
        num(r.t_hi),
        num(r.i_numeric),
        num(r.main_term),
        num(r.error_term),
        num(rel),
        num(r.b0_used),
        r.quadrature_nodes.to_string(),
        num(r.est_quadrature_error),
    ]);
    let mut tables = vec![t];
    let mut pass = rel <= inp.max_rel_error;
    let mut summary = format!("I = {:.6}, main = {:.6}, |E|/main = {rel:.2e}", r.i_numeric, r.main_term);
    if !inp.g_at.is_empty() {
        let mut g = Table::new("g_density", &["u", "lambda", "g_numeric", "g_main", "rel_diff", "est_quad_error"]);
        let mut worst = 0.0f64;
        for &u in &inp.g_at {
            let num_g = g_numeric(&mi, u, inp.lambda, &opts)?;
            let main = g_main(&mi.poly, u, inp.b0);
            let d = (num_g.value / main - 1.0).abs();
            worst = worst.max(d);
            g.push(vec![num(u), num(inp.lambda), num(num_g.value), num(main), num(d), num(num_g.est_error)]);
        }
        pass &= worst <= inp.g_tol;
        summary.push_str(&format!("; worst 𝔤 relative difference {worst:.2e}"));
        tables.push(g);
    }
    Ok(Outcome { tables, pass: Some(pass), summary })
}
