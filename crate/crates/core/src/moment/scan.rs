use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{sharp_moment, DirichletPolynomial, MollifiedIntegrand, MollifierKind, MomentOptions, MomentReport};
use crate::error::{Error, Result};
use crate::linalg::least_squares;

/// One `(T, M)` cell of the scan; `report` is `None` when the moment failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub t: f64,
    pub m: usize,
    pub report: Option<MomentReport>,
    pub failure: Option<String>,
}

/// A fitted exponent with the half-width of its 95% confidence interval
/// (`NaN` when the fit has no residual degrees of freedom).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponent {
    pub value: f64,
    pub ci95: f64,
}

/// `log|𝓔| ≈ a log M + b log T + const`, fitting only the directions the
/// grid actually varies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanFit {
    pub m_exponent: Option<Exponent>,
    pub t_exponent: Option<Exponent>,
    pub intercept: f64,
    pub cells_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub kind: MollifierKind,
    pub cells: Vec<ScanCell>,
    /// `None` with `fit_failure` set when too few cells survive.
    pub fit: Option<ScanFit>,
    pub fit_failure: Option<String>,
}

/// Sharp moments `∫₀^T |ζA|²` over the grid with a power-law fit of `|𝓔|`.
/// Grids must be sorted ascending; cells are ordered `T`-major.
pub fn error_scan(kind: MollifierKind, t_grid: &[f64], m_grid: &[usize], opts: &MomentOptions) -> Result<ScanReport> {
    if t_grid.is_empty() || m_grid.is_empty() {
        return Err(Error::domain("scan grids must be non-empty"));
    }
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) || m_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("scan grids must be strictly ascending"));
    }
    let mut cells = Vec::with_capacity(t_grid.len() * m_grid.len());
    for &t in t_grid {
        for &m in m_grid {
            let run = DirichletPolynomial::preset(kind, m)
                .and_then(|p| sharp_moment(&MollifiedIntegrand::new(p), 0.0, t, opts));
            let (report, failure) = match run {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            cells.push(ScanCell { t, m, report, failure });
        }
    }
    let (fit, fit_failure) = match fit_cells(&cells) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(ScanReport { kind, cells, fit, fit_failure })
}

fn fit_cells(cells: &[ScanCell]) -> Result<ScanFit> {
    let used: Vec<(f64, f64, f64)> = cells
        .iter()
        .filter_map(|c| c.report.map(|r| (c.m as f64, c.t, r.error_term.abs())))
        .filter(|&(_, _, e)| e > 0.0)
        .collect();
    let varies = |f: fn(&(f64, f64, f64)) -> f64| used.iter().any(|c| f(c) != f(&used[0]));
    if used.is_empty() {
        return Err(Error::Fit("no usable cells".into()));
    }
    let fit_m = varies(|c| c.0);
    let fit_t = varies(|c| c.1);
    let rows: Vec<Vec<f64>> = used
        .iter()
        .map(|&(m, t, _)| {
            let mut row = vec![1.0];
            if fit_m {
                row.push(m.ln());
            }
            if fit_t {
                row.push(t.ln());
            }
            row
        })
        .collect();
    let y: Vec<f64> = used.iter().map(|c| c.2.ln()).collect();
    let ls = least_squares(&rows, &y)?;
    let dof = rows.len() - rows[0].len();
    let q = if dof > 0 {
        StudentsT::new(0.0, 1.0, dof as f64).map(|d| d.inverse_cdf(0.975)).unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    let mut col = 1;
    let mut take = |on: bool| {
        on.then(|| {
            let e = Exponent { value: ls.coeffs[col], ci95: q * ls.std_errors[col] };
            col += 1;
            e
        })
    };
    let m_exponent = take(fit_m);
    let t_exponent = take(fit_t);
    Ok(ScanFit { m_exponent, t_exponent, intercept: ls.coeffs[0], cells_used: used.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_bookkeeping_and_fit() {
        let opts = MomentOptions::default();
        let r = error_scan(MollifierKind::Ones, &[100.0, 200.0, 400.0], &[1, 2], &opts).unwrap();
        assert_eq!(r.cells.len(), 6);
        for c in &r.cells {
            let rep = c.report.unwrap();
            assert_eq!(rep.error_term, rep.i_numeric - rep.main_term);
        }
        let fit = r.fit.unwrap();
        assert!(fit.m_exponent.is_some() && fit.t_exponent.is_some());
        assert!(fit.m_exponent.unwrap().ci95.is_finite());
    }

    #[test]
    fn failed_cells_are_marked() {
        let opts = MomentOptions { max_nodes: 3000, ..MomentOptions::default() };
        let r = error_scan(MollifierKind::Ones, &[50.0, 100.0, 5000.0], &[1], &opts).unwrap();
        assert!(r.cells[2].report.is_none() && r.cells[2].failure.is_some());
        assert_eq!(r.fit.unwrap().cells_used, 2);
        assert!(error_scan(MollifierKind::Ones, &[2.0, 1.0], &[1], &opts).is_err());
    }
}
