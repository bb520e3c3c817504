//! Small dense least squares, used by the asymptotic fit and the error scan.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solution of an overdetermined least-squares problem.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coeffs: Vec<f64>,
    /// Residuals `y - X·coeffs`, one per row.
    pub residuals: Vec<f64>,
    /// Standard errors of the coefficients (`NaN` when the system is square).
    pub std_errors: Vec<f64>,
}

/// Solves `min ‖X c − y‖₂` by QR. `rows[i]` is the i-th row of `X`.
///
/// Fails with [`Error::Fit`] if the design has fewer rows than columns or is
/// numerically rank deficient (a diagonal entry of `R` below `1e-10` times the
/// largest).
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<LeastSquares> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if n == 0 || m < n || y.len() != m {
        return Err(Error::Fit(format!("need at least {n} rows for {n} unknowns, got {m}")));
    }
    let x = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(y);
    let qr = x.clone().qr();
    let r = qr.r();
    let dmax = r.diagonal().iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    if r.diagonal().iter().any(|d| d.abs() <= 1e-10 * dmax) {
        return Err(Error::Fit("design matrix is numerically rank deficient".into()));
    }
    let qtb = qr.q().transpose() * &b;
    let coeffs = r
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::Fit("singular triangular factor".into()))?;
    let residuals = &b - &x * &coeffs;

    let dof = m - n;
    let sigma2 = if dof > 0 { residuals.norm_squared() / dof as f64 } else { f64::NAN };
    let rinv = r
        .try_inverse()
        .ok_or_else(|| Error::Fit("singular triangular factor".into()))?;
    // diag((XᵀX)⁻¹) = row norms of R⁻¹
    let std_errors = (0..n).map(|i| (sigma2 * rinv.row(i).norm_squared()).sqrt()).collect();
    Ok(LeastSquares {
        coeffs: coeffs.iter().copied().collect(),
        residuals: residuals.iter().copied().collect(),
        std_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_polynomial() {
        let xs: Vec<f64> = (0..10).map(|i| 0.1 * i as f64).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![1.0, x, x * x]).collect();
        let y: Vec<f64> = xs.iter().map(|&x| 2.0 - 3.0 * x + 0.5 * x * x).collect();
        let fit = least_squares(&rows, &y).unwrap();
        assert!((fit.coeffs[0] - 2.0).abs() < 1e-12);
        assert!((fit.coeffs[1] + 3.0).abs() < 1e-12);
        assert!((fit.coeffs[2] - 0.5).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn rejects_rank_deficient_design() {
        let rows = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]];
        assert!(matches!(least_squares(&rows, &[1.0, 2.0, 3.0]), Err(Error::Fit(_))));
    }

    #[test]
    fn standard_errors_match_simple_regression() {
        // y = 1 + x + noise pattern; compare slope s.e. with closed form
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let noise = [0.1, -0.2, 0.05, 0.1, -0.05];
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![1.0, x]).collect();
        let y: Vec<f64> = xs.iter().zip(noise).map(|(x, e)| 1.0 + x + e).collect();
        let fit = least_squares(&rows, &y).unwrap();
        let sse: f64 = fit.residuals.iter().map(|r| r * r).sum();
        let sxx: f64 = xs.iter().map(|x| (x - 2.0) * (x - 2.0)).sum();
        let se = (sse / 3.0 / sxx).sqrt();
        assert!((fit.std_errors[1] - se).abs() < 1e-12);
    }
}
