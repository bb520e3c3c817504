use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specialfn::ArithmeticTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierKind {
    Ones,
    Moebius,
    SmoothedMoebius,
    Custom,
}

/// `A(s) = Σ_{m≤M} a(m) m^{−s}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletPolynomial {
    coeffs: Vec<Complex64>,
    kind: MollifierKind,
}

impl DirichletPolynomial {
    pub fn ones(m_max: usize) -> Result<Self> {
        check_len(m_max)?;
        Ok(Self { coeffs: vec![Complex64::new(1.0, 0.0); m_max], kind: MollifierKind::Ones })
    }

    pub fn moebius(m_max: usize) -> Result<Self> {
        check_len(m_max)?;
        let t = ArithmeticTable::new(m_max);
        let coeffs = (1..=m_max).map(|m| Complex64::new(f64::from(t.mobius(m)), 0.0)).collect();
        Ok(Self { coeffs, kind: MollifierKind::Moebius })
    }

    /// `a(m) = μ(m)(1 − log m / log M)`; needs `M ≥ 2`.
    pub fn smoothed_moebius(m_max: usize) -> Result<Self> {
        if m_max < 2 {
            return Err(Error::domain("smoothed Möbius weights need M ≥ 2"));
        }
        let t = ArithmeticTable::new(m_max);
        let lm = (m_max as f64).ln();
        let coeffs = (1..=m_max)
            .map(|m| Complex64::new(f64::from(t.mobius(m)) * (1.0 - (m as f64).ln() / lm), 0.0))
            .collect();
        Ok(Self { coeffs, kind: MollifierKind::SmoothedMoebius })
    }

    pub fn custom(coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(coeffs.len())?;
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::domain("coefficients must be finite"));
        }
        Ok(Self { coeffs, kind: MollifierKind::Custom })
    }

    pub fn preset(kind: MollifierKind, m_max: usize) -> Result<Self> {
        match kind {
            MollifierKind::Ones => Self::ones(m_max),
            MollifierKind::Moebius => Self::moebius(m_max),
            MollifierKind::SmoothedMoebius => Self::smoothed_moebius(m_max),
            MollifierKind::Custom => Err(Error::domain("custom polynomials need coefficients")),
        }
    }

    /// Parses lines `m re im` (1-based; missing `m` are zero, `#` starts a comment).
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::domain(format!("line {}: expected `m re im`, got {line:?}", line_no + 1));
            let mut it = line.split_whitespace();
            let m: usize = it.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
            let re: f64 = it.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
            let im: f64 = match it.next() {
                Some(x) => x.parse().map_err(|_| bad())?,
                None => 0.0,
            };
            if m == 0 || it.next().is_some() {
                return Err(bad());
            }
            entries.push((m, Complex64::new(re, im)));
        }
        let m_max = entries.iter().map(|e| e.0).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m_max];
        for (m, a) in entries {
            coeffs[m - 1] += a;
        }
        Self::custom(coeffs)
    }

    pub fn m_max(&self) -> usize {
        self.coeffs.len()
    }

    pub fn kind(&self) -> MollifierKind {
        self.kind
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `a(m)` for `1 ≤ m ≤ M`.
    pub fn coeff(&self, m: usize) -> Complex64 {
        self.coeffs[m - 1]
    }
}

fn check_len(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::domain("M must be at least 1"));
    }
    Ok(())
}

/// `A(s)` with Neumaier-compensated summation.
pub fn poly_eval(p: &DirichletPolynomial, s: Complex64) -> Complex64 {
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for (i, a) in p.coeffs.iter().enumerate() {
        if a.re == 0.0 && a.im == 0.0 {
            continue;
        }
        let term = if i == 0 { *a } else { a * (-s * ((i + 1) as f64).ln()).exp() };
        re.add(term.re);
        im.add(term.im);
    }
    Complex64::new(re.total(), im.total())
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let one = DirichletPolynomial::ones(1).unwrap();
        assert_eq!(poly_eval(&one, Complex64::new(0.3, 77.0)), Complex64::new(1.0, 0.0));
        let three = DirichletPolynomial::ones(3).unwrap();
        assert!((poly_eval(&three, Complex64::new(0.0, 0.0)) - 3.0).norm() < 1e-15);
        let mo = DirichletPolynomial::moebius(4).unwrap();
        assert!((poly_eval(&mo, Complex64::new(1.0, 0.0)) - 1.0 / 6.0).norm() < 1e-15);
    }

    #[test]
    fn presets() {
        let s = DirichletPolynomial::smoothed_moebius(6).unwrap();
        assert_eq!(s.coeff(1), Complex64::new(1.0, 0.0));
        assert_eq!(s.coeff(4), Complex64::new(0.0, 0.0));
        assert!(s.coeff(6).norm() < 1e-15);
        assert!((s.coeff(2).re + 1.0 - 2f64.ln() / 6f64.ln()).abs() < 1e-15);
        assert!(DirichletPolynomial::smoothed_moebius(1).is_err());
        assert!(DirichletPolynomial::ones(0).is_err());
        assert_eq!(DirichletPolynomial::moebius(12).unwrap().m_max(), 12);
    }

    #[test]
    fn parse_file_format() {
        let p = DirichletPolynomial::parse("# mollifier\n1 1 0\n3 -0.5 0.25\n\n").unwrap();
        assert_eq!(p.m_max(), 3);
        assert_eq!(p.coeff(2), Complex64::new(0.0, 0.0));
        assert_eq!(p.coeff(3), Complex64::new(-0.5, 0.25));
        assert_eq!(p.kind(), MollifierKind::Custom);
        assert!(DirichletPolynomial::parse("0 1 0").is_err());
        assert!(DirichletPolynomial::parse("1 x 0").is_err());
        assert!(DirichletPolynomial::parse("").is_err());
    }
}
