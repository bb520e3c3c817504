use crate::specialfn::ArithmeticTable;

/// `Σ_{h,k≤M} (h,k)/(hk)`, grouped by common divisors:
/// `(h,k) = Σ_{t|(h,k)} φ(t)` gives `Σ_t φ(t) (Σ_{t|h≤M} 1/h)²`.
pub fn gcd_sum(m_max: usize) -> f64 {
    let table = ArithmeticTable::new(m_max);
    grouped(m_max, |t| table.totient(t) as f64)
}

/// `Σ_t t (Σ_{t|h≤M} 1/h)²`, the cruder grouping with `t` in place of `φ(t)`;
/// an upper bound for [`gcd_sum`].
pub fn gcd_sum_upper_bound(m_max: usize) -> f64 {
    grouped(m_max, |t| t as f64)
}

fn grouped(m_max: usize, weight: impl Fn(usize) -> f64) -> f64 {
    // Σ_{t|h≤M} 1/h = H(⌊M/t⌋)/t
    let mut harmonic = vec![0.0; m_max + 1];
    for n in 1..=m_max {
        harmonic[n] = harmonic[n - 1] + 1.0 / n as f64;
    }
    (1..=m_max)
        .rev()
        .map(|t| {
            let inner = harmonic[m_max / t] / t as f64;
            weight(t) * inner * inner
        })
        .sum()
}

/// The direct `O(M²)` double loop.
pub fn gcd_sum_brute(m_max: usize) -> f64 {
    let mut total = 0.0;
    for h in (1..=m_max).rev() {
        for k in (1..=m_max).rev() {
            let (mut a, mut b) = (h, k);
            while b != 0 {
                (a, b) = (b, a % b);
            }
            total += a as f64 / (h * k) as f64;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(gcd_sum(1), 1.0);
        assert!((gcd_sum(2) - 2.5).abs() < 1e-15);
        assert!((gcd_sum_brute(2) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn grouped_equals_brute_force() {
        for m in 1..=200 {
            let g = gcd_sum(m);
            let b = gcd_sum_brute(m);
            assert!((g - b).abs() <= 1e-13 * b, "M = {m}: {g} vs {b}");
            assert!(gcd_sum_upper_bound(m) >= g - 1e-12);
        }
    }

    #[test]
    fn growth_is_log_cubed() {
        let (a, b) = (gcd_sum(1000), gcd_sum(10_000));
        let want = (10_000f64.ln() / 1000f64.ln()).powi(3);
        assert!(b / a <= 1.6 * want && b / a >= want / 1.6);
    }
}
