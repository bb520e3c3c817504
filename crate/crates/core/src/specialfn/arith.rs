use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sieved arithmetic functions up to a fixed limit.
///
/// Built once and then read-only, so it can be shared across threads.
#[derive(Debug, Clone)]
pub struct ArithmeticTable {
    limit: usize,
    divisor_counts: Vec<u32>,
    mobius: Vec<i8>,
    totient: Vec<u64>,
}

impl ArithmeticTable {
    pub fn new(limit: usize) -> Self {
        let limit = limit.max(1);
        let mut divisor_counts = vec![0u32; limit + 1];
        for d in 1..=limit {
            for m in (d..=limit).step_by(d) {
                divisor_counts[m] += 1;
            }
        }
        let mut mobius = vec![1i8; limit + 1];
        let mut totient: Vec<u64> = (0..=limit as u64).collect();
        let mut is_composite = vec![false; limit + 1];
        mobius[0] = 0;
        for p in 2..=limit {
            if is_composite[p] {
                continue;
            }
            for m in (p..=limit).step_by(p) {
                if m > p {
                    is_composite[m] = true;
                }
                mobius[m] = -mobius[m];
                totient[m] -= totient[m] / p as u64;
            }
            if let Some(p2) = p.checked_mul(p) {
                for m in (p2..=limit).step_by(p2) {
                    mobius[m] = 0;
                }
            }
        }
        Self { limit, divisor_counts, mobius, totient }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn divisor_counts(&self) -> &[u32] {
        &self.divisor_counts
    }

    /// `d(n)`; falls back to trial division above the limit.
    pub fn d(&self, n: u64) -> u64 {
        if (n as usize) <= self.limit && n > 0 {
            u64::from(self.divisor_counts[n as usize])
        } else {
            divisor_count_trial(n)
        }
    }

    /// Möbius function `μ(n)` for `1 ≤ n ≤ limit`.
    pub fn mobius(&self, n: usize) -> i8 {
        self.mobius[n]
    }

    /// Euler's totient `φ(n)` for `1 ≤ n ≤ limit`.
    pub fn totient(&self, n: usize) -> u64 {
        self.totient[n]
    }
}

fn divisor_count_trial(mut n: u64) -> u64 {
    let mut count = 1;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        count *= e + 1;
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        count *= 2;
    }
    count
}

/// Number of positive divisors of `n`.
pub fn divisor_d(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::domain("divisor_d(0) is undefined"));
    }
    Ok(divisor_count_trial(n))
}

/// A fraction `h/k` together with its reduced form and the inverse of the
/// reduced numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedFraction {
    pub h: u64,
    pub k: u64,
    /// `(h, k)`.
    pub gcd: u64,
    pub h_star: u64,
    pub k_star: u64,
    /// `h̄*` with `h̄* h* ≡ 1 (mod k*)` and `1 ≤ h̄* ≤ k*`; equal to 1 when `k* = 1`.
    pub h_bar_star: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    let inv = t0.rem_euclid(m as i128) as u64;
    if inv == 0 {
        m
    } else {
        inv
    }
}

/// Reduces `h/k`. `h = 0` is allowed and gives `0/1`; `k = 0` is an error.
pub fn reduce_fraction(h: u64, k: u64) -> Result<ReducedFraction> {
    if k == 0 {
        return Err(Error::domain("denominator must be positive"));
    }
    let g = gcd(h, k);
    let h_star = h / g;
    let k_star = k / g;
    Ok(ReducedFraction { h, k, gcd: g, h_star, k_star, h_bar_star: mod_inverse(h_star, k_star) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_examples() {
        assert_eq!(divisor_d(1).unwrap(), 1);
        assert_eq!(divisor_d(6).unwrap(), 4);
        assert_eq!(divisor_d(360).unwrap(), 24);
        assert!(divisor_d(0).is_err());
        let table = ArithmeticTable::new(1000);
        for n in 1..=1000u64 {
            assert_eq!(table.d(n), divisor_d(n).unwrap());
        }
        assert_eq!(table.d(1_000_003), 2);
    }

    #[test]
    fn mobius_and_totient() {
        let t = ArithmeticTable::new(30);
        let mu: Vec<i8> = (1..=12).map(|n| t.mobius(n)).collect();
        assert_eq!(mu, [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
        let phi: Vec<u64> = (1..=12).map(|n| t.totient(n)).collect();
        assert_eq!(phi, [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
    }

    #[test]
    fn reduce_examples() {
        let f = reduce_fraction(4, 6).unwrap();
        assert_eq!((f.h_star, f.k_star, f.h_bar_star), (2, 3, 2));
        let f = reduce_fraction(5, 5).unwrap();
        assert_eq!((f.h_star, f.k_star, f.h_bar_star), (1, 1, 1));
        let f = reduce_fraction(7, 9).unwrap();
        assert_eq!((f.h_star, f.k_star, f.h_bar_star), (7, 9, 4));
        let f = reduce_fraction(0, 7).unwrap();
        assert_eq!((f.h_star, f.k_star, f.h_bar_star), (0, 1, 1));
        assert!(reduce_fraction(1, 0).is_err());
    }

    #[test]
    fn inverse_exhaustive() {
        for h in 1..=50 {
            for k in 1..=50 {
                let f = reduce_fraction(h, k).unwrap();
                assert_eq!(gcd(f.h_star, f.k_star), 1);
                assert!(1 <= f.h_bar_star && f.h_bar_star <= f.k_star);
                assert_eq!((f.h_bar_star * f.h_star) % f.k_star, 1 % f.k_star);
            }
        }
    }
}
