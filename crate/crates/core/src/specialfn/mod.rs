//! Complex special functions and the arithmetic helpers used throughout.

mod arith;
mod gamma;
mod zeta;

pub use arith::{divisor_d, reduce_fraction, ArithmeticTable, ReducedFraction};
pub use gamma::{
    cot, log_cos, log_gamma, log_sin, scaled_kernel_exponent, stirling_magnitude_exponent,
    stirling_series,
};
pub use zeta::{chi_factor, hurwitz_em, zeta, ZetaMode};

/// Bernoulli numbers `B_2, B_4, …, B_40` as (numerator, denominator).
pub(crate) const BERNOULLI: [(f64, f64); 20] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
    (-7709321041217.0, 510.0),
    (2577687858367.0, 6.0),
    (-26315271553053477373.0, 1919190.0),
    (2929993913841559.0, 6.0),
    (-261082718496449122051.0, 13530.0),
];

/// `B_{2k}` for `k = 1..=20`.
pub(crate) fn bernoulli_2k(k: usize) -> f64 {
    let (p, q) = BERNOULLI[k - 1];
    p / q
}
