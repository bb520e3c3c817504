//! Numerical laboratory for the mollified second moment of the Riemann zeta
//! function on the critical line.
//!
//! The crate is organised bottom-up:
//!
//! * [`specialfn`]: complex log-Gamma, zeta (Euler–Maclaurin and
//!   Riemann–Siegel), the functional-equation factor, divisor counts and
//!   reduced fractions.
//! * [`estermann`]: Hurwitz zeta, the Estermann function `D(s, h/k)` and the
//!   divisor exponential sum `S(x, h/k)` with its Voronoi-type identity.
//! * [`kernel`]: the Gamma smoothing kernel `ω(t, T₁, T₂)`.
//! * [`contour`]: Mellin and ray-integral identities, the constant `c₀`,
//!   pointwise geometry of the ray `L_δ` and the small-scale double integral `W`.
//! * [`moment`]: Dirichlet polynomials, sharp and smoothed moments, the
//!   main-term formula, `𝓜(s)`, `V`, the gcd sum and the error scan.
//!
//! Supporting numerics live in [`quad`] (Gauss rules, adaptive Gauss–Kronrod,
//! node accounting) and [`dd`] (double-double arithmetic for ray integrals
//! whose integrand cancels by many orders of magnitude).

pub mod contour;
pub mod dd;
pub mod error;
pub mod estermann;
pub mod kernel;
pub mod linalg;
pub mod moment;
pub mod quad;
pub mod specialfn;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Euler's constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
/// Output order always matches input order.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}
