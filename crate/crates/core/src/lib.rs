//! Numerical laboratory for equidistribution of Hardy-field functions along
//! primes.
//!
//! The crate is split by concern:
//!
//! - [`hardy`]: symbolic sums `c * x^theta * log^k x`, differentiation, growth
//!   classes and the decision procedures built on them.
//! - [`primes`]: segmented sieve, arithmetic-function tables and exact checks of
//!   the classical summation identities.
//! - [`expsums`]: Weyl sums over integers and primes, and bound-versus-actual
//!   evaluators for the standard exponential-sum inequalities.
//! - [`discrepancy`]: exact star and extreme discrepancy, fractional-part streams
//!   and joint Weyl tests.
//! - [`ergodic`]: finite models (diagonal unitaries, torus rotations, periodic
//!   lattice sets, explicit spectral measures) for recurrence along primes.

pub mod dd;
pub mod discrepancy;
pub mod ergodic;
pub mod error;
pub mod expsums;
pub mod hardy;
pub mod parallel;
pub mod primes;

pub use dd::DoubleDouble;
pub use error::{Error, Result};
pub use hardy::{Coefficient, HardyExpr, Precision};
pub use primes::PrimeTable;

/// `e(x) = exp(2 pi i x)`.
pub fn circle(x: f64) -> num_complex::Complex64 {
    let (s, c) = (std::f64::consts::TAU * x).sin_cos();
    num_complex::Complex64::new(c, s)
}
