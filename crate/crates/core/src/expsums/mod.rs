//! Weyl sums over integers and primes, and bound-versus-actual evaluators for
//! the classical exponential-sum inequalities.

mod bounds;
mod sums;

pub use bounds::{
    composite_bound_eval, erdos_turan_bound, kusmin_landau_check, vdc_inequality_check, BoundConstants,
    BoundReport, CompositeOverrides,
};
pub use sums::{
    weyl_sum_integers, weyl_sum_points, weyl_sum_primes, weyl_sum_primes_range, weyl_sum_values, ExpSumResult,
    SumConfig,
};
