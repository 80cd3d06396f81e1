//! Prime tables, arithmetic functions and the classical identities behind
//! the exponential-sum estimates.

mod arith;
mod balance;
mod identities;
mod sieve;

pub use arith::{arith_tables, ArithTables, MAX_ARITH_LIMIT};
pub use balance::{ap_balance_report, li, primes_in_ap, BalanceReport, ModulusRow, ResidueRow};
pub use identities::{abel_error_bound, partial_summation_check, vaughan_decompose, AbelCheck, VaughanTerms};
pub use sieve::{sieve, sieve_with, PrimeTable, SieveConfig, MAX_SIEVE_LIMIT};
