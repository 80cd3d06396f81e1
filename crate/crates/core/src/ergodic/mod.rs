//! Finite models for recurrence along primes: diagonal unitaries, torus
//! rotations, periodic lattice sets and explicit spectral measures.
//!
//! Every model consumes an [`IndexVectors`] stream, usually built by a
//! [`RecurrenceGenerator`] from the first `N` primes.

mod filtered;
mod generator;
mod lattice;
mod spectral;
mod torus;
mod unitary;

pub use filtered::{filtered_recurrence, predicted_filter_density, FilteredRecurrence, RecurrenceTarget};
pub use generator::{prime_index_sequence, IndexVectors, RecurrenceGenerator};
pub use lattice::{lattice_recurrence_scan, LatticeScan, LatticeSet, MAX_CELLS};
pub use spectral::{fcplus_probe, residue_indicator_check, FcProbe, ResidueIndicator, SpectralMeasure};
pub use torus::{torus_recurrence_average, RecurrenceAverage, TorusBox, TorusSystem};
pub use unitary::{ergodic_average, DiagonalUnitarySystem, ErgodicAverage};
