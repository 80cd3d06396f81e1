//! Exact discrepancy of finite samples and equidistribution reports along
//! integers, primes and primes in progressions.

mod exact;
mod report;
mod stream;

pub use exact::{extreme_discrepancy, star_discrepancy, EXTREME_CAP};
pub use report::{
    analyze, checkpoint_rows, discrepancy_report, joint_weyl_test, rows_to_csv, rows_to_plotdata, ud_along_ap,
    CheckpointRow, DiscrepancyReport, JointRow, JointWeylReport, ReportOptions, Source, WeylModulus,
};
pub use stream::{fractional_parts, Domain, FracStream};
