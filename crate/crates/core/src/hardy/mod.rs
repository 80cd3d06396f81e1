//! Symbolic Hardy-field expressions of the form `sum c * x^theta * (log x)^k`.

mod coefficient;
mod expr;
mod growth;
mod inequalities;
mod parse;

pub use coefficient::{Coefficient, Irrational};
pub use expr::{
    FracValue, HardyExpr, Precision, Term, BOUNDARY_EPS, COMPENSATED_LIMIT, COMPENSATED_THRESHOLD,
};
pub use growth::{
    boshernitzan_condition, classify_growth, family_combination_check, growth_exponent,
    is_in_bold_h, signature_in_bold_h, CombinationDomain, GrowthType,
};
pub use inequalities::{
    verify_differential_inequalities, Check, ConstantWindow, InequalityReport, InequalityRow,
};
