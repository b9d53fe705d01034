//! Benchmark problems, error norms and convergence studies.

pub mod convergence;
pub mod invariants;
pub mod manufactured;
pub mod norms;

pub use invariants::{run_suite, Check};
pub use convergence::{run_convergence, ConvergenceRow, ConvergenceTable, Study, StudyOptions};
pub use manufactured::{Domain, Example, ManufacturedSolution};
pub use norms::{energy, errors, interior_l2_norm, l2_error, rate, triple_bar_error, triple_bar_norm, ErrorNorms};
