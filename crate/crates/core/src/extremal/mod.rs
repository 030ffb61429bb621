//! Weighted Siciak extremal functions by linear programming, and the
//! harnesses that check them against closed forms and monomial pullbacks.

mod harness;
mod lp;
mod oracle;
mod samples;
mod siciak;

pub use harness::{compare, discretization_slack, thm12_check, CompareReport, CompareRow, Thm12Report, Thm12Row};
pub use lp::{lp_solve, lp_solve_with, IncrementalLp, LpProblem, LpSolution, LpStatus, FEASIBILITY_TOL, PIVOT_TOL};
pub use oracle::{oracle_v, OracleCase, OracleKind};
pub use samples::{kronecker_torus, SampleCloud, SampleDescriptor, WeightSpec, WeightedSampleSet, CERTIFICATION_FACTOR};
pub use siciak::{siciak_limsup, siciak_m, ConstraintMode, ExtremalResult, LimsupResult, SiciakOptions};
