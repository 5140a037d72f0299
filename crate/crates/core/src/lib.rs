//! Solver for epistemic logic programs.
//!
//! The [`semantics`] module computes world views by enumeration and serves as
//! the reference. [`splitting`] decomposes a program along a splitting set and
//! [`stratification`] solves stratified programs stratum by stratum.
//! [`driver`] ties these together for the command line; [`fuzz`] compares
//! the engines on random programs.

pub mod driver;
pub mod fuzz;
pub mod semantics;
pub mod splitting;
pub mod stratification;
pub mod syntax;

pub use driver::{run_query, run_solve, DriverError, Mode, QueryReport, SolveOptions, SolveReport};
pub use fuzz::{run_fuzz, FuzzConfig, FuzzReport};
pub use semantics::{BeliefSet, LimitError, Limits, WorldView, WorldViews};
pub use splitting::{
    is_guarded, solve_by_splitting, GuardConfig, Guardedness, MultiView, SplitDecomposition,
    SplitError, SplitOptions,
};
pub use stratification::{
    find_stratification, solve_stratified, Layering, StratError, Stratification,
};
pub use syntax::{
    ground, parse_program, BodyElem, LitSet, Modality, ObjectiveLiteral, Program, Rule,
    SubjectiveLiteral,
};
