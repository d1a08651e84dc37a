//! Concave maximization over the unit simplex with Frank-Wolfe style solvers.
//!
//! The crate is organized around a small set of building blocks:
//!
//! - [`simplex`]: feasible points, optimality gaps and the elementary step
//!   updates shared by every solver.
//! - [`solvers`]: the iterative schemes (FW, MFW, SWAP, SWAP-2o and the
//!   fully-corrective variant) with per-iteration tracing.
//! - [`svm`]: the L2-SVM dual as a concave objective, plus training and
//!   prediction (binary and one-vs-one).
//! - [`geometry`]: minimum-norm-point formulations and the Gilbert/MDM
//!   iterations used as independent cross-checks of the solvers.
//! - [`io`]: LIBSVM-format datasets, model files and trace export.

pub mod geometry;
pub mod io;
pub mod simplex;
pub mod solvers;
pub mod svm;

pub use simplex::{
    apply_step, ascent_index, bisection_line_search, descent_index, gap_report,
    generic_line_search, ConcaveObjective, GapReport, QuadraticObjective, SearchContext,
    SearchDirection, SimplexError, SimplexPoint, Step, StepKind,
};
pub use solvers::{
    restricted_solve, solve, solve_fully_corrective, solve_fw, solve_mfw, solve_swap,
    IterationRecord, SolveResult, SolverConfig, SolverError, StepCounts, SwapOrder, Termination,
    Variant,
};
