//! Solvers for multiple-choice vector bin packing (MVBP) and the
//! multiple-choice multidimensional knapsack (MMK).
//!
//! In MVBP every item comes in one of several D-dimensional incarnations and
//! bins are opened from a catalog of weighted types; the goal is to select an
//! incarnation per item and pack everything into bins of minimum total
//! weight. MMK is the single-bin maximization counterpart.
//!
//! The crate provides:
//!
//! - [`mmk::solve_mmk`]: an approximation scheme for weighted MMK built on
//!   guess enumeration over the heaviest incarnations plus LP rounding.
//! - [`cover::solve_cover_lp`]: the covering LP relaxation of MVBP, solved by
//!   column generation with the knapsack scheme as pricing oracle.
//! - [`solver::solve_weighted`] and friends: a greedy covering phase over the
//!   fractional support followed by a First-Fit residual packer, with the
//!   proved cost bound `(ln 2D + 1) opt* + sum_t w_t + w_max` checked on
//!   every run.
//! - [`oracle`]: exact brute-force references for desk-scale verification.
//!
//! All solver entry points are deterministic: identical inputs produce
//! identical outputs.

pub mod cover;
pub mod first_fit;
pub mod fixtures;
pub mod generate;
pub mod io;
pub mod mmk;
pub mod model;
pub mod oracle;
pub mod simplex;
pub mod solver;

pub use model::{
    check_packing, check_selection, packing_cost, validate_instance, BinType, Incarnation,
    Instance, Item, KnapsackSelection, PackedBin, Packing,
};

/// Absolute tolerance for load-vs-capacity comparisons.
pub const FEAS_TOL: f64 = 1e-9;

/// Tolerance for LP feasibility and optimality tests.
pub const LP_TOL: f64 = 1e-7;

/// Integrality tolerance when flooring LP values.
pub const INT_TOL: f64 = 1e-6;

/// Minimum admissible pivot magnitude in the simplex engine.
pub const PIVOT_TOL: f64 = 1e-10;

/// Errors raised by the packing solvers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveError {
    /// No incarnation of the item fits alone in any bin type.
    InfeasibleItem(usize),
    /// A scalar size handed to First-Fit exceeds the unit capacity.
    ItemTooLarge(usize),
    /// Column generation exceeded its addition limit (signals a solver bug,
    /// never observed correct behavior).
    IterationLimit,
    /// The greedy phase had to pick a column but the fractional support was
    /// empty (signals an upstream LP bug).
    EmptySupport,
    /// The unweighted solver was handed bin types with non-unit weights.
    NotUnweighted,
    /// The underlying LP solve failed.
    Lp(simplex::LpError),
}

impl std::fmt::Display for SolveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveError::InfeasibleItem(i) => {
                write!(f, "item {i} does not fit alone in any bin type")
            }
            SolveError::ItemTooLarge(i) => {
                write!(f, "item {i} exceeds the unit First-Fit capacity")
            }
            SolveError::IterationLimit => write!(f, "column generation exceeded iteration limit"),
            SolveError::EmptySupport => write!(f, "fractional support is empty"),
            SolveError::NotUnweighted => write!(f, "bin-type weights must all be 1"),
            SolveError::Lp(e) => write!(f, "LP solve failed: {e}"),
        }
    }
}

impl std::error::Error for SolveError {}

impl From<simplex::LpError> for SolveError {
    fn from(e: simplex::LpError) -> Self {
        SolveError::Lp(e)
    }
}
