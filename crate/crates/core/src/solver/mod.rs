//! Optimization substrate: a dense simplex LP solver and a convex minimizer.

mod convex;
mod lp;

pub use convex::{minimize_convex, ConvexConfig, ConvexResult};
pub use lp::{
    max_violation, solve_lp, Constraint, LinearProgram, Relation, Sense, Solution, Status,
};
