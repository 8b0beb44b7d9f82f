//! Default numerical tolerances shared across modules.

/// Coordinatewise equality of canonical points.
pub const EQ_TOL: f64 = 1e-9;

/// "Attained at least twice" for hyperplanes and the three-point condition.
pub const TIE_TOL: f64 = 1e-9;

/// Smallest pivot magnitude the simplex accepts.
pub const PIVOT_TOL: f64 = 1e-10;

/// Constraint violation tolerated in a reported LP optimum.
pub const FEAS_TOL: f64 = 1e-8;
