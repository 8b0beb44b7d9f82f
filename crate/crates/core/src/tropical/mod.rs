//! Max-plus arithmetic and geometry of the tropical projective torus.
//!
//! Scalars use `f64` with `f64::NEG_INFINITY` as the additive identity.
//! A [`TropicalPoint`] never stores `-inf`; it is an element of `R^e / R·1`
//! kept in canonical form (first coordinate exactly zero).

mod hyperplane;
mod polytope;
mod segment;

pub use hyperplane::{distance_to_hyperplane, sector_of, Sector, TropicalHyperplane};
pub use polytope::{in_polytope, project_onto_polytope, tropical_combination, TropicalPolytope};
pub use segment::{trop_segment, TropicalSegment};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::EQ_TOL;

/// Tropical addition: `a ⊞ b = max(a, b)`.
#[inline]
pub fn trop_add(a: f64, b: f64) -> f64 {
    a.max(b)
}

/// Tropical multiplication: `a ⊙ b = a + b`, with `-inf` absorbing.
#[inline]
pub fn trop_mul(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        a + b
    }
}

/// A point of `R^e / R·1` in canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TropicalPoint(Vec<f64>);

impl TropicalPoint {
    /// Canonicalizes a raw coordinate vector by subtracting its first entry.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        canonicalize(raw)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Coordinatewise comparison of canonical forms.
    pub fn approx_eq(&self, other: &TropicalPoint, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// The all-zero point (the origin of the torus).
    pub fn origin(dim: usize) -> Result<Self> {
        canonicalize(vec![0.0; dim])
    }

    pub(crate) fn check_dim(&self, other: &TropicalPoint) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for TropicalPoint {
    type Error = Error;

    fn try_from(raw: Vec<f64>) -> Result<Self> {
        canonicalize(raw)
    }
}

impl From<TropicalPoint> for Vec<f64> {
    fn from(p: TropicalPoint) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for TropicalPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Maps a raw vector to its canonical representative (first coordinate 0).
pub fn canonicalize(mut raw: Vec<f64>) -> Result<TropicalPoint> {
    if raw.len() < 2 {
        return Err(Error::TooShort(raw.len()));
    }
    if let Some(i) = raw.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let shift = raw[0];
    for x in raw.iter_mut() {
        *x -= shift;
    }
    raw[0] = 0.0;
    Ok(TropicalPoint(raw))
}

/// `a ⊙ v`; in the quotient this is the identity.
pub fn scalar_mul(a: f64, v: &TropicalPoint) -> TropicalPoint {
    let raw = v.0.iter().map(|x| a + x).collect();
    canonicalize(raw).expect("finite shift of a finite point")
}

/// Raw `a ⊙ v ⊞ b ⊙ w` without canonicalization.
pub fn trop_combine_raw(a: f64, v: &[f64], b: f64, w: &[f64]) -> Result<Vec<f64>> {
    if v.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            found: w.len(),
        });
    }
    Ok(v.iter()
        .zip(w)
        .map(|(x, y)| trop_add(trop_mul(a, *x), trop_mul(b, *y)))
        .collect())
}

/// `a ⊙ v ⊞ b ⊙ w`, canonicalized.
pub fn trop_combine(a: f64, v: &TropicalPoint, b: f64, w: &TropicalPoint) -> Result<TropicalPoint> {
    canonicalize(trop_combine_raw(a, &v.0, b, &w.0)?)
}

/// Tropical (generalized Hilbert projective) distance on raw vectors.
pub fn trop_distance_raw(v: &[f64], w: &[f64]) -> f64 {
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for (a, b) in v.iter().zip(w) {
        let d = a - b;
        hi = hi.max(d);
        lo = lo.min(d);
    }
    hi - lo
}

/// `d_tr(v, w) = max_i(v_i - w_i) - min_i(v_i - w_i)`.
pub fn trop_distance(v: &TropicalPoint, w: &TropicalPoint) -> Result<f64> {
    v.check_dim(w)?;
    Ok(trop_distance_raw(&v.0, &w.0))
}

/// Equality in the quotient at the default tolerance.
pub fn same_class(v: &TropicalPoint, w: &TropicalPoint) -> bool {
    v.approx_eq(w, EQ_TOL)
}
