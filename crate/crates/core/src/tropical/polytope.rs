use serde::{Deserialize, Serialize};

use super::{canonicalize, trop_distance_raw, TropicalPoint};
use crate::error::{Error, Result};

/// Tropical convex hull of a finite, ordered vertex list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TropicalPolytope {
    vertices: Vec<TropicalPoint>,
}

impl TropicalPolytope {
    pub fn new(vertices: Vec<TropicalPoint>) -> Result<Self> {
        let first = vertices.first().ok_or(Error::Empty("polytope"))?;
        for v in &vertices {
            first.check_dim(v)?;
        }
        Ok(TropicalPolytope { vertices })
    }

    pub fn vertices(&self) -> &[TropicalPoint] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    /// Weights `λ_l = min_j(x_j - D^(l)_j)` of the nearest-point map.
    pub fn projection_weights(&self, x: &[f64]) -> Vec<f64> {
        self.vertices
            .iter()
            .map(|d| {
                x.iter()
                    .zip(d.coords())
                    .map(|(a, b)| a - b)
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// Raw `⊞_l λ_l ⊙ D^(l)`; `-inf` weights drop their vertex.
    pub fn combine_raw(&self, lambdas: &[f64]) -> Vec<f64> {
        let mut out = vec![f64::NEG_INFINITY; self.dim()];
        for (lam, d) in lambdas.iter().zip(&self.vertices) {
            if *lam == f64::NEG_INFINITY {
                continue;
            }
            for (o, c) in out.iter_mut().zip(d.coords()) {
                *o = o.max(lam + c);
            }
        }
        out
    }
}

/// `⊞_l λ_l ⊙ D^(l)`, canonicalized.
pub fn tropical_combination(lambdas: &[f64], polytope: &TropicalPolytope) -> Result<TropicalPoint> {
    if lambdas.len() != polytope.len() {
        return Err(Error::DimensionMismatch {
            expected: polytope.len(),
            found: lambdas.len(),
        });
    }
    if lambdas.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
        return Err(Error::InvalidParameter(
            "combination weights must be finite or -inf".into(),
        ));
    }
    canonicalize(polytope.combine_raw(lambdas))
}

/// Nearest-point projection of `x` onto `tconv(P)` in the tropical metric.
pub fn project_onto_polytope(
    x: &TropicalPoint,
    polytope: &TropicalPolytope,
) -> Result<TropicalPoint> {
    if polytope.is_empty() {
        return Err(Error::Empty("polytope"));
    }
    if x.dim() != polytope.dim() {
        return Err(Error::DimensionMismatch {
            expected: polytope.dim(),
            found: x.dim(),
        });
    }
    let lambdas = polytope.projection_weights(x.coords());
    let raw = polytope.combine_raw(&lambdas);
    // points already in the polytope come back unchanged
    let scale = x
        .coords()
        .iter()
        .chain(polytope.vertices().iter().flat_map(|v| v.coords()))
        .fold(1.0f64, |m, c| m.max(c.abs()));
    let slack = 16.0 * f64::EPSILON * scale;
    if raw
        .iter()
        .zip(x.coords())
        .all(|(a, b)| (a - b).abs() <= slack)
    {
        return Ok(x.clone());
    }
    canonicalize(raw)
}

/// Membership in `tconv(P)` via the projection residual.
pub fn in_polytope(x: &TropicalPoint, polytope: &TropicalPolytope, tol: f64) -> Result<bool> {
    let proj = project_onto_polytope(x, polytope)?;
    Ok(trop_distance_raw(x.coords(), proj.coords()) <= tol)
}
