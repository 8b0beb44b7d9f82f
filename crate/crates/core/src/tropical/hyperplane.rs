use serde::{Deserialize, Serialize};

use super::TropicalPoint;
use crate::error::Result;
use crate::tol::TIE_TOL;

/// Tropical hyperplane `H_ω`: the points where `max_i(ω_i + x_i)` is attained
/// at least twice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TropicalHyperplane {
    pub normal: TropicalPoint,
}

impl TropicalHyperplane {
    pub fn new(normal: TropicalPoint) -> Self {
        TropicalHyperplane { normal }
    }
}

/// Which open sector of `H_ω` a point falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sector {
    Open(usize),
    OnHyperplane,
}

/// Largest and second largest entries of `x + ω`, with the argmax index.
/// Ties prefer the lower index.
fn top_two(x: &[f64], omega: &[f64]) -> (usize, f64, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    let mut second = f64::NEG_INFINITY;
    for (i, (a, b)) in x.iter().zip(omega).enumerate() {
        let s = a + b;
        if s > best.1 {
            second = best.1;
            best = (i, s);
        } else if s > second {
            second = s;
        }
    }
    (best.0, best.1, second)
}

pub fn sector_of(x: &TropicalPoint, h: &TropicalHyperplane) -> Result<Sector> {
    x.check_dim(&h.normal)?;
    let (i, first, second) = top_two(x.coords(), h.normal.coords());
    if first - second <= TIE_TOL {
        Ok(Sector::OnHyperplane)
    } else {
        Ok(Sector::Open(i))
    }
}

/// `min { d_tr(x, y) : y ∈ H_ω }`, which equals the gap between the largest
/// and second largest entries of `x + ω`.
pub fn distance_to_hyperplane(x: &TropicalPoint, h: &TropicalHyperplane) -> Result<f64> {
    x.check_dim(&h.normal)?;
    let (_, first, second) = top_two(x.coords(), h.normal.coords());
    Ok(first - second)
}
