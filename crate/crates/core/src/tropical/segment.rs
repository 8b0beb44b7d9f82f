use super::{canonicalize, trop_distance_raw, TropicalPoint};
use crate::error::Result;

/// Breakpoint polyline of the tropical line segment `tconv({v, w})`.
#[derive(Debug, Clone, PartialEq)]
pub struct TropicalSegment {
    breakpoints: Vec<TropicalPoint>,
}

impl TropicalSegment {
    /// Source first, target last.
    pub fn breakpoints(&self) -> &[TropicalPoint] {
        &self.breakpoints
    }

    pub fn source(&self) -> &TropicalPoint {
        &self.breakpoints[0]
    }

    pub fn target(&self) -> &TropicalPoint {
        self.breakpoints
            .last()
            .expect("segment has at least one breakpoint")
    }

    /// Sum of tropical distances between consecutive breakpoints.
    pub fn length(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .map(|w| trop_distance_raw(w[0].coords(), w[1].coords()))
            .sum()
    }
}

/// Tropical geodesic from `v` to `w`.
///
/// With `t_1 < … < t_m` the distinct values of `w - v`, the breakpoints are
/// `max(v + (t_k - t_1), w - t_1)` for `k = m, …, 1`.
pub fn trop_segment(v: &TropicalPoint, w: &TropicalPoint) -> Result<TropicalSegment> {
    v.check_dim(w)?;
    let diff: Vec<f64> = w
        .coords()
        .iter()
        .zip(v.coords())
        .map(|(b, a)| b - a)
        .collect();
    let mut levels = diff.clone();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let base = levels[0];
    let shifted: Vec<f64> = w.coords().iter().map(|x| x - base).collect();

    let mut breakpoints = Vec::with_capacity(levels.len());
    for t in levels.iter().rev() {
        let mu = t - base;
        let raw = v
            .coords()
            .iter()
            .zip(&shifted)
            .map(|(a, b)| (a + mu).max(*b))
            .collect();
        breakpoints.push(canonicalize(raw)?);
    }
    // Pin the endpoints to the inputs so rounding never moves them.
    if let Some(first) = breakpoints.first_mut() {
        *first = v.clone();
    }
    if let Some(last) = breakpoints.last_mut() {
        *last = w.clone();
    }
    Ok(TropicalSegment { breakpoints })
}
