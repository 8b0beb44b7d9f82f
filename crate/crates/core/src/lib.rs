//! Tropical (max-plus) descriptive and inferential statistics.
//!
//! Points live in the tropical projective torus `R^e / R·1` and are stored
//! with their first coordinate pinned to zero. On top of the max-plus
//! primitives in [`tropical`] the crate provides Fermat-Weber points and
//! Fréchet means ([`location`]), tropical principal polytopes ([`pca`]),
//! tropical support vector machines ([`svm`]) and a pair of exploratory
//! estimators ([`experimental`]). Equidistant phylogenetic trees enter
//! through [`tree`] as ultrametrics, and [`datagen`] simulates them.

pub mod datagen;
pub mod error;
pub mod experimental;
pub mod fmt;
pub mod location;
pub mod pca;
pub mod solver;
pub mod svm;
pub mod tol;
pub mod tree;
pub mod tropical;

pub use error::{Error, Result};
pub use solver::{LinearProgram, Solution, Status};
pub use tree::{DissimilarityMap, PhyloTree};
pub use tropical::{Sector, TropicalHyperplane, TropicalPoint, TropicalPolytope, TropicalSegment};
