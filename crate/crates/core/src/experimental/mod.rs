//! Heuristic optimizers for tropical linear discriminant analysis and
//! tropical regression. Objectives are exact; optimizers carry no
//! optimality guarantee, and every serialized output says so through its
//! `experimental` flag.

pub mod lda;
pub mod regression;

pub use lda::{fit_lda, lda_objective, LdaCandidate, LdaConfig};
pub use regression::{
    fit_regression, regression_objective, trop_predict, RegressionConfig, RegressionModel,
};
