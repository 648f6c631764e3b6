//! Impact-model fitting: least squares, regression trees, k-fold
//! cross-validation, Kyle's lambda and power-law exponents.

mod cv;
mod kyle;
mod metrics;
mod ols;
mod powerlaw;
mod tree;

pub use cv::{kfold_cv, kfold_indices, shuffled_indices, train_test_split, CvReport, ModelKind};
pub use kyle::{kyle_lambda, kyle_lambda_xy, KyleLambda, LinearRegion, MIN_REGION_SAMPLES};
pub use metrics::{evaluate, evaluate_1d, FitMetrics};
pub use ols::{ols_fit, ols_fit_1d, t_statistics, LinearModel};
pub use powerlaw::{power_law_fit, PowerLaw};
pub use tree::{best_split, tree_fit, tree_predict, Node, RegressionTree, SplitChoice, TreeParams};

/// A fitted model that maps a feature vector to a prediction.
pub trait Regressor {
    fn predict(&self, x: &[f64]) -> f64;
    /// Number of features, excluding any intercept.
    fn n_features(&self) -> usize;
    /// Free parameters counted by AIC/BIC.
    fn n_params(&self) -> usize;
}
