use serde::{Deserialize, Serialize};

use super::Regressor;
use crate::error::{Error, Result};

/// Goodness of fit of a model on one data set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitMetrics {
    pub n: usize,
    pub mse: f64,
    /// `None` when the responses have zero total variation.
    pub r2: Option<f64>,
    pub adjusted_r2: Option<f64>,
    /// Gaussian log-likelihood at the ML variance `RSS / n`.
    pub log_likelihood: f64,
    pub aic: f64,
    pub bic: f64,
}

/// Scores `model` on `(x, y)`.
///
/// AIC and BIC use the maximized Gaussian likelihood with `sigma^2 = RSS/n`
/// and `k = model.n_params()`.
pub fn evaluate<M, R>(model: &M, x: &[R], y: &[f64]) -> Result<FitMetrics>
where
    M: Regressor + ?Sized,
    R: AsRef<[f64]>,
{
    let n = y.len();
    if n == 0 || x.len() != n {
        return Err(Error::invalid("evaluate needs matching, non-empty x and y"));
    }
    let nf = n as f64;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(r, &yi)| {
            let e = yi - model.predict(r.as_ref());
            e * e
        })
        .sum();
    let y_mean = y.iter().sum::<f64>() / nf;
    let tss: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    let r2 = (tss > 0.0).then(|| 1.0 - rss / tss);
    let p = model.n_features() as f64;
    let adjusted_r2 = r2.and_then(|r| (nf - p - 1.0 > 0.0).then(|| 1.0 - (1.0 - r) * (nf - 1.0) / (nf - p - 1.0)));

    let log_likelihood = if rss > 0.0 {
        -0.5 * nf * ((2.0 * std::f64::consts::PI * rss / nf).ln() + 1.0)
    } else {
        f64::INFINITY
    };
    let k = model.n_params() as f64;
    Ok(FitMetrics {
        n,
        mse: rss / nf,
        r2,
        adjusted_r2,
        log_likelihood,
        aic: -2.0 * log_likelihood + 2.0 * k,
        bic: -2.0 * log_likelihood + nf.ln() * k,
    })
}

/// [`evaluate`] for single-feature data.
pub fn evaluate_1d<M: Regressor + ?Sized>(model: &M, x: &[f64], y: &[f64]) -> Result<FitMetrics> {
    let rows: Vec<[f64; 1]> = x.iter().map(|&v| [v]).collect();
    evaluate(model, &rows, y)
}
