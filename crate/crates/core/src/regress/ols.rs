use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::Regressor;
use crate::error::{Error, Result};

/// Ordinary least squares fit with an intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Unbiased residual variance, `RSS / (n - p - 1)`.
    pub sigma2: f64,
    pub rss: f64,
    pub n: usize,
    pub p: usize,
    /// Diagonal of `(X'X)^-1` for the design with the intercept column
    /// first.
    pub inv_diag: Vec<f64>,
}

impl LinearModel {
    /// Slope of a single-feature model.
    pub fn slope(&self) -> f64 {
        self.coefficients[0]
    }

    /// All coefficients, intercept first.
    pub fn beta(&self) -> Vec<f64> {
        std::iter::once(self.intercept).chain(self.coefficients.iter().copied()).collect()
    }
}

impl Regressor for LinearModel {
    fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(x).map(|(b, v)| b * v).sum::<f64>()
    }

    fn n_features(&self) -> usize {
        self.p
    }

    /// Coefficients, intercept and residual variance.
    fn n_params(&self) -> usize {
        self.p + 2
    }
}

/// Fits `y = b0 + x.b` by least squares. Each row of `x` is one
/// observation's feature vector.
///
/// The normal equations are solved on centered data by Cholesky
/// factorization, followed by one step of iterative refinement. A
/// single-feature design uses the closed form `Sxy / Sxx` directly.
pub fn ols_fit<R: AsRef<[f64]>>(x: &[R], y: &[f64]) -> Result<LinearModel> {
    let n = y.len();
    if x.len() != n {
        return Err(Error::invalid(format!("{} feature rows but {} responses", x.len(), n)));
    }
    let p = x.first().map(|r| r.as_ref().len()).unwrap_or(0);
    if p == 0 {
        return Err(Error::invalid("at least one feature is required"));
    }
    if x.iter().any(|r| r.as_ref().len() != p) {
        return Err(Error::invalid("feature rows have different lengths"));
    }
    if n <= p + 1 {
        return Err(Error::insufficient(format!("need more than {} observations, got {n}", p + 1)));
    }
    if x.iter().any(|r| r.as_ref().iter().any(|v| !v.is_finite())) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite input"));
    }

    let nf = n as f64;
    let x_mean: Vec<f64> = (0..p).map(|j| x.iter().map(|r| r.as_ref()[j]).sum::<f64>() / nf).collect();
    let y_mean = y.iter().sum::<f64>() / nf;

    let (coefficients, s_inv) = if p == 1 {
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        let mut sq = 0.0;
        for (r, &yi) in x.iter().zip(y) {
            let xi = r.as_ref()[0];
            let dx = xi - x_mean[0];
            sxx += dx * dx;
            sxy += dx * (yi - y_mean);
            sq += xi * xi;
        }
        if !(sxx > 1e-13 * sq) {
            return Err(Error::Singular("feature has no variation; X'X is not positive-definite".into()));
        }
        (vec![sxy / sxx], DMatrix::from_element(1, 1, 1.0 / sxx))
    } else {
        let xc = DMatrix::from_fn(n, p, |i, j| x[i].as_ref()[j] - x_mean[j]);
        let yc = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));
        let xtx = xc.transpose() * &xc;
        let chol = xtx
            .cholesky()
            .ok_or_else(|| Error::Singular("X'X is not positive-definite (rank-deficient design)".into()))?;
        let mut beta = chol.solve(&(xc.transpose() * &yc));
        let resid = &yc - &xc * &beta;
        beta += chol.solve(&(xc.transpose() * resid));
        (beta.iter().copied().collect(), chol.inverse())
    };

    let intercept = y_mean - x_mean.iter().zip(&coefficients).map(|(m, b)| m * b).sum::<f64>();
    let mut model = LinearModel {
        intercept,
        coefficients,
        sigma2: 0.0,
        rss: 0.0,
        n,
        p,
        inv_diag: Vec::with_capacity(p + 1),
    };
    model.rss = x
        .iter()
        .zip(y)
        .map(|(r, &yi)| {
            let e = yi - model.predict(r.as_ref());
            e * e
        })
        .sum();
    model.sigma2 = model.rss / (n - p - 1) as f64;

    // Block inverse of [n, n*xbar'; n*xbar, S + n*xbar*xbar'] for the
    // intercept entry: 1/n + xbar' S^-1 xbar. The slope block is S^-1.
    let xbar = DVector::from_column_slice(&x_mean);
    let v0 = 1.0 / nf + (xbar.transpose() * &s_inv * &xbar)[(0, 0)];
    model.inv_diag.push(v0);
    model.inv_diag.extend((0..p).map(|j| s_inv[(j, j)]));
    Ok(model)
}

/// Convenience wrapper for a single feature.
pub fn ols_fit_1d(x: &[f64], y: &[f64]) -> Result<LinearModel> {
    let rows: Vec<[f64; 1]> = x.iter().map(|&v| [v]).collect();
    ols_fit(&rows, y)
}

/// Per-coefficient t statistics, intercept first:
/// `t_j = b_j / (sigma_hat * sqrt(v_j))` with `v_j` the j-th diagonal
/// entry of `(X'X)^-1`. A zero residual variance gives infinite values
/// for non-zero coefficients.
pub fn t_statistics(model: &LinearModel) -> Vec<f64> {
    let sigma = model.sigma2.sqrt();
    model
        .beta()
        .iter()
        .zip(&model.inv_diag)
        .map(|(&b, &v)| {
            if b == 0.0 {
                0.0
            } else if sigma == 0.0 {
                b.signum() * f64::INFINITY
            } else {
                b / (sigma * v.sqrt())
            }
        })
        .collect()
}
