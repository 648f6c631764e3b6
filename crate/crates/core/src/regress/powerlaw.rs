use serde::{Deserialize, Serialize};

use super::{ols_fit_1d, LinearModel};
use crate::error::{Error, Result};

/// `G = prefactor * (Q/V)^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub exponent: f64,
    pub prefactor: f64,
    /// The underlying fit of `ln G` on `ln(Q/V)`.
    pub model: LinearModel,
}

/// Fits a power law by least squares in log-log space.
pub fn power_law_fit(volume_fraction: &[f64], impact: &[f64]) -> Result<PowerLaw> {
    if volume_fraction.len() != impact.len() {
        return Err(Error::invalid("input lengths differ"));
    }
    if let Some(bad) = volume_fraction.iter().chain(impact).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::invalid(format!("power-law inputs must be positive, found {bad}")));
    }
    let lx: Vec<f64> = volume_fraction.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = impact.iter().map(|v| v.ln()).collect();
    let model = ols_fit_1d(&lx, &ly)?;
    Ok(PowerLaw {
        exponent: model.slope(),
        prefactor: model.intercept.exp(),
        model,
    })
}
