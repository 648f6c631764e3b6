use serde::{Deserialize, Serialize};

use super::{ols_fit_1d, LinearModel};
use crate::error::{Error, Result};
use crate::impact::ImbalanceSample;
use crate::stats::quantile;

/// Fewest in-region samples accepted for a lambda estimate.
pub const MIN_REGION_SAMPLES: usize = 30;

/// Which imbalance samples count as the linear region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LinearRegion {
    /// `|dV|` at or below this quantile of `|dV|`.
    Quantile(f64),
    /// `|dV|` at or below this many shares.
    AbsCutoff(f64),
}

impl Default for LinearRegion {
    fn default() -> Self {
        LinearRegion::Quantile(0.5)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KyleLambda {
    /// Cents of mid move per share of signed imbalance.
    pub lambda: f64,
    /// Region bound on `|dV|` actually applied, in shares.
    pub cutoff: f64,
    pub n_in_region: usize,
    pub model: LinearModel,
}

/// Kyle's lambda from `(dV shares, dM cents)` pairs: the OLS slope over
/// the small-imbalance region.
pub fn kyle_lambda_xy(delta_v: &[f64], delta_m: &[f64], region: LinearRegion) -> Result<KyleLambda> {
    if delta_v.len() != delta_m.len() {
        return Err(Error::invalid("imbalance and impact lengths differ"));
    }
    let abs: Vec<f64> = delta_v.iter().map(|v| v.abs()).collect();
    let cutoff = match region {
        LinearRegion::Quantile(q) => {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::invalid(format!("quantile {q} outside [0, 1]")));
            }
            quantile(&abs, q).ok_or_else(|| Error::insufficient("no imbalance samples"))?
        }
        LinearRegion::AbsCutoff(c) => {
            if !(c >= 0.0) {
                return Err(Error::invalid("cutoff must be non-negative"));
            }
            c
        }
    };
    let (x, y): (Vec<f64>, Vec<f64>) = delta_v
        .iter()
        .zip(delta_m)
        .filter(|(v, _)| v.abs() <= cutoff)
        .map(|(&v, &m)| (v, m))
        .unzip();
    if x.len() < MIN_REGION_SAMPLES {
        return Err(Error::insufficient(format!(
            "linear region |dV| <= {cutoff} holds {} samples, need {MIN_REGION_SAMPLES}",
            x.len()
        )));
    }
    let model = ols_fit_1d(&x, &y)?;
    Ok(KyleLambda {
        lambda: model.slope(),
        cutoff,
        n_in_region: x.len(),
        model,
    })
}

pub fn kyle_lambda(samples: &[ImbalanceSample], region: LinearRegion) -> Result<KyleLambda> {
    let dv: Vec<f64> = samples.iter().map(|s| s.delta_v as f64).collect();
    let dm: Vec<f64> = samples.iter().map(|s| s.delta_m_cents()).collect();
    kyle_lambda_xy(&dv, &dm, region)
}
