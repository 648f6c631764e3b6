use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{evaluate_1d, ols_fit_1d, tree_fit, Regressor, TreeParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    Ols,
    Tree(TreeParams),
}

impl ModelKind {
    /// Fits the model on single-feature data.
    pub fn fit(&self, x: &[f64], y: &[f64]) -> Result<Box<dyn Regressor>> {
        Ok(match self {
            ModelKind::Ols => Box::new(ols_fit_1d(x, y)?),
            ModelKind::Tree(p) => Box::new(tree_fit(x, y, *p)?),
        })
    }
}

/// Seeded permutation of `0..n` (ChaCha8 stream, Fisher-Yates).
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx
}

/// Splits a seeded shuffle of `0..n` into `k` folds. The first `n % k`
/// folds hold one extra sample.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    if n < k {
        return Err(Error::insufficient(format!("{n} samples cannot fill {k} folds")));
    }
    let idx = shuffled_indices(n, seed);
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(idx[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

/// Seeded train/test split; returns `(train, test)` index sets.
pub fn train_test_split(n: usize, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid("test fraction must lie in (0, 1)"));
    }
    let n_test = ((n as f64) * test_fraction).round() as usize;
    if n_test == 0 || n_test == n {
        return Err(Error::insufficient(format!("{n} samples too few for a {test_fraction} split")));
    }
    let idx = shuffled_indices(n, seed);
    let test = idx[..n_test].to_vec();
    let train = idx[n_test..].to_vec();
    Ok((train, test))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub seed: u64,
    pub model: ModelKind,
    pub fold_sizes: Vec<usize>,
    pub fold_mse: Vec<f64>,
    pub fold_r2: Vec<Option<f64>>,
    /// Mean of the fold MSEs, the k-fold CV estimate.
    pub mean_mse: f64,
    pub std_mse: f64,
    /// Mean and spread over folds with a defined R^2.
    pub mean_r2: Option<f64>,
    pub std_r2: Option<f64>,
}

fn pick(v: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| v[i]).collect()
}

fn mean_and_std(v: &[f64]) -> (f64, f64) {
    crate::stats::mean_std(v)
}

/// k-fold cross-validation: each fold is held out once, the model is fit
/// on the rest and scored on the held-out fold.
pub fn kfold_cv(x: &[f64], y: &[f64], k: usize, model: ModelKind, seed: u64) -> Result<CvReport> {
    if x.len() != y.len() {
        return Err(Error::invalid("x and y lengths differ"));
    }
    let folds = kfold_indices(x.len(), k, seed)?;
    let mut in_fold = vec![0usize; x.len()];
    for (f, fold) in folds.iter().enumerate() {
        for &i in fold {
            in_fold[i] = f;
        }
    }
    let mut fold_mse = Vec::with_capacity(k);
    let mut fold_r2 = Vec::with_capacity(k);
    for (f, test) in folds.iter().enumerate() {
        let train: Vec<usize> = (0..x.len()).filter(|&i| in_fold[i] != f).collect();
        let fitted = model.fit(&pick(x, &train), &pick(y, &train))?;
        let m = evaluate_1d(fitted.as_ref(), &pick(x, test), &pick(y, test))?;
        fold_mse.push(m.mse);
        fold_r2.push(m.r2);
    }
    let (mean_mse, std_mse) = mean_and_std(&fold_mse);
    let r2s: Vec<f64> = fold_r2.iter().flatten().copied().collect();
    let (mean_r2, std_r2) = if r2s.is_empty() {
        (None, None)
    } else {
        let (m, s) = mean_and_std(&r2s);
        (Some(m), Some(s))
    };
    Ok(CvReport {
        k,
        seed,
        model,
        fold_sizes: folds.iter().map(Vec::len).collect(),
        fold_mse,
        fold_r2,
        mean_mse,
        std_mse,
        mean_r2,
        std_r2,
    })
}
