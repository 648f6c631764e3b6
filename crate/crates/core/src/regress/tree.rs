//! Single-feature CART regression tree.
//!
//! Splits are chosen greedily to minimize the summed squared error of the
//! two children (equivalently, the weighted child variance). Candidate
//! thresholds are midpoints between consecutive distinct sorted feature
//! values; among equally good candidates the lowest threshold wins.

use serde::{Deserialize, Serialize};

use super::Regressor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 5,
            min_samples_leaf: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { value: f64, count: usize },
    /// `x <= threshold` goes left.
    Split { threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<Node>,
    params: TreeParams,
}

impl RegressionTree {
    pub fn fit(x: &[f64], y: &[f64], params: TreeParams) -> Result<Self> {
        tree_fit(x, y, params)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn params(&self) -> TreeParams {
        self.params
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn root_threshold(&self) -> Option<f64> {
        match self.nodes[0] {
            Node::Split { threshold, .. } => Some(threshold),
            Node::Leaf { .. } => None,
        }
    }

    /// Index of the leaf `x` lands in.
    pub fn leaf_index(&self, x: f64) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split { threshold, left, right } => i = if x <= threshold { left } else { right },
            }
        }
    }

    pub fn predict_one(&self, x: f64) -> f64 {
        match self.nodes[self.leaf_index(x)] {
            Node::Leaf { value, .. } => value,
            Node::Split { .. } => unreachable!("leaf_index returns a leaf"),
        }
    }
}

impl Regressor for RegressionTree {
    fn predict(&self, x: &[f64]) -> f64 {
        self.predict_one(x[0])
    }

    fn n_features(&self) -> usize {
        1
    }

    /// One mean per leaf plus the residual variance.
    fn n_params(&self) -> usize {
        self.n_leaves() + 1
    }
}

pub fn tree_predict(tree: &RegressionTree, x: f64) -> f64 {
    tree.predict_one(x)
}

pub fn tree_fit(x: &[f64], y: &[f64], params: TreeParams) -> Result<RegressionTree> {
    if x.len() != y.len() {
        return Err(Error::invalid("x and y lengths differ"));
    }
    if x.is_empty() {
        return Err(Error::insufficient("cannot fit a tree to no samples"));
    }
    if params.min_samples_leaf == 0 {
        return Err(Error::invalid("min_samples_leaf must be at least 1"));
    }
    if x.len() < params.min_samples_leaf {
        return Err(Error::insufficient(format!(
            "{} samples is fewer than min_samples_leaf = {}",
            x.len(),
            params.min_samples_leaf
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite input"));
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let mut tree = RegressionTree {
        nodes: Vec::new(),
        params,
    };
    let mut builder = Builder {
        x,
        y,
        params,
        nodes: &mut tree.nodes,
    };
    builder.grow(&order, 0);
    Ok(tree)
}

/// Best split of a node whose samples are sorted by `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    /// Number of samples going left.
    pub left_count: usize,
    pub threshold: f64,
    /// Summed squared error of both children.
    pub sse: f64,
}

/// Searches all admissible split points of `sorted` (indices ordered by
/// `x`). Returns `None` if no split leaves `min_leaf` samples on each side.
pub fn best_split(x: &[f64], y: &[f64], sorted: &[usize], min_leaf: usize) -> Option<SplitChoice> {
    let n = sorted.len();
    if n < 2 * min_leaf.max(1) {
        return None;
    }
    let shift = sorted.iter().map(|&i| y[i]).sum::<f64>() / n as f64;
    let total: f64 = sorted.iter().map(|&i| y[i] - shift).sum();
    let total_sq: f64 = sorted.iter().map(|&i| (y[i] - shift) * (y[i] - shift)).sum();

    let mut best: Option<SplitChoice> = None;
    let mut sum_l = 0.0;
    let mut sq_l = 0.0;
    for k in 1..n {
        let v = y[sorted[k - 1]] - shift;
        sum_l += v;
        sq_l += v * v;
        if k < min_leaf || n - k < min_leaf {
            continue;
        }
        let (a, b) = (x[sorted[k - 1]], x[sorted[k]]);
        if a == b {
            continue;
        }
        let nl = k as f64;
        let nr = (n - k) as f64;
        let sum_r = total - sum_l;
        let sq_r = total_sq - sq_l;
        let sse = (sq_l - sum_l * sum_l / nl).max(0.0) + (sq_r - sum_r * sum_r / nr).max(0.0);
        if best.is_none_or(|b| sse < b.sse) {
            let mut threshold = a + (b - a) / 2.0;
            if threshold >= b {
                threshold = a;
            }
            best = Some(SplitChoice {
                left_count: k,
                threshold,
                sse,
            });
        }
    }
    best
}

struct Builder<'a> {
    x: &'a [f64],
    y: &'a [f64],
    params: TreeParams,
    nodes: &'a mut Vec<Node>,
}

impl Builder<'_> {
    fn grow(&mut self, sorted: &[usize], depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(self.leaf(sorted));

        let pure = {
            let first = self.y[sorted[0]];
            sorted.iter().all(|&i| self.y[i] == first)
        };
        if depth >= self.params.max_depth || pure {
            return id;
        }
        let Some(split) = best_split(self.x, self.y, sorted, self.params.min_samples_leaf) else {
            return id;
        };
        let (l, r) = sorted.split_at(split.left_count);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    /// Leaf holding the mean of the node's targets, summed in sample order.
    fn leaf(&self, sorted: &[usize]) -> Node {
        let mut idx = sorted.to_vec();
        idx.sort_unstable();
        let sum: f64 = idx.iter().map(|&i| self.y[i]).sum();
        Node::Leaf {
            value: sum / idx.len() as f64,
            count: idx.len(),
        }
    }
}
