//! Feature-set diagnostics: redundancy elimination, permutation importance,
//! and Monte-Carlo Shapley attribution.
//!
//! Redundancy elimination walks columns in schema order and drops any column
//! that is an affine combination of the columns kept so far (constant columns
//! included, since the test allows an intercept). The result depends only on
//! the data, not on randomness, and applying it twice removes nothing new.
//!
//! Permutation importance scores a feature by how much the rank correlation
//! between model predictions and the target drops when that feature's column
//! is shuffled. Shapley attribution uses the permutation-sampling estimator:
//! for each explained row it repeatedly draws a random feature order and a
//! random background row, then walks features from background values to the
//! row's values, crediting each feature with the change in model output.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::FeatureMatrix;
use crate::forest::{columns_fingerprint, ForestModel, ModelError};
use crate::metrics::MetricError;

/// Errors from the diagnostics in this module.
#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("matrix has no rows")]
    EmptyMatrix,
    #[error("background set is empty")]
    EmptyBackground,
    #[error("bad analysis configuration: {0}")]
    BadConfig(String),
    #[error("model was trained on {expected} targets, matrix has {got}")]
    TargetMismatch { expected: usize, got: usize },
}

// ---------------------------------------------------------------------------
// Redundancy elimination
// ---------------------------------------------------------------------------

/// Relative tolerance for declaring a column affinely dependent.
pub const DEFAULT_REDUNDANCY_TOL: f64 = 1e-8;

/// Why a column was removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RemovalReason {
    /// The column takes a single value on every row.
    Constant,
    /// The column is (numerically) an affine combination of kept columns.
    AffineCombination,
}

impl std::fmt::Display for RemovalReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RemovalReason::Constant => write!(f, "constant"),
            RemovalReason::AffineCombination => write!(f, "affine_combination"),
        }
    }
}

/// Outcome of [`eliminate_redundant`]: which columns survive, which were
/// dropped and why.
#[derive(Debug, Clone)]
pub struct RedundancyReport {
    pub kept: Vec<usize>,
    pub kept_names: Vec<String>,
    pub removed: Vec<(usize, String, RemovalReason)>,
}

impl RedundancyReport {
    /// Projects a matrix onto the kept columns (targets and ids carry over).
    pub fn apply(&self, m: &FeatureMatrix) -> FeatureMatrix {
        select_columns(m, &self.kept)
    }
}

/// Builds a new matrix from a subset of columns, in the given order.
pub fn select_columns(m: &FeatureMatrix, keep: &[usize]) -> FeatureMatrix {
    let mut values = Vec::with_capacity(m.n_rows * keep.len());
    for r in 0..m.n_rows {
        let row = m.row(r);
        for &c in keep {
            values.push(row[c]);
        }
    }
    FeatureMatrix {
        column_names: keep.iter().map(|&c| m.column_names[c].clone()).collect(),
        values,
        n_rows: m.n_rows,
        n_cols: keep.len(),
        targets: m.targets.clone(),
        target_names: m.target_names.clone(),
        arch_ids: m.arch_ids.clone(),
    }
}

/// Drops columns that add no information beyond an affine combination of the
/// columns already kept, scanning in schema order so the first occurrence of
/// each independent direction survives.
///
/// Internally this is modified Gram-Schmidt over mean-centered columns with a
/// re-orthogonalization pass: a candidate is removed when its residual after
/// projection is at most `tol` times its centered norm (or when it is
/// constant to begin with).
pub fn eliminate_redundant(m: &FeatureMatrix, tol: f64) -> RedundancyReport {
    let n = m.n_rows;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut kept = Vec::new();
    let mut removed = Vec::new();

    for j in 0..m.n_cols {
        let name = m.column_names[j].clone();
        let mut col = m.column(j);
        let mean = col.iter().sum::<f64>() / n.max(1) as f64;
        for v in &mut col {
            *v -= mean;
        }
        let norm = l2(&col);
        if norm <= 1e-12 * (1.0 + mean.abs()) {
            removed.push((j, name, RemovalReason::Constant));
            continue;
        }
        // Two projection passes keep the basis numerically orthogonal.
        for _ in 0..2 {
            for b in &basis {
                let dot: f64 = col.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in col.iter_mut().zip(b) {
                    *x -= dot * y;
                }
            }
        }
        let residual = l2(&col);
        if residual <= tol * norm {
            removed.push((j, name, RemovalReason::AffineCombination));
        } else {
            for v in &mut col {
                *v /= residual;
            }
            basis.push(col);
            kept.push(j);
        }
    }

    let kept_names = kept.iter().map(|&j| m.column_names[j].clone()).collect();
    RedundancyReport {
        kept,
        kept_names,
        removed,
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// Permutation importance
// ---------------------------------------------------------------------------

/// Permutation-importance scores for one target.
#[derive(Debug, Clone)]
pub struct ImportanceReport {
    /// Rank correlation of unperturbed predictions with the target.
    pub baseline: f64,
    /// Per feature: baseline minus the mean shuffled-column correlation.
    pub importances: Vec<f64>,
    pub feature_names: Vec<String>,
    pub target_name: String,
}

impl ImportanceReport {
    /// Features sorted by importance, highest first (ties by schema order).
    pub fn ranking(&self) -> Vec<(String, f64)> {
        let mut order: Vec<usize> = (0..self.importances.len()).collect();
        order.sort_by(|&a, &b| {
            self.importances[b]
                .partial_cmp(&self.importances[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        order
            .into_iter()
            .map(|i| (self.feature_names[i].clone(), self.importances[i]))
            .collect()
    }

    /// Name-to-score map, convenient for aggregating over repeated runs.
    pub fn as_map(&self) -> BTreeMap<String, f64> {
        self.feature_names
            .iter()
            .cloned()
            .zip(self.importances.iter().copied())
            .collect()
    }
}

/// Measures each feature's importance as the drop in rank correlation (tau)
/// between predictions and `target_idx` when that feature's column is
/// shuffled, averaged over `n_repeats` shuffles.
pub fn permutation_importance(
    model: &ForestModel,
    m: &FeatureMatrix,
    target_idx: usize,
    n_repeats: usize,
    seed: u64,
) -> Result<ImportanceReport, AnalysisError> {
    if m.n_rows == 0 {
        return Err(AnalysisError::EmptyMatrix);
    }
    if n_repeats == 0 {
        return Err(AnalysisError::BadConfig("n_repeats must be positive".into()));
    }
    if target_idx >= m.targets.len() {
        return Err(AnalysisError::TargetMismatch {
            expected: target_idx + 1,
            got: m.targets.len(),
        });
    }
    let target = &m.targets[target_idx];
    let preds = crate::forest::predict(model, m)?;
    let baseline = crate::metrics::kendall_tau(&preds[target_idx], target)?;

    let n = m.n_rows;
    let mut importances = Vec::with_capacity(m.n_cols);
    let mut values = m.values.clone();
    for j in 0..m.n_cols {
        let original: Vec<f64> = (0..n).map(|r| values[r * m.n_cols + j]).collect();
        let mut drop_sum = 0.0;
        for rep in 0..n_repeats {
            let mut rng = crate::seed::rng(seed, &format!("perm:{j}:{rep}"));
            let mut shuffled = original.clone();
            shuffled.shuffle(&mut rng);
            for r in 0..n {
                values[r * m.n_cols + j] = shuffled[r];
            }
            let mut scores = Vec::with_capacity(n);
            for r in 0..n {
                let row = &values[r * m.n_cols..(r + 1) * m.n_cols];
                scores.push(model.predict_row(row)[target_idx]);
            }
            let tau = crate::metrics::kendall_tau(&scores, target)?;
            drop_sum += baseline - tau;
        }
        for r in 0..n {
            values[r * m.n_cols + j] = original[r];
        }
        importances.push(drop_sum / n_repeats as f64);
    }

    Ok(ImportanceReport {
        baseline,
        importances,
        feature_names: m.column_names.clone(),
        target_name: m.target_names[target_idx].clone(),
    })
}

// ---------------------------------------------------------------------------
// Shapley attribution
// ---------------------------------------------------------------------------

/// Monte-Carlo settings for Shapley attribution.
#[derive(Debug, Clone)]
pub struct ShapleyConfig {
    /// Background rows subsampled (without replacement) from the reference
    /// matrix; marginal contributions are averaged against draws from them.
    pub n_background: usize,
    /// Random feature orders sampled per explained row.
    pub n_permutations: usize,
    pub seed: u64,
}

impl Default for ShapleyConfig {
    fn default() -> Self {
        ShapleyConfig {
            n_background: 256,
            n_permutations: 128,
            seed: 0,
        }
    }
}

/// Attribution for one explained row.
#[derive(Debug, Clone)]
pub struct ShapleyRow {
    /// `[target][feature]` mean marginal contributions.
    pub contributions: Vec<Vec<f64>>,
    /// `[target][feature]` standard errors of those means.
    pub standard_errors: Vec<Vec<f64>>,
    /// Model output averaged over the full background subsample.
    pub base: Vec<f64>,
    /// Model output on the explained row.
    pub prediction: Vec<f64>,
    /// `[target]` standard error of the per-permutation contribution totals;
    /// bounds how far the contributions may sum from `prediction - base`.
    pub total_se: Vec<f64>,
}

/// Explains each row of `rows` against `background` using permutation-sampled
/// Shapley values. Within one permutation the contributions telescope, so
/// their sum equals the model output on the row minus the output on that
/// permutation's background draw; averaged over permutations the sum matches
/// `prediction - base` up to sampling error.
pub fn shapley_mc(
    model: &ForestModel,
    background: &FeatureMatrix,
    rows: &FeatureMatrix,
    cfg: &ShapleyConfig,
) -> Result<Vec<ShapleyRow>, AnalysisError> {
    if background.n_rows == 0 {
        return Err(AnalysisError::EmptyBackground);
    }
    if rows.n_rows == 0 {
        return Err(AnalysisError::EmptyMatrix);
    }
    if cfg.n_permutations == 0 || cfg.n_background == 0 {
        return Err(AnalysisError::BadConfig(
            "n_permutations and n_background must be positive".into(),
        ));
    }
    for names in [&background.column_names, &rows.column_names] {
        let got = columns_fingerprint(names);
        if got != model.columns_fingerprint {
            return Err(AnalysisError::Model(ModelError::FingerprintMismatch {
                expected: model.columns_fingerprint.clone(),
                got,
            }));
        }
    }

    let d = rows.n_cols;
    let k = model.n_targets;

    // Subsample the background once, in a seed stream of its own.
    let bg_rows: Vec<usize> = if cfg.n_background >= background.n_rows {
        (0..background.n_rows).collect()
    } else {
        let mut rng = crate::seed::rng(cfg.seed, "background");
        let mut idx: Vec<usize> = (0..background.n_rows).collect();
        for i in 0..cfg.n_background {
            let j = rng.gen_range(i..idx.len());
            idx.swap(i, j);
        }
        idx.truncate(cfg.n_background);
        idx.sort_unstable();
        idx
    };
    let mut base = vec![0f64; k];
    for &b in &bg_rows {
        let out = model.predict_row(background.row(b));
        for (acc, v) in base.iter_mut().zip(&out) {
            *acc += v;
        }
    }
    for v in &mut base {
        *v /= bg_rows.len() as f64;
    }

    let p = cfg.n_permutations;
    let mut results = Vec::with_capacity(rows.n_rows);
    let mut order: Vec<usize> = (0..d).collect();
    let mut z = vec![0f64; d];
    for r in 0..rows.n_rows {
        let x = rows.row(r);
        let mut rng = crate::seed::rng(cfg.seed, &format!("row:{r}"));
        let mut sum = vec![vec![0f64; d]; k];
        let mut sum_sq = vec![vec![0f64; d]; k];
        let mut total_sum = vec![0f64; k];
        let mut total_sq = vec![0f64; k];
        for _ in 0..p {
            order.shuffle(&mut rng);
            let b = bg_rows[rng.gen_range(0..bg_rows.len())];
            z.copy_from_slice(background.row(b));
            let mut prev = model.predict_row(&z);
            let start = prev.clone();
            for &j in order.iter() {
                z[j] = x[j];
                let next = model.predict_row(&z);
                for t in 0..k {
                    let delta = next[t] - prev[t];
                    sum[t][j] += delta;
                    sum_sq[t][j] += delta * delta;
                }
                prev = next;
            }
            for t in 0..k {
                let total = prev[t] - start[t];
                total_sum[t] += total;
                total_sq[t] += total * total;
            }
        }
        let pn = p as f64;
        let mut contributions = vec![vec![0f64; d]; k];
        let mut standard_errors = vec![vec![0f64; d]; k];
        let mut total_se = vec![0f64; k];
        for t in 0..k {
            for j in 0..d {
                let mean = sum[t][j] / pn;
                contributions[t][j] = mean;
                standard_errors[t][j] = standard_error(sum[t][j], sum_sq[t][j], pn);
            }
            total_se[t] = standard_error(total_sum[t], total_sq[t], pn);
        }
        results.push(ShapleyRow {
            contributions,
            standard_errors,
            base: base.clone(),
            prediction: model.predict_row(x),
            total_se,
        });
    }
    Ok(results)
}

fn standard_error(sum: f64, sum_sq: f64, n: f64) -> f64 {
    if n < 2.0 {
        return 0.0;
    }
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    (var / n).sqrt()
}
