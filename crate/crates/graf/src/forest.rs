//! From-scratch regression trees, random forests, and gradient boosting.
//!
//! Trees are exact CART regressors: every split is chosen by scanning all
//! candidate thresholds (midpoints between consecutive distinct feature
//! values) and maximizing the summed squared-error reduction across targets,
//! with strictly-greater comparison so ties resolve to the lowest feature
//! index and lowest threshold. Nodes stop at exact purity, at the configured
//! depth/size limits, or when no split has positive gain. Together with
//! seeded bootstrap/subsampling this makes training fully deterministic:
//! fitting the same matrix with the same config twice yields byte-identical
//! models, on any platform.
//!
//! Random forests average fully grown trees over bootstrap resamples and
//! support multi-target regression; gradient boosting fits shallow trees to
//! residuals of a single target with shrinkage and row subsampling.
//!
//! Models carry a fingerprint of their training column names; prediction
//! through [`predict`] refuses a matrix whose columns differ, which catches
//! recipe/schema mix-ups early.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::FeatureMatrix;

/// Errors produced while fitting, serializing, or applying models.
#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training matrix has no targets")]
    NoTargets,
    #[error("bad model configuration: {0}")]
    BadConfig(String),
    #[error("{model} supports a single target, got {n}")]
    MultiTargetUnsupported { model: &'static str, n: usize },
    #[error("feature columns do not match the model (fingerprint {got}, expected {expected})")]
    FingerprintMismatch { expected: String, got: String },
    #[error("training data contains a non-finite value")]
    NonFinite,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("model serialization failed: {0}")]
    Serde(String),
}

/// Random-forest hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// `None` grows trees until purity or size limits stop them.
    pub max_depth: Option<usize>,
    /// Minimum (weighted) rows a node needs to attempt a split.
    pub min_samples_split: usize,
    /// Minimum (weighted) rows either side of a split must keep.
    pub min_samples_leaf: usize,
    /// Fraction of features drawn (without replacement) per split; 1.0 uses
    /// every feature.
    pub feature_fraction: f64,
    /// Draw a bootstrap resample (n rows with replacement) per tree.
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            feature_fraction: 1.0,
            bootstrap: true,
            seed: 0,
        }
    }
}

/// Gradient-boosting hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GbtConfig {
    pub n_rounds: usize,
    pub learning_rate: f64,
    /// Fraction of rows (without replacement) each round trains on.
    pub subsample: f64,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub feature_fraction: f64,
    pub seed: u64,
}

impl Default for GbtConfig {
    fn default() -> Self {
        GbtConfig {
            n_rounds: 10_000,
            learning_rate: 0.01,
            subsample: 0.9,
            max_depth: Some(6),
            min_samples_split: 2,
            min_samples_leaf: 1,
            feature_fraction: 1.0,
            seed: 0,
        }
    }
}

/// One regression tree in flat array form. `feature[i] < 0` marks a leaf;
/// `values` stores `n_targets` outputs per node.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tree {
    pub feature: Vec<i32>,
    pub threshold: Vec<f64>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    pub values: Vec<f64>,
}

impl Tree {
    fn push_node(&mut self, values: &[f64]) -> u32 {
        let id = self.feature.len() as u32;
        self.feature.push(-1);
        self.threshold.push(0.0);
        self.left.push(0);
        self.right.push(0);
        self.values.extend_from_slice(values);
        id
    }

    fn predict_into(&self, row: &[f64], n_targets: usize, out: &mut [f64]) {
        let mut node = 0usize;
        while self.feature[node] >= 0 {
            let f = self.feature[node] as usize;
            node = if row[f] <= self.threshold[node] {
                self.left[node] as usize
            } else {
                self.right[node] as usize
            };
        }
        let vals = &self.values[node * n_targets..(node + 1) * n_targets];
        for (o, v) in out.iter_mut().zip(vals) {
            *o += v;
        }
    }

    /// Number of leaves (handy for inspecting stopping behavior).
    pub fn n_leaves(&self) -> usize {
        self.feature.iter().filter(|&&f| f < 0).count()
    }
}

/// How tree outputs combine into a prediction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Aggregation {
    /// Mean of all trees (random forest).
    Average,
    /// `base + learning_rate * sum of trees` (gradient boosting).
    Boosted { base: Vec<f64>, learning_rate: f64 },
}

/// A trained tree-ensemble model with a versioned on-disk form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestModel {
    pub format_version: u32,
    pub kind: String,
    pub column_names: Vec<String>,
    /// SHA-256 over the newline-joined column names; checked at prediction.
    pub columns_fingerprint: String,
    pub target_names: Vec<String>,
    pub n_features: usize,
    pub n_targets: usize,
    pub aggregation: Aggregation,
    pub trees: Vec<Tree>,
}

/// Current on-disk format version.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// SHA-256 fingerprint of a column-name list.
pub fn columns_fingerprint(names: &[String]) -> String {
    let mut hasher = Sha256::new();
    for (i, name) in names.iter().enumerate() {
        if i > 0 {
            hasher.update(b"\n");
        }
        hasher.update(name.as_bytes());
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

// ---------------------------------------------------------------------------
// Tree construction
// ---------------------------------------------------------------------------

const CLOSED: u32 = u32::MAX;

struct TreeParams {
    min_split: u64,
    min_leaf: u64,
    max_depth: usize,
    feature_fraction: f64,
}

/// Shared, per-matrix training data: column-major features with one
/// value-sorted row order per feature (ties broken by row index).
struct FitData {
    cols: Vec<Vec<f64>>,
    sorted: Vec<Vec<u32>>,
    n_rows: usize,
}

impl FitData {
    fn new(m: &FeatureMatrix) -> FitData {
        let n_rows = m.n_rows;
        let n_cols = m.n_cols;
        let mut cols = vec![vec![0f64; n_rows]; n_cols];
        for r in 0..n_rows {
            let row = m.row(r);
            for (c, col) in cols.iter_mut().enumerate() {
                col[r] = row[c];
            }
        }
        let sorted = cols
            .iter()
            .map(|col| {
                let mut idx: Vec<u32> = (0..n_rows as u32).collect();
                idx.sort_by(|&a, &b| {
                    col[a as usize]
                        .partial_cmp(&col[b as usize])
                        .unwrap()
                        .then(a.cmp(&b))
                });
                idx
            })
            .collect();
        FitData { cols, sorted, n_rows }
    }
}

#[derive(Clone)]
struct SlotStats {
    node_id: u32,
    weight: u64,
    sums: Vec<f64>,
}

enum SlotState {
    Leaf,
    Splitting,
}

struct BestSplit {
    gain: f64,
    feature: i64,
    threshold: f64,
    left_weight: u64,
    left_sums: Vec<f64>,
}

/// Grows one CART tree on `y` restricted to rows with positive `weights`.
fn grow_tree(
    data: &FitData,
    y: &[&[f64]],
    weights: &[u32],
    params: &TreeParams,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Tree {
    let k = y.len();
    let n_features = data.cols.len();
    let mut tree = Tree {
        feature: Vec::new(),
        threshold: Vec::new(),
        left: Vec::new(),
        right: Vec::new(),
        values: Vec::new(),
    };

    // Root statistics.
    let mut level_rows: Vec<u32> = (0..data.n_rows as u32)
        .filter(|&r| weights[r as usize] > 0)
        .collect();
    let mut root_weight = 0u64;
    let mut root_sums = vec![0f64; k];
    for &r in &level_rows {
        let w = weights[r as usize] as u64;
        root_weight += w;
        for (t, sums) in root_sums.iter_mut().enumerate() {
            *sums += w as f64 * y[t][r as usize];
        }
    }
    let root_values: Vec<f64> = root_sums.iter().map(|s| s / root_weight as f64).collect();
    tree.push_node(&root_values);

    let mut node_of_row: Vec<u32> = vec![CLOSED; data.n_rows];
    for &r in &level_rows {
        node_of_row[r as usize] = 0;
    }
    let mut feature_lists: Vec<Vec<u32>> = data
        .sorted
        .iter()
        .map(|list| {
            list.iter()
                .copied()
                .filter(|&r| weights[r as usize] > 0)
                .collect()
        })
        .collect();

    let mut slots: Vec<SlotStats> = vec![SlotStats {
        node_id: 0,
        weight: root_weight,
        sums: root_sums,
    }];

    let use_masks = params.feature_fraction < 1.0;
    let features_per_split = if use_masks {
        ((params.feature_fraction * n_features as f64).round() as usize).clamp(1, n_features)
    } else {
        n_features
    };
    let mask_words = n_features.div_ceil(64);
    let mut feature_scratch: Vec<u32> = (0..n_features as u32).collect();

    let mut depth = 0usize;
    loop {
        let n_slots = slots.len();

        // Purity check: exact equality of every target within the slot.
        let mut first_y: Vec<Vec<f64>> = vec![vec![0.0; k]; n_slots];
        let mut seen = vec![false; n_slots];
        let mut pure = vec![true; n_slots];
        for &r in &level_rows {
            let slot = node_of_row[r as usize] as usize;
            if !seen[slot] {
                seen[slot] = true;
                for t in 0..k {
                    first_y[slot][t] = y[t][r as usize];
                }
            } else if pure[slot] {
                for t in 0..k {
                    if y[t][r as usize] != first_y[slot][t] {
                        pure[slot] = false;
                        break;
                    }
                }
            }
        }

        let mut states: Vec<SlotState> = Vec::with_capacity(n_slots);
        let mut any_splitting = false;
        for (s, slot) in slots.iter().enumerate() {
            let splittable =
                !pure[s] && slot.weight >= params.min_split && depth < params.max_depth;
            if splittable {
                any_splitting = true;
                states.push(SlotState::Splitting);
            } else {
                states.push(SlotState::Leaf);
            }
        }
        if !any_splitting {
            break;
        }

        // Feature masks for splitting slots, drawn in slot order.
        let mut masks: Vec<Vec<u64>> = Vec::new();
        if use_masks {
            for state in &states {
                let mut mask = vec![0u64; mask_words];
                if matches!(state, SlotState::Splitting) {
                    for i in 0..features_per_split {
                        let j = rng.gen_range(i..n_features);
                        feature_scratch.swap(i, j);
                        let f = feature_scratch[i] as usize;
                        mask[f / 64] |= 1u64 << (f % 64);
                    }
                    // Restore the identity permutation for the next draw.
                    feature_scratch[..features_per_split].sort_unstable();
                    for (i, v) in feature_scratch.iter_mut().enumerate() {
                        *v = i as u32;
                    }
                }
                masks.push(mask);
            }
        }

        // Split search: one pass per feature over its sorted rows.
        let mut best: Vec<BestSplit> = (0..n_slots)
            .map(|_| BestSplit {
                gain: 0.0,
                feature: -1,
                threshold: 0.0,
                left_weight: 0,
                left_sums: vec![0.0; k],
            })
            .collect();
        let parent_score: Vec<f64> = slots
            .iter()
            .map(|s| s.sums.iter().map(|v| v * v).sum::<f64>() / s.weight as f64)
            .collect();

        let mut wl = vec![0u64; n_slots];
        let mut sl = vec![0f64; n_slots * k];
        let mut prev_val = vec![0f64; n_slots];
        let mut started = vec![false; n_slots];
        for f in 0..n_features {
            wl.fill(0);
            sl.fill(0.0);
            started.fill(false);
            let col = &data.cols[f];
            for &r in &feature_lists[f] {
                let slot = node_of_row[r as usize];
                if slot == CLOSED {
                    continue;
                }
                let s = slot as usize;
                if !matches!(states[s], SlotState::Splitting) {
                    continue;
                }
                if use_masks && masks[s][f / 64] >> (f % 64) & 1 == 0 {
                    continue;
                }
                let v = col[r as usize];
                if started[s] && v > prev_val[s] {
                    let w_total = slots[s].weight;
                    let w_left = wl[s];
                    let w_right = w_total - w_left;
                    if w_left >= params.min_leaf && w_right >= params.min_leaf {
                        let mut score = 0.0;
                        for t in 0..k {
                            let s_left = sl[s * k + t];
                            let s_right = slots[s].sums[t] - s_left;
                            score += s_left * s_left / w_left as f64
                                + s_right * s_right / w_right as f64;
                        }
                        let gain = score - parent_score[s];
                        if gain > best[s].gain {
                            let mut threshold = 0.5 * (prev_val[s] + v);
                            // Guard against the midpoint rounding up to the
                            // right value, which would send it left.
                            if threshold >= v {
                                threshold = prev_val[s];
                            }
                            best[s].gain = gain;
                            best[s].feature = f as i64;
                            best[s].threshold = threshold;
                            best[s].left_weight = w_left;
                            best[s].left_sums.copy_from_slice(&sl[s * k..(s + 1) * k]);
                        }
                    }
                }
                let w = weights[r as usize] as u64;
                wl[s] += w;
                for t in 0..k {
                    sl[s * k + t] += w as f64 * y[t][r as usize];
                }
                prev_val[s] = v;
                started[s] = true;
            }
        }

        // Apply: finalize leaves, create children for split slots.
        struct Routing {
            feature: usize,
            threshold: f64,
            left_slot: u32,
            right_slot: u32,
        }
        let mut routing: Vec<Option<Routing>> = Vec::with_capacity(n_slots);
        let mut next_slots: Vec<SlotStats> = Vec::new();
        for s in 0..n_slots {
            let splitting = matches!(states[s], SlotState::Splitting) && best[s].feature >= 0;
            if !splitting {
                routing.push(None);
                continue;
            }
            let b = &best[s];
            let w_left = b.left_weight;
            let w_right = slots[s].weight - w_left;
            let left_values: Vec<f64> = b.left_sums.iter().map(|v| v / w_left as f64).collect();
            let right_sums: Vec<f64> = slots[s]
                .sums
                .iter()
                .zip(&b.left_sums)
                .map(|(total, l)| total - l)
                .collect();
            let right_values: Vec<f64> = right_sums.iter().map(|v| v / w_right as f64).collect();
            let left_id = tree.push_node(&left_values);
            let right_id = tree.push_node(&right_values);
            let node = slots[s].node_id as usize;
            tree.feature[node] = b.feature as i32;
            tree.threshold[node] = b.threshold;
            tree.left[node] = left_id;
            tree.right[node] = right_id;
            let left_slot = next_slots.len() as u32;
            next_slots.push(SlotStats {
                node_id: left_id,
                weight: w_left,
                sums: b.left_sums.clone(),
            });
            let right_slot = next_slots.len() as u32;
            next_slots.push(SlotStats {
                node_id: right_id,
                weight: w_right,
                sums: right_sums,
            });
            routing.push(Some(Routing {
                feature: b.feature as usize,
                threshold: b.threshold,
                left_slot,
                right_slot,
            }));
        }
        if next_slots.is_empty() {
            break;
        }

        // Route rows to their new slots and drop rows that reached a leaf.
        for &r in &level_rows {
            let slot = node_of_row[r as usize];
            if slot == CLOSED {
                continue;
            }
            node_of_row[r as usize] = match &routing[slot as usize] {
                None => CLOSED,
                Some(route) => {
                    if data.cols[route.feature][r as usize] <= route.threshold {
                        route.left_slot
                    } else {
                        route.right_slot
                    }
                }
            };
        }
        level_rows.retain(|&r| node_of_row[r as usize] != CLOSED);
        for list in &mut feature_lists {
            list.retain(|&r| node_of_row[r as usize] != CLOSED);
        }

        slots = next_slots;
        depth += 1;
    }

    tree
}

// ---------------------------------------------------------------------------
// Public fitting entry points
// ---------------------------------------------------------------------------

fn check_matrix(m: &FeatureMatrix) -> Result<(), ModelError> {
    if m.n_rows == 0 {
        return Err(ModelError::EmptyTrainingSet);
    }
    if m.targets.is_empty() {
        return Err(ModelError::NoTargets);
    }
    if m.values.iter().any(|v| !v.is_finite())
        || m.targets.iter().flatten().any(|v| !v.is_finite())
    {
        return Err(ModelError::NonFinite);
    }
    Ok(())
}

/// Fits a random forest (multi-target capable).
pub fn fit_random_forest(
    m: &FeatureMatrix,
    cfg: &ForestConfig,
) -> Result<ForestModel, ModelError> {
    check_matrix(m)?;
    if cfg.n_trees == 0 {
        return Err(ModelError::BadConfig("n_trees must be positive".into()));
    }
    if !(cfg.feature_fraction > 0.0 && cfg.feature_fraction <= 1.0) {
        return Err(ModelError::BadConfig(
            "feature_fraction must lie in (0, 1]".into(),
        ));
    }
    if cfg.min_samples_leaf == 0 || cfg.min_samples_split == 0 {
        return Err(ModelError::BadConfig(
            "min_samples_leaf and min_samples_split must be positive".into(),
        ));
    }
    let data = FitData::new(m);
    let y: Vec<&[f64]> = m.targets.iter().map(|t| t.as_slice()).collect();
    let params = TreeParams {
        min_split: cfg.min_samples_split as u64,
        min_leaf: cfg.min_samples_leaf as u64,
        max_depth: cfg.max_depth.unwrap_or(usize::MAX),
        feature_fraction: cfg.feature_fraction,
    };
    let n = m.n_rows;
    let mut trees = Vec::with_capacity(cfg.n_trees);
    for i in 0..cfg.n_trees {
        let mut rng = crate::seed::rng(cfg.seed, &format!("tree:{i}"));
        let mut weights = vec![0u32; n];
        if cfg.bootstrap {
            for _ in 0..n {
                weights[rng.gen_range(0..n)] += 1;
            }
        } else {
            weights.fill(1);
        }
        trees.push(grow_tree(&data, &y, &weights, &params, &mut rng));
    }
    Ok(ForestModel {
        format_version: MODEL_FORMAT_VERSION,
        kind: "random_forest".into(),
        column_names: m.column_names.clone(),
        columns_fingerprint: columns_fingerprint(&m.column_names),
        target_names: m.target_names.clone(),
        n_features: m.n_cols,
        n_targets: m.targets.len(),
        aggregation: Aggregation::Average,
        trees,
    })
}

/// Fits a gradient-boosted tree model (single target).
pub fn fit_gbt(m: &FeatureMatrix, cfg: &GbtConfig) -> Result<ForestModel, ModelError> {
    check_matrix(m)?;
    if m.targets.len() != 1 {
        return Err(ModelError::MultiTargetUnsupported {
            model: "gradient boosting",
            n: m.targets.len(),
        });
    }
    if !(cfg.subsample > 0.0 && cfg.subsample <= 1.0) {
        return Err(ModelError::BadConfig("subsample must lie in (0, 1]".into()));
    }
    if !(cfg.feature_fraction > 0.0 && cfg.feature_fraction <= 1.0) {
        return Err(ModelError::BadConfig(
            "feature_fraction must lie in (0, 1]".into(),
        ));
    }
    if !(cfg.learning_rate > 0.0) {
        return Err(ModelError::BadConfig("learning_rate must be positive".into()));
    }
    let data = FitData::new(m);
    let y = &m.targets[0];
    let n = m.n_rows;
    let base = y.iter().sum::<f64>() / n as f64;
    let params = TreeParams {
        min_split: cfg.min_samples_split as u64,
        min_leaf: cfg.min_samples_leaf as u64,
        max_depth: cfg.max_depth.unwrap_or(usize::MAX),
        feature_fraction: cfg.feature_fraction,
    };
    let subsample_rows = if cfg.subsample < 1.0 {
        ((cfg.subsample * n as f64).floor() as usize).clamp(1, n)
    } else {
        n
    };
    let mut prediction = vec![base; n];
    let mut residual = vec![0f64; n];
    let mut scratch: Vec<u32> = (0..n as u32).collect();
    let mut trees = Vec::with_capacity(cfg.n_rounds);
    let mut tree_out = vec![0f64; 1];
    for round in 0..cfg.n_rounds {
        let mut rng = crate::seed::rng(cfg.seed, &format!("round:{round}"));
        for i in 0..n {
            residual[i] = y[i] - prediction[i];
        }
        let mut weights = vec![0u32; n];
        if subsample_rows == n {
            weights.fill(1);
        } else {
            for i in 0..subsample_rows {
                let j = rng.gen_range(i..n);
                scratch.swap(i, j);
                weights[scratch[i] as usize] = 1;
            }
            // Reset the scratch permutation.
            for (i, v) in scratch.iter_mut().enumerate() {
                *v = i as u32;
            }
        }
        let tree = grow_tree(&data, &[residual.as_slice()], &weights, &params, &mut rng);
        for (i, pred) in prediction.iter_mut().enumerate() {
            tree_out[0] = 0.0;
            tree.predict_into(m.row(i), 1, &mut tree_out);
            *pred += cfg.learning_rate * tree_out[0];
        }
        trees.push(tree);
    }
    Ok(ForestModel {
        format_version: MODEL_FORMAT_VERSION,
        kind: "gradient_boosted".into(),
        column_names: m.column_names.clone(),
        columns_fingerprint: columns_fingerprint(&m.column_names),
        target_names: m.target_names.clone(),
        n_features: m.n_cols,
        n_targets: 1,
        aggregation: Aggregation::Boosted {
            base: vec![base],
            learning_rate: cfg.learning_rate,
        },
        trees,
    })
}

// ---------------------------------------------------------------------------
// Prediction and persistence
// ---------------------------------------------------------------------------

impl ForestModel {
    /// Predicts one row (no fingerprint check; `row` must follow the model's
    /// column order). Returns one value per target.
    pub fn predict_row(&self, row: &[f64]) -> Vec<f64> {
        let k = self.n_targets;
        let mut acc = vec![0f64; k];
        for tree in &self.trees {
            tree.predict_into(row, k, &mut acc);
        }
        match &self.aggregation {
            Aggregation::Average => {
                let n = self.trees.len().max(1) as f64;
                for v in &mut acc {
                    *v /= n;
                }
            }
            Aggregation::Boosted { base, learning_rate } => {
                for (v, b) in acc.iter_mut().zip(base) {
                    *v = b + *learning_rate * *v;
                }
            }
        }
        acc
    }
}

/// Predicts every row of a matrix, checking that its columns are the ones the
/// model was trained on. Returns `[target][row]`.
pub fn predict(model: &ForestModel, m: &FeatureMatrix) -> Result<Vec<Vec<f64>>, ModelError> {
    let got = columns_fingerprint(&m.column_names);
    if got != model.columns_fingerprint {
        return Err(ModelError::FingerprintMismatch {
            expected: model.columns_fingerprint.clone(),
            got,
        });
    }
    let mut out = vec![Vec::with_capacity(m.n_rows); model.n_targets];
    for r in 0..m.n_rows {
        let pred = model.predict_row(m.row(r));
        for (t, v) in pred.into_iter().enumerate() {
            out[t].push(v);
        }
    }
    Ok(out)
}

/// Writes a model as JSON.
pub fn save_model(path: &Path, model: &ForestModel) -> Result<(), ModelError> {
    let file = std::fs::File::create(path)?;
    let writer = std::io::BufWriter::new(file);
    serde_json::to_writer(writer, model).map_err(|e| ModelError::Serde(e.to_string()))
}

/// Reads a model back, rejecting unknown format versions.
pub fn load_model(path: &Path) -> Result<ForestModel, ModelError> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let model: ForestModel =
        serde_json::from_reader(reader).map_err(|e| ModelError::Serde(e.to_string()))?;
    if model.format_version != MODEL_FORMAT_VERSION {
        return Err(ModelError::Serde(format!(
            "unsupported model format version {}",
            model.format_version
        )));
    }
    Ok(model)
}
