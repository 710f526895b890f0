//! Experiment harness: repeatable evaluation sweeps and report files.
//!
//! Everything here is a thin, heavily seeded orchestration layer over the
//! rest of the crate. The one rule all runners share: any comparison between
//! alternatives (feature recipes, search strategies) is *paired* — the same
//! derived seed produces the same train/test split or search budget for every
//! alternative, so differences in the summary numbers come from the thing
//! being compared, never from split luck. Seeds are derived from a single
//! master seed with readable domain strings (`split:{size}:{seed}`,
//! `model:{recipe}:{size}:{seed}`), which makes every individual run
//! reconstructible from the report alone.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::analysis::AnalysisError;
use crate::data::{
    assemble_matrix, sample_split, DataError, Dataset, FeatureRecipe,
};
use crate::forest::{fit_random_forest, ForestConfig, ModelError};
use crate::metrics::MetricError;
use crate::search::{SearchConfig, SearchError};
use crate::synth::SynthError;

/// Errors from the runners in this module.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Space(#[from] crate::space::SpaceError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv output failed: {0}")]
    Csv(String),
    #[error("bad harness configuration: {0}")]
    BadConfig(String),
    #[error("dataset has no proxy column '{0}'")]
    MissingProxy(String),
    #[error("dataset has no target column '{0}'")]
    MissingTarget(String),
}

// ---------------------------------------------------------------------------
// Evaluation sweep
// ---------------------------------------------------------------------------

/// Settings for [`run_evaluation`].
#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub recipes: Vec<FeatureRecipe>,
    pub train_sizes: Vec<usize>,
    pub n_seeds: usize,
    /// Evaluate on this many held-out rows (subsampled); `None` uses all.
    pub test_size: Option<usize>,
    /// Template for the models; the seed field is replaced per run.
    pub forest: ForestConfig,
    pub master_seed: u64,
}

/// One (recipe, train size, seed) measurement.
#[derive(Debug, Clone)]
pub struct EvalCell {
    pub recipe: String,
    pub train_size: usize,
    pub seed: usize,
    pub target_names: Vec<String>,
    /// Rank correlation on the held-out rows, one entry per target.
    pub per_target_tau: Vec<f64>,
    /// Mean of `per_target_tau`.
    pub mean_tau: f64,
}

/// All measurements of one sweep.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub space: String,
    pub n_records: usize,
    pub cells: Vec<EvalCell>,
}

/// Mean and spread over seeds for one (recipe, train size) pair.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateCell {
    pub recipe: String,
    pub train_size: usize,
    pub n_seeds: usize,
    pub mean_tau: f64,
    /// Sample standard deviation over seeds (0 for a single seed).
    pub std_tau: f64,
    pub per_target_mean: Vec<f64>,
}

/// Renders a measurement as `mean^std`, e.g. `0.8412^0.0123`.
pub fn format_cell(mean: f64, std: f64) -> String {
    format!("{mean:.4}^{std:.4}")
}

/// Fits one model per (recipe, train size, seed) and scores held-out rank
/// correlation. Splits depend only on (size, seed), so every recipe sees the
/// identical train/test rows.
pub fn run_evaluation(dataset: &Dataset, cfg: &EvalConfig) -> Result<EvalReport, HarnessError> {
    if cfg.recipes.is_empty() || cfg.train_sizes.is_empty() || cfg.n_seeds == 0 {
        return Err(HarnessError::BadConfig(
            "recipes, train_sizes and n_seeds must all be non-empty".into(),
        ));
    }
    let n = dataset.records.len();
    for &size in &cfg.train_sizes {
        if size + 2 > n {
            return Err(HarnessError::BadConfig(format!(
                "train size {size} leaves fewer than 2 of {n} rows for testing"
            )));
        }
    }
    // Assemble each recipe's matrix once; splits reuse it.
    let mut matrices = Vec::with_capacity(cfg.recipes.len());
    for recipe in &cfg.recipes {
        matrices.push((recipe.family_label(), assemble_matrix(dataset, recipe)?));
    }

    let mut cells = Vec::new();
    for &size in &cfg.train_sizes {
        for seed in 0..cfg.n_seeds {
            let split_seed = crate::seed::derive(cfg.master_seed, &format!("split:{size}:{seed}"));
            let (train_rows, mut test_rows) = sample_split(n, size, split_seed)?;
            if let Some(k) = cfg.test_size {
                if k < test_rows.len() {
                    let mut rng =
                        crate::seed::rng(cfg.master_seed, &format!("test:{size}:{seed}"));
                    test_rows.shuffle(&mut rng);
                    test_rows.truncate(k);
                    test_rows.sort_unstable();
                }
            }
            for (label, matrix) in &matrices {
                let train = matrix.select_rows(&train_rows);
                let test = matrix.select_rows(&test_rows);
                let model_seed = crate::seed::derive(
                    cfg.master_seed,
                    &format!("model:{label}:{size}:{seed}"),
                );
                let model = fit_random_forest(
                    &train,
                    &ForestConfig {
                        seed: model_seed,
                        ..cfg.forest.clone()
                    },
                )?;
                let preds = crate::forest::predict(&model, &test)?;
                let mut per_target_tau = Vec::with_capacity(preds.len());
                for (t, pred) in preds.iter().enumerate() {
                    per_target_tau.push(crate::metrics::kendall_tau(pred, &test.targets[t])?);
                }
                let mean_tau =
                    per_target_tau.iter().sum::<f64>() / per_target_tau.len() as f64;
                cells.push(EvalCell {
                    recipe: label.clone(),
                    train_size: size,
                    seed,
                    target_names: test.target_names.clone(),
                    per_target_tau,
                    mean_tau,
                });
            }
        }
    }
    Ok(EvalReport {
        space: dataset.spec.name.clone(),
        n_records: n,
        cells,
    })
}

/// Groups a report's cells by (recipe, train size), in first-appearance
/// order, and summarizes each group over its seeds.
pub fn aggregate(report: &EvalReport) -> Vec<AggregateCell> {
    let mut order: Vec<(String, usize)> = Vec::new();
    let mut grouped: HashMap<(String, usize), Vec<&EvalCell>> = HashMap::new();
    for cell in &report.cells {
        let key = (cell.recipe.clone(), cell.train_size);
        if !grouped.contains_key(&key) {
            order.push(key.clone());
        }
        grouped.entry(key).or_default().push(cell);
    }
    order
        .into_iter()
        .map(|key| {
            let cells = &grouped[&key];
            let n = cells.len();
            let mean = cells.iter().map(|c| c.mean_tau).sum::<f64>() / n as f64;
            let std = if n > 1 {
                let var = cells
                    .iter()
                    .map(|c| (c.mean_tau - mean) * (c.mean_tau - mean))
                    .sum::<f64>()
                    / (n - 1) as f64;
                var.sqrt()
            } else {
                0.0
            };
            let n_targets = cells[0].per_target_tau.len();
            let per_target_mean = (0..n_targets)
                .map(|t| cells.iter().map(|c| c.per_target_tau[t]).sum::<f64>() / n as f64)
                .collect();
            AggregateCell {
                recipe: key.0,
                train_size: key.1,
                n_seeds: n,
                mean_tau: mean,
                std_tau: std,
                per_target_mean,
            }
        })
        .collect()
}

/// Writes the aggregated sweep as CSV: one row per (recipe, train size).
pub fn write_report_csv(path: &Path, aggregates: &[AggregateCell]) -> Result<(), HarnessError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| HarnessError::Csv(e.to_string()))?;
    writer
        .write_record(["recipe", "train_size", "n_seeds", "mean_tau", "std_tau", "summary"])
        .map_err(|e| HarnessError::Csv(e.to_string()))?;
    for a in aggregates {
        writer
            .write_record([
                a.recipe.clone(),
                a.train_size.to_string(),
                a.n_seeds.to_string(),
                format!("{:.6}", a.mean_tau),
                format!("{:.6}", a.std_tau),
                format_cell(a.mean_tau, a.std_tau),
            ])
            .map_err(|e| HarnessError::Csv(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes every individual measurement as CSV, one row per cell.
pub fn write_per_seed_csv(path: &Path, report: &EvalReport) -> Result<(), HarnessError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| HarnessError::Csv(e.to_string()))?;
    writer
        .write_record(["recipe", "train_size", "seed", "mean_tau", "per_target_tau"])
        .map_err(|e| HarnessError::Csv(e.to_string()))?;
    for c in &report.cells {
        let per_target = c
            .per_target_tau
            .iter()
            .zip(&c.target_names)
            .map(|(tau, name)| format!("{name}={tau:.6}"))
            .collect::<Vec<_>>()
            .join("|");
        writer
            .write_record([
                c.recipe.clone(),
                c.train_size.to_string(),
                c.seed.to_string(),
                format!("{:.6}", c.mean_tau),
                per_target,
            ])
            .map_err(|e| HarnessError::Csv(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

/// Builds the JSON manifest describing a sweep and its results.
pub fn manifest_for(
    dataset: &Dataset,
    cfg: &EvalConfig,
    aggregates: &[AggregateCell],
) -> serde_json::Value {
    serde_json::json!({
        "space": dataset.spec.name,
        "n_records": dataset.records.len(),
        "master_seed": cfg.master_seed,
        "n_seeds": cfg.n_seeds,
        "train_sizes": cfg.train_sizes,
        "test_size": cfg.test_size,
        "recipes": cfg.recipes.iter().map(|r| r.family_label()).collect::<Vec<_>>(),
        "targets": cfg.recipes.first().map(|r| r.targets.clone()).unwrap_or_default(),
        "forest": {
            "n_trees": cfg.forest.n_trees,
            "max_depth": cfg.forest.max_depth,
            "min_samples_split": cfg.forest.min_samples_split,
            "min_samples_leaf": cfg.forest.min_samples_leaf,
            "feature_fraction": cfg.forest.feature_fraction,
            "bootstrap": cfg.forest.bootstrap,
        },
        "results": aggregates.iter().map(|a| serde_json::json!({
            "recipe": a.recipe,
            "train_size": a.train_size,
            "summary": format_cell(a.mean_tau, a.std_tau),
            "per_target_mean": a.per_target_mean,
        })).collect::<Vec<_>>(),
    })
}

/// Writes a JSON value to disk, pretty-printed.
pub fn write_manifest(path: &Path, manifest: &serde_json::Value) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| HarnessError::Csv(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Importance aggregation
// ---------------------------------------------------------------------------

/// Settings for [`run_importance`].
#[derive(Debug, Clone)]
pub struct ImportanceConfig {
    pub recipe: FeatureRecipe,
    pub train_size: usize,
    /// Held-out rows importance is measured on (subsampled).
    pub eval_size: usize,
    pub n_seeds: usize,
    /// Shuffles per feature and seed.
    pub n_repeats: usize,
    pub forest: ForestConfig,
    pub master_seed: u64,
}

/// Importance results averaged over seeds.
#[derive(Debug, Clone)]
pub struct ImportanceSummary {
    /// Mean rank of each feature across seeds (0 = most important).
    pub mean_ranks: BTreeMap<String, f64>,
    /// Mean importance score across seeds.
    pub mean_scores: BTreeMap<String, f64>,
    pub n_seeds: usize,
}

impl ImportanceSummary {
    /// Features sorted by mean rank, best first.
    pub fn by_rank(&self) -> Vec<(String, f64)> {
        let mut rows: Vec<(String, f64)> = self
            .mean_ranks
            .iter()
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        rows.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
        rows
    }
}

/// Fits one model per seed and aggregates permutation-importance ranks, so a
/// feature's position is judged across runs rather than from one draw.
pub fn run_importance(
    dataset: &Dataset,
    cfg: &ImportanceConfig,
) -> Result<ImportanceSummary, HarnessError> {
    if cfg.n_seeds == 0 {
        return Err(HarnessError::BadConfig("n_seeds must be positive".into()));
    }
    let n = dataset.records.len();
    if cfg.train_size + 2 > n {
        return Err(HarnessError::BadConfig(format!(
            "train size {} leaves fewer than 2 of {n} rows for evaluation",
            cfg.train_size
        )));
    }
    let matrix = assemble_matrix(dataset, &cfg.recipe)?;
    let mut runs: Vec<BTreeMap<String, f64>> = Vec::with_capacity(cfg.n_seeds);
    let mut score_sums: BTreeMap<String, f64> = BTreeMap::new();
    for seed in 0..cfg.n_seeds {
        let size = cfg.train_size;
        let split_seed = crate::seed::derive(cfg.master_seed, &format!("split:{size}:{seed}"));
        let (train_rows, mut eval_rows) = sample_split(n, size, split_seed)?;
        if cfg.eval_size < eval_rows.len() {
            let mut rng = crate::seed::rng(cfg.master_seed, &format!("test:{size}:{seed}"));
            eval_rows.shuffle(&mut rng);
            eval_rows.truncate(cfg.eval_size);
            eval_rows.sort_unstable();
        }
        let train = matrix.select_rows(&train_rows);
        let eval = matrix.select_rows(&eval_rows);
        let model_seed = crate::seed::derive(
            cfg.master_seed,
            &format!("model:{}:{size}:{seed}", cfg.recipe.family_label()),
        );
        let model = fit_random_forest(
            &train,
            &ForestConfig {
                seed: model_seed,
                ..cfg.forest.clone()
            },
        )?;
        let importance_seed =
            crate::seed::derive(cfg.master_seed, &format!("importance:{seed}"));
        let report = crate::analysis::permutation_importance(
            &model,
            &eval,
            0,
            cfg.n_repeats,
            importance_seed,
        )?;
        for (name, score) in report.as_map() {
            *score_sums.entry(name).or_insert(0.0) += score;
        }
        runs.push(report.as_map());
    }
    let mean_ranks = crate::metrics::mean_rank(&runs)?;
    let mean_scores = score_sums
        .into_iter()
        .map(|(k, v)| (k, v / cfg.n_seeds as f64))
        .collect();
    Ok(ImportanceSummary {
        mean_ranks,
        mean_scores,
        n_seeds: cfg.n_seeds,
    })
}

// ---------------------------------------------------------------------------
// Proxy bias report
// ---------------------------------------------------------------------------

/// How well a proxy ranks architectures, overall versus within clusters of
/// equal convolution count.
#[derive(Debug, Clone)]
pub struct BiasReport {
    pub proxy: String,
    pub target: String,
    pub n_rows: usize,
    /// Whole-dataset rank correlation.
    pub overall: f64,
    /// Mean |within-cluster correlation|; low values mean the overall number
    /// rides on the confounder rather than on within-cluster skill.
    pub mean_within_abs: f64,
    pub groups: Vec<(String, usize, f64)>,
}

/// Correlates one proxy column against a target, overall and within
/// convolution-count clusters.
pub fn run_bias(dataset: &Dataset, proxy: &str, target: &str) -> Result<BiasReport, HarnessError> {
    let mut score = Vec::with_capacity(dataset.records.len());
    let mut y = Vec::with_capacity(dataset.records.len());
    for record in &dataset.records {
        score.push(
            *record
                .zcp
                .get(proxy)
                .ok_or_else(|| HarnessError::MissingProxy(proxy.to_string()))?,
        );
        y.push(
            *record
                .targets
                .get(target)
                .ok_or_else(|| HarnessError::MissingTarget(target.to_string()))?,
        );
    }
    let clusters = crate::synth::conv_cluster_keys(dataset)?;
    let grouped = crate::metrics::grouped_rank_correlation(&score, &y, &clusters)?;
    Ok(BiasReport {
        proxy: proxy.to_string(),
        target: target.to_string(),
        n_rows: dataset.records.len(),
        overall: grouped.overall,
        mean_within_abs: grouped.mean_within_abs(),
        groups: grouped.groups,
    })
}

// ---------------------------------------------------------------------------
// Search comparison
// ---------------------------------------------------------------------------

/// Settings for [`run_search_comparison`].
#[derive(Debug, Clone)]
pub struct SearchComparisonConfig {
    /// Template for the surrogate search; the seed is replaced per run.
    pub search: SearchConfig,
    pub n_seeds: usize,
    pub target: String,
    pub master_seed: u64,
}

/// One paired (surrogate vs random) search run.
#[derive(Debug, Clone)]
pub struct SearchSeedOutcome {
    pub seed: usize,
    pub n_evaluations: usize,
    pub surrogate_best: f64,
    pub random_best: f64,
    /// Fraction of the space strictly below the best found (1.0 = optimum).
    pub surrogate_percentile: f64,
    pub random_percentile: f64,
}

/// Aggregated paired comparison.
#[derive(Debug, Clone)]
pub struct SearchComparison {
    pub per_seed: Vec<SearchSeedOutcome>,
    pub mean_surrogate_best: f64,
    pub mean_random_best: f64,
    /// Runs where the surrogate matched or beat random search.
    pub wins: usize,
}

impl SearchComparison {
    /// How many runs ended inside the top `fraction` of the space.
    pub fn surrogate_top_fraction_hits(&self, fraction: f64) -> usize {
        self.per_seed
            .iter()
            .filter(|o| o.surrogate_percentile >= 1.0 - fraction)
            .count()
    }
}

/// Runs surrogate-guided and random search side by side on a benchmark that
/// covers an entire space, pairing budgets per seed.
pub fn run_search_comparison(
    dataset: &Dataset,
    cfg: &SearchComparisonConfig,
) -> Result<SearchComparison, HarnessError> {
    if cfg.n_seeds == 0 {
        return Err(HarnessError::BadConfig("n_seeds must be positive".into()));
    }
    let spec = &dataset.spec;
    let cells = spec.cells()?;
    let mut oracle_map: HashMap<u64, f64> = HashMap::with_capacity(dataset.records.len());
    let mut values: Vec<f64> = Vec::with_capacity(dataset.records.len());
    for record in &dataset.records {
        let arch_cells = match &record.payload {
            crate::data::ArchPayload::Cells(c) => c,
            crate::data::ArchPayload::Macro(_) => {
                return Err(HarnessError::BadConfig(
                    "search comparisons need a cell-space benchmark".into(),
                ))
            }
        };
        let index = crate::space::assignment_index(cells, &arch_cells[0])?;
        let value = *record
            .targets
            .get(&cfg.target)
            .ok_or_else(|| HarnessError::MissingTarget(cfg.target.clone()))?;
        oracle_map.insert(index, value);
        values.push(value);
    }
    let elements = cells.elements_per_cell().ok_or_else(|| {
        HarnessError::BadConfig("search needs an edge-labeled fixed wiring".into())
    })?;
    let total = (cells.operations.len() as u128).pow(elements as u32);
    if oracle_map.len() as u128 != total {
        return Err(HarnessError::BadConfig(format!(
            "benchmark covers {} of {} architectures; search may query any of them",
            oracle_map.len(),
            total
        )));
    }

    let mut per_seed = Vec::with_capacity(cfg.n_seeds);
    for seed in 0..cfg.n_seeds {
        let surrogate_cfg = SearchConfig {
            seed: crate::seed::derive(cfg.master_seed, &format!("search:{seed}")),
            ..cfg.search.clone()
        };
        let surrogate = crate::search::surrogate_search(spec, &surrogate_cfg, |i| oracle_map[&i])?;
        let budget = surrogate.evaluations.len();
        let random_seed = crate::seed::derive(cfg.master_seed, &format!("rs:{seed}"));
        let random =
            crate::search::random_search(spec, budget, random_seed, |i| oracle_map[&i])?;
        let surrogate_best = surrogate.best().map(|e| e.value).unwrap_or(f64::NAN);
        let random_best = random.best().map(|e| e.value).unwrap_or(f64::NAN);
        per_seed.push(SearchSeedOutcome {
            seed,
            n_evaluations: budget,
            surrogate_best,
            random_best,
            surrogate_percentile: crate::search::percentile_of(surrogate_best, &values),
            random_percentile: crate::search::percentile_of(random_best, &values),
        });
    }
    let n = per_seed.len() as f64;
    let mean_surrogate_best = per_seed.iter().map(|o| o.surrogate_best).sum::<f64>() / n;
    let mean_random_best = per_seed.iter().map(|o| o.random_best).sum::<f64>() / n;
    let wins = per_seed
        .iter()
        .filter(|o| o.surrogate_best >= o.random_best)
        .count();
    Ok(SearchComparison {
        per_seed,
        mean_surrogate_best,
        mean_random_best,
        wins,
    })
}
