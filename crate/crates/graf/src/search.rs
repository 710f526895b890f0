//! Surrogate-guided architecture search over enumerable cell spaces.
//!
//! The loop is a simple Bayesian-optimization shape: evaluate a random
//! initial batch, then repeatedly (1) refit a small ensemble of forests on
//! everything evaluated so far, using the graph features as inputs, (2) draw
//! a fresh batch of random unevaluated candidates, (3) score them with one
//! ensemble member drawn at random — sampling a member instead of averaging
//! keeps some exploration — and (4) evaluate the top-scored candidates.
//! Every random draw comes from a domain-separated stream of the search
//! seed, so a run is exactly repeatable, and no architecture is ever
//! evaluated twice.
//!
//! A uniform random-search baseline with the same no-repeat behavior is
//! included for paired comparisons.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::data::FeatureMatrix;
use crate::features::FeatureError;
use crate::forest::{fit_random_forest, ForestConfig, ModelError};
use crate::space::{cell_from_assignment_index, SearchSpaceSpec, SpaceError};

/// Errors from the search loop.
#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("bad search configuration: {0}")]
    BadConfig(String),
    #[error("space '{space}' cannot be searched: {reason}")]
    NotSearchable { space: String, reason: String },
    #[error("requested {requested} evaluations but the space has {available}")]
    SpaceExhausted { requested: u64, available: u64 },
}

/// Settings for [`surrogate_search`].
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Random architectures evaluated before the first surrogate fit.
    pub n_initial: usize,
    /// Surrogate refit rounds.
    pub n_iterations: usize,
    /// Random unevaluated candidates scored per round.
    pub candidates_per_iteration: usize,
    /// Top-scored candidates evaluated per round.
    pub evaluations_per_iteration: usize,
    /// Ensemble members refit each round.
    pub ensemble_size: usize,
    /// With `true`, members are bootstrap forests and each round scores with
    /// one member drawn at random; with `false`, a single surrogate is fit
    /// as configured and selection is purely greedy.
    pub ensemble_bootstrap: bool,
    /// Template for the surrogate forests; the seed field is ignored and
    /// replaced by per-round derived seeds.
    pub surrogate: ForestConfig,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            n_initial: 20,
            n_iterations: 25,
            candidates_per_iteration: 200,
            evaluations_per_iteration: 20,
            ensemble_size: 3,
            ensemble_bootstrap: true,
            surrogate: ForestConfig::default(),
            seed: 0,
        }
    }
}

/// One evaluated architecture, in query order.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub index: u64,
    pub value: f64,
}

/// The full evaluation history of one search run.
#[derive(Debug, Clone, Default)]
pub struct SearchTrace {
    pub evaluations: Vec<Evaluation>,
    /// Running maximum of `evaluations[..=i].value`.
    pub best_trace: Vec<f64>,
}

impl SearchTrace {
    fn push(&mut self, index: u64, value: f64) {
        let best = match self.best_trace.last() {
            Some(&b) => b.max(value),
            None => value,
        };
        self.evaluations.push(Evaluation { index, value });
        self.best_trace.push(best);
    }

    /// The best evaluation seen, if any.
    pub fn best(&self) -> Option<&Evaluation> {
        self.evaluations
            .iter()
            .max_by(|a, b| a.value.partial_cmp(&b.value).unwrap())
    }
}

/// Total assignments of an edge-labeled fixed-wiring space.
fn space_size(spec: &SearchSpaceSpec) -> Result<u64, SearchError> {
    crate::space::validate_spec(spec)?;
    let cells = spec.cells().map_err(|_| SearchError::NotSearchable {
        space: spec.name.clone(),
        reason: "macro spaces have no assignment indexing".into(),
    })?;
    let Some(elements) = cells.elements_per_cell() else {
        return Err(SearchError::NotSearchable {
            space: spec.name.clone(),
            reason: "only edge-labeled fixed-wiring spaces index by assignment".into(),
        });
    };
    let total = (cells.operations.len() as u128).pow(elements as u32);
    u64::try_from(total).map_err(|_| SearchError::NotSearchable {
        space: spec.name.clone(),
        reason: "space is too large to index".into(),
    })
}

/// Draws up to `want` distinct indices outside `taken`, in draw order. When
/// fewer than `want` remain, every remaining index is returned (ascending).
fn draw_unevaluated(
    rng: &mut ChaCha8Rng,
    total: u64,
    taken: &HashSet<u64>,
    want: usize,
) -> Vec<u64> {
    let remaining = total - taken.len() as u64;
    if remaining == 0 {
        return Vec::new();
    }
    if want as u64 >= remaining {
        return (0..total).filter(|i| !taken.contains(i)).collect();
    }
    let mut out = Vec::with_capacity(want);
    let mut seen = HashSet::with_capacity(want);
    while out.len() < want {
        let i = rng.gen_range(0..total);
        if !taken.contains(&i) && seen.insert(i) {
            out.push(i);
        }
    }
    out
}

/// Runs surrogate-guided search, calling `oracle` once per queried
/// architecture (higher values are better).
pub fn surrogate_search<F>(
    spec: &SearchSpaceSpec,
    cfg: &SearchConfig,
    mut oracle: F,
) -> Result<SearchTrace, SearchError>
where
    F: FnMut(u64) -> f64,
{
    if cfg.n_initial == 0 {
        return Err(SearchError::BadConfig("n_initial must be positive".into()));
    }
    if cfg.evaluations_per_iteration == 0 || cfg.candidates_per_iteration == 0 {
        return Err(SearchError::BadConfig(
            "candidates_per_iteration and evaluations_per_iteration must be positive".into(),
        ));
    }
    if cfg.ensemble_size == 0 {
        return Err(SearchError::BadConfig("ensemble_size must be positive".into()));
    }
    let total = space_size(spec)?;
    if (cfg.n_initial as u64) > total {
        return Err(SearchError::SpaceExhausted {
            requested: cfg.n_initial as u64,
            available: total,
        });
    }
    let cells = spec.cells()?;
    let schema = crate::features::micro_schema(spec)?;
    let column_names = schema.names();
    let mut feature_cache: HashMap<u64, Vec<f64>> = HashMap::new();
    let features_of = |index: u64,
                           cache: &mut HashMap<u64, Vec<f64>>|
     -> Result<Vec<f64>, SearchError> {
        if let Some(row) = cache.get(&index) {
            return Ok(row.clone());
        }
        let cell = cell_from_assignment_index(cells, index);
        let arch = vec![cell; cells.cells_per_arch];
        let row = crate::features::extract_micro(spec, &schema, &arch)?;
        cache.insert(index, row.clone());
        Ok(row)
    };

    let mut trace = SearchTrace::default();
    let mut taken: HashSet<u64> = HashSet::new();

    // Initial random batch.
    let mut init_rng = crate::seed::rng(cfg.seed, "init");
    for index in draw_unevaluated(&mut init_rng, total, &taken, cfg.n_initial) {
        taken.insert(index);
        trace.push(index, oracle(index));
    }

    let members = if cfg.ensemble_bootstrap {
        cfg.ensemble_size
    } else {
        1
    };
    for iter in 0..cfg.n_iterations {
        if taken.len() as u64 == total {
            break;
        }
        // Refit the surrogate ensemble on everything evaluated so far.
        let n = trace.evaluations.len();
        let mut values = Vec::with_capacity(n * column_names.len());
        let mut target = Vec::with_capacity(n);
        let mut arch_ids = Vec::with_capacity(n);
        for e in &trace.evaluations {
            values.extend(features_of(e.index, &mut feature_cache)?);
            target.push(e.value);
            arch_ids.push(e.index.to_string());
        }
        let matrix = FeatureMatrix {
            column_names: column_names.clone(),
            values,
            n_rows: n,
            n_cols: column_names.len(),
            targets: vec![target],
            target_names: vec!["objective".into()],
            arch_ids,
        };
        let mut models = Vec::with_capacity(members);
        for m in 0..members {
            let member_cfg = ForestConfig {
                seed: crate::seed::derive(cfg.seed, &format!("surrogate:{iter}:{m}")),
                bootstrap: if cfg.ensemble_bootstrap {
                    true
                } else {
                    cfg.surrogate.bootstrap
                },
                ..cfg.surrogate.clone()
            };
            models.push(fit_random_forest(&matrix, &member_cfg)?);
        }

        // Candidates first, then the scoring member, in one seed stream.
        let mut iter_rng = crate::seed::rng(cfg.seed, &format!("iter:{iter}"));
        let candidates = draw_unevaluated(
            &mut iter_rng,
            total,
            &taken,
            cfg.candidates_per_iteration,
        );
        if candidates.is_empty() {
            break;
        }
        let member = if members > 1 {
            iter_rng.gen_range(0..members)
        } else {
            0
        };
        let model = &models[member];
        let mut scored: Vec<(usize, f64)> = Vec::with_capacity(candidates.len());
        for (pos, &index) in candidates.iter().enumerate() {
            let row = features_of(index, &mut feature_cache)?;
            scored.push((pos, model.predict_row(&row)[0]));
        }
        // Highest score first; equal scores keep batch order.
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        for &(pos, _) in scored.iter().take(cfg.evaluations_per_iteration) {
            let index = candidates[pos];
            taken.insert(index);
            trace.push(index, oracle(index));
        }
    }
    Ok(trace)
}

/// Uniform random search without repeats, as a baseline.
pub fn random_search<F>(
    spec: &SearchSpaceSpec,
    n_evaluations: usize,
    seed: u64,
    mut oracle: F,
) -> Result<SearchTrace, SearchError>
where
    F: FnMut(u64) -> f64,
{
    let total = space_size(spec)?;
    if n_evaluations as u64 > total {
        return Err(SearchError::SpaceExhausted {
            requested: n_evaluations as u64,
            available: total,
        });
    }
    let mut rng = crate::seed::rng(seed, "random_search");
    let taken = HashSet::new();
    let mut trace = SearchTrace::default();
    for index in draw_unevaluated(&mut rng, total, &taken, n_evaluations) {
        trace.push(index, oracle(index));
    }
    Ok(trace)
}

/// Fraction of `population` values strictly below `value` (so 1.0 means the
/// best architecture in the space).
pub fn percentile_of(value: f64, population: &[f64]) -> f64 {
    if population.is_empty() {
        return 0.0;
    }
    let below = population.iter().filter(|&&v| v < value).count();
    below as f64 / population.len() as f64
}
