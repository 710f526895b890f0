//! Synthetic benchmark generation.
//!
//! Real tabular benchmarks are large external downloads, so this crate ships
//! a family of synthetic target functions defined directly on cell structure:
//! each one maps an architecture to a score through quantities the graph
//! features also measure (operation counts, shortest/longest paths). That
//! makes the generated datasets useful for exercising the whole pipeline —
//! surrogates have real signal to find, importance analysis has known ground
//! truth, and search has a known optimum — while staying fully deterministic
//! from a seed.
//!
//! Alongside the target, each record carries a small set of cheap proxy
//! scores (`nwot`, `flops`, `params`, `plain`) that mimic how
//! training-free metrics behave: correlated with the target overall, with
//! the correlation largely explained by a confounder (here, convolution
//! count), plus one pure-noise control.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::data::{ArchPayload, BenchmarkRecord, Dataset};
use crate::features::{FeatureError, FeatureKind, FeatureSchema};
use crate::space::{
    cell_from_assignment_index, MacroArch, ModuleKind, SearchSpaceSpec, SpaceError,
    SpaceLayout,
};

/// Errors from dataset synthesis.
#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("unknown target function '{0}'")]
    UnknownTarget(String),
    #[error("target '{target}' is not defined for space '{space}': {reason}")]
    UnsupportedSpace {
        target: String,
        space: String,
        reason: String,
    },
}

/// A synthetic target function, with its default noise level.
#[derive(Debug, Clone, Copy)]
pub struct TargetInfo {
    pub name: &'static str,
    pub default_noise: f64,
    pub summary: &'static str,
}

/// All target functions, in registry order.
pub const TARGETS: &[TargetInfo] = &[
    TargetInfo {
        name: "depth_shortcut",
        default_noise: 0.01,
        summary: "rewards conv3x3 count and a direct skip edge, penalizes depth",
    },
    TargetInfo {
        name: "conv_dominated",
        default_noise: 0.006,
        summary: "driven almost entirely by convolution count, small skip bonus",
    },
    TargetInfo {
        name: "skip_shortcut",
        default_noise: 0.005,
        summary: "decreases with the shortest skip-only path length",
    },
    TargetInfo {
        name: "lattice",
        default_noise: 0.0,
        summary: "noise-free weighted sum of conv counts and skip path",
    },
    TargetInfo {
        name: "conv_count",
        default_noise: 0.0,
        summary: "exactly the number of conv3x3 operations",
    },
    TargetInfo {
        name: "random",
        default_noise: 1.0,
        summary: "uniform noise, no structure (negative control)",
    },
];

/// Looks up a target function by name.
pub fn target_info(name: &str) -> Result<TargetInfo, SynthError> {
    TARGETS
        .iter()
        .find(|t| t.name == name)
        .copied()
        .ok_or_else(|| SynthError::UnknownTarget(name.to_string()))
}

/// Settings for [`build_space_dataset`].
#[derive(Debug, Clone)]
pub struct SynthConfig {
    /// Name of a registered target function.
    pub target: String,
    /// Overrides the target's default noise standard deviation.
    pub noise: Option<f64>,
    pub seed: u64,
    /// Keep only architectures where the output is reachable.
    pub well_formed_only: bool,
    /// Truncate enumeration after this many emitted records.
    pub limit: Option<usize>,
}

impl SynthConfig {
    pub fn new(target: &str, seed: u64) -> SynthConfig {
        SynthConfig {
            target: target.to_string(),
            noise: None,
            seed,
            well_formed_only: false,
            limit: None,
        }
    }
}

/// Name under which the synthetic score is stored in each record.
pub const TARGET_COLUMN: &str = "val_acc";

/// Structural quantities the target functions read, bridged from the feature
/// schema so targets are by construction functions of the graph features.
struct StructuralView {
    conv1_count: Option<Vec<usize>>,
    conv3_count: Option<Vec<usize>>,
    pool_count: Option<Vec<usize>>,
    skip_min_path: Option<Vec<usize>>,
    max_path_nonzero: Vec<usize>,
    sentinel: f64,
}

impl StructuralView {
    fn build(spec: &SearchSpaceSpec, schema: &FeatureSchema) -> Result<StructuralView, SynthError> {
        let cells = spec.cells()?;
        let op_idx = |name: &str| cells.operations.iter().position(|o| o == name);
        let count_cols = |op: Option<usize>| -> Option<Vec<usize>> {
            let op = op?;
            let cols: Vec<usize> = schema
                .features
                .iter()
                .enumerate()
                .filter(|(_, f)| matches!(f.kind, FeatureKind::OpCount { op: o } if o == op))
                .map(|(i, _)| i)
                .collect();
            if cols.is_empty() {
                None
            } else {
                Some(cols)
            }
        };
        let skip = op_idx("skip");
        let skip_min_path = skip.and_then(|s| {
            let mask = 1u32 << s;
            let cols: Vec<usize> = schema
                .features
                .iter()
                .enumerate()
                .filter(
                    |(_, f)| matches!(f.kind, FeatureKind::MinPath { allowed, .. } if allowed == mask),
                )
                .map(|(i, _)| i)
                .collect();
            if cols.is_empty() {
                None
            } else {
                Some(cols)
            }
        });
        let nonzero_mask = {
            let mut mask = (1u32 << cells.operations.len()) - 1;
            if let Some(z) = cells.zero_index() {
                mask &= !(1u32 << z);
            }
            mask
        };
        let max_path_nonzero: Vec<usize> = schema
            .features
            .iter()
            .enumerate()
            .filter(
                |(_, f)| matches!(f.kind, FeatureKind::MaxPath { allowed, .. } if allowed == nonzero_mask),
            )
            .map(|(i, _)| i)
            .collect();
        Ok(StructuralView {
            conv1_count: count_cols(op_idx("conv1x1")),
            conv3_count: count_cols(op_idx("conv3x3")),
            pool_count: count_cols(op_idx("avgpool3x3")),
            skip_min_path,
            max_path_nonzero,
            sentinel: (cells.num_nodes + 1) as f64,
        })
    }

    fn sum(&self, row: &[f64], cols: &Option<Vec<usize>>) -> f64 {
        cols.as_ref()
            .map(|c| c.iter().map(|&i| row[i]).sum())
            .unwrap_or(0.0)
    }

    fn conv1(&self, row: &[f64]) -> f64 {
        self.sum(row, &self.conv1_count)
    }

    fn conv3(&self, row: &[f64]) -> f64 {
        self.sum(row, &self.conv3_count)
    }

    fn pool(&self, row: &[f64]) -> f64 {
        self.sum(row, &self.pool_count)
    }

    /// Shortest skip-only path, or the sentinel when there is none (or the
    /// space has no skip operation).
    fn skip_min(&self, row: &[f64]) -> f64 {
        self.skip_min_path
            .as_ref()
            .map(|cols| {
                cols.iter()
                    .map(|&i| row[i])
                    .fold(f64::INFINITY, f64::min)
            })
            .unwrap_or(self.sentinel)
    }

    fn max_path(&self, row: &[f64]) -> f64 {
        self.max_path_nonzero
            .iter()
            .map(|&i| row[i])
            .fold(0.0, f64::max)
    }
}

/// Standard normal draw (Box-Muller; two uniform variates per call).
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

fn target_value(
    info: &TargetInfo,
    view: &StructuralView,
    row: &[f64],
    sigma: f64,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let c1 = view.conv1(row);
    let c3 = view.conv3(row);
    let skip_min = view.skip_min(row);
    let direct_skip = if skip_min == 1.0 { 1.0 } else { 0.0 };
    match info.name {
        "depth_shortcut" => {
            0.70 + 0.03 * c3 - 0.02 * (view.max_path(row) - 3.0).max(0.0) + 0.05 * direct_skip
                + sigma * normal(rng)
        }
        "conv_dominated" => 0.70 + 0.05 * (c1 + c3) + 0.012 * direct_skip + sigma * normal(rng),
        "skip_shortcut" => 1.0 - 0.1 * skip_min + sigma * normal(rng),
        "lattice" => 0.7 + 0.1 * c3 + 0.02 * c1 + 0.004 * skip_min + sigma * normal(rng),
        "conv_count" => c3 + sigma * normal(rng),
        "random" => rng.gen_range(0.0..1.0),
        other => unreachable!("unregistered target {other}"),
    }
}

/// Which structural inputs each target needs; used to reject spaces where the
/// target would be degenerate.
fn check_support(
    info: &TargetInfo,
    spec: &SearchSpaceSpec,
    view: &StructuralView,
) -> Result<(), SynthError> {
    let missing = |what: &str| SynthError::UnsupportedSpace {
        target: info.name.to_string(),
        space: spec.name.clone(),
        reason: format!("space has no {what}"),
    };
    match info.name {
        "depth_shortcut" | "conv_count" => {
            if view.conv3_count.is_none() {
                return Err(missing("conv3x3 operation"));
            }
        }
        "conv_dominated" | "lattice" => {
            if view.conv3_count.is_none() && view.conv1_count.is_none() {
                return Err(missing("convolution operations"));
            }
        }
        "skip_shortcut" => {
            if view.skip_min_path.is_none() {
                return Err(missing("skip operation with path features"));
            }
        }
        _ => {}
    }
    Ok(())
}

fn proxies(
    view: &StructuralView,
    row: &[f64],
    rng: &mut ChaCha8Rng,
) -> BTreeMap<String, f64> {
    let c1 = view.conv1(row);
    let c3 = view.conv3(row);
    let pool = view.pool(row);
    let mut map = BTreeMap::new();
    map.insert("nwot".to_string(), (c1 + c3) + 0.15 * normal(rng));
    map.insert("flops".to_string(), 10.0 * c3 + c1 + 0.3 * pool);
    map.insert("params".to_string(), 9.0 * c3 + c1);
    map.insert("plain".to_string(), rng.gen_range(0.0..1.0));
    map
}

/// Generates a benchmark over every architecture of an enumerable space.
///
/// Records appear in assignment-index order; each `arch_id` is
/// `{space}_{index:06}` so an id always maps back to its architecture. The
/// target noise and the proxies draw from separate per-record seed streams,
/// so changing the target function leaves the proxy columns untouched.
pub fn build_space_dataset(
    spec: &SearchSpaceSpec,
    cfg: &SynthConfig,
) -> Result<Dataset, SynthError> {
    let info = target_info(&cfg.target)?;
    crate::space::validate_spec(spec)?;
    match &spec.layout {
        SpaceLayout::Cells(_) => build_cell_dataset(spec, cfg, &info),
        SpaceLayout::Macro(_) => build_macro_dataset(spec, cfg, &info),
    }
}

fn build_cell_dataset(
    spec: &SearchSpaceSpec,
    cfg: &SynthConfig,
    info: &TargetInfo,
) -> Result<Dataset, SynthError> {
    let cells = spec.cells()?;
    let Some(elements) = cells.elements_per_cell() else {
        return Err(SynthError::UnsupportedSpace {
            target: info.name.to_string(),
            space: spec.name.clone(),
            reason: "only edge-labeled fixed-wiring spaces enumerate by assignment index".into(),
        });
    };
    let schema = crate::features::micro_schema(spec)?;
    let view = StructuralView::build(spec, &schema)?;
    check_support(info, spec, &view)?;
    let sigma = cfg.noise.unwrap_or(info.default_noise);

    let total = {
        let mut t: u64 = 1;
        for _ in 0..elements {
            t = t.saturating_mul(cells.operations.len() as u64);
        }
        t
    };
    let mut records = Vec::new();
    for index in 0..total {
        if let Some(limit) = cfg.limit {
            if records.len() >= limit {
                break;
            }
        }
        let cell = cell_from_assignment_index(cells, index);
        if cfg.well_formed_only && !crate::space::is_well_formed(cells, &cell)? {
            continue;
        }
        let arch_cells = vec![cell; cells.cells_per_arch];
        let row = crate::features::extract_micro(spec, &schema, &arch_cells)?;

        let mut target_rng = crate::seed::rng(cfg.seed, &format!("target_noise:{index}"));
        let value = target_value(info, &view, &row, sigma, &mut target_rng);
        let mut targets = BTreeMap::new();
        targets.insert(TARGET_COLUMN.to_string(), value);

        let mut proxy_rng = crate::seed::rng(cfg.seed, &format!("proxy:{index}"));
        let zcp = proxies(&view, &row, &mut proxy_rng);

        records.push(BenchmarkRecord {
            arch_id: format!("{}_{:06}", spec.name, index),
            payload: ArchPayload::Cells(arch_cells),
            targets,
            zcp,
        });
    }
    Ok(Dataset {
        spec: spec.clone(),
        records,
    })
}

fn build_macro_dataset(
    spec: &SearchSpaceSpec,
    cfg: &SynthConfig,
    info: &TargetInfo,
) -> Result<Dataset, SynthError> {
    if info.name != "random" {
        return Err(SynthError::UnsupportedSpace {
            target: info.name.to_string(),
            space: spec.name.clone(),
            reason: "macro spaces only support the 'random' target".into(),
        });
    }
    let m = spec.macro_space()?;
    let kinds = ModuleKind::ALL;
    let mut records = Vec::new();
    let mut index: u64 = 0;
    'outer: for len in m.min_modules..=m.max_modules {
        let total = (kinds.len() as u64).pow(len as u32);
        for code in 0..total {
            if let Some(limit) = cfg.limit {
                if records.len() >= limit {
                    break 'outer;
                }
            }
            let mut modules = Vec::with_capacity(len);
            let mut rest = code;
            for _ in 0..len {
                modules.push(kinds[(rest % kinds.len() as u64) as usize]);
                rest /= kinds.len() as u64;
            }
            modules.reverse();
            let arch = MacroArch { modules };

            let mut target_rng = crate::seed::rng(cfg.seed, &format!("target_noise:{index}"));
            let mut targets = BTreeMap::new();
            targets.insert(
                TARGET_COLUMN.to_string(),
                target_rng.gen_range(0.0..1.0),
            );
            let mut proxy_rng = crate::seed::rng(cfg.seed, &format!("proxy:{index}"));
            let mut zcp = BTreeMap::new();
            zcp.insert("plain".to_string(), proxy_rng.gen_range(0.0..1.0));

            records.push(BenchmarkRecord {
                arch_id: format!("{}_{:06}", spec.name, index),
                payload: ArchPayload::Macro(arch),
                targets,
                zcp,
            });
            index += 1;
        }
    }
    Ok(Dataset {
        spec: spec.clone(),
        records,
    })
}

/// Cluster label per record: architectures grouped by total convolution
/// count, the confounder the proxy scores share with the target.
pub fn conv_cluster_keys(dataset: &Dataset) -> Result<Vec<String>, SynthError> {
    let spec = &dataset.spec;
    let schema = crate::features::micro_schema(spec)?;
    let view = StructuralView::build(spec, &schema)?;
    let mut keys = Vec::with_capacity(dataset.records.len());
    for record in &dataset.records {
        let cells = match &record.payload {
            ArchPayload::Cells(c) => c,
            ArchPayload::Macro(_) => {
                return Err(SynthError::UnsupportedSpace {
                    target: "conv_cluster".into(),
                    space: spec.name.clone(),
                    reason: "cluster keys are defined for cell spaces".into(),
                })
            }
        };
        let row = crate::features::extract_micro(spec, &schema, cells)?;
        let n = (view.conv1(&row) + view.conv3(&row)).round() as i64;
        keys.push(format!("conv{n}"));
    }
    Ok(keys)
}
