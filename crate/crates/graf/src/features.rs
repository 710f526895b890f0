//! Interpretable graph features for architectures.
//!
//! Cell-based architectures get, per cell:
//!
//! * one operation count per vocabulary entry;
//! * for every nonempty operation subset `O'` (and every input node, when a
//!   cell has several): the shortest and longest input→output path length
//!   using only edges whose operation lies in `O'`, with `num_nodes + 1` as
//!   the sentinel when no such path exists;
//! * for every nonempty subset: the out-degree of each input node, the
//!   in-degree of the output node, and the mean in-/out-degree of the
//!   intermediate nodes, counting only edges whose operation lies in `O'`.
//!
//! Subsets are ordered by their bitmask over the operation vocabulary (bit
//! `i` = operation `i`), so schemas are stable given a space description.
//! Macro-level architectures get cumulative stride/channel progressions
//! (right-padded to the maximum depth) plus one count per module kind.
//!
//! Feature names follow `family(args)` with optional `@cellK` / `#input_K`
//! suffixes, e.g. `max_path(skip,conv3x3)` or `op_count(sepconv5x5)@cell1`.

use serde::Serialize;

use crate::space::{
    validate_cell, CellGraph, CellLabels, CellSpaceSpec, LabelPlacement, MacroArch, ModuleKind,
    SearchSpaceSpec, SpaceError, SpaceLayout,
};

/// Errors produced by feature extraction.
#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("architecture has {got} cells, the space calls for {want}")]
    CellCountMismatch { got: usize, want: usize },
    #[error("macro architecture has {got} modules, features cover at most {max}")]
    TooManyModules { got: usize, max: usize },
    #[error("operation vocabulary of {0} entries is too large for subset features")]
    TooManyOperations(usize),
}

/// The feature families this crate computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureFamily {
    OpCount,
    MinPath,
    MaxPath,
    InputOutDegree,
    OutputInDegree,
    MeanInDegree,
    MeanOutDegree,
    MacroStridesUntil,
    MacroChannelsUntil,
    MacroTypeCount,
}

impl FeatureFamily {
    pub fn name(self) -> &'static str {
        match self {
            FeatureFamily::OpCount => "op_count",
            FeatureFamily::MinPath => "min_path",
            FeatureFamily::MaxPath => "max_path",
            FeatureFamily::InputOutDegree => "input_out_degree",
            FeatureFamily::OutputInDegree => "output_in_degree",
            FeatureFamily::MeanInDegree => "mean_in_degree",
            FeatureFamily::MeanOutDegree => "mean_out_degree",
            FeatureFamily::MacroStridesUntil => "macro_strides_until",
            FeatureFamily::MacroChannelsUntil => "macro_channels_until",
            FeatureFamily::MacroTypeCount => "macro_type_count",
        }
    }
}

/// What one feature measures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureKind {
    OpCount { op: usize },
    MinPath { allowed: u32, input: usize },
    MaxPath { allowed: u32, input: usize },
    InputOutDegree { allowed: u32, input: usize },
    OutputInDegree { allowed: u32 },
    MeanInDegree { allowed: u32 },
    MeanOutDegree { allowed: u32 },
    StridesUntil { position: usize },
    ChannelsUntil { position: usize },
    ModuleTypeCount { kind: ModuleKind },
}

impl FeatureKind {
    pub fn family(&self) -> FeatureFamily {
        match self {
            FeatureKind::OpCount { .. } => FeatureFamily::OpCount,
            FeatureKind::MinPath { .. } => FeatureFamily::MinPath,
            FeatureKind::MaxPath { .. } => FeatureFamily::MaxPath,
            FeatureKind::InputOutDegree { .. } => FeatureFamily::InputOutDegree,
            FeatureKind::OutputInDegree { .. } => FeatureFamily::OutputInDegree,
            FeatureKind::MeanInDegree { .. } => FeatureFamily::MeanInDegree,
            FeatureKind::MeanOutDegree { .. } => FeatureFamily::MeanOutDegree,
            FeatureKind::StridesUntil { .. } => FeatureFamily::MacroStridesUntil,
            FeatureKind::ChannelsUntil { .. } => FeatureFamily::MacroChannelsUntil,
            FeatureKind::ModuleTypeCount { .. } => FeatureFamily::MacroTypeCount,
        }
    }
}

/// One column of the feature matrix.
#[derive(Debug, Clone)]
pub struct FeatureDef {
    pub name: String,
    /// Which cell of the architecture the feature reads (always 0 for
    /// single-cell spaces and macro features).
    pub cell_index: usize,
    pub kind: FeatureKind,
}

/// An ordered list of features for one space.
#[derive(Debug, Clone)]
pub struct FeatureSchema {
    pub space: String,
    pub features: Vec<FeatureDef>,
}

impl FeatureSchema {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }

    /// JSON description of every column, for auditing extracted matrices.
    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "space": self.space,
            "num_features": self.features.len(),
            "features": self
                .features
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    serde_json::json!({
                        "index": i,
                        "name": f.name,
                        "family": f.kind.family().name(),
                        "cell": f.cell_index,
                    })
                })
                .collect::<Vec<_>>(),
        })
    }
}

/// Joins the names of the operations in `mask`, in vocabulary order.
fn subset_name(ops: &[String], mask: u32) -> String {
    let mut parts = Vec::new();
    for (i, op) in ops.iter().enumerate() {
        if mask >> i & 1 == 1 {
            parts.push(op.as_str());
        }
    }
    parts.join(",")
}

/// Maximum modules that macro features cover; shorter architectures are
/// right-padded, longer ones rejected.
pub const MACRO_MAX_MODULES: usize = 6;

/// Builds the macro-feature schema: cumulative strides/channels at each
/// position plus one count per module kind.
pub fn macro_schema() -> FeatureSchema {
    let mut features = Vec::new();
    for position in 0..MACRO_MAX_MODULES {
        features.push(FeatureDef {
            name: format!("macro_strides_until({position})"),
            cell_index: 0,
            kind: FeatureKind::StridesUntil { position },
        });
    }
    for position in 0..MACRO_MAX_MODULES {
        features.push(FeatureDef {
            name: format!("macro_channels_until({position})"),
            cell_index: 0,
            kind: FeatureKind::ChannelsUntil { position },
        });
    }
    for kind in ModuleKind::ALL {
        features.push(FeatureDef {
            name: format!("macro_type_count({kind})"),
            cell_index: 0,
            kind: FeatureKind::ModuleTypeCount { kind },
        });
    }
    FeatureSchema {
        space: "macro".into(),
        features,
    }
}

/// Builds the graph-feature schema for a cell-based space.
///
/// Layout is cell-major; within a cell the families run in the order
/// op counts, min path, max path, input out-degree, output in-degree, mean
/// in-degree, mean out-degree, each subset family iterating inputs (outer)
/// then subset masks ascending (inner). Spaces that declare shortest paths
/// meaningless skip the min-path family.
pub fn micro_schema(spec: &SearchSpaceSpec) -> Result<FeatureSchema, FeatureError> {
    crate::space::validate_spec(spec)?;
    let cells = spec.cells()?;
    let num_ops = cells.operations.len();
    if num_ops > 16 {
        return Err(FeatureError::TooManyOperations(num_ops));
    }
    let full = (1u32 << num_ops) - 1;
    let num_inputs = cells.input_nodes.len();
    let multi_cell = cells.cells_per_arch > 1;
    let multi_input = num_inputs > 1;
    let tag = |cell_index: usize, input: Option<usize>| -> String {
        let mut t = String::new();
        if multi_cell {
            t.push_str(&format!("@cell{cell_index}"));
        }
        if multi_input {
            if let Some(k) = input {
                t.push_str(&format!("#input_{k}"));
            }
        }
        t
    };

    let mut features = Vec::new();
    for cell_index in 0..cells.cells_per_arch {
        for (op, name) in cells.operations.iter().enumerate() {
            features.push(FeatureDef {
                name: format!("op_count({name}){}", tag(cell_index, None)),
                cell_index,
                kind: FeatureKind::OpCount { op },
            });
        }
        if cells.compute_min_path {
            for input in 0..num_inputs {
                for mask in 1..=full {
                    features.push(FeatureDef {
                        name: format!(
                            "min_path({}){}",
                            subset_name(&cells.operations, mask),
                            tag(cell_index, Some(input))
                        ),
                        cell_index,
                        kind: FeatureKind::MinPath { allowed: mask, input },
                    });
                }
            }
        }
        for input in 0..num_inputs {
            for mask in 1..=full {
                features.push(FeatureDef {
                    name: format!(
                        "max_path({}){}",
                        subset_name(&cells.operations, mask),
                        tag(cell_index, Some(input))
                    ),
                    cell_index,
                    kind: FeatureKind::MaxPath { allowed: mask, input },
                });
            }
        }
        for input in 0..num_inputs {
            for mask in 1..=full {
                features.push(FeatureDef {
                    name: format!(
                        "input_out_degree({}){}",
                        subset_name(&cells.operations, mask),
                        tag(cell_index, Some(input))
                    ),
                    cell_index,
                    kind: FeatureKind::InputOutDegree { allowed: mask, input },
                });
            }
        }
        for mask in 1..=full {
            features.push(FeatureDef {
                name: format!(
                    "output_in_degree({}){}",
                    subset_name(&cells.operations, mask),
                    tag(cell_index, None)
                ),
                cell_index,
                kind: FeatureKind::OutputInDegree { allowed: mask },
            });
        }
        for mask in 1..=full {
            features.push(FeatureDef {
                name: format!(
                    "mean_in_degree({}){}",
                    subset_name(&cells.operations, mask),
                    tag(cell_index, None)
                ),
                cell_index,
                kind: FeatureKind::MeanInDegree { allowed: mask },
            });
        }
        for mask in 1..=full {
            features.push(FeatureDef {
                name: format!(
                    "mean_out_degree({}){}",
                    subset_name(&cells.operations, mask),
                    tag(cell_index, None)
                ),
                cell_index,
                kind: FeatureKind::MeanOutDegree { allowed: mask },
            });
        }
    }
    Ok(FeatureSchema {
        space: spec.name.clone(),
        features,
    })
}

/// Builds the schema for any space: graph features for cell spaces, macro
/// features for macro spaces.
pub fn schema_for(spec: &SearchSpaceSpec) -> Result<FeatureSchema, FeatureError> {
    match &spec.layout {
        SpaceLayout::Cells(_) => micro_schema(spec),
        SpaceLayout::Macro(_) => {
            let mut schema = macro_schema();
            schema.space = spec.name.clone();
            Ok(schema)
        }
    }
}

/// All per-subset quantities of one cell, indexed by subset mask.
struct SubsetTables {
    /// `min_path[input][mask]`, with the sentinel already applied.
    min_path: Vec<Vec<f64>>,
    max_path: Vec<Vec<f64>>,
    input_out_degree: Vec<Vec<f64>>,
    output_in_degree: Vec<f64>,
    mean_in_degree: Vec<f64>,
    mean_out_degree: Vec<f64>,
    /// Indexed by operation.
    op_counts: Vec<f64>,
}

/// Whether an edge may carry signal for a given operation subset.
///
/// Edge-labeled cells admit an edge when its own operation lies in the
/// subset. Node-labeled cells admit an edge when its endpoint closer to the
/// interior carries an admitted operation (inputs and the output are always
/// admitted: they carry no operation of their own).
fn edge_admissible(
    placement: LabelPlacement,
    labels: &CellLabels,
    edge_idx: usize,
    dst_for_entry: usize,
    mask: u32,
) -> bool {
    match (placement, labels) {
        (LabelPlacement::OnEdges, CellLabels::Edges(l)) => mask >> l[edge_idx] & 1 == 1,
        (LabelPlacement::OnNodes, CellLabels::Nodes(l)) => match l[dst_for_entry] {
            Some(op) => mask >> op & 1 == 1,
            None => true,
        },
        _ => false,
    }
}

fn subset_tables(spec: &CellSpaceSpec, cell: &CellGraph) -> SubsetTables {
    let num_ops = spec.operations.len();
    let full = (1usize << num_ops) - 1;
    let n = cell.num_nodes;
    let output = n - 1;
    let sentinel = (spec.num_nodes + 1) as f64;
    let placement = spec.label_placement;
    let inputs: Vec<usize> = spec.input_nodes.iter().copied().filter(|&i| i < n).collect();

    let mut op_counts = vec![0f64; num_ops];
    match &cell.labels {
        CellLabels::Edges(labels) => {
            for &op in labels {
                op_counts[op] += 1.0;
            }
        }
        CellLabels::Nodes(labels) => {
            for op in labels.iter().flatten() {
                op_counts[*op] += 1.0;
            }
        }
    }

    let is_intermediate =
        |v: usize| -> bool { v != output && !inputs.contains(&v) && v < n };
    let intermediates: Vec<usize> = (0..n).filter(|&v| is_intermediate(v)).collect();

    let mut min_path = vec![vec![0f64; full + 1]; inputs.len()];
    let mut max_path = vec![vec![0f64; full + 1]; inputs.len()];
    let mut input_out_degree = vec![vec![0f64; full + 1]; inputs.len()];
    let mut output_in_degree = vec![0f64; full + 1];
    let mut mean_in_degree = vec![0f64; full + 1];
    let mut mean_out_degree = vec![0f64; full + 1];

    let mut dist_min = vec![0u32; n];
    let mut dist_max = vec![0u32; n];
    const UNREACHED: u32 = u32::MAX;

    for mask in 1..=full as u32 {
        let m = mask as usize;
        // Degrees. For node-labeled cells a degree feature asks how strongly
        // the admitted interior is wired, so an edge counts towards a node's
        // degree when its other endpoint is admitted.
        let mut in_deg = vec![0f64; n];
        let mut out_deg = vec![0f64; n];
        for (idx, &(s, d)) in cell.edges.iter().enumerate() {
            match placement {
                LabelPlacement::OnEdges => {
                    if edge_admissible(placement, &cell.labels, idx, d, mask) {
                        out_deg[s] += 1.0;
                        in_deg[d] += 1.0;
                    }
                }
                LabelPlacement::OnNodes => {
                    // Degree of s counts the edge when d is admitted and vice
                    // versa.
                    if edge_admissible(placement, &cell.labels, idx, d, mask) {
                        out_deg[s] += 1.0;
                    }
                    if edge_admissible(placement, &cell.labels, idx, s, mask) {
                        in_deg[d] += 1.0;
                    }
                }
            }
        }
        for (k, &inp) in inputs.iter().enumerate() {
            input_out_degree[k][m] = out_deg[inp];
        }
        output_in_degree[m] = in_deg[output];
        if intermediates.is_empty() {
            mean_in_degree[m] = 0.0;
            mean_out_degree[m] = 0.0;
        } else {
            mean_in_degree[m] =
                intermediates.iter().map(|&v| in_deg[v]).sum::<f64>() / intermediates.len() as f64;
            mean_out_degree[m] =
                intermediates.iter().map(|&v| out_deg[v]).sum::<f64>() / intermediates.len() as f64;
        }

        // Path lengths, one DP per input. Edges sorted by (src, dst) with
        // src < dst form a topological order, so a single pass settles both
        // the shortest and the longest distance.
        for (k, &inp) in inputs.iter().enumerate() {
            dist_min.fill(UNREACHED);
            dist_max.fill(UNREACHED);
            dist_min[inp] = 0;
            dist_max[inp] = 0;
            for (idx, &(s, d)) in cell.edges.iter().enumerate() {
                // A path may only *enter* an admitted node (or the output).
                let enter_ok = match placement {
                    LabelPlacement::OnEdges => {
                        edge_admissible(placement, &cell.labels, idx, d, mask)
                    }
                    LabelPlacement::OnNodes => {
                        d == output || edge_admissible(placement, &cell.labels, idx, d, mask)
                    }
                };
                if !enter_ok {
                    continue;
                }
                if dist_min[s] != UNREACHED {
                    dist_min[d] = dist_min[d].min(dist_min[s] + 1);
                }
                if dist_max[s] != UNREACHED {
                    let cand = dist_max[s] + 1;
                    if dist_max[d] == UNREACHED || cand > dist_max[d] {
                        dist_max[d] = cand;
                    }
                }
            }
            min_path[k][m] = if dist_min[output] == UNREACHED {
                sentinel
            } else {
                dist_min[output] as f64
            };
            max_path[k][m] = if dist_max[output] == UNREACHED {
                sentinel
            } else {
                dist_max[output] as f64
            };
        }
    }

    SubsetTables {
        min_path,
        max_path,
        input_out_degree,
        output_in_degree,
        mean_in_degree,
        mean_out_degree,
        op_counts,
    }
}

/// Extracts the graph features of one architecture (one value per schema
/// column, in schema order).
pub fn extract_micro(
    spec: &SearchSpaceSpec,
    schema: &FeatureSchema,
    cells: &[CellGraph],
) -> Result<Vec<f64>, FeatureError> {
    let cell_spec = spec.cells()?;
    if cells.len() != cell_spec.cells_per_arch {
        return Err(FeatureError::CellCountMismatch {
            got: cells.len(),
            want: cell_spec.cells_per_arch,
        });
    }
    for cell in cells {
        let report = validate_cell(cell_spec, cell);
        if let Some(first) = report.violations.into_iter().next() {
            return Err(SpaceError::InvalidCell(first).into());
        }
    }
    let tables: Vec<SubsetTables> = cells.iter().map(|c| subset_tables(cell_spec, c)).collect();
    let mut values = Vec::with_capacity(schema.features.len());
    for feat in &schema.features {
        let t = &tables[feat.cell_index];
        let v = match &feat.kind {
            FeatureKind::OpCount { op } => t.op_counts[*op],
            FeatureKind::MinPath { allowed, input } => t.min_path[*input][*allowed as usize],
            FeatureKind::MaxPath { allowed, input } => t.max_path[*input][*allowed as usize],
            FeatureKind::InputOutDegree { allowed, input } => {
                t.input_out_degree[*input][*allowed as usize]
            }
            FeatureKind::OutputInDegree { allowed } => t.output_in_degree[*allowed as usize],
            FeatureKind::MeanInDegree { allowed } => t.mean_in_degree[*allowed as usize],
            FeatureKind::MeanOutDegree { allowed } => t.mean_out_degree[*allowed as usize],
            _ => 0.0,
        };
        values.push(v);
    }
    Ok(values)
}

/// Extracts the macro features of one architecture (16 values, in
/// `macro_schema` order).
pub fn extract_macro(arch: &MacroArch) -> Result<Vec<f64>, FeatureError> {
    let n = arch.modules.len();
    if n > MACRO_MAX_MODULES {
        return Err(FeatureError::TooManyModules {
            got: n,
            max: MACRO_MAX_MODULES,
        });
    }
    let mut strides = Vec::with_capacity(MACRO_MAX_MODULES);
    let mut channels = Vec::with_capacity(MACRO_MAX_MODULES);
    let mut s = 0f64;
    let mut c = 0f64;
    for kind in &arch.modules {
        if kind.has_stride() {
            s += 1.0;
        }
        if kind.has_channel_increase() {
            c += 1.0;
        }
        strides.push(s);
        channels.push(c);
    }
    // Right-pad with the final cumulative value: a shorter network keeps its
    // final resolution/width from there on.
    while strides.len() < MACRO_MAX_MODULES {
        strides.push(s);
        channels.push(c);
    }
    let mut values = strides;
    values.extend(channels);
    for kind in ModuleKind::ALL {
        values.push(arch.modules.iter().filter(|&&m| m == kind).count() as f64);
    }
    Ok(values)
}
