//! Benchmark datasets and model-ready feature matrices.
//!
//! Datasets live in JSON-lines files: one architecture per line with its
//! graph (or macro) structure, measured targets, and optional zero-cost proxy
//! scores. Loading is strict — malformed lines, duplicate ids, unknown
//! operations, and missing targets or proxies are reported as errors with
//! enough context to find the offending record; nothing is imputed.
//!
//! A [`FeatureRecipe`] names which feature families feed a model and which
//! target(s) it predicts; [`assemble_matrix`] turns a dataset plus recipe
//! into a dense row-major matrix with stable column names.

use std::collections::BTreeMap;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{self, EncodingError};
use crate::features::{self, FeatureError, FeatureSchema};
use crate::space::{
    CellGraph, CellLabels, LabelPlacement, MacroArch, ModuleKind, SearchSpaceSpec, SpaceError,
    SpaceLayout,
};

/// Errors produced while loading, saving, or assembling datasets.
#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate arch_id `{id}`")]
    DuplicateArchId { id: String, line: usize },
    #[error("line {line}: record belongs to space `{got}`, expected `{want}`")]
    SpaceMismatch { line: usize, got: String, want: String },
    #[error("record `{id}`: {message}")]
    BadRecord { id: String, message: String },
    #[error("record `{id}`: unknown operation `{op}`")]
    UnknownOperation { id: String, op: String },
    #[error("record `{id}`: no target named `{target}`")]
    MissingTarget { id: String, target: String },
    #[error("record `{id}`: no proxy score named `{proxy}`")]
    MissingProxy { id: String, proxy: String },
    #[error("record `{id}`: proxy set differs from the first record ({detail})")]
    InconsistentProxies { id: String, detail: String },
    #[error("dataset has no records")]
    EmptyDataset,
    #[error("unknown feature family `{0}`")]
    UnknownFamily(String),
    #[error("a recipe needs at least one feature family")]
    EmptyRecipe,
    #[error("a recipe predicts one or two targets, got {0}")]
    BadTargetCount(usize),
    #[error("family `{family}` does not apply to space `{space}`")]
    FamilyNotApplicable { family: String, space: String },
    #[error("cannot split {n} rows into train={train}: need 1 <= train < n")]
    BadSplit { n: usize, train: usize },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}

/// Architecture structure: either labeled cells or a macro module sequence.
#[derive(Debug, Clone)]
pub enum ArchPayload {
    Cells(Vec<CellGraph>),
    Macro(MacroArch),
}

/// One benchmark entry.
#[derive(Debug, Clone)]
pub struct BenchmarkRecord {
    pub arch_id: String,
    pub payload: ArchPayload,
    /// Measured objectives, e.g. validation accuracy.
    pub targets: BTreeMap<String, f64>,
    /// Zero-cost proxy scores, possibly empty.
    pub zcp: BTreeMap<String, f64>,
}

/// A loaded benchmark: the space description plus its records.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub spec: SearchSpaceSpec,
    pub records: Vec<BenchmarkRecord>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Values of one target across the dataset, in record order.
    pub fn target_column(&self, name: &str) -> Result<Vec<f64>, DataError> {
        self.records
            .iter()
            .map(|r| {
                r.targets.get(name).copied().ok_or_else(|| DataError::MissingTarget {
                    id: r.arch_id.clone(),
                    target: name.to_string(),
                })
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct RawCell {
    edges: Vec<(usize, usize)>,
    labels: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawStructure {
    Graphs(Vec<RawCell>),
    Macro { r#macro: Vec<String> },
}

#[derive(Serialize, Deserialize)]
struct RawRecord {
    arch_id: String,
    space: String,
    cells: RawStructure,
    targets: BTreeMap<String, f64>,
    #[serde(default)]
    zcp: BTreeMap<String, f64>,
}

fn cell_from_raw(
    spec: &SearchSpaceSpec,
    id: &str,
    raw: &RawCell,
) -> Result<CellGraph, DataError> {
    let cells = spec.cells()?;
    let bad = |message: String| DataError::BadRecord {
        id: id.to_string(),
        message,
    };
    let num_nodes = match &cells.fixed_topology {
        Some(_) => cells.num_nodes,
        None => raw
            .edges
            .iter()
            .map(|&(s, d)| s.max(d) + 1)
            .max()
            .ok_or_else(|| bad("cell has no edges".into()))?,
    };
    match cells.label_placement {
        LabelPlacement::OnEdges => {
            let mut labeled = Vec::with_capacity(raw.edges.len());
            for &(s, d) in &raw.edges {
                let key = format!("{s}-{d}");
                let op_name = raw
                    .labels
                    .get(&key)
                    .ok_or_else(|| bad(format!("edge ({s}, {d}) has no label")))?;
                let op = cells
                    .op_index(op_name)
                    .ok_or_else(|| DataError::UnknownOperation {
                        id: id.to_string(),
                        op: op_name.clone(),
                    })?;
                labeled.push(((s, d), op));
            }
            if raw.labels.len() != raw.edges.len() {
                return Err(bad(format!(
                    "{} labels for {} edges",
                    raw.labels.len(),
                    raw.edges.len()
                )));
            }
            Ok(CellGraph::edge_labeled(num_nodes, labeled))
        }
        LabelPlacement::OnNodes => {
            let mut labels = vec![None; num_nodes];
            for (key, op_name) in &raw.labels {
                let node: usize = key
                    .parse()
                    .map_err(|_| bad(format!("label key `{key}` is not a node id")))?;
                if node >= num_nodes {
                    return Err(bad(format!("labeled node {node} is outside the cell")));
                }
                let op = cells
                    .op_index(op_name)
                    .ok_or_else(|| DataError::UnknownOperation {
                        id: id.to_string(),
                        op: op_name.clone(),
                    })?;
                labels[node] = Some(op);
            }
            Ok(CellGraph::node_labeled(num_nodes, raw.edges.clone(), labels))
        }
    }
}

fn cell_to_raw(spec: &SearchSpaceSpec, cell: &CellGraph) -> RawCell {
    let ops = &spec.cells().expect("cell payloads come from cell spaces").operations;
    let mut labels = BTreeMap::new();
    match &cell.labels {
        CellLabels::Edges(l) => {
            for (&(s, d), &op) in cell.edges.iter().zip(l) {
                labels.insert(format!("{s}-{d}"), ops[op].clone());
            }
        }
        CellLabels::Nodes(l) => {
            for (node, op) in l.iter().enumerate() {
                if let Some(op) = op {
                    labels.insert(node.to_string(), ops[*op].clone());
                }
            }
        }
    }
    RawCell {
        edges: cell.edges.clone(),
        labels,
    }
}

fn payload_from_raw(
    spec: &SearchSpaceSpec,
    id: &str,
    raw: &RawStructure,
) -> Result<ArchPayload, DataError> {
    match (&spec.layout, raw) {
        (SpaceLayout::Cells(cells), RawStructure::Graphs(raw_cells)) => {
            if raw_cells.len() != cells.cells_per_arch {
                return Err(DataError::BadRecord {
                    id: id.to_string(),
                    message: format!(
                        "{} cells for a space with {} per architecture",
                        raw_cells.len(),
                        cells.cells_per_arch
                    ),
                });
            }
            let parsed = raw_cells
                .iter()
                .map(|c| cell_from_raw(spec, id, c))
                .collect::<Result<Vec<_>, _>>()?;
            for cell in &parsed {
                let report = crate::space::validate_cell(cells, cell);
                if let Some(first) = report.violations.into_iter().next() {
                    return Err(DataError::BadRecord {
                        id: id.to_string(),
                        message: first,
                    });
                }
            }
            Ok(ArchPayload::Cells(parsed))
        }
        (SpaceLayout::Macro(m), RawStructure::Macro { r#macro }) => {
            let modules = r#macro
                .iter()
                .map(|name| {
                    ModuleKind::parse(name).ok_or_else(|| DataError::BadRecord {
                        id: id.to_string(),
                        message: format!("unknown module kind `{name}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let arch = MacroArch { modules };
            let report = crate::space::validate_macro(m, &arch);
            if let Some(first) = report.violations.into_iter().next() {
                return Err(DataError::BadRecord {
                    id: id.to_string(),
                    message: first,
                });
            }
            Ok(ArchPayload::Macro(arch))
        }
        _ => Err(DataError::BadRecord {
            id: id.to_string(),
            message: "structure kind does not match the space".into(),
        }),
    }
}

fn payload_to_raw(spec: &SearchSpaceSpec, payload: &ArchPayload) -> RawStructure {
    match payload {
        ArchPayload::Cells(cells) => {
            RawStructure::Graphs(cells.iter().map(|c| cell_to_raw(spec, c)).collect())
        }
        ArchPayload::Macro(arch) => RawStructure::Macro {
            r#macro: arch.modules.iter().map(|m| m.name().to_string()).collect(),
        },
    }
}

/// Reads a JSON-lines dataset, validating every record against `spec`.
pub fn load_dataset(path: &Path, spec: &SearchSpaceSpec) -> Result<Dataset, DataError> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut records = Vec::new();
    let mut seen = BTreeMap::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line).map_err(|e| DataError::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if raw.space != spec.name {
            return Err(DataError::SpaceMismatch {
                line: lineno,
                got: raw.space,
                want: spec.name.clone(),
            });
        }
        if let Some(_prev) = seen.insert(raw.arch_id.clone(), lineno) {
            return Err(DataError::DuplicateArchId {
                id: raw.arch_id,
                line: lineno,
            });
        }
        if raw.targets.is_empty() {
            return Err(DataError::BadRecord {
                id: raw.arch_id,
                message: "record has no targets".into(),
            });
        }
        for (name, value) in raw.targets.iter().chain(raw.zcp.iter()) {
            if !value.is_finite() {
                return Err(DataError::BadRecord {
                    id: raw.arch_id.clone(),
                    message: format!("`{name}` is not finite"),
                });
            }
        }
        let payload = payload_from_raw(spec, &raw.arch_id, &raw.cells)?;
        records.push(BenchmarkRecord {
            arch_id: raw.arch_id,
            payload,
            targets: raw.targets,
            zcp: raw.zcp,
        });
    }
    if records.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    Ok(Dataset {
        spec: spec.clone(),
        records,
    })
}

/// Writes a dataset as JSON lines (sorted maps, so output is byte-stable).
pub fn save_dataset(path: &Path, dataset: &Dataset) -> Result<(), DataError> {
    let file = std::fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    for record in &dataset.records {
        let raw = RawRecord {
            arch_id: record.arch_id.clone(),
            space: dataset.spec.name.clone(),
            cells: payload_to_raw(&dataset.spec, &record.payload),
            targets: record.targets.clone(),
            zcp: record.zcp.clone(),
        };
        serde_json::to_writer(&mut out, &raw).map_err(|e| DataError::Parse {
            line: 0,
            message: e.to_string(),
        })?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Feature families a recipe can combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Interpretable graph/macro features.
    Graf,
    /// One-hot operation + adjacency encoding.
    Onehot,
    /// Path encoding.
    Path,
    /// All zero-cost proxy columns a dataset carries.
    Zcp,
    /// The flops/params pair only.
    Fp,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Graf => "graf",
            Family::Onehot => "onehot",
            Family::Path => "path",
            Family::Zcp => "zcp",
            Family::Fp => "fp",
        }
    }

    pub fn parse(name: &str) -> Result<Family, DataError> {
        match name {
            "graf" => Ok(Family::Graf),
            "onehot" => Ok(Family::Onehot),
            "path" => Ok(Family::Path),
            "zcp" => Ok(Family::Zcp),
            "fp" => Ok(Family::Fp),
            other => Err(DataError::UnknownFamily(other.to_string())),
        }
    }
}

/// Which features feed a model and which target(s) it predicts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureRecipe {
    pub families: Vec<Family>,
    pub targets: Vec<String>,
}

impl FeatureRecipe {
    /// Parses a `+`-joined family list, e.g. `"zcp+graf"`. Families are
    /// deduplicated and put in canonical block order.
    pub fn parse(families: &str, targets: Vec<String>) -> Result<FeatureRecipe, DataError> {
        let mut parsed = Vec::new();
        for part in families.split('+') {
            let fam = Family::parse(part.trim())?;
            if !parsed.contains(&fam) {
                parsed.push(fam);
            }
        }
        parsed.sort();
        let recipe = FeatureRecipe {
            families: parsed,
            targets,
        };
        recipe.validate()?;
        Ok(recipe)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.families.is_empty() {
            return Err(DataError::EmptyRecipe);
        }
        if self.targets.is_empty() || self.targets.len() > 2 {
            return Err(DataError::BadTargetCount(self.targets.len()));
        }
        Ok(())
    }

    /// Canonical `+`-joined name of the family combination.
    pub fn family_label(&self) -> String {
        let mut families = self.families.clone();
        families.sort();
        families
            .iter()
            .map(|f| f.name())
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// A dense row-major feature matrix with named columns and target vectors.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub column_names: Vec<String>,
    pub values: Vec<f64>,
    pub n_rows: usize,
    pub n_cols: usize,
    /// One vector per recipe target, each `n_rows` long.
    pub targets: Vec<Vec<f64>>,
    pub target_names: Vec<String>,
    pub arch_ids: Vec<String>,
}

impl FeatureMatrix {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.values[i * self.n_cols + j]).collect()
    }

    /// Copies the listed rows (in the given order) into a new matrix.
    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        let mut values = Vec::with_capacity(rows.len() * self.n_cols);
        for &r in rows {
            values.extend_from_slice(self.row(r));
        }
        FeatureMatrix {
            column_names: self.column_names.clone(),
            values,
            n_rows: rows.len(),
            n_cols: self.n_cols,
            targets: self
                .targets
                .iter()
                .map(|t| rows.iter().map(|&r| t[r]).collect())
                .collect(),
            target_names: self.target_names.clone(),
            arch_ids: rows.iter().map(|&r| self.arch_ids[r].clone()).collect(),
        }
    }
}

/// The sorted proxy-column names of a dataset (taken from its first record).
fn zcp_columns(dataset: &Dataset) -> Result<Vec<String>, DataError> {
    let first = dataset.records.first().ok_or(DataError::EmptyDataset)?;
    Ok(first.zcp.keys().cloned().collect())
}

/// Builds the feature matrix for a dataset under a recipe.
///
/// Columns run family-blocks in canonical order (graf, onehot, path, zcp/fp),
/// rows follow dataset order. Every record must provide every named target
/// and every proxy column the recipe needs; missing values are errors, never
/// imputed.
pub fn assemble_matrix(
    dataset: &Dataset,
    recipe: &FeatureRecipe,
) -> Result<FeatureMatrix, DataError> {
    recipe.validate()?;
    if dataset.records.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let spec = &dataset.spec;
    let is_macro = matches!(spec.layout, SpaceLayout::Macro(_));

    // Resolve the layout of every requested family up front.
    let mut graf_schema: Option<FeatureSchema> = None;
    let mut onehot: Option<encoding::OneHotLayout> = None;
    let mut path: Option<encoding::PathLayout> = None;
    let mut proxy_cols: Option<Vec<String>> = None;
    let mut column_names = Vec::new();
    let mut families = recipe.families.clone();
    families.sort();
    for family in &families {
        match family {
            Family::Graf => {
                let schema = features::schema_for(spec)?;
                column_names.extend(schema.names());
                graf_schema = Some(schema);
            }
            Family::Onehot => {
                if is_macro {
                    return Err(DataError::FamilyNotApplicable {
                        family: "onehot".into(),
                        space: spec.name.clone(),
                    });
                }
                let example = match &dataset.records[0].payload {
                    ArchPayload::Cells(cells) => Some(cells.as_slice()),
                    ArchPayload::Macro(_) => None,
                };
                let layout = encoding::onehot_layout(spec, example)?;
                column_names.extend(layout.names(&spec.cells()?.operations));
                onehot = Some(layout);
            }
            Family::Path => {
                if is_macro {
                    return Err(DataError::FamilyNotApplicable {
                        family: "path".into(),
                        space: spec.name.clone(),
                    });
                }
                let layout = encoding::path_layout(spec)?;
                column_names.extend(layout.names(&spec.cells()?.operations));
                path = Some(layout);
            }
            Family::Zcp => {
                let cols = zcp_columns(dataset)?;
                if cols.is_empty() {
                    return Err(DataError::MissingProxy {
                        id: dataset.records[0].arch_id.clone(),
                        proxy: "(any)".into(),
                    });
                }
                column_names.extend(cols.iter().cloned());
                proxy_cols = Some(cols);
            }
            Family::Fp => {
                // The zcp block (which sorts before fp) already carries every
                // proxy column, flops/params included; adding them again
                // would duplicate columns.
                if proxy_cols.is_none() {
                    let cols = vec!["flops".to_string(), "params".to_string()];
                    column_names.extend(cols.iter().cloned());
                    proxy_cols = Some(cols);
                }
            }
        }
    }

    let n_cols = column_names.len();
    let n_rows = dataset.records.len();
    let mut values = Vec::with_capacity(n_rows * n_cols);
    for record in &dataset.records {
        let row_start = values.len();
        if let Some(schema) = &graf_schema {
            match &record.payload {
                ArchPayload::Cells(cells) => {
                    values.extend(features::extract_micro(spec, schema, cells)?)
                }
                ArchPayload::Macro(arch) => values.extend(features::extract_macro(arch)?),
            }
        }
        if let Some(layout) = &onehot {
            let ArchPayload::Cells(cells) = &record.payload else {
                unreachable!("checked above");
            };
            values.extend(encoding::encode_onehot(spec, layout, cells)?);
        }
        if let Some(layout) = &path {
            let ArchPayload::Cells(cells) = &record.payload else {
                unreachable!("checked above");
            };
            values.extend(encoding::encode_paths(spec, layout, cells)?);
        }
        if let Some(cols) = &proxy_cols {
            if families.contains(&Family::Zcp) && record.zcp.len() != cols.len() {
                return Err(DataError::InconsistentProxies {
                    id: record.arch_id.clone(),
                    detail: format!("{} proxies, expected {}", record.zcp.len(), cols.len()),
                });
            }
            for name in cols {
                let v = record.zcp.get(name).ok_or_else(|| DataError::MissingProxy {
                    id: record.arch_id.clone(),
                    proxy: name.clone(),
                })?;
                values.push(*v);
            }
        }
        debug_assert_eq!(values.len() - row_start, n_cols);
    }

    let mut targets = Vec::with_capacity(recipe.targets.len());
    for name in &recipe.targets {
        targets.push(dataset.target_column(name)?);
    }
    Ok(FeatureMatrix {
        column_names,
        values,
        n_rows,
        n_cols,
        targets,
        target_names: recipe.targets.clone(),
        arch_ids: dataset.records.iter().map(|r| r.arch_id.clone()).collect(),
    })
}

/// Draws a deterministic train/test split of `0..n`.
///
/// Both halves come back sorted ascending. The split depends only on `n`,
/// `train`, and `seed`.
pub fn sample_split(n: usize, train: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>), DataError> {
    if train == 0 || train >= n {
        return Err(DataError::BadSplit { n, train });
    }
    let mut rng = crate::seed::rng(seed, "train-test-split");
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..train {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
    }
    let mut train_idx = idx[..train].to_vec();
    let mut test_idx = idx[train..].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((train_idx, test_idx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::builtin;

    fn nb201_record(id: &str, ops: [&str; 6], acc: f64) -> String {
        let labels: Vec<String> = [
            ("0-1", ops[0]),
            ("0-2", ops[1]),
            ("0-3", ops[2]),
            ("1-2", ops[3]),
            ("1-3", ops[4]),
            ("2-3", ops[5]),
        ]
        .iter()
        .map(|(k, v)| format!("\"{k}\":\"{v}\""))
        .collect();
        format!(
            "{{\"arch_id\":\"{id}\",\"space\":\"nb201_like\",\"cells\":[{{\"edges\":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]],\"labels\":{{{}}}}}],\"targets\":{{\"val_acc\":{acc}}},\"zcp\":{{\"flops\":3.0,\"nwot\":1.5,\"params\":2.0,\"plain\":0.25}}}}",
            labels.join(",")
        )
    }

    fn write_lines(lines: &[String]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for line in lines {
            writeln!(f, "{line}").unwrap();
        }
        f.flush().unwrap();
        f
    }

    #[test]
    fn load_save_roundtrip_is_byte_stable() {
        let spec = builtin("nb201_like").unwrap();
        let file = write_lines(&[
            nb201_record("a", ["skip"; 6], 0.91),
            nb201_record("b", ["conv3x3", "skip", "zero", "conv1x1", "avgpool3x3", "conv3x3"], 0.87),
        ]);
        let ds = load_dataset(file.path(), &spec).unwrap();
        assert_eq!(ds.len(), 2);

        let out = tempfile::NamedTempFile::new().unwrap();
        save_dataset(out.path(), &ds).unwrap();
        let text1 = std::fs::read_to_string(out.path()).unwrap();
        let ds2 = load_dataset(out.path(), &spec).unwrap();
        let out2 = tempfile::NamedTempFile::new().unwrap();
        save_dataset(out2.path(), &ds2).unwrap();
        let text2 = std::fs::read_to_string(out2.path()).unwrap();
        assert_eq!(text1, text2);
        assert_eq!(ds2.records[1].targets["val_acc"], 0.87);
    }

    #[test]
    fn loader_reports_line_numbers_and_duplicates() {
        let spec = builtin("nb201_like").unwrap();
        let file = write_lines(&[
            nb201_record("a", ["skip"; 6], 0.91),
            "{not json".to_string(),
        ]);
        match load_dataset(file.path(), &spec) {
            Err(DataError::Parse { line: 2, .. }) => {}
            other => panic!("expected a parse error on line 2, got {other:?}"),
        }

        let file = write_lines(&[
            nb201_record("a", ["skip"; 6], 0.91),
            nb201_record("a", ["conv3x3"; 6], 0.85),
        ]);
        match load_dataset(file.path(), &spec) {
            Err(DataError::DuplicateArchId { id, line: 2 }) => assert_eq!(id, "a"),
            other => panic!("expected a duplicate id error, got {other:?}"),
        }
    }

    #[test]
    fn loader_rejects_unknown_ops_and_empty_targets() {
        let spec = builtin("nb201_like").unwrap();
        let file = write_lines(&[nb201_record("a", ["warp"; 6], 0.9)]);
        assert!(matches!(
            load_dataset(file.path(), &spec),
            Err(DataError::UnknownOperation { .. })
        ));

        let line = nb201_record("a", ["skip"; 6], 0.9).replace("{\"val_acc\":0.9}", "{}");
        let file = write_lines(&[line]);
        assert!(matches!(
            load_dataset(file.path(), &spec),
            Err(DataError::BadRecord { .. })
        ));
    }

    #[test]
    fn recipe_parsing_normalizes_families() {
        let r = FeatureRecipe::parse("zcp+graf", vec!["val_acc".into()]).unwrap();
        assert_eq!(r.families, vec![Family::Graf, Family::Zcp]);
        assert_eq!(r.family_label(), "graf+zcp");
        assert!(matches!(
            FeatureRecipe::parse("graf+huh", vec!["val_acc".into()]),
            Err(DataError::UnknownFamily(_))
        ));
        assert!(matches!(
            FeatureRecipe::parse("graf", vec![]),
            Err(DataError::BadTargetCount(0))
        ));
        assert!(matches!(
            FeatureRecipe::parse("graf", vec!["a".into(), "b".into(), "c".into()]),
            Err(DataError::BadTargetCount(3))
        ));
    }

    #[test]
    fn assembled_blocks_compose() {
        let spec = builtin("nb201_like").unwrap();
        let file = write_lines(&[
            nb201_record("a", ["skip"; 6], 0.91),
            nb201_record("b", ["conv3x3", "skip", "zero", "conv1x1", "avgpool3x3", "conv3x3"], 0.87),
            nb201_record("c", ["conv1x1"; 6], 0.88),
        ]);
        let ds = load_dataset(file.path(), &spec).unwrap();

        let graf = assemble_matrix(&ds, &FeatureRecipe::parse("graf", vec!["val_acc".into()]).unwrap()).unwrap();
        assert_eq!(graf.n_cols, 191);
        assert_eq!(graf.n_rows, 3);
        assert_eq!(graf.targets[0], vec![0.91, 0.87, 0.88]);

        let zcp = assemble_matrix(&ds, &FeatureRecipe::parse("zcp", vec!["val_acc".into()]).unwrap()).unwrap();
        assert_eq!(zcp.column_names, vec!["flops", "nwot", "params", "plain"]);

        let fp = assemble_matrix(&ds, &FeatureRecipe::parse("fp", vec!["val_acc".into()]).unwrap()).unwrap();
        assert_eq!(fp.column_names, vec!["flops", "params"]);
        assert_eq!(fp.row(0), &[3.0, 2.0]);

        let combo = assemble_matrix(&ds, &FeatureRecipe::parse("graf+zcp+onehot", vec!["val_acc".into()]).unwrap()).unwrap();
        assert_eq!(combo.n_cols, 191 + 46 + 4);
        // Family blocks keep canonical order: graf, onehot, zcp.
        assert_eq!(combo.column_names[0], "op_count(zero)");
        assert_eq!(combo.column_names[191], "onehot(edge0-1,zero)");
        assert_eq!(combo.column_names[191 + 46], "flops");
        // Row content matches the single-family assemblies.
        assert_eq!(&combo.row(1)[..191], graf.row(1));
        assert_eq!(&combo.row(1)[191 + 46..], zcp.row(1));
    }

    #[test]
    fn assembly_rejects_missing_columns() {
        let spec = builtin("nb201_like").unwrap();
        let missing_target = write_lines(&[
            nb201_record("a", ["skip"; 6], 0.91),
        ]);
        let ds = load_dataset(missing_target.path(), &spec).unwrap();
        let recipe = FeatureRecipe::parse("graf", vec!["latency".into()]).unwrap();
        assert!(matches!(
            assemble_matrix(&ds, &recipe),
            Err(DataError::MissingTarget { .. })
        ));

        // A record whose proxy set differs from the first one.
        let line_a = nb201_record("a", ["skip"; 6], 0.91);
        let line_b = nb201_record("b", ["conv3x3"; 6], 0.9)
            .replace(",\"plain\":0.25", "");
        let ds = load_dataset(write_lines(&[line_a, line_b]).path(), &spec).unwrap();
        let recipe = FeatureRecipe::parse("zcp", vec!["val_acc".into()]).unwrap();
        assert!(matches!(
            assemble_matrix(&ds, &recipe),
            Err(DataError::InconsistentProxies { .. })
        ));
    }

    #[test]
    fn macro_records_roundtrip_and_assemble() {
        let spec = builtin("tnb_macro").unwrap();
        let line = "{\"arch_id\":\"m0\",\"space\":\"tnb_macro\",\"cells\":{\"macro\":[\"normal\",\"strided\",\"strided_and_channel\",\"normal\"]},\"targets\":{\"val_acc\":0.8},\"zcp\":{}}";
        let ds = load_dataset(write_lines(&[line.to_string()]).path(), &spec).unwrap();
        let m = assemble_matrix(&ds, &FeatureRecipe::parse("graf", vec!["val_acc".into()]).unwrap()).unwrap();
        assert_eq!(m.n_cols, 16);
        assert_eq!(&m.row(0)[..6], &[0.0, 1.0, 2.0, 2.0, 2.0, 2.0]);

        // Cell encodings make no sense for macro architectures.
        assert!(matches!(
            assemble_matrix(&ds, &FeatureRecipe::parse("onehot", vec!["val_acc".into()]).unwrap()),
            Err(DataError::FamilyNotApplicable { .. })
        ));
    }

    #[test]
    fn split_is_deterministic_and_partitions() {
        let (tr1, te1) = sample_split(100, 32, 7).unwrap();
        let (tr2, te2) = sample_split(100, 32, 7).unwrap();
        assert_eq!(tr1, tr2);
        assert_eq!(te1, te2);
        assert_eq!(tr1.len(), 32);
        assert_eq!(te1.len(), 68);
        let mut all: Vec<usize> = tr1.iter().chain(te1.iter()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());

        let (tr3, _) = sample_split(100, 32, 8).unwrap();
        assert_ne!(tr1, tr3);

        assert!(matches!(sample_split(10, 0, 1), Err(DataError::BadSplit { .. })));
        assert!(matches!(sample_split(10, 10, 1), Err(DataError::BadSplit { .. })));
    }
}
