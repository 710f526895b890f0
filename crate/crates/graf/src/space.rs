//! Search-space descriptions and cell graphs.
//!
//! A search space is either *cell-based* (architectures are one or more small
//! labeled DAGs) or *macro-level* (architectures are sequences of module
//! kinds). Cell-based spaces label either edges or nodes with operation names
//! drawn from a fixed ordered vocabulary; node ids are topologically ordered,
//! so every edge runs from a lower id to a higher id.
//!
//! Besides the plain data types, this module provides structural validation,
//! detection and pruning of elements that cannot influence the output (because
//! every route to them passes through a `zero` operation), and exhaustive
//! enumeration of spaces with a fixed wiring.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Errors produced by search-space handling.
#[derive(Debug, thiserror::Error)]
pub enum SpaceError {
    #[error("invalid search-space description: {0}")]
    InvalidSpec(String),
    #[error("invalid cell: {0}")]
    InvalidCell(String),
    #[error("no builtin search space named `{0}`")]
    UnknownBuiltin(String),
    #[error("space `{0}` cannot be enumerated: {1}")]
    NotEnumerable(String, String),
    #[error("enumeration of `{name}` has {total} assignments, above the cap of {cap}")]
    EnumerationTooLarge { name: String, total: u128, cap: u64 },
    #[error("expected a {expected} space, got `{name}`")]
    WrongLayout { expected: &'static str, name: String },
}

/// Where operation labels live in a cell graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelPlacement {
    OnEdges,
    OnNodes,
}

/// Module kinds available to macro-level architectures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleKind {
    Normal,
    Strided,
    ChannelIncrease,
    StridedAndChannel,
}

impl ModuleKind {
    pub const ALL: [ModuleKind; 4] = [
        ModuleKind::Normal,
        ModuleKind::Strided,
        ModuleKind::ChannelIncrease,
        ModuleKind::StridedAndChannel,
    ];

    /// Whether the module halves spatial resolution.
    pub fn has_stride(self) -> bool {
        matches!(self, ModuleKind::Strided | ModuleKind::StridedAndChannel)
    }

    /// Whether the module increases the channel count.
    pub fn has_channel_increase(self) -> bool {
        matches!(self, ModuleKind::ChannelIncrease | ModuleKind::StridedAndChannel)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModuleKind::Normal => "normal",
            ModuleKind::Strided => "strided",
            ModuleKind::ChannelIncrease => "channel_increase",
            ModuleKind::StridedAndChannel => "strided_and_channel",
        }
    }

    pub fn parse(name: &str) -> Option<ModuleKind> {
        ModuleKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Description of a cell-based search space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellSpaceSpec {
    /// Operation vocabulary, in a fixed order that feature schemas depend on.
    pub operations: Vec<String>,
    pub label_placement: LabelPlacement,
    /// Maximum number of nodes in a cell. Spaces with a fixed wiring always
    /// use exactly this many.
    pub num_nodes: usize,
    /// Fixed wiring shared by every cell, as `(src, dst)` pairs sorted
    /// ascending, or `None` when cells choose their own edges.
    pub fixed_topology: Option<Vec<(usize, usize)>>,
    /// Node ids that receive the cell input(s).
    pub input_nodes: Vec<usize>,
    /// Node id that produces the cell output.
    pub output_node: usize,
    /// Name of the operation that blocks signal flow, if the vocabulary has
    /// one.
    pub zero_op: Option<String>,
    /// How many (independently labeled) cells one architecture carries.
    pub cells_per_arch: usize,
    /// Whether shortest-path features are meaningful for this space.
    pub compute_min_path: bool,
}

impl CellSpaceSpec {
    /// Index of an operation name in the vocabulary.
    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.operations.iter().position(|o| o == name)
    }

    /// Index of the zero operation, if the space has one.
    pub fn zero_index(&self) -> Option<usize> {
        self.zero_op.as_deref().and_then(|z| self.op_index(z))
    }

    /// Number of labeled elements a fully specified cell carries.
    pub fn elements_per_cell(&self) -> Option<usize> {
        match self.label_placement {
            LabelPlacement::OnEdges => self.fixed_topology.as_ref().map(|t| t.len()),
            LabelPlacement::OnNodes => None,
        }
    }
}

/// Description of a macro-level search space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MacroSpaceSpec {
    pub min_modules: usize,
    pub max_modules: usize,
}

/// The two families of search spaces.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceLayout {
    Cells(CellSpaceSpec),
    Macro(MacroSpaceSpec),
}

/// A named search space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchSpaceSpec {
    pub name: String,
    #[serde(flatten)]
    pub layout: SpaceLayout,
}

impl SearchSpaceSpec {
    /// The cell-space description, or an error for macro spaces.
    pub fn cells(&self) -> Result<&CellSpaceSpec, SpaceError> {
        match &self.layout {
            SpaceLayout::Cells(c) => Ok(c),
            SpaceLayout::Macro(_) => Err(SpaceError::WrongLayout {
                expected: "cell-based",
                name: self.name.clone(),
            }),
        }
    }

    /// The macro-space description, or an error for cell spaces.
    pub fn macro_space(&self) -> Result<&MacroSpaceSpec, SpaceError> {
        match &self.layout {
            SpaceLayout::Macro(m) => Ok(m),
            SpaceLayout::Cells(_) => Err(SpaceError::WrongLayout {
                expected: "macro-level",
                name: self.name.clone(),
            }),
        }
    }
}

/// Operation labels of one cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellLabels {
    /// One operation index per edge, parallel to `CellGraph::edges`.
    Edges(Vec<usize>),
    /// One optional operation index per node; inputs and the output carry no
    /// label.
    Nodes(Vec<Option<usize>>),
}

/// One labeled DAG.
///
/// Edges are stored sorted by `(src, dst)` and node ids are topological:
/// `src < dst` for every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellGraph {
    pub num_nodes: usize,
    pub edges: Vec<(usize, usize)>,
    pub labels: CellLabels,
}

impl CellGraph {
    /// Builds an edge-labeled cell, sorting edges (with their labels) by
    /// `(src, dst)`.
    pub fn edge_labeled(num_nodes: usize, mut edges: Vec<((usize, usize), usize)>) -> CellGraph {
        edges.sort_by_key(|&(e, _)| e);
        let (edges, labels): (Vec<_>, Vec<_>) = edges.into_iter().unzip();
        CellGraph {
            num_nodes,
            edges,
            labels: CellLabels::Edges(labels),
        }
    }

    /// Builds a node-labeled cell, sorting edges by `(src, dst)`.
    pub fn node_labeled(
        num_nodes: usize,
        mut edges: Vec<(usize, usize)>,
        labels: Vec<Option<usize>>,
    ) -> CellGraph {
        edges.sort_unstable();
        CellGraph {
            num_nodes,
            edges,
            labels: CellLabels::Nodes(labels),
        }
    }

    /// The label of the edge at position `idx`, for edge-labeled cells.
    pub fn edge_label(&self, idx: usize) -> Option<usize> {
        match &self.labels {
            CellLabels::Edges(l) => l.get(idx).copied(),
            CellLabels::Nodes(_) => None,
        }
    }
}

/// One macro-level architecture: an ordered sequence of module kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroArch {
    pub modules: Vec<ModuleKind>,
}

/// Result of structural validation; an empty report means the cell is valid.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, msg: String) {
        self.violations.push(msg);
    }
}

/// Checks internal consistency of a space description.
pub fn validate_spec(spec: &SearchSpaceSpec) -> Result<(), SpaceError> {
    match &spec.layout {
        SpaceLayout::Macro(m) => {
            if m.min_modules == 0 || m.min_modules > m.max_modules {
                return Err(SpaceError::InvalidSpec(format!(
                    "macro space `{}` has empty module-count range {}..={}",
                    spec.name, m.min_modules, m.max_modules
                )));
            }
            Ok(())
        }
        SpaceLayout::Cells(c) => {
            let fail = |msg: String| Err(SpaceError::InvalidSpec(format!("`{}`: {msg}", spec.name)));
            if c.operations.is_empty() {
                return fail("operation vocabulary is empty".into());
            }
            let unique: BTreeSet<_> = c.operations.iter().collect();
            if unique.len() != c.operations.len() {
                return fail("operation vocabulary has duplicates".into());
            }
            if c.num_nodes < 2 {
                return fail(format!("num_nodes = {} is below 2", c.num_nodes));
            }
            if c.input_nodes.is_empty() {
                return fail("no input nodes".into());
            }
            for &i in &c.input_nodes {
                if i >= c.num_nodes {
                    return fail(format!("input node {i} out of range"));
                }
            }
            if c.output_node >= c.num_nodes {
                return fail(format!("output node {} out of range", c.output_node));
            }
            if c.input_nodes.contains(&c.output_node) {
                return fail("output node is also an input".into());
            }
            if let Some(z) = &c.zero_op {
                if c.op_index(z).is_none() {
                    return fail(format!("zero op `{z}` is not in the vocabulary"));
                }
            }
            if c.cells_per_arch == 0 {
                return fail("cells_per_arch is zero".into());
            }
            if let Some(topo) = &c.fixed_topology {
                if topo.is_empty() {
                    return fail("fixed topology has no edges".into());
                }
                let mut prev: Option<(usize, usize)> = None;
                for &(s, d) in topo {
                    if s >= d {
                        return fail(format!("fixed edge ({s}, {d}) is not topological"));
                    }
                    if d >= c.num_nodes {
                        return fail(format!("fixed edge ({s}, {d}) out of range"));
                    }
                    if let Some(p) = prev {
                        if p >= (s, d) {
                            return fail("fixed topology is not sorted and unique".into());
                        }
                    }
                    prev = Some((s, d));
                }
                if c.label_placement == LabelPlacement::OnNodes {
                    return fail("fixed topology with node labels is not supported".into());
                }
            }
            Ok(())
        }
    }
}

/// Checks one cell against its space description.
///
/// Returns a report listing every violation found rather than stopping at the
/// first, so callers can surface all problems with a record at once.
pub fn validate_cell(spec: &CellSpaceSpec, cell: &CellGraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    if let Some(topo) = &spec.fixed_topology {
        if cell.num_nodes != spec.num_nodes {
            report.push(format!(
                "cell has {} nodes, the space wiring requires exactly {}",
                cell.num_nodes, spec.num_nodes
            ));
        }
        if &cell.edges != topo {
            report.push("cell edges do not match the space's fixed wiring".into());
        }
    } else {
        if cell.num_nodes < 2 || cell.num_nodes > spec.num_nodes {
            report.push(format!(
                "cell has {} nodes, expected between 2 and {}",
                cell.num_nodes, spec.num_nodes
            ));
        }
    }
    let mut prev: Option<(usize, usize)> = None;
    for &(s, d) in &cell.edges {
        if s >= d {
            report.push(format!("edge ({s}, {d}) is not topological (src < dst)"));
        }
        if d >= cell.num_nodes {
            report.push(format!("edge ({s}, {d}) points outside the cell"));
        }
        if let Some(p) = prev {
            if p == (s, d) {
                report.push(format!("duplicate edge ({s}, {d})"));
            }
        }
        prev = Some((s, d));
    }
    let num_ops = spec.operations.len();
    match (&cell.labels, spec.label_placement) {
        (CellLabels::Edges(labels), LabelPlacement::OnEdges) => {
            if labels.len() != cell.edges.len() {
                report.push(format!(
                    "{} edge labels for {} edges",
                    labels.len(),
                    cell.edges.len()
                ));
            }
            for (i, &op) in labels.iter().enumerate() {
                if op >= num_ops {
                    report.push(format!("edge {i} has operation index {op}, vocabulary has {num_ops}"));
                }
            }
        }
        (CellLabels::Nodes(labels), LabelPlacement::OnNodes) => {
            if labels.len() != cell.num_nodes {
                report.push(format!(
                    "{} node labels for {} nodes",
                    labels.len(),
                    cell.num_nodes
                ));
            }
            for (node, lab) in labels.iter().enumerate() {
                let is_io = spec.input_nodes.contains(&node)
                    || node == cell.num_nodes.saturating_sub(1);
                match lab {
                    Some(op) if *op >= num_ops => {
                        report.push(format!(
                            "node {node} has operation index {op}, vocabulary has {num_ops}"
                        ));
                    }
                    Some(_) if is_io => {
                        report.push(format!("input/output node {node} must not carry a label"));
                    }
                    None if !is_io && node < cell.num_nodes => {
                        report.push(format!("interior node {node} is missing a label"));
                    }
                    _ => {}
                }
            }
        }
        _ => report.push("label placement does not match the space description".into()),
    }
    report
}

/// Elements of a cell that cannot influence its output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnreachableSet {
    /// `(src, dst)` pairs, for edge-labeled cells.
    Edges(BTreeSet<(usize, usize)>),
    /// Node ids, for node-labeled cells.
    Nodes(BTreeSet<usize>),
}

impl UnreachableSet {
    pub fn is_empty(&self) -> bool {
        match self {
            UnreachableSet::Edges(s) => s.is_empty(),
            UnreachableSet::Nodes(s) => s.is_empty(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            UnreachableSet::Edges(s) => s.len(),
            UnreachableSet::Nodes(s) => s.len(),
        }
    }
}

fn ensure_valid(spec: &CellSpaceSpec, cell: &CellGraph) -> Result<(), SpaceError> {
    let report = validate_cell(spec, cell);
    if let Some(first) = report.violations.first() {
        return Err(SpaceError::InvalidCell(first.clone()));
    }
    Ok(())
}

/// Finds labeled elements that no signal from an input can both reach and
/// leave towards the output, treating the zero operation as absent wiring.
///
/// Spaces without a zero operation have no removable elements, so the result
/// is empty by definition.
pub fn find_unreachable(
    spec: &CellSpaceSpec,
    cell: &CellGraph,
) -> Result<UnreachableSet, SpaceError> {
    ensure_valid(spec, cell)?;
    let empty = match spec.label_placement {
        LabelPlacement::OnEdges => UnreachableSet::Edges(BTreeSet::new()),
        LabelPlacement::OnNodes => UnreachableSet::Nodes(BTreeSet::new()),
    };
    let Some(zero) = spec.zero_index() else {
        return Ok(empty);
    };
    let n = cell.num_nodes;
    let output = n - 1;
    match &cell.labels {
        CellLabels::Edges(labels) => {
            // Forward reachability from the inputs and backward reachability
            // from the output, both over non-zero edges only.
            let mut fwd = vec![false; n];
            for &i in &spec.input_nodes {
                if i < n {
                    fwd[i] = true;
                }
            }
            // Edges are sorted by (src, dst) and src < dst, so one pass in
            // edge order settles forward reachability; a reverse pass settles
            // backward reachability.
            let mut bwd = vec![false; n];
            bwd[output] = true;
            for (&(s, d), &op) in cell.edges.iter().zip(labels) {
                if op != zero && fwd[s] {
                    fwd[d] = true;
                }
            }
            for (&(s, d), &op) in cell.edges.iter().zip(labels).rev() {
                if op != zero && bwd[d] {
                    bwd[s] = true;
                }
            }
            let mut out = BTreeSet::new();
            for (&(s, d), &op) in cell.edges.iter().zip(labels) {
                if op != zero && !(fwd[s] && bwd[d]) {
                    out.insert((s, d));
                }
            }
            Ok(UnreachableSet::Edges(out))
        }
        CellLabels::Nodes(labels) => {
            // A node with the zero label drops out of the wiring entirely.
            let present =
                |v: usize| -> bool { !matches!(labels.get(v), Some(Some(op)) if *op == zero) };
            let mut fwd = vec![false; n];
            for &i in &spec.input_nodes {
                if i < n && present(i) {
                    fwd[i] = true;
                }
            }
            let mut bwd = vec![false; n];
            if present(output) {
                bwd[output] = true;
            }
            for &(s, d) in &cell.edges {
                if fwd[s] && present(d) {
                    fwd[d] = true;
                }
            }
            for &(s, d) in cell.edges.iter().rev() {
                if bwd[d] && present(s) {
                    bwd[s] = true;
                }
            }
            let mut out = BTreeSet::new();
            for (v, lab) in labels.iter().enumerate() {
                if let Some(op) = lab {
                    if *op != zero && !(fwd[v] && bwd[v]) {
                        out.insert(v);
                    }
                }
            }
            Ok(UnreachableSet::Nodes(out))
        }
    }
}

/// Whether a cell has no unreachable elements.
///
/// A cell whose every element is the zero operation is well-formed: nothing
/// remains that could be unreachable.
pub fn is_well_formed(spec: &CellSpaceSpec, cell: &CellGraph) -> Result<bool, SpaceError> {
    Ok(find_unreachable(spec, cell)?.is_empty())
}

/// Rewrites unreachable elements to the zero operation, leaving the wiring
/// untouched. Identity for spaces without a zero operation.
pub fn prune_unreachable(spec: &CellSpaceSpec, cell: &CellGraph) -> Result<CellGraph, SpaceError> {
    let unreachable = find_unreachable(spec, cell)?;
    let Some(zero) = spec.zero_index() else {
        return Ok(cell.clone());
    };
    let mut pruned = cell.clone();
    match (&mut pruned.labels, &unreachable) {
        (CellLabels::Edges(labels), UnreachableSet::Edges(dead)) => {
            for (i, &(s, d)) in cell.edges.iter().enumerate() {
                if dead.contains(&(s, d)) {
                    labels[i] = zero;
                }
            }
        }
        (CellLabels::Nodes(labels), UnreachableSet::Nodes(dead)) => {
            for &v in dead {
                labels[v] = Some(zero);
            }
        }
        _ => unreachable!("label placement already validated"),
    }
    Ok(pruned)
}

/// Default cap on the number of label assignments `enumerate_cells` will
/// walk.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 22;

/// Iterator over every cell of a fixed-wiring space, in lexicographic label
/// order (the first edge is the most significant digit).
pub struct CellEnumerator {
    spec: CellSpaceSpec,
    next_index: u64,
    total: u64,
    well_formed_only: bool,
}

impl CellEnumerator {
    /// Total number of label assignments, before any well-formedness filter.
    pub fn assignment_count(&self) -> u64 {
        self.total
    }
}

impl Iterator for CellEnumerator {
    type Item = CellGraph;

    fn next(&mut self) -> Option<CellGraph> {
        while self.next_index < self.total {
            let cell = cell_from_assignment_index(&self.spec, self.next_index);
            self.next_index += 1;
            if !self.well_formed_only
                || is_well_formed(&self.spec, &cell).expect("enumerated cells are valid")
            {
                return Some(cell);
            }
        }
        None
    }
}

/// Decodes a lexicographic assignment index into a cell of a fixed-wiring
/// space.
pub fn cell_from_assignment_index(spec: &CellSpaceSpec, index: u64) -> CellGraph {
    let topo = spec
        .fixed_topology
        .as_ref()
        .expect("assignment indices require a fixed wiring");
    let base = spec.operations.len() as u64;
    let mut labels = vec![0usize; topo.len()];
    let mut rest = index;
    for slot in (0..topo.len()).rev() {
        labels[slot] = (rest % base) as usize;
        rest /= base;
    }
    CellGraph {
        num_nodes: spec.num_nodes,
        edges: topo.clone(),
        labels: CellLabels::Edges(labels),
    }
}

/// Encodes a cell of a fixed-wiring space back into its lexicographic
/// assignment index.
pub fn assignment_index(spec: &CellSpaceSpec, cell: &CellGraph) -> Result<u64, SpaceError> {
    ensure_valid(spec, cell)?;
    let CellLabels::Edges(labels) = &cell.labels else {
        return Err(SpaceError::InvalidCell(
            "assignment indices require edge labels".into(),
        ));
    };
    let base = spec.operations.len() as u64;
    let mut index = 0u64;
    for &op in labels {
        index = index * base + op as u64;
    }
    Ok(index)
}

/// Enumerates every cell of a space with a fixed wiring, optionally keeping
/// only well-formed cells, with the default assignment cap.
pub fn enumerate_cells(
    spec: &SearchSpaceSpec,
    well_formed_only: bool,
) -> Result<CellEnumerator, SpaceError> {
    enumerate_cells_with_cap(spec, well_formed_only, DEFAULT_ENUMERATION_CAP)
}

/// Enumerates every cell of a space with a fixed wiring, refusing spaces
/// whose assignment count exceeds `cap`.
pub fn enumerate_cells_with_cap(
    spec: &SearchSpaceSpec,
    well_formed_only: bool,
    cap: u64,
) -> Result<CellEnumerator, SpaceError> {
    validate_spec(spec)?;
    let cells = spec.cells()?;
    let Some(topo) = &cells.fixed_topology else {
        return Err(SpaceError::NotEnumerable(
            spec.name.clone(),
            "the space has no fixed wiring".into(),
        ));
    };
    let total = (cells.operations.len() as u128).pow(topo.len() as u32);
    if total > cap as u128 {
        return Err(SpaceError::EnumerationTooLarge {
            name: spec.name.clone(),
            total,
            cap,
        });
    }
    Ok(CellEnumerator {
        spec: cells.clone(),
        next_index: 0,
        total: total as u64,
        well_formed_only,
    })
}

fn four_node_complete() -> Vec<(usize, usize)> {
    vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
}

/// The builtin space descriptions shipped with the crate.
pub fn builtin_specs() -> Vec<SearchSpaceSpec> {
    vec![
        SearchSpaceSpec {
            name: "nb201_like".into(),
            layout: SpaceLayout::Cells(CellSpaceSpec {
                operations: vec![
                    "zero".into(),
                    "skip".into(),
                    "conv1x1".into(),
                    "conv3x3".into(),
                    "avgpool3x3".into(),
                ],
                label_placement: LabelPlacement::OnEdges,
                num_nodes: 4,
                fixed_topology: Some(four_node_complete()),
                input_nodes: vec![0],
                output_node: 3,
                zero_op: Some("zero".into()),
                cells_per_arch: 1,
                compute_min_path: true,
            }),
        },
        SearchSpaceSpec {
            name: "tnb_micro_like".into(),
            layout: SpaceLayout::Cells(CellSpaceSpec {
                operations: vec![
                    "zero".into(),
                    "skip".into(),
                    "conv1x1".into(),
                    "conv3x3".into(),
                ],
                label_placement: LabelPlacement::OnEdges,
                num_nodes: 4,
                fixed_topology: Some(four_node_complete()),
                input_nodes: vec![0],
                output_node: 3,
                zero_op: Some("zero".into()),
                cells_per_arch: 1,
                compute_min_path: true,
            }),
        },
        SearchSpaceSpec {
            name: "nb101_like".into(),
            layout: SpaceLayout::Cells(CellSpaceSpec {
                operations: vec!["conv1x1".into(), "conv3x3".into(), "maxpool3x3".into()],
                label_placement: LabelPlacement::OnNodes,
                num_nodes: 7,
                fixed_topology: None,
                input_nodes: vec![0],
                output_node: 6,
                zero_op: None,
                cells_per_arch: 1,
                compute_min_path: true,
            }),
        },
        SearchSpaceSpec {
            name: "nb301_like".into(),
            layout: SpaceLayout::Cells(CellSpaceSpec {
                operations: vec![
                    "maxpool3x3".into(),
                    "avgpool3x3".into(),
                    "skip".into(),
                    "sepconv3x3".into(),
                    "sepconv5x5".into(),
                    "dilconv3x3".into(),
                    "dilconv5x5".into(),
                ],
                label_placement: LabelPlacement::OnEdges,
                num_nodes: 7,
                fixed_topology: None,
                input_nodes: vec![0, 1],
                output_node: 6,
                zero_op: None,
                cells_per_arch: 2,
                compute_min_path: false,
            }),
        },
        SearchSpaceSpec {
            name: "tnb_macro".into(),
            layout: SpaceLayout::Macro(MacroSpaceSpec {
                min_modules: 4,
                max_modules: 6,
            }),
        },
    ]
}

/// Looks up a builtin space by name.
pub fn builtin(name: &str) -> Result<SearchSpaceSpec, SpaceError> {
    builtin_specs()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| SpaceError::UnknownBuiltin(name.to_string()))
}

/// Checks a macro architecture against its space description.
pub fn validate_macro(spec: &MacroSpaceSpec, arch: &MacroArch) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = arch.modules.len();
    if n < spec.min_modules || n > spec.max_modules {
        report.push(format!(
            "architecture has {n} modules, expected between {} and {}",
            spec.min_modules, spec.max_modules
        ));
    }
    report
}
