//! Baseline architecture encodings.
//!
//! Two encodings serve as comparison points for the graph features:
//!
//! * **One-hot**: one block of `|O|` indicator bits per labeled element
//!   (edges in topology order, or nodes padded to the space maximum),
//!   followed by the flattened `num_nodes x num_nodes` adjacency matrix.
//! * **Path**: spaces with a fixed wiring get one bit per (topological path,
//!   operation assignment) pair; free-wiring spaces get one bit per
//!   realizable operation sequence along an input→output path. Either way a
//!   cell sets exactly one bit per path it actually contains.
//!
//! Path universes explode combinatorially, so construction takes a
//! dimensionality cap and refuses spaces above it.

use crate::space::{
    validate_cell, CellGraph, CellLabels, CellSpaceSpec, LabelPlacement, SearchSpaceSpec,
    SpaceError,
};

/// Errors produced while building or applying encodings.
#[derive(Debug, thiserror::Error)]
pub enum EncodingError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("path encoding for `{space}` needs {required} dimensions, above the cap of {cap}")]
    DimensionCapExceeded {
        space: String,
        required: u128,
        cap: u64,
    },
    #[error("cell has {got} labeled edges, the encoding layout expects {want}")]
    EdgeCountMismatch { got: usize, want: usize },
    #[error("architecture has {got} cells, the space calls for {want}")]
    CellCountMismatch { got: usize, want: usize },
}

/// Default cap on path-encoding dimensionality.
pub const DEFAULT_PATH_DIM_CAP: u64 = 100_000;

fn check_cells(
    spec: &CellSpaceSpec,
    cells_per_arch: usize,
    cells: &[CellGraph],
) -> Result<(), EncodingError> {
    if cells.len() != cells_per_arch {
        return Err(EncodingError::CellCountMismatch {
            got: cells.len(),
            want: cells_per_arch,
        });
    }
    for cell in cells {
        let report = validate_cell(spec, cell);
        if let Some(first) = report.violations.into_iter().next() {
            return Err(SpaceError::InvalidCell(first).into());
        }
    }
    Ok(())
}

/// Layout of the one-hot encoding for one space.
#[derive(Debug, Clone)]
pub struct OneHotLayout {
    /// Operation blocks per cell: labels of the named elements.
    element_names: Vec<String>,
    num_ops: usize,
    num_nodes: usize,
    cells_per_arch: usize,
    placement: LabelPlacement,
    /// For edge-labeled free-wiring spaces, the per-cell edge count is pinned
    /// by the first architecture seen.
    edges_per_cell: usize,
}

impl OneHotLayout {
    /// Width of the encoding for one architecture.
    pub fn width(&self) -> usize {
        self.cells_per_arch * (self.element_names.len() * self.num_ops + self.num_nodes * self.num_nodes)
    }

    /// Column names, with `@cellK` suffixes when an architecture has several
    /// cells.
    pub fn names(&self, operations: &[String]) -> Vec<String> {
        let mut out = Vec::with_capacity(self.width());
        for cell in 0..self.cells_per_arch {
            let tag = if self.cells_per_arch > 1 {
                format!("@cell{cell}")
            } else {
                String::new()
            };
            for elem in &self.element_names {
                for op in operations {
                    out.push(format!("onehot({elem},{op}){tag}"));
                }
            }
            for s in 0..self.num_nodes {
                for d in 0..self.num_nodes {
                    out.push(format!("onehot(adj{s}-{d}){tag}"));
                }
            }
        }
        out
    }
}

/// Builds the one-hot layout for a space.
///
/// Free-wiring edge-labeled spaces have no fixed element list, so the layout
/// is pinned to the edge count of `example`, the first architecture of the
/// dataset; all other architectures must match it.
pub fn onehot_layout(
    spec: &SearchSpaceSpec,
    example: Option<&[CellGraph]>,
) -> Result<OneHotLayout, EncodingError> {
    let cells = spec.cells()?;
    let (element_names, edges_per_cell) = match (cells.label_placement, &cells.fixed_topology) {
        (LabelPlacement::OnEdges, Some(topo)) => (
            topo.iter().map(|(s, d)| format!("edge{s}-{d}")).collect(),
            topo.len(),
        ),
        (LabelPlacement::OnEdges, None) => {
            let count = example
                .and_then(|c| c.first())
                .map(|c| c.edges.len())
                .unwrap_or(0);
            (
                (0..count).map(|i| format!("edge{i}")).collect::<Vec<_>>(),
                count,
            )
        }
        (LabelPlacement::OnNodes, _) => (
            (0..cells.num_nodes).map(|v| format!("node{v}")).collect(),
            0,
        ),
    };
    Ok(OneHotLayout {
        element_names,
        num_ops: cells.operations.len(),
        num_nodes: cells.num_nodes,
        cells_per_arch: cells.cells_per_arch,
        placement: cells.label_placement,
        edges_per_cell,
    })
}

/// Encodes one architecture under a one-hot layout.
pub fn encode_onehot(
    spec: &SearchSpaceSpec,
    layout: &OneHotLayout,
    cells: &[CellGraph],
) -> Result<Vec<f64>, EncodingError> {
    let cell_spec = spec.cells()?;
    check_cells(cell_spec, layout.cells_per_arch, cells)?;
    let mut out = Vec::with_capacity(layout.width());
    for cell in cells {
        let blocks = layout.element_names.len();
        let mut ops = vec![0f64; blocks * layout.num_ops];
        match (&cell.labels, layout.placement) {
            (CellLabels::Edges(labels), LabelPlacement::OnEdges) => {
                if labels.len() != layout.edges_per_cell {
                    return Err(EncodingError::EdgeCountMismatch {
                        got: labels.len(),
                        want: layout.edges_per_cell,
                    });
                }
                for (i, &op) in labels.iter().enumerate() {
                    ops[i * layout.num_ops + op] = 1.0;
                }
            }
            (CellLabels::Nodes(labels), LabelPlacement::OnNodes) => {
                for (v, lab) in labels.iter().enumerate() {
                    if let Some(op) = lab {
                        ops[v * layout.num_ops + op] = 1.0;
                    }
                }
            }
            _ => unreachable!("label placement already validated"),
        }
        out.extend(ops);
        let mut adj = vec![0f64; layout.num_nodes * layout.num_nodes];
        for &(s, d) in &cell.edges {
            adj[s * layout.num_nodes + d] = 1.0;
        }
        out.extend(adj);
    }
    Ok(out)
}

/// Layout of the path encoding for one space.
#[derive(Debug, Clone)]
pub enum PathLayout {
    /// Fixed wiring: one bit per (path, operation assignment).
    FixedWiring {
        /// Node sequences of every input→output path, input-major then
        /// lexicographic.
        paths: Vec<Vec<usize>>,
        /// Starting bit of each path's assignment block.
        offsets: Vec<usize>,
        num_ops: usize,
        cells_per_arch: usize,
        width_per_cell: usize,
    },
    /// Free wiring: one bit per operation sequence.
    OpSequences {
        /// Sequence lengths covered, ascending.
        lengths: Vec<usize>,
        /// Starting bit of each length block.
        offsets: Vec<usize>,
        num_ops: usize,
        cells_per_arch: usize,
        width_per_cell: usize,
    },
}

impl PathLayout {
    pub fn width(&self) -> usize {
        match self {
            PathLayout::FixedWiring {
                cells_per_arch,
                width_per_cell,
                ..
            }
            | PathLayout::OpSequences {
                cells_per_arch,
                width_per_cell,
                ..
            } => cells_per_arch * width_per_cell,
        }
    }

    /// Column names, mirroring the bit layout.
    pub fn names(&self, operations: &[String]) -> Vec<String> {
        let mut out = Vec::with_capacity(self.width());
        let (cells_per_arch, width_per_cell) = match self {
            PathLayout::FixedWiring {
                cells_per_arch,
                width_per_cell,
                ..
            }
            | PathLayout::OpSequences {
                cells_per_arch,
                width_per_cell,
                ..
            } => (*cells_per_arch, *width_per_cell),
        };
        for cell in 0..cells_per_arch {
            let tag = if cells_per_arch > 1 {
                format!("@cell{cell}")
            } else {
                String::new()
            };
            match self {
                PathLayout::FixedWiring { paths, num_ops, .. } => {
                    for path in paths {
                        let route = path
                            .iter()
                            .map(|v| v.to_string())
                            .collect::<Vec<_>>()
                            .join("-");
                        let steps = path.len() - 1;
                        let mut assignment = vec![0usize; steps];
                        for _ in 0..(*num_ops as u64).pow(steps as u32) {
                            let opseq = assignment
                                .iter()
                                .map(|&o| operations[o].as_str())
                                .collect::<Vec<_>>()
                                .join("-");
                            out.push(format!("path({route}:{opseq}){tag}"));
                            // Increment the assignment as a base-|O| counter,
                            // last step least significant.
                            for slot in (0..steps).rev() {
                                assignment[slot] += 1;
                                if assignment[slot] < *num_ops {
                                    break;
                                }
                                assignment[slot] = 0;
                            }
                        }
                    }
                }
                PathLayout::OpSequences {
                    lengths, num_ops, ..
                } => {
                    for &len in lengths {
                        if len == 0 {
                            out.push(format!("path(direct){tag}"));
                            continue;
                        }
                        let mut assignment = vec![0usize; len];
                        for _ in 0..(*num_ops as u64).pow(len as u32) {
                            let opseq = assignment
                                .iter()
                                .map(|&o| operations[o].as_str())
                                .collect::<Vec<_>>()
                                .join("-");
                            out.push(format!("path({opseq}){tag}"));
                            for slot in (0..len).rev() {
                                assignment[slot] += 1;
                                if assignment[slot] < *num_ops {
                                    break;
                                }
                                assignment[slot] = 0;
                            }
                        }
                    }
                }
            }
        }
        debug_assert_eq!(out.len(), width_per_cell * cells_per_arch);
        out
    }
}

/// Enumerates input→output node sequences of a fixed wiring, input-major and
/// lexicographic within each input.
fn fixed_wiring_paths(cells: &CellSpaceSpec) -> Vec<Vec<usize>> {
    let topo = cells
        .fixed_topology
        .as_ref()
        .expect("caller checked the wiring is fixed");
    let n = cells.num_nodes;
    let mut succ = vec![Vec::new(); n];
    for &(s, d) in topo {
        succ[s].push(d);
    }
    for list in &mut succ {
        list.sort_unstable();
    }
    let output = cells.output_node;
    let mut paths = Vec::new();
    let mut stack = Vec::new();
    fn dfs(
        v: usize,
        output: usize,
        succ: &[Vec<usize>],
        stack: &mut Vec<usize>,
        paths: &mut Vec<Vec<usize>>,
    ) {
        stack.push(v);
        if v == output {
            paths.push(stack.clone());
        } else {
            for &w in &succ[v] {
                dfs(w, output, succ, stack, paths);
            }
        }
        stack.pop();
    }
    for &input in &cells.input_nodes {
        dfs(input, output, &succ, &mut stack, &mut paths);
    }
    paths
}

/// Builds the path-encoding layout for a space with the default cap.
pub fn path_layout(spec: &SearchSpaceSpec) -> Result<PathLayout, EncodingError> {
    path_layout_with_cap(spec, DEFAULT_PATH_DIM_CAP)
}

/// Builds the path-encoding layout, refusing universes above `cap` bits per
/// cell.
pub fn path_layout_with_cap(
    spec: &SearchSpaceSpec,
    cap: u64,
) -> Result<PathLayout, EncodingError> {
    let cells = spec.cells()?;
    let num_ops = cells.operations.len();
    if cells.fixed_topology.is_some() {
        let paths = fixed_wiring_paths(cells);
        let mut offsets = Vec::with_capacity(paths.len());
        let mut width = 0u128;
        for path in &paths {
            offsets.push(width as usize);
            width += (num_ops as u128).pow((path.len() - 1) as u32);
        }
        if width > cap as u128 {
            return Err(EncodingError::DimensionCapExceeded {
                space: spec.name.clone(),
                required: width,
                cap,
            });
        }
        Ok(PathLayout::FixedWiring {
            paths,
            offsets,
            num_ops,
            cells_per_arch: cells.cells_per_arch,
            width_per_cell: width as usize,
        })
    } else {
        let lengths: Vec<usize> = match cells.label_placement {
            // An input→output path can use 1..=num_nodes-1 labeled edges.
            LabelPlacement::OnEdges => (1..cells.num_nodes).collect(),
            // Interior nodes carry the labels; the direct edge is length 0.
            LabelPlacement::OnNodes => (0..cells.num_nodes - 1).collect(),
        };
        let mut offsets = Vec::with_capacity(lengths.len());
        let mut width = 0u128;
        for &len in &lengths {
            offsets.push(width as usize);
            width += (num_ops as u128).pow(len as u32);
        }
        if width > cap as u128 {
            return Err(EncodingError::DimensionCapExceeded {
                space: spec.name.clone(),
                required: width,
                cap,
            });
        }
        Ok(PathLayout::OpSequences {
            lengths,
            offsets,
            num_ops,
            cells_per_arch: cells.cells_per_arch,
            width_per_cell: width as usize,
        })
    }
}

/// Encodes one architecture under a path layout.
pub fn encode_paths(
    spec: &SearchSpaceSpec,
    layout: &PathLayout,
    cells: &[CellGraph],
) -> Result<Vec<f64>, EncodingError> {
    let cell_spec = spec.cells()?;
    check_cells(cell_spec, cell_spec.cells_per_arch, cells)?;
    let mut out = vec![0f64; layout.width()];
    for (cell_idx, cell) in cells.iter().enumerate() {
        match layout {
            PathLayout::FixedWiring {
                paths,
                offsets,
                num_ops,
                width_per_cell,
                ..
            } => {
                let CellLabels::Edges(labels) = &cell.labels else {
                    unreachable!("fixed wirings are edge-labeled");
                };
                let edge_pos = |s: usize, d: usize| -> usize {
                    cell.edges
                        .binary_search(&(s, d))
                        .expect("path edges exist in the wiring")
                };
                let base = cell_idx * width_per_cell;
                for (p, path) in paths.iter().enumerate() {
                    let mut code = 0usize;
                    for step in path.windows(2) {
                        code = code * num_ops + labels[edge_pos(step[0], step[1])];
                    }
                    out[base + offsets[p] + code] = 1.0;
                }
            }
            PathLayout::OpSequences {
                lengths,
                offsets,
                num_ops,
                width_per_cell,
                ..
            } => {
                let base = cell_idx * width_per_cell;
                let n = cell.num_nodes;
                let output = n - 1;
                let mut succ = vec![Vec::new(); n];
                for (i, &(s, d)) in cell.edges.iter().enumerate() {
                    succ[s].push((d, i));
                }
                // Walk every input→output path, collecting the operation
                // sequence along it. Each stack entry remembers whether
                // stepping into it contributed an operation, so backtracking
                // unwinds the sequence exactly.
                let mut stack: Vec<(usize, usize, bool)> = Vec::new();
                let mut opseq: Vec<usize> = Vec::new();
                for &input in &cell_spec.input_nodes {
                    if input >= n {
                        continue;
                    }
                    stack.push((input, 0, false));
                    while let Some(&mut (v, ref mut slot, pushed_op)) = stack.last_mut() {
                        if v == output {
                            let len = opseq.len();
                            if let Some(pos) = lengths.iter().position(|&l| l == len) {
                                let mut code = 0usize;
                                for &op in &opseq {
                                    code = code * num_ops + op;
                                }
                                out[base + offsets[pos] + code] = 1.0;
                            }
                            stack.pop();
                            if pushed_op {
                                opseq.pop();
                            }
                            continue;
                        }
                        if *slot >= succ[v].len() {
                            stack.pop();
                            if pushed_op {
                                opseq.pop();
                            }
                            continue;
                        }
                        let (next, edge_idx) = succ[v][*slot];
                        *slot += 1;
                        let op = match &cell.labels {
                            CellLabels::Edges(labels) => Some(labels[edge_idx]),
                            CellLabels::Nodes(labels) => labels[next],
                        };
                        if let Some(op) = op {
                            opseq.push(op);
                        }
                        stack.push((next, 0, op.is_some()));
                    }
                }
            }
        }
    }
    Ok(out)
}
