//! Slow, obviously-correct reference implementations shared by the
//! integration suites. Each oracle recomputes a quantity the library derives
//! with a faster or more intricate algorithm, using a method different enough
//! that shared bugs are unlikely: exhaustive path enumeration instead of
//! dynamic programming, quadratic pair counting instead of merge sorting, and
//! Gaussian elimination instead of incremental orthogonalization.

#![allow(dead_code)]

use graf::features::{extract_micro, FeatureKind, FeatureSchema};
use graf::space::{
    CellGraph, CellLabels, CellSpaceSpec, LabelPlacement, SearchSpaceSpec, SpaceLayout,
};

// ---------------------------------------------------------------------------
// Path enumeration
// ---------------------------------------------------------------------------

/// Every input-to-output path length of an edge-labeled cell, restricted to
/// edges whose operation index is in the `allowed` bitmask, found by
/// exhaustive depth-first enumeration. Cells are acyclic (edges only point
/// from lower to higher node ids), so the walk terminates and every path is
/// simple.
pub fn path_lengths_by_enumeration(
    cell: &CellGraph,
    allowed: u32,
    input: usize,
    output: usize,
) -> Vec<usize> {
    let CellLabels::Edges(labels) = &cell.labels else {
        panic!("the path oracle only handles edge-labeled cells");
    };
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); cell.num_nodes];
    for (edge, &op) in cell.edges.iter().zip(labels) {
        if allowed & (1 << op) != 0 {
            adjacency[edge.0].push(edge.1);
        }
    }
    let mut lengths = Vec::new();
    let mut stack = vec![(input, 0usize)];
    while let Some((node, len)) = stack.pop() {
        if node == output {
            lengths.push(len);
            continue;
        }
        for &next in &adjacency[node] {
            stack.push((next, len + 1));
        }
    }
    lengths
}

/// `(min, max)` over the enumerated path lengths, or the no-path sentinel
/// (`num_nodes + 1`) for both when no admitted path exists.
pub fn min_max_path_by_enumeration(
    cell: &CellGraph,
    allowed: u32,
    input: usize,
    output: usize,
) -> (f64, f64) {
    let lengths = path_lengths_by_enumeration(cell, allowed, input, output);
    match (lengths.iter().min(), lengths.iter().max()) {
        (Some(&lo), Some(&hi)) => (lo as f64, hi as f64),
        _ => {
            let sentinel = (cell.num_nodes + 1) as f64;
            (sentinel, sentinel)
        }
    }
}

/// Extracts `cell`'s features and asserts every min/max path feature equals
/// exhaustive enumeration. Returns `(features checked, sentinel hits)`, the
/// second counting features where no admitted path existed and the sentinel
/// value was required.
pub fn check_path_features(
    spec: &SearchSpaceSpec,
    schema: &FeatureSchema,
    cell: &CellGraph,
) -> (usize, usize) {
    let cells = spec.cells().unwrap();
    let output = cells.output_node;
    let sentinel = (cell.num_nodes + 1) as f64;
    let values = extract_micro(spec, schema, std::slice::from_ref(cell)).unwrap();
    let mut checked = 0;
    let mut sentinel_hits = 0;
    for (i, feat) in schema.features.iter().enumerate() {
        let (allowed, input_slot, want_min) = match feat.kind {
            FeatureKind::MinPath { allowed, input } => (allowed, input, true),
            FeatureKind::MaxPath { allowed, input } => (allowed, input, false),
            _ => continue,
        };
        let input = cells.input_nodes[input_slot];
        let (lo, hi) = min_max_path_by_enumeration(cell, allowed, input, output);
        let want = if want_min { lo } else { hi };
        assert_eq!(
            values[i], want,
            "{} disagrees with enumeration on cell {:?}",
            feat.name, cell
        );
        if want == sentinel {
            sentinel_hits += 1;
        }
        checked += 1;
    }
    (checked, sentinel_hits)
}

// ---------------------------------------------------------------------------
// Rank correlation
// ---------------------------------------------------------------------------

/// Tie-aware Kendall rank correlation by brute-force O(n^2) pair counting:
/// concordant minus discordant pairs over the geometric mean of the pair
/// counts not tied in each input. Returns `None` when every pair is tied in
/// one of the inputs (the coefficient is undefined there).
pub fn kendall_by_pair_counting(x: &[f64], y: &[f64]) -> Option<f64> {
    use std::cmp::Ordering;
    assert_eq!(x.len(), y.len());
    let n = x.len();
    let (mut concordant, mut discordant) = (0u64, 0u64);
    let (mut tied_x, mut tied_y) = (0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            let cx = x[i].partial_cmp(&x[j]).expect("finite inputs");
            let cy = y[i].partial_cmp(&y[j]).expect("finite inputs");
            if cx == Ordering::Equal {
                tied_x += 1;
            }
            if cy == Ordering::Equal {
                tied_y += 1;
            }
            if cx == Ordering::Equal || cy == Ordering::Equal {
                continue;
            }
            if cx == cy {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let n0 = (n as u64) * (n as u64 - 1) / 2;
    if n0 == tied_x || n0 == tied_y {
        return None;
    }
    let s = concordant as f64 - discordant as f64;
    Some(s / ((n0 - tied_x) as f64 * (n0 - tied_y) as f64).sqrt())
}

/// Mid-ranks by quadratic counting: each value's rank is the number of
/// strictly smaller values plus half the other equal ones (0-based).
pub fn mid_ranks_by_counting(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            let below = values.iter().filter(|&&w| w < v).count() as f64;
            let equal = values.iter().filter(|&&w| w == v).count() as f64;
            below + (equal - 1.0) / 2.0
        })
        .collect()
}

/// Spearman correlation as the Pearson correlation of independently computed
/// mid-ranks. Returns `None` when either input is constant.
pub fn spearman_by_rank_pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let rx = mid_ranks_by_counting(x);
    let ry = mid_ranks_by_counting(y);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in rx.iter().zip(&ry) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

// ---------------------------------------------------------------------------
// Numeric rank
// ---------------------------------------------------------------------------

/// Rank of the column-centered matrix by Gaussian elimination with partial
/// pivoting. `columns` holds one vector per matrix column; `rel_tol` scales
/// the largest centered entry into the threshold below which a pivot counts
/// as zero.
pub fn centered_rank_by_elimination(columns: &[Vec<f64>], rel_tol: f64) -> usize {
    if columns.is_empty() {
        return 0;
    }
    let n = columns[0].len();
    // Work on the transpose: one row per (centered) column.
    let mut rows: Vec<Vec<f64>> = columns
        .iter()
        .map(|col| {
            assert_eq!(col.len(), n);
            let mean = col.iter().sum::<f64>() / n as f64;
            col.iter().map(|&v| v - mean).collect()
        })
        .collect();
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0f64, |acc, &v| acc.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let threshold = rel_tol * scale;
    let mut rank = 0;
    for col in 0..n {
        if rank == rows.len() {
            break;
        }
        // Largest remaining entry in this column decides the pivot.
        let (mut pivot_row, mut pivot_abs) = (rank, rows[rank][col].abs());
        for r in rank + 1..rows.len() {
            let a = rows[r][col].abs();
            if a > pivot_abs {
                pivot_row = r;
                pivot_abs = a;
            }
        }
        if pivot_abs <= threshold {
            continue;
        }
        rows.swap(rank, pivot_row);
        let pivot = rows[rank][col];
        for r in rank + 1..rows.len() {
            let factor = rows[r][col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                let upper = rows[rank][c];
                rows[r][c] -= factor * upper;
            }
        }
        rank += 1;
    }
    rank
}

// ---------------------------------------------------------------------------
// Fixture spaces
// ---------------------------------------------------------------------------

/// A 3-node, 3-edge triangle space over the same operation vocabulary as
/// `nb201_like`: small enough to check every cell exhaustively, with node 1
/// as the only intermediate. Its no-path sentinel is 4.
pub fn triangle_spec() -> SearchSpaceSpec {
    SearchSpaceSpec {
        name: "triangle3".into(),
        layout: SpaceLayout::Cells(CellSpaceSpec {
            operations: ["zero", "skip", "conv1x1", "conv3x3", "avgpool3x3"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            label_placement: LabelPlacement::OnEdges,
            num_nodes: 3,
            fixed_topology: Some(vec![(0, 1), (0, 2), (1, 2)]),
            input_nodes: vec![0],
            output_node: 2,
            zero_op: Some("zero".into()),
            cells_per_arch: 1,
            compute_min_path: true,
        }),
    }
}
