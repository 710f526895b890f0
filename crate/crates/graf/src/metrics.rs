//! Rank-correlation metrics.
//!
//! Predictor quality is judged by how well predicted scores *order*
//! architectures, so the crate standardizes on Kendall's tau (the tie-aware
//! form) computed in O(n log n), with Spearman's rho as a secondary view.
//! Grouped correlation reports break a proxy's apparent quality down within
//! clusters of similar architectures, and `mean_rank` aggregates per-run
//! orderings of named items.

use std::collections::BTreeMap;

/// Errors produced by metric computations.
#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("input vectors have different lengths ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { got: usize, need: usize },
    #[error("inputs contain a non-finite value")]
    NotFinite,
    #[error("all pairs are tied in one input; the rank correlation is undefined")]
    AllPairsTied,
    #[error("an input has zero variance; the correlation is undefined")]
    ZeroVariance,
    #[error("runs disagree on the item set (`{0}` is not in every run)")]
    InconsistentRuns(String),
    #[error("no runs supplied")]
    NoRuns,
}

fn check_pair(x: &[f64], y: &[f64], need: usize) -> Result<(), MetricError> {
    if x.len() != y.len() {
        return Err(MetricError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x.len() < need {
        return Err(MetricError::TooFewPoints { got: x.len(), need });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(MetricError::NotFinite);
    }
    Ok(())
}

/// Counts inversions (strictly decreasing pairs) in `vals` by bottom-up merge
/// sort.
fn count_inversions(vals: &mut [f64]) -> u64 {
    let n = vals.len();
    let mut buf = vec![0f64; n];
    let mut inversions = 0u64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo + width < n {
            let mid = lo + width;
            let hi = (mid + width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if vals[i] <= vals[j] {
                    buf[k] = vals[i];
                    i += 1;
                } else {
                    // vals[i] > vals[j]: everything left in the first run is
                    // inverted with vals[j].
                    inversions += (mid - i) as u64;
                    buf[k] = vals[j];
                    j += 1;
                }
                k += 1;
            }
            while i < mid {
                buf[k] = vals[i];
                i += 1;
                k += 1;
            }
            while j < hi {
                buf[k] = vals[j];
                j += 1;
                k += 1;
            }
            vals[lo..hi].copy_from_slice(&buf[lo..hi]);
            lo = hi;
        }
        width *= 2;
    }
    inversions
}

/// Sum of `t * (t - 1) / 2` over runs of equal values in sorted order, where
/// equality is decided by `key`.
fn tie_pairs<K: PartialEq>(sorted: &[usize], key: impl Fn(usize) -> K) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if key(w[0]) == key(w[1]) {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Kendall rank correlation with tie correction, in O(n log n).
///
/// Pairs tied in either input are handled the way the tie-aware definition
/// prescribes; if every pair is tied in one of the inputs the coefficient is
/// undefined and an error is returned.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    check_pair(x, y, 2)?;
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        x[a].partial_cmp(&x[b])
            .unwrap()
            .then(y[a].partial_cmp(&y[b]).unwrap())
    });

    let n0 = (n as u64) * (n as u64 - 1) / 2;
    let n1 = tie_pairs(&order, |i| x[i]);
    let n3 = tie_pairs(&order, |i| (x[i], y[i]));
    let mut y_sorted: Vec<usize> = order.clone();
    y_sorted.sort_by(|&a, &b| y[a].partial_cmp(&y[b]).unwrap());
    let n2 = tie_pairs(&y_sorted, |i| y[i]);

    // With x ascending and y ascending inside x-ties, every inversion in the
    // y sequence is exactly one discordant pair.
    let mut y_seq: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let discordant = count_inversions(&mut y_seq);

    if n0 == n1 || n0 == n2 {
        return Err(MetricError::AllPairsTied);
    }
    let s = (n0 - n1 - n2 + n3) as f64 - 2.0 * discordant as f64;
    let denom = ((n0 - n1) as f64 * (n0 - n2) as f64).sqrt();
    Ok(s / denom)
}

/// Mid-ranks of a vector (ties share the average of the positions they
/// cover).
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0f64; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricError::ZeroVariance);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Spearman rank correlation: Pearson correlation of mid-ranks.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    check_pair(x, y, 2)?;
    pearson(&mid_ranks(x), &mid_ranks(y))
}

/// Rank correlation of a proxy against a target, overall and within named
/// clusters.
#[derive(Debug, Clone)]
pub struct GroupedCorrelation {
    /// Spearman correlation over the whole dataset.
    pub overall: f64,
    /// `(cluster key, size, within-cluster Spearman)`, sorted by key.
    /// Clusters too small or too degenerate for a correlation are omitted.
    pub groups: Vec<(String, usize, f64)>,
}

impl GroupedCorrelation {
    /// Mean of `|rho|` across clusters.
    pub fn mean_within_abs(&self) -> f64 {
        if self.groups.is_empty() {
            return 0.0;
        }
        self.groups.iter().map(|(_, _, r)| r.abs()).sum::<f64>() / self.groups.len() as f64
    }
}

/// Computes `GroupedCorrelation` for a proxy score against a target.
pub fn grouped_rank_correlation(
    score: &[f64],
    target: &[f64],
    cluster: &[String],
) -> Result<GroupedCorrelation, MetricError> {
    check_pair(score, target, 2)?;
    if cluster.len() != score.len() {
        return Err(MetricError::LengthMismatch {
            x: cluster.len(),
            y: score.len(),
        });
    }
    let overall = spearman_rho(score, target)?;
    let mut by_key: BTreeMap<&String, Vec<usize>> = BTreeMap::new();
    for (i, key) in cluster.iter().enumerate() {
        by_key.entry(key).or_default().push(i);
    }
    let mut groups = Vec::new();
    for (key, members) in by_key {
        if members.len() < 2 {
            continue;
        }
        let xs: Vec<f64> = members.iter().map(|&i| score[i]).collect();
        let ys: Vec<f64> = members.iter().map(|&i| target[i]).collect();
        match spearman_rho(&xs, &ys) {
            Ok(rho) => groups.push((key.clone(), members.len(), rho)),
            Err(MetricError::ZeroVariance) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(GroupedCorrelation { overall, groups })
}

/// Averages per-run rankings of named items.
///
/// Within each run items are ranked by `|score|` descending (rank 0 is the
/// largest magnitude; ties share the average of the positions they span),
/// and ranks are averaged across runs. Every run must score the same items.
pub fn mean_rank(runs: &[BTreeMap<String, f64>]) -> Result<BTreeMap<String, f64>, MetricError> {
    let Some(first) = runs.first() else {
        return Err(MetricError::NoRuns);
    };
    let items: Vec<&String> = first.keys().collect();
    let mut totals: BTreeMap<String, f64> = items.iter().map(|k| ((*k).clone(), 0.0)).collect();
    for run in runs {
        if run.len() != items.len() {
            let missing = items
                .iter()
                .find(|k| !run.contains_key(**k))
                .map(|k| (*k).clone())
                .unwrap_or_else(|| run.keys().next().unwrap().clone());
            return Err(MetricError::InconsistentRuns(missing));
        }
        let mut magnitudes = Vec::with_capacity(items.len());
        for &item in &items {
            let Some(v) = run.get(item) else {
                return Err(MetricError::InconsistentRuns(item.clone()));
            };
            if !v.is_finite() {
                return Err(MetricError::NotFinite);
            }
            magnitudes.push(-v.abs());
        }
        // Ranking by |score| descending = mid-ranks of the negated
        // magnitudes.
        let ranks = mid_ranks(&magnitudes);
        for (item, rank) in items.iter().zip(ranks) {
            *totals.get_mut(*item).unwrap() += rank;
        }
    }
    let n = runs.len() as f64;
    Ok(totals.into_iter().map(|(k, v)| (k, v / n)).collect())
}
