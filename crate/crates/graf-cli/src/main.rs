//! Command-line front end for the graf pipeline.
//!
//! Every subcommand is a thin wrapper over the library: generate a synthetic
//! benchmark, extract feature matrices, inspect cells, measure redundancy,
//! rank feature importance, compare proxies, sweep surrogate quality, and run
//! architecture search. All randomness flows from explicit `--seed` flags,
//! so invocations are exactly repeatable.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use graf::data::{load_dataset, save_dataset, Dataset, FeatureRecipe};
use graf::forest::ForestConfig;
use graf::harness;
use graf::search::SearchConfig;
use graf::space::{builtin, builtin_specs, SearchSpaceSpec};
use graf::synth;

#[derive(Parser)]
#[command(
    name = "graf",
    version,
    about = "Graph features, surrogate models, and search over architecture benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List built-in search spaces and synthetic target functions.
    Spaces,
    /// Generate a synthetic benchmark for an enumerable space.
    Synth(SynthArgs),
    /// Extract a feature matrix from a benchmark as CSV.
    Extract(ExtractArgs),
    /// Decode one architecture, report unreachable elements, and prune them.
    Prune(PruneArgs),
    /// Find feature columns that are affine combinations of earlier ones.
    Redundancy(RedundancyArgs),
    /// Rank features by permutation importance, averaged over seeds.
    Importance(ImportanceArgs),
    /// Sweep feature recipes across training sizes and seeds.
    Evaluate(EvaluateArgs),
    /// Compare a proxy's overall ranking power against within-cluster power.
    Bias(BiasArgs),
    /// Run surrogate-guided search against a random-search baseline.
    Search(SearchArgs),
}

/// Accepts a built-in space name or a path to a space description JSON.
fn load_space(name_or_path: &str) -> Result<SearchSpaceSpec> {
    let path = Path::new(name_or_path);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading space file {}", path.display()))?;
        let spec: SearchSpaceSpec =
            serde_json::from_str(&text).with_context(|| "parsing space description")?;
        graf::space::validate_spec(&spec)?;
        Ok(spec)
    } else {
        Ok(builtin(name_or_path)?)
    }
}

fn load_benchmark(spec: &SearchSpaceSpec, path: &Path) -> Result<Dataset> {
    Ok(load_dataset(path, spec)?)
}

#[derive(Args)]
struct SynthArgs {
    /// Built-in space name or path to a space JSON file.
    #[arg(long)]
    space: String,
    /// Target function (see `graf spaces` for the list).
    #[arg(long, default_value = "depth_shortcut")]
    target: String,
    /// Override the target's default noise standard deviation.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep only architectures whose output is reachable.
    #[arg(long)]
    well_formed_only: bool,
    /// Stop after this many records.
    #[arg(long)]
    limit: Option<usize>,
    /// Output benchmark path (JSON lines).
    #[arg(long)]
    out: PathBuf,
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let spec = load_space(&args.space)?;
    let cfg = synth::SynthConfig {
        target: args.target.clone(),
        noise: args.noise,
        seed: args.seed,
        well_formed_only: args.well_formed_only,
        limit: args.limit,
    };
    let dataset = synth::build_space_dataset(&spec, &cfg)?;
    save_dataset(&args.out, &dataset)?;
    println!(
        "wrote {} records for space '{}' (target '{}', seed {}) to {}",
        dataset.records.len(),
        spec.name,
        args.target,
        args.seed,
        args.out.display()
    );
    Ok(())
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    space: String,
    /// Benchmark file produced by `synth` (or hand-written, same format).
    #[arg(long)]
    data: Option<PathBuf>,
    /// `+`-joined feature families: graf, onehot, path, zcp, fp.
    #[arg(long, default_value = "graf")]
    recipe: String,
    /// Comma-separated target column(s), at most two.
    #[arg(long, default_value = synth::TARGET_COLUMN)]
    targets: String,
    /// Print the feature schema as JSON instead of extracting.
    #[arg(long)]
    describe: bool,
    /// Output CSV path (features then targets, one row per architecture).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_extract(args: &ExtractArgs) -> Result<()> {
    let spec = load_space(&args.space)?;
    if args.describe {
        let schema = graf::features::schema_for(&spec)?;
        println!("{}", serde_json::to_string_pretty(&schema.describe())?);
        return Ok(());
    }
    let Some(data) = &args.data else {
        bail!("--data is required unless --describe is given");
    };
    let Some(out) = &args.out else {
        bail!("--out is required unless --describe is given");
    };
    let dataset = load_benchmark(&spec, data)?;
    let targets: Vec<String> = args.targets.split(',').map(|s| s.trim().to_string()).collect();
    let recipe = FeatureRecipe::parse(&args.recipe, targets)?;
    let matrix = graf::data::assemble_matrix(&dataset, &recipe)?;

    let mut writer = csv::Writer::from_path(out)?;
    let mut header = vec!["arch_id".to_string()];
    header.extend(matrix.column_names.iter().cloned());
    header.extend(matrix.target_names.iter().cloned());
    writer.write_record(&header)?;
    for r in 0..matrix.n_rows {
        let mut record = vec![matrix.arch_ids[r].clone()];
        record.extend(matrix.row(r).iter().map(|v| format!("{v}")));
        for t in &matrix.targets {
            record.push(format!("{}", t[r]));
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    println!(
        "wrote {} rows x {} feature columns ({}) to {}",
        matrix.n_rows,
        matrix.n_cols,
        recipe.family_label(),
        out.display()
    );
    Ok(())
}

#[derive(Args)]
struct PruneArgs {
    #[arg(long)]
    space: String,
    /// Assignment index of the architecture to inspect.
    #[arg(long)]
    index: u64,
}

fn cell_to_json(cell: &graf::space::CellGraph, ops: &[String]) -> serde_json::Value {
    use graf::space::CellLabels;
    let labels = match &cell.labels {
        CellLabels::Edges(l) => serde_json::json!(l
            .iter()
            .map(|&op| ops[op].clone())
            .collect::<Vec<_>>()),
        CellLabels::Nodes(l) => serde_json::json!(l
            .iter()
            .map(|o| o.map(|op| ops[op].clone()))
            .collect::<Vec<_>>()),
    };
    serde_json::json!({
        "num_nodes": cell.num_nodes,
        "edges": cell.edges,
        "labels": labels,
    })
}

fn cmd_prune(args: &PruneArgs) -> Result<()> {
    use graf::space::UnreachableSet;
    let spec = load_space(&args.space)?;
    let cells = spec.cells()?;
    let cell = graf::space::cell_from_assignment_index(cells, args.index);
    let unreachable = graf::space::find_unreachable(cells, &cell)?;
    let pruned = graf::space::prune_unreachable(cells, &cell)?;
    let unreachable_json = match &unreachable {
        UnreachableSet::Edges(s) => serde_json::json!(s
            .iter()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect::<Vec<_>>()),
        UnreachableSet::Nodes(s) => serde_json::json!(s),
    };
    let ops = &cells.operations;
    let out = serde_json::json!({
        "space": spec.name,
        "index": args.index,
        "cell": cell_to_json(&cell, ops),
        "well_formed": unreachable.is_empty(),
        "unreachable": unreachable_json,
        "pruned": cell_to_json(&pruned, ops),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

#[derive(Args)]
struct RedundancyArgs {
    #[arg(long)]
    space: String,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "graf")]
    recipe: String,
    #[arg(long, default_value = synth::TARGET_COLUMN)]
    targets: String,
    /// Relative residual tolerance for declaring a column dependent.
    #[arg(long, default_value_t = graf::analysis::DEFAULT_REDUNDANCY_TOL)]
    tol: f64,
}

fn cmd_redundancy(args: &RedundancyArgs) -> Result<()> {
    let spec = load_space(&args.space)?;
    let dataset = load_benchmark(&spec, &args.data)?;
    let targets: Vec<String> = args.targets.split(',').map(|s| s.trim().to_string()).collect();
    let recipe = FeatureRecipe::parse(&args.recipe, targets)?;
    let matrix = graf::data::assemble_matrix(&dataset, &recipe)?;
    let report = graf::analysis::eliminate_redundant(&matrix, args.tol);
    println!(
        "{} of {} columns kept ({} removed)",
        report.kept.len(),
        matrix.n_cols,
        report.removed.len()
    );
    for (index, name, reason) in &report.removed {
        println!("removed [{index:4}] {name}  ({reason})");
    }
    Ok(())
}

#[derive(Args)]
struct ImportanceArgs {
    #[arg(long)]
    space: String,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "graf")]
    recipe: String,
    #[arg(long, default_value = synth::TARGET_COLUMN)]
    target: String,
    #[arg(long, default_value_t = 256)]
    train_size: usize,
    #[arg(long, default_value_t = 256)]
    eval_size: usize,
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    /// Shuffles per feature and seed.
    #[arg(long, default_value_t = 2)]
    repeats: usize,
    #[arg(long, default_value_t = 100)]
    trees: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// How many features to print.
    #[arg(long, default_value_t = 15)]
    top: usize,
}

fn cmd_importance(args: &ImportanceArgs) -> Result<()> {
    let spec = load_space(&args.space)?;
    let dataset = load_benchmark(&spec, &args.data)?;
    let cfg = harness::ImportanceConfig {
        recipe: FeatureRecipe::parse(&args.recipe, vec![args.target.clone()])?,
        train_size: args.train_size,
        eval_size: args.eval_size,
        n_seeds: args.seeds,
        n_repeats: args.repeats,
        forest: ForestConfig {
            n_trees: args.trees,
            ..ForestConfig::default()
        },
        master_seed: args.seed,
    };
    let summary = harness::run_importance(&dataset, &cfg)?;
    println!(
        "permutation importance over {} seeds (mean rank, mean score drop):",
        summary.n_seeds
    );
    for (name, rank) in summary.by_rank().into_iter().take(args.top) {
        println!("{rank:8.2}  {:+.4}  {name}", summary.mean_scores[&name]);
    }
    Ok(())
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    space: String,
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated recipes, each a `+`-joined family list,
    /// e.g. `graf,onehot,zcp+graf`.
    #[arg(long, default_value = "graf")]
    recipes: String,
    #[arg(long, default_value = synth::TARGET_COLUMN)]
    targets: String,
    /// Comma-separated training-set sizes.
    #[arg(long, default_value = "32,128")]
    sizes: String,
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    /// Held-out rows to score on (subsampled from the complement).
    #[arg(long)]
    test_size: Option<usize>,
    #[arg(long, default_value_t = 100)]
    trees: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for report.csv, per_seed.csv, and manifest.json.
    #[arg(long)]
    out_dir: PathBuf,
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let spec = load_space(&args.space)?;
    let dataset = load_benchmark(&spec, &args.data)?;
    let targets: Vec<String> = args.targets.split(',').map(|s| s.trim().to_string()).collect();
    let mut recipes = Vec::new();
    for part in args.recipes.split(',') {
        recipes.push(FeatureRecipe::parse(part.trim(), targets.clone())?);
    }
    let mut sizes = Vec::new();
    for part in args.sizes.split(',') {
        sizes.push(part.trim().parse::<usize>().context("parsing --sizes")?);
    }
    let cfg = harness::EvalConfig {
        recipes,
        train_sizes: sizes,
        n_seeds: args.seeds,
        test_size: args.test_size,
        forest: ForestConfig {
            n_trees: args.trees,
            ..ForestConfig::default()
        },
        master_seed: args.seed,
    };
    let report = harness::run_evaluation(&dataset, &cfg)?;
    let aggregates = harness::aggregate(&report);

    std::fs::create_dir_all(&args.out_dir)?;
    harness::write_report_csv(&args.out_dir.join("report.csv"), &aggregates)?;
    harness::write_per_seed_csv(&args.out_dir.join("per_seed.csv"), &report)?;
    let manifest = harness::manifest_for(&dataset, &cfg, &aggregates);
    harness::write_manifest(&args.out_dir.join("manifest.json"), &manifest)?;

    println!("held-out rank correlation (mean^std over {} seeds):", cfg.n_seeds);
    for a in &aggregates {
        println!(
            "{:>10} rows  {:12}  {}",
            a.train_size,
            a.recipe,
            harness::format_cell(a.mean_tau, a.std_tau)
        );
    }
    println!("reports written to {}", args.out_dir.display());
    Ok(())
}

#[derive(Args)]
struct BiasArgs {
    #[arg(long)]
    space: String,
    #[arg(long)]
    data: PathBuf,
    /// Proxy column to evaluate (a key of the records' zcp map).
    #[arg(long)]
    proxy: String,
    #[arg(long, default_value = synth::TARGET_COLUMN)]
    target: String,
}

fn cmd_bias(args: &BiasArgs) -> Result<()> {
    let spec = load_space(&args.space)?;
    let dataset = load_benchmark(&spec, &args.data)?;
    let report = harness::run_bias(&dataset, &args.proxy, &args.target)?;
    println!(
        "proxy '{}' vs '{}' over {} architectures",
        report.proxy, report.target, report.n_rows
    );
    println!("overall rank correlation: {:+.4}", report.overall);
    println!(
        "mean |within-cluster| over {} clusters: {:.4}",
        report.groups.len(),
        report.mean_within_abs
    );
    for (key, size, rho) in &report.groups {
        println!("  {key:>8} (n={size:5}): {rho:+.4}");
    }
    Ok(())
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    space: String,
    /// Benchmark covering every architecture of the space.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = synth::TARGET_COLUMN)]
    target: String,
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    #[arg(long, default_value_t = 20)]
    initial: usize,
    #[arg(long, default_value_t = 25)]
    iterations: usize,
    #[arg(long, default_value_t = 200)]
    candidates: usize,
    /// Evaluations per iteration (the top-scored candidates).
    #[arg(long, default_value_t = 20)]
    per_iteration: usize,
    #[arg(long, default_value_t = 3)]
    ensemble: usize,
    /// Disable the bootstrap ensemble (greedy selection).
    #[arg(long)]
    greedy: bool,
    #[arg(long, default_value_t = 100)]
    trees: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn cmd_search(args: &SearchArgs) -> Result<()> {
    let spec = load_space(&args.space)?;
    let dataset = load_benchmark(&spec, &args.data)?;
    let cfg = harness::SearchComparisonConfig {
        search: SearchConfig {
            n_initial: args.initial,
            n_iterations: args.iterations,
            candidates_per_iteration: args.candidates,
            evaluations_per_iteration: args.per_iteration,
            ensemble_size: args.ensemble,
            ensemble_bootstrap: !args.greedy,
            surrogate: ForestConfig {
                n_trees: args.trees,
                ..ForestConfig::default()
            },
            seed: 0,
        },
        n_seeds: args.seeds,
        target: args.target.clone(),
        master_seed: args.seed,
    };
    let cmp = harness::run_search_comparison(&dataset, &cfg)?;
    println!("paired search comparison over {} seeds:", cmp.per_seed.len());
    for o in &cmp.per_seed {
        println!(
            "seed {:>3}  budget {:>5}  surrogate {:.4} (pct {:.3})  random {:.4} (pct {:.3})",
            o.seed,
            o.n_evaluations,
            o.surrogate_best,
            o.surrogate_percentile,
            o.random_best,
            o.random_percentile
        );
    }
    println!(
        "mean best: surrogate {:.4} vs random {:.4}; surrogate wins {}/{}",
        cmp.mean_surrogate_best,
        cmp.mean_random_best,
        cmp.wins,
        cmp.per_seed.len()
    );
    Ok(())
}

fn cmd_spaces() -> Result<()> {
    println!("built-in search spaces:");
    for spec in builtin_specs() {
        match &spec.layout {
            graf::space::SpaceLayout::Cells(c) => {
                let wiring = match &c.fixed_topology {
                    Some(t) => format!("{} fixed edges", t.len()),
                    None => "free wiring".to_string(),
                };
                println!(
                    "  {:14} cells: {} nodes, {} ops, {}, {} cell(s) per arch",
                    spec.name,
                    c.num_nodes,
                    c.operations.len(),
                    wiring,
                    c.cells_per_arch
                );
            }
            graf::space::SpaceLayout::Macro(m) => {
                println!(
                    "  {:14} macro: {}..={} modules of 4 kinds",
                    spec.name, m.min_modules, m.max_modules
                );
            }
        }
    }
    println!("\nsynthetic target functions:");
    for t in synth::TARGETS {
        println!(
            "  {:15} noise {:>6}  {}",
            t.name, t.default_noise, t.summary
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Spaces => cmd_spaces(),
        Cmd::Synth(args) => cmd_synth(args),
        Cmd::Extract(args) => cmd_extract(args),
        Cmd::Prune(args) => cmd_prune(args),
        Cmd::Redundancy(args) => cmd_redundancy(args),
        Cmd::Importance(args) => cmd_importance(args),
        Cmd::Evaluate(args) => cmd_evaluate(args),
        Cmd::Bias(args) => cmd_bias(args),
        Cmd::Search(args) => cmd_search(args),
    }
}
