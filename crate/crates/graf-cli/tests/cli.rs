//! End-to-end tests of the `graf` binary, run against a small custom space
//! so every invocation finishes quickly.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn graf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graf"))
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawning graf");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// A three-node triangle with the usual five operations: 125 architectures.
fn write_tiny_space(dir: &Path) -> PathBuf {
    let path = dir.join("tiny.json");
    let spec = serde_json::json!({
        "name": "tiny",
        "kind": "cells",
        "operations": ["zero", "skip", "conv1x1", "conv3x3", "avgpool3x3"],
        "label_placement": "on_edges",
        "num_nodes": 3,
        "fixed_topology": [[0, 1], [0, 2], [1, 2]],
        "input_nodes": [0],
        "output_node": 2,
        "zero_op": "zero",
        "cells_per_arch": 1,
        "compute_min_path": true
    });
    std::fs::write(&path, serde_json::to_string_pretty(&spec).unwrap()).unwrap();
    path
}

fn synth_tiny(dir: &Path, space: &Path, target: &str) -> PathBuf {
    let data = dir.join(format!("{target}.jsonl"));
    run(graf()
        .arg("synth")
        .arg("--space")
        .arg(space)
        .arg("--target")
        .arg(target)
        .arg("--seed")
        .arg("3")
        .arg("--out")
        .arg(&data));
    data
}

#[test]
fn spaces_lists_builtins_and_targets() {
    let out = run(graf().arg("spaces"));
    let text = stdout(&out);
    assert!(text.contains("nb201_like"));
    assert!(text.contains("tnb_macro"));
    assert!(text.contains("depth_shortcut"));
}

#[test]
fn synth_extract_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let space = write_tiny_space(dir.path());
    let data = synth_tiny(dir.path(), &space, "depth_shortcut");
    let lines = std::fs::read_to_string(&data).unwrap();
    assert_eq!(lines.lines().count(), 125);

    // Identical seeds reproduce the file byte for byte.
    let data2 = dir.path().join("again.jsonl");
    run(graf()
        .arg("synth")
        .arg("--space")
        .arg(&space)
        .arg("--target")
        .arg("depth_shortcut")
        .arg("--seed")
        .arg("3")
        .arg("--out")
        .arg(&data2));
    assert_eq!(lines, std::fs::read_to_string(&data2).unwrap());

    let matrix = dir.path().join("matrix.csv");
    run(graf()
        .arg("extract")
        .arg("--space")
        .arg(&space)
        .arg("--data")
        .arg(&data)
        .arg("--recipe")
        .arg("zcp+graf")
        .arg("--out")
        .arg(&matrix));
    let csv = std::fs::read_to_string(&matrix).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("arch_id,op_count(zero),"));
    assert!(header.contains(",flops,"));
    assert!(header.ends_with(",val_acc"));
    assert_eq!(csv.lines().count(), 126);
}

#[test]
fn extract_describe_prints_schema() {
    let out = run(graf()
        .arg("extract")
        .arg("--space")
        .arg("nb201_like")
        .arg("--describe"));
    let text = stdout(&out);
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["num_features"], 191);
    assert_eq!(parsed["features"][0]["name"], "op_count(zero)");
}

#[test]
fn prune_reports_unreachable_elements() {
    // Index 80 on the tiny triangle has digits (conv3x3, skip, zero): the
    // conv3x3 on (0,1) ends in a node with no live outgoing edge, so it can
    // never influence the output and gets pruned to zero.
    let dir = tempfile::tempdir().unwrap();
    let space = write_tiny_space(dir.path());
    let out = run(graf()
        .arg("prune")
        .arg("--space")
        .arg(&space)
        .arg("--index")
        .arg("80"));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["well_formed"], false);
    let unreachable: Vec<String> = parsed["unreachable"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(unreachable, vec!["0-1"]);
    assert_eq!(parsed["cell"]["labels"][0], "conv3x3");
    assert_eq!(parsed["pruned"]["labels"][0], "zero");
    assert_eq!(parsed["pruned"]["labels"][1], "skip");

    // A fully reachable cell prunes to itself.
    let out = run(graf()
        .arg("prune")
        .arg("--space")
        .arg(&space)
        .arg("--index")
        .arg("31")); // digits (1,1,1): skip everywhere
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["well_formed"], true);
    assert_eq!(parsed["cell"], parsed["pruned"]);
}

#[test]
fn redundancy_counts_dependent_columns() {
    let dir = tempfile::tempdir().unwrap();
    let space = write_tiny_space(dir.path());
    let data = synth_tiny(dir.path(), &space, "depth_shortcut");
    let out = run(graf()
        .arg("redundancy")
        .arg("--space")
        .arg(&space)
        .arg("--data")
        .arg(&data)
        .arg("--recipe")
        .arg("graf"));
    let text = stdout(&out);
    let first = text.lines().next().unwrap();
    // "K of N columns kept (R removed)"
    assert!(first.contains("columns kept"), "{first}");
    assert!(text.contains("affine_combination") || text.contains("constant"));
}

#[test]
fn evaluate_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let space = write_tiny_space(dir.path());
    let data = synth_tiny(dir.path(), &space, "depth_shortcut");
    let out_dir = dir.path().join("reports");
    let out = run(graf()
        .arg("evaluate")
        .arg("--space")
        .arg(&space)
        .arg("--data")
        .arg(&data)
        .arg("--recipes")
        .arg("graf,onehot")
        .arg("--sizes")
        .arg("24,48")
        .arg("--seeds")
        .arg("2")
        .arg("--trees")
        .arg("10")
        .arg("--out-dir")
        .arg(&out_dir));
    let text = stdout(&out);
    assert!(text.contains("held-out rank correlation"));
    let report = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 5); // header + 2 recipes x 2 sizes
    let per_seed = std::fs::read_to_string(out_dir.join("per_seed.csv")).unwrap();
    assert_eq!(per_seed.lines().count(), 9); // header + 2 x 2 x 2
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["space"], "tiny");
    assert_eq!(manifest["n_records"], 125);
    let summary = manifest["results"][0]["summary"].as_str().unwrap();
    assert!(summary.contains('^'), "{summary}");
}

#[test]
fn bias_and_importance_run_on_synthetic_data() {
    let dir = tempfile::tempdir().unwrap();
    let space = write_tiny_space(dir.path());
    let data = synth_tiny(dir.path(), &space, "conv_dominated");
    let out = run(graf()
        .arg("bias")
        .arg("--space")
        .arg(&space)
        .arg("--data")
        .arg(&data)
        .arg("--proxy")
        .arg("nwot"));
    let text = stdout(&out);
    assert!(text.contains("overall rank correlation"));
    assert!(text.contains("conv0"));

    let data = synth_tiny(dir.path(), &space, "conv_count");
    let out = run(graf()
        .arg("importance")
        .arg("--space")
        .arg(&space)
        .arg("--data")
        .arg(&data)
        .arg("--train-size")
        .arg("60")
        .arg("--eval-size")
        .arg("40")
        .arg("--seeds")
        .arg("2")
        .arg("--repeats")
        .arg("1")
        .arg("--trees")
        .arg("10")
        .arg("--top")
        .arg("3"));
    let text = stdout(&out);
    let first_feature = text.lines().nth(1).unwrap();
    assert!(
        first_feature.contains("op_count(conv3x3)"),
        "{first_feature}"
    );
}

#[test]
fn search_compares_against_random() {
    let dir = tempfile::tempdir().unwrap();
    let space = write_tiny_space(dir.path());
    let data = synth_tiny(dir.path(), &space, "lattice");
    let out = run(graf()
        .arg("search")
        .arg("--space")
        .arg(&space)
        .arg("--data")
        .arg(&data)
        .arg("--seeds")
        .arg("2")
        .arg("--initial")
        .arg("6")
        .arg("--iterations")
        .arg("3")
        .arg("--candidates")
        .arg("30")
        .arg("--per-iteration")
        .arg("4")
        .arg("--trees")
        .arg("10"));
    let text = stdout(&out);
    assert!(text.contains("paired search comparison over 2 seeds"));
    assert!(text.contains("surrogate wins"));
    assert!(text.contains("budget    18"));
}

#[test]
fn errors_surface_cleanly() {
    // Unknown space.
    let out = graf()
        .arg("synth")
        .arg("--space")
        .arg("not_a_space")
        .arg("--out")
        .arg("/tmp/never-written.jsonl")
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not_a_space"), "{err}");

    // Free-wiring spaces cannot be synthesized by enumeration.
    let out = graf()
        .arg("synth")
        .arg("--space")
        .arg("nb301_like")
        .arg("--out")
        .arg("/tmp/never-written.jsonl")
        .output()
        .unwrap();
    assert!(!out.status.success());
}
