use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

use tablelock::augment::Target;
use tablelock::gadgets::{build_gadget, parse_gadget_spec, Variant};
use tablelock::graph::Edge;
use tablelock::table::{build_graphs, parse_table};

fn sample() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sample.json")
}

fn tablelock(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tablelock"));
    cmd.args(args).env_remove("TABLELOCK_ENUM_BUDGET").env_remove("TABLELOCK_SEARCH_LIMIT");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

/// A table whose cells all sit strictly inside their bounds, so every
/// suppressed cell is an undirected edge.
fn interior_table(suppressed: &[(usize, usize)], rows: usize, cols: usize) -> String {
    let cells: Vec<Value> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .map(|(r, c)| {
            json!({"row": format!("r{r}"), "col": format!("c{c}"), "value": 5, "lower": 0, "upper": 10,
                   "suppressed": suppressed.contains(&(r, c))})
        })
        .collect();
    json!({
        "rows": (0..rows).map(|r| format!("r{r}")).collect::<Vec<_>>(),
        "cols": (0..cols).map(|c| format!("c{c}")).collect::<Vec<_>>(),
        "cells": cells,
    })
    .to_string()
}

#[test]
fn audit_sample() {
    let f = sample();
    let out = tablelock(&["audit", f.to_str().unwrap(), "--k", "2", "--json"], &[]);
    assert_eq!(out.status.code(), Some(1));
    let r = json_of(&out);
    assert_eq!(r["levels"]["level1"]["all_protected"], json!(true));
    assert_eq!(r["levels"]["level2"]["all_protected"], json!(true));
    assert_eq!(r["levels"]["level3"][1]["holds"], json!(false));
    assert_eq!(r["levels"]["level4"]["holds"], json!(false));

    let text = tablelock(&["audit", f.to_str().unwrap(), "--k", "2"], &[]);
    assert_eq!(text.status.code(), Some(1));
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("missing pairs (1,c), (3,a)"), "{text}");
}

#[test]
fn audit_with_oracle_agrees() {
    let f = sample();
    let out = tablelock(&["audit", f.to_str().unwrap(), "--oracle", "--json"], &[]);
    assert_eq!(out.status.code(), Some(1));
    let r = json_of(&out);
    assert_eq!(r["oracle"]["mismatches"], json!([]));
    assert_eq!(r["oracle"]["table_protected"], json!(false));

    let starved = tablelock(&["audit", f.to_str().unwrap(), "--oracle"], &[("TABLELOCK_ENUM_BUDGET", "3")]);
    assert_eq!(starved.status.code(), Some(3));
}

#[test]
fn audit_without_suppression_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "open.json", &interior_table(&[], 2, 2));
    let out = tablelock(&["audit", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "bad.json", "{\"rows\": [\"1\"], ");
    for cmd in ["audit", "plan"] {
        let mut args = vec![cmd, path.to_str().unwrap()];
        if cmd == "plan" {
            args.extend(["--target", "cells"]);
        }
        assert_eq!(tablelock(&args, &[]).status.code(), Some(2));
    }
    let missing = tablelock(&["audit", "/no/such/file.json"], &[]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn plan_completes_sample() {
    let f = sample();
    let out = tablelock(&["plan", f.to_str().unwrap(), "--target", "table", "--mode", "exact", "--json"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["plan"]["cost"], json!(2));
    assert_eq!(r["plan"]["cells"], json!([["1", "c"], ["3", "a"]]));
    assert_eq!(r["audit_after"]["level4"]["holds"], json!(true));
    let after = parse_table(&r["table_after"].to_string()).unwrap();
    assert_eq!(after.suppressed_cells().len(), 9);

    let greedy = tablelock(&["plan", f.to_str().unwrap(), "--target", "table", "--mode", "greedy", "--json"], &[]);
    assert_eq!(greedy.status.code(), Some(0));
    assert_eq!(json_of(&greedy)["plan"]["cost"], json!(2));

    let tight = tablelock(&["plan", f.to_str().unwrap(), "--target", "table", "--budget", "1"], &[]);
    assert_eq!(tight.status.code(), Some(1));
    let limited = tablelock(&["plan", f.to_str().unwrap(), "--target", "table"], &[("TABLELOCK_SEARCH_LIMIT", "1")]);
    assert_eq!(limited.status.code(), Some(3));
}

#[test]
fn plan_sets_matches_exhaustion() {
    // A path r0-c0-r1-c1 of undirected edges in a 3x3 table.
    let suppressed = [(0, 0), (1, 0), (1, 1)];
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "path.json", &interior_table(&suppressed, 3, 3));
    let out = tablelock(&["plan", path.to_str().unwrap(), "--target", "sets", "--k", "1", "--json"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let cost = json_of(&out)["plan"]["cost"].as_u64().unwrap() as usize;

    let t = parse_table(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let (total, h) = build_graphs(&t);
    let free: Vec<Edge> = total.edges().filter(|e| !h.contains(e.key())).collect();
    let best = (0u32..1 << free.len())
        .filter(|m| {
            let added = (0..free.len()).filter(|i| m >> i & 1 == 1).map(|i| free[i]);
            Target::Sets(1).holds(&h.with_edges(added).unwrap())
        })
        .map(|m| m.count_ones() as usize)
        .min()
        .unwrap();
    assert_eq!(cost, best);
}

#[test]
fn gadget_graph_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", r#"{"S":["s1"],"W":[["s1"]],"h":1}"#);
    let out_dir = dir.path().join("out");
    let out = tablelock(&["gadget", spec.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "--json"], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["gadget"]["p"], json!(2));
    let suppressed = std::fs::read_to_string(out_dir.join("suppressed.dot")).unwrap();
    assert!(suppressed.contains("\"c:b0\" -> \"r:a0\""));
    assert!(suppressed.contains("\"r:a0\" -> \"c:b1\""));
    let total = std::fs::read_to_string(out_dir.join("total.dot")).unwrap();
    assert_eq!(total.matches("->").count(), 4);
}

#[test]
fn gadget_table_round_trip_and_decision() {
    let dir = tempfile::tempdir().unwrap();
    for (spec, solvable) in [
        (r#"{"S":["s1","s2"],"W":[["s1"],["s1","s2"]],"h":1}"#, true),
        (r#"{"S":["s1","s2"],"W":[["s1"],["s2"]],"h":1}"#, false),
    ] {
        let spec_path = write(dir.path(), "spec.json", spec);
        let out_dir = dir.path().join(if solvable { "yes" } else { "no" });
        let out = tablelock(
            &["gadget", spec_path.to_str().unwrap(), "--emit", "table", "--out", out_dir.to_str().unwrap(), "--json"],
            &[],
        );
        assert_eq!(out.status.code(), Some(0));
        let p = json_of(&out)["gadget"]["p"].as_u64().unwrap().to_string();

        let table_path = out_dir.join("table.json");
        let t = parse_table(&std::fs::read_to_string(&table_path).unwrap()).unwrap();
        let (hs, _) = parse_gadget_spec(spec).unwrap();
        let g = build_gadget(&hs, Variant::CellOrSets);
        assert_eq!(build_graphs(&t), (g.total, g.suppressed));

        let plan = tablelock(&["plan", table_path.to_str().unwrap(), "--target", "cells", "--budget", &p], &[]);
        assert_eq!(plan.status.code(), Some(if solvable { 0 } else { 1 }), "{spec}");
    }
}

#[test]
fn gadget_rejects_empty_family() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", r#"{"S":["s1"],"W":[],"h":1}"#);
    assert_eq!(tablelock(&["gadget", spec.to_str().unwrap()], &[]).status.code(), Some(2));
}

#[test]
fn oracle_queries() {
    let f = sample();
    let out = tablelock(&["oracle", "cell-range", f.to_str().unwrap(), "--row", "1", "--col", "a", "--json"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["ranges"], json!([{"cell": ["1", "a"], "min": "0", "max": "5", "invariant": false}]));

    let published = tablelock(&["oracle", "cell-range", f.to_str().unwrap(), "--row", "1", "--col", "c"], &[]);
    assert_eq!(published.status.code(), Some(2));

    let space = tablelock(&["oracle", "invariant-space", f.to_str().unwrap(), "--json"], &[]);
    assert_eq!(space.status.code(), Some(0));
    // Seven cells tied together by six line sums, five of them independent.
    assert_eq!(json_of(&space)["dimension"], json!(5));
}

#[test]
fn reports_are_stable() {
    let f = sample();
    let args = ["plan", f.to_str().unwrap(), "--target", "sets", "--k", "2", "--json"];
    let a = tablelock(&args, &[]);
    let b = tablelock(&args, &[]);
    assert_eq!(a.stdout, b.stdout);
}
