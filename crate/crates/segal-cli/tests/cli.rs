//! End-to-end tests against the compiled binary: exit codes and report
//! shapes for each subcommand.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn segal(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_segal"))
        .current_dir(dir)
        .args(args)
        .env_remove("SEGAL_MAX_LEVEL")
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|_| {
        panic!(
            "stdout is not JSON: {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

fn write(dir: &Path, name: &str, value: &Value) {
    std::fs::write(dir.join(name), serde_json::to_string_pretty(value).unwrap()).unwrap();
}

fn edge_graph_json() -> Value {
    json!({ "vertices": ["a", "b"], "edges": [{"id": "e", "ends": ["a", "b"]}] })
}

fn tree_json() -> Value {
    json!({ "vertices": ["a", "b"], "root": "a", "parent": {"b": "a"} })
}

#[test]
fn build_graph_emits_the_expected_levels() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edge.json", &edge_graph_json());
    let out = segal(dir.path(), &["build", "--kind", "graph", "edge.json", "--truncate", "3"]);
    assert!(out.status.success());
    let sset = stdout_json(&out);
    let sizes: Vec<usize> = sset["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l.as_array().unwrap().len())
        .collect();
    assert_eq!(sizes, vec![1, 5, 13, 25]);
}

#[test]
fn build_tree_and_spine() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ab.json", &tree_json());
    let out = segal(dir.path(), &["build", "--kind", "tree", "ab.json", "--truncate", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["levels"][1].as_array().unwrap().len(), 4);

    let out = segal(dir.path(), &["build", "--kind", "spine", "--n", "2", "--truncate", "1"]);
    assert!(out.status.success());
    let sset = stdout_json(&out);
    assert_eq!(sset["levels"][0].as_array().unwrap().len(), 3);
    assert_eq!(sset["levels"][1].as_array().unwrap().len(), 5);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("broken.json"), "{ not json").unwrap();
    let out = segal(dir.path(), &["build", "--kind", "graph", "broken.json"]);
    assert_eq!(out.status.code(), Some(2));

    write(
        dir.path(),
        "bad_graph.json",
        &json!({ "vertices": ["a"], "edges": [{"id": "e", "ends": ["a", "z"]}] }),
    );
    let out = segal(dir.path(), &["build", "--kind", "graph", "bad_graph.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn check_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edge.json", &edge_graph_json());
    let out = segal(
        dir.path(),
        &["build", "--kind", "graph", "edge.json", "--truncate", "4", "--output", "sset.json"],
    );
    assert!(out.status.success());

    let out = segal(dir.path(), &["check", "--validate", "sset.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], "pass");

    let out = segal(dir.path(), &["check", "--2-segal", "sset.json"]);
    assert_eq!(out.status.code(), Some(0));

    let out = segal(dir.path(), &["check", "--1-segal", "sset.json"]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["verdict"], "fail");
    assert_eq!(report["witness"]["kind"], "non-injective");

    let out = segal(dir.path(), &["check", "--path-criterion", "sset.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["agree"], true);
}

#[test]
fn check_path_criterion_on_a_tree() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ab.json", &tree_json());
    segal(
        dir.path(),
        &["build", "--kind", "tree", "ab.json", "--truncate", "4", "--output", "t.json"],
    );
    let out = segal(dir.path(), &["check", "--path-criterion", "t.json"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn hall_reports_products_and_law_failures() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edge.json", &edge_graph_json());
    segal(
        dir.path(),
        &["build", "--kind", "graph", "edge.json", "--truncate", "3", "--output", "sset.json"],
    );
    let out = segal(dir.path(), &["hall", "sset.json", "--table", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["dimension"], 5);
    assert_eq!(report["laws"]["assoc"]["verdict"], "pass");
    assert!(report["table"].as_str().unwrap().lines().count() == 6);

    // non-commutativity of the tree algebra is a law failure: exit 1
    write(dir.path(), "ab.json", &tree_json());
    segal(
        dir.path(),
        &["build", "--kind", "tree", "ab.json", "--truncate", "3", "--output", "t.json"],
    );
    let out = segal(dir.path(), &["hall", "t.json", "--laws", "comm"]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["laws"]["comm"]["verdict"], "fail");
    let witness = report["laws"]["comm"]["witness"].as_array().unwrap();
    assert_eq!(witness[0]["vertices"], json!(["a"]));
    assert_eq!(witness[1]["vertices"], json!(["b"]));
}

#[test]
fn hall_rejects_non_reduced_input() {
    let dir = tempfile::tempdir().unwrap();
    segal(
        dir.path(),
        &["build", "--kind", "simplex", "--n", "1", "--truncate", "3", "--output", "d1.json"],
    );
    let out = segal(dir.path(), &["hall", "d1.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sconstruct_pconstruct_and_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "w2.json",
        &segal::double_category::DoubleCategory::w2().to_json(),
    );
    let out = segal(dir.path(), &["sconstruct", "w2.json", "--truncate", "3"]);
    assert!(out.status.success());
    let sset = stdout_json(&out);
    assert_eq!(sset["levels"][0].as_array().unwrap().len(), 1);
    assert_eq!(sset["levels"][1].as_array().unwrap().len(), 4);

    let out = segal(dir.path(), &["roundtrip", "--kind", "double-cat", "w2.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], "pass");

    write(dir.path(), "edge.json", &edge_graph_json());
    segal(
        dir.path(),
        &["build", "--kind", "graph", "edge.json", "--truncate", "3", "--output", "sset.json"],
    );
    let out = segal(dir.path(), &["pconstruct", "sset.json"]);
    assert_eq!(out.status.code(), Some(0));
    let dc = stdout_json(&out);
    assert_eq!(dc["objects"].as_array().unwrap().len(), 5);
    assert_eq!(dc["squares"].as_array().unwrap().len(), 25);

    let out = segal(dir.path(), &["roundtrip", "--kind", "sset", "sset.json"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn pconstruct_names_the_failed_bijection() {
    let dir = tempfile::tempdir().unwrap();
    // boundary of the 3-simplex, hand-rolled, is not 2-Segal
    let boundary = boundary_of_three_simplex();
    write(dir.path(), "boundary.json", &boundary.to_json());
    let out = segal(dir.path(), &["pconstruct", "boundary.json"]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["verdict"], "fail");
    assert!(report["bijection"].as_str().unwrap().contains("X_3"));
}

#[test]
fn env_var_sets_the_default_truncation() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edge.json", &edge_graph_json());
    let out = Command::new(env!("CARGO_BIN_EXE_segal"))
        .current_dir(dir.path())
        .args(["build", "--kind", "graph", "edge.json"])
        .env("SEGAL_MAX_LEVEL", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["truncation"], 2);
}

fn boundary_of_three_simplex() -> segal::TruncatedSimplicialSet {
    // import from a JSON assembled by hand through the standard simplex
    let full = segal::TruncatedSimplicialSet::standard_simplex(3, 3);
    let mut json = full.to_json();
    // remove the single nondegenerate 3-simplex: find its index, drop it
    // from level 3, and rebuild the tables it appears in
    let levels = json["levels"].as_array().unwrap();
    let level3 = levels[3].as_array().unwrap();
    let identity = json!([0, 1, 2, 3]);
    let removed = level3.iter().position(|d| *d == identity).unwrap();
    let kept: Vec<Value> = level3
        .iter()
        .filter(|d| **d != identity)
        .cloned()
        .collect();
    let reindex = |idx: usize| if idx > removed { idx - 1 } else { idx };
    let faces: Vec<Value> = json["faces"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|entry| {
            let e = entry.as_array().unwrap();
            !(e[0] == 3 && e[2] == json!(removed))
        })
        .map(|entry| {
            let e = entry.as_array().unwrap();
            let (n, i) = (e[0].as_u64().unwrap(), e[1].as_u64().unwrap());
            let (src, dst) = (e[2].as_u64().unwrap() as usize, e[3].as_u64().unwrap() as usize);
            if n == 3 {
                json!([n, i, reindex(src), dst])
            } else {
                json!([n, i, src, dst])
            }
        })
        .collect();
    let degeneracies: Vec<Value> = json["degeneracies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|entry| {
            let e = entry.as_array().unwrap();
            let (n, i) = (e[0].as_u64().unwrap(), e[1].as_u64().unwrap());
            let (src, dst) = (e[2].as_u64().unwrap() as usize, e[3].as_u64().unwrap() as usize);
            if n == 2 {
                json!([n, i, src, reindex(dst)])
            } else {
                json!([n, i, src, dst])
            }
        })
        .collect();
    json["levels"][3] = json!(kept);
    json["faces"] = json!(faces);
    json["degeneracies"] = json!(degeneracies);
    segal::TruncatedSimplicialSet::from_json(&json).unwrap()
}

#[test]
fn check_requires_exactly_one_flag() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edge.json", &edge_graph_json());
    segal(
        dir.path(),
        &["build", "--kind", "graph", "edge.json", "--truncate", "3", "--output", "s.json"],
    );
    let out = segal(dir.path(), &["check", "s.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = segal(dir.path(), &["check", "--validate", "--1-segal", "s.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn human_rendering_is_text() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edge.json", &edge_graph_json());
    segal(
        dir.path(),
        &["build", "--kind", "graph", "edge.json", "--truncate", "4", "--output", "s.json"],
    );
    let out = segal(dir.path(), &["check", "--2-segal", "s.json", "--human"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("2-segal"), "{text}");
    assert!(serde_json::from_str::<Value>(&text).is_err());
}

#[test]
fn monoid_kind_requires_total_products() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "z2.json",
        &json!({
            "elements": ["0", "1"],
            "unit": "0",
            "products": [["0","0","0"], ["0","1","1"], ["1","0","1"], ["1","1","0"]],
        }),
    );
    let out = segal(dir.path(), &["build", "--kind", "monoid", "z2.json", "--truncate", "3"]);
    assert!(out.status.success());
    let sizes: Vec<usize> = stdout_json(&out)["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l.as_array().unwrap().len())
        .collect();
    assert_eq!(sizes, vec![1, 2, 4, 8]);

    write(
        dir.path(),
        "partial.json",
        &json!({
            "elements": ["1", "x"],
            "unit": "1",
            "products": [["1","1","1"], ["1","x","x"], ["x","1","x"]],
        }),
    );
    let out = segal(dir.path(), &["build", "--kind", "monoid", "partial.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = segal(dir.path(), &["build", "--kind", "partial-monoid", "partial.json"]);
    assert!(out.status.success());
}
