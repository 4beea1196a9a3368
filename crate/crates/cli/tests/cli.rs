use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hdatopo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdatopo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn realize_circle_reports_betti() {
    let out = hdatopo(&["realize", "fixture:circle"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    let cert = &v["certificate"];
    assert_eq!(cert["isomorphic"], true);
    assert_eq!(cert["homology_matches"], true);
    let betti: Vec<u64> = cert["model_homology"]["degrees"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["betti"].as_u64().unwrap())
        .collect();
    assert_eq!(&betti[..2], &[1, 1]);
    assert!(betti[2..].iter().all(|&b| b == 0));
}

#[test]
fn realize_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = hdatopo(&[
            "realize",
            "fixture:triangle",
            "--seed",
            "7",
            "--out",
            path_str(p),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn validate_rejects_broken_input() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    // square whose faces break d^0_1 d^0_2 = d^0_1 d^0_1
    let square = r#"{
        "cubes": [
            {"dim": 0, "key": "a"}, {"dim": 0, "key": "b"}, {"dim": 0, "key": "c"}, {"dim": 0, "key": "d"},
            {"dim": 1, "key": "ab"}, {"dim": 1, "key": "cd"}, {"dim": 1, "key": "ac"}, {"dim": 1, "key": "bd"},
            {"dim": 2, "key": "s"}
        ],
        "faces": [
            {"cube": "ab", "i": 1, "k": 0, "face": "a"}, {"cube": "ab", "i": 1, "k": 1, "face": "b"},
            {"cube": "cd", "i": 1, "k": 0, "face": "c"}, {"cube": "cd", "i": 1, "k": 1, "face": "d"},
            {"cube": "ac", "i": 1, "k": 0, "face": "a"}, {"cube": "ac", "i": 1, "k": 1, "face": "c"},
            {"cube": "bd", "i": 1, "k": 0, "face": "b"}, {"cube": "bd", "i": 1, "k": 1, "face": "d"},
            {"cube": "s", "i": 1, "k": 0, "face": "ab"}, {"cube": "s", "i": 1, "k": 1, "face": "cd"},
            {"cube": "s", "i": 2, "k": 0, "face": "bd"}, {"cube": "s", "i": 2, "k": 1, "face": "ac"}
        ]
    }"#;
    std::fs::write(&broken, square).unwrap();
    let out = hdatopo(&["validate", path_str(&broken)]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "precubical");
    assert!(!err["details"].as_array().unwrap().is_empty());

    let fixed = square
        .replace(
            r#""i": 2, "k": 0, "face": "bd""#,
            r#""i": 2, "k": 0, "face": "ac""#,
        )
        .replacen(
            r#""i": 2, "k": 1, "face": "ac""#,
            r#""i": 2, "k": 1, "face": "bd""#,
            1,
        );
    std::fs::write(&broken, fixed).unwrap();
    let out = hdatopo(&["validate", path_str(&broken)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout_json(&out)["counts"], serde_json::json!([4, 4, 1]));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(hdatopo(&["nonsense"]).status.code(), Some(2));
    assert_eq!(hdatopo(&["realize"]).status.code(), Some(2));
    assert_eq!(
        hdatopo(&["geom-check", "x", "--mode", "decimal"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn missing_file_is_a_json_error() {
    let out = hdatopo(&["homology", "/nonexistent/k.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "io");
}

#[test]
fn geom_check_tetra() {
    let out = hdatopo(&[
        "geom-check",
        "fixture:tetra_boundary",
        "--samples",
        "1000",
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!(v["roundtrip"]["max_error"].as_f64().unwrap() < 1e-9);
    let out = hdatopo(&[
        "geom-check",
        "fixture:triangle",
        "--mode",
        "rational",
        "--samples",
        "20",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["roundtrip"]["exact"], true);
}

#[test]
fn stages_feed_each_other() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let run = |args: &[&str]| {
        let out = hdatopo(args);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    run(&["hda", "fixture:triangle", "--out", path_str(&p("hda.json"))]);
    run(&["verify-model", path_str(&p("hda.json"))]);
    run(&[
        "fill",
        path_str(&p("hda.json")),
        "--out",
        path_str(&p("filled.json")),
    ]);
    // filling recreates the squares under generated keys; cells below them are untouched
    let read =
        |name: &str| -> Value { serde_json::from_slice(&std::fs::read(p(name)).unwrap()).unwrap() };
    let low_keys = |v: &Value| -> Vec<String> {
        v["cubes"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|c| c["dim"] != 2)
            .map(|c| c["key"].to_string())
            .collect()
    };
    let (original, filled) = (read("hda.json"), read("filled.json"));
    assert_eq!(low_keys(&original), low_keys(&filled));
    assert_eq!(
        original["cubes"].as_array().unwrap().len(),
        filled["cubes"].as_array().unwrap().len()
    );
    assert_eq!(original["labels"], filled["labels"]);
    run(&[
        "accessible",
        path_str(&p("hda.json")),
        "--out",
        path_str(&p("acc.json")),
    ]);
    run(&["verify-model", path_str(&p("acc.json"))]);
    run(&[
        "to-svs",
        path_str(&p("acc.json")),
        "--out",
        path_str(&p("svs.json")),
    ]);
    run(&["validate", path_str(&p("svs.json"))]);
    run(&[
        "statespace",
        path_str(&p("svs.json")),
        "--out",
        path_str(&p("ts.json")),
    ]);
    run(&[
        "homology",
        path_str(&p("acc.json")),
        "--out",
        path_str(&p("h.json")),
    ]);
    let h: Value = serde_json::from_slice(&std::fs::read(p("h.json")).unwrap()).unwrap();
    assert_eq!(h["betti"][0], 1);
    assert_eq!(h["euler"], 1);

    // a non-accessible HDA cannot become a system
    let out = hdatopo(&["to-svs", path_str(&p("hda.json"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn homology_of_rp2_has_torsion() {
    let out = hdatopo(&["homology", "fixture:rp2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["betti"], serde_json::json!([1, 0, 0]));
    assert_eq!(v["torsion"][1], serde_json::json!(["2"]));
}

#[test]
fn peterson_statespace() {
    let out = hdatopo(&["statespace", "fixture:peterson"]);
    assert!(out.status.success());
    let cubes = stdout_json(&out)["cubes"].as_array().unwrap().clone();
    let vertices = cubes.iter().filter(|c| c["dim"] == 0).count();
    assert_eq!((vertices, cubes.len() - vertices), (20, 34));
}

#[test]
fn export_dot_shades_squares() {
    let out = hdatopo(&["export-dot", "fixture:triangle"]);
    assert!(out.status.success());
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("subgraph square").count(), 3);
    assert_eq!(dot.matches(" -> ").count(), 9);
}
