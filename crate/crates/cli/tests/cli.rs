use std::process::{Command, Output};

use serde_json::Value;

fn spherelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherelab")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("spherelab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn transform_values() {
    let out = spherelab(&["transform", "--preset", "constant", "--dim", "2", "--p", "1", "--at", "1,0"]);
    assert!(out.status.success());
    let r = report(&out);
    assert_eq!(r["command"], "transform");
    assert!((r["results"][0]["hp"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    for key in ["config", "residuals", "verdict"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }

    let out = spherelab(&["transform", "--dim", "3", "--p", "1", "--at", "0,0,1"]);
    let hp = report(&out)["results"][0]["hp"].as_f64().unwrap();
    assert!((hp - 2.0 * std::f64::consts::PI).abs() < 1e-9);
}

#[test]
fn origin_warns() {
    let out = spherelab(&["transform", "--at", "0,0,0"]);
    assert!(out.status.success());
    assert_eq!(report(&out)["results"][0]["hp"], 0.0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let out = spherelab(&["derivative", "--at", "0,0,0", "--alpha", "2,0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(spherelab(&["transform", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(spherelab(&["transform", "--dim", "3", "--at", "1,0"]).status.code(), Some(2));
    assert_eq!(spherelab(&["derivative", "--p", "2", "--alpha", "2,0,0"]).status.code(), Some(2));
    assert_eq!(spherelab(&["bogus"]).status.code(), Some(2));
    // signed density: H^p < 0 somewhere, so H is undefined there
    let signed = r#"{"dim":3,"kind":"preset","name":"constant","params":{"value":-1}}"#;
    assert_eq!(spherelab(&["curvature", "--density", signed, "--p", "1.5", "--grid", "5"]).status.code(), Some(3));
}

#[test]
fn derivative_agrees_with_finite_differences() {
    let out = spherelab(&["derivative", "--preset", "watson", "--p", "2.5", "--at", "0.3,-0.2,0.8", "--alpha", "2,0,0"]);
    assert!(out.status.success());
    let r = report(&out);
    assert_eq!(r["verdict"], "agree");
    assert_eq!(r["results"][0]["formula"], "weighted");
    let out = spherelab(&["derivative", "--preset", "bump", "--dim", "2", "--p", "3", "--at", "0.6,0.8", "--alpha", "4,0"]);
    assert_eq!(report(&out)["results"][0]["formula"], "subsphere");
    assert!(out.status.success());
}

#[test]
fn curvature_reports() {
    let path = tmp("curv.json");
    let out = spherelab(&["curvature", "--p", "2.5", "--grid", "50", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("min radius"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["verdict"], "all-positive");
    let spread = r["residuals"][1]["value"].as_f64().unwrap();
    assert!(spread < 1e-5);

    let out = spherelab(&["curvature", "--preset", "vanishing-point", "--dim", "2", "--p", "1", "--grid", "40"]);
    let r = report(&out);
    assert_eq!(r["verdict"], "degenerate");
    assert!(r["results"][0]["min_radius"].as_f64().unwrap().abs() < 1e-6);

    let out = spherelab(&["curvature", "--preset", "bump", "--p", "1.5", "--grid", "40"]);
    assert_eq!(report(&out)["verdict"], "all-positive");
}

#[test]
fn lindquist_flags_signed_density() {
    let signed = r#"{"dim":3,"kind":"preset","name":"quadratic","params":{"matrix":[[1,0,0],[0,-1,0],[0,0,0]]}}"#;
    let out = spherelab(&["lindquist", "--density", signed, "--p", "2.5", "--grid", "30"]);
    let r = report(&out);
    assert_eq!(r["verdict"], "not-convex");
    assert_eq!(r["results"][0]["disagreements"], 0);
    let out = spherelab(&["lindquist", "--p", "1", "--grid", "30"]);
    assert_eq!(report(&out)["verdict"], "convex");
}

#[test]
fn verify_suites() {
    let out = spherelab(&["verify", "--suite", "inversion"]);
    assert!(out.status.success());
    let r = report(&out);
    let c = r["results"].as_array().unwrap().iter().find(|c| c["name"] == "c_3 estimate").unwrap();
    assert!((c["value"].as_f64().unwrap() - 0.5).abs() < 1e-6);

    let out = spherelab(&["verify", "--suite", "derivatives", "--p", "2.5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = spherelab(&["verify", "--suite", "convexity", "--preset", "constant", "--p", "2.5", "--grid", "40"]);
    assert!(out.status.success());

    // failures become the exit code
    let signed = r#"{"dim":3,"kind":"preset","name":"quadratic","params":{"matrix":[[1,0,0],[0,-1,0],[0,0,0]]}}"#;
    let out = spherelab(&["verify", "--suite", "convexity", "--density", signed, "--p", "2.5", "--grid", "20"]);
    let failed = report(&out)["results"].as_array().unwrap().iter().filter(|c| c["passed"] == false).count();
    assert!(failed >= 1);
    assert_eq!(out.status.code(), Some(failed as i32));
}

#[test]
fn mesh_obj() {
    let path = tmp("body.obj");
    let out = spherelab(&["mesh", "--p", "1.5", "--grid", "120", "--level", "16", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let r = report(&out);
    assert_eq!(r["results"][0]["vertices"], 120);
    let (lo, hi) = (r["results"][0]["min_vertex_norm"].as_f64().unwrap(), r["results"][0]["max_vertex_norm"].as_f64().unwrap());
    assert!((hi - lo) < 1e-5 * hi);
    let obj = std::fs::read_to_string(&path).unwrap();
    let verts: Vec<[f64; 3]> = obj
        .lines()
        .filter_map(|l| l.strip_prefix("v "))
        .map(|l| {
            let c: Vec<f64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            [c[0], c[1], c[2]]
        })
        .collect();
    assert_eq!(verts.len(), 120);
    for line in obj.lines().filter_map(|l| l.strip_prefix("f ")) {
        for t in line.split_whitespace() {
            let i: usize = t.parse().unwrap();
            assert!((1..=120).contains(&i));
        }
    }
    assert_eq!(spherelab(&["mesh", "--dim", "2"]).status.code(), Some(2));
}

#[test]
fn density_file() {
    let path = tmp("density.json");
    std::fs::write(&path, r#"{"dim":2,"kind":"atoms","atoms":[[[1,0],1.0],[[0,1],2.0]]}"#).unwrap();
    let out = spherelab(&["transform", "--density", path.to_str().unwrap(), "--at", "0.6,0.8"]);
    assert!(out.status.success());
    let r = report(&out);
    assert!((r["results"][0]["hp"].as_f64().unwrap() - 2.2).abs() < 1e-12);
    assert_eq!(r["config"]["dim"], 2);
    assert_eq!(spherelab(&["transform", "--density", "/nonexistent.json"]).status.code(), Some(2));
}
