use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn meander(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meander")).args(args).output().unwrap()
}

fn config(name: &str) -> String {
    configs().join(name).to_str().unwrap().to_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn extract_reports_modal_parameters() {
    let out = meander(&["extract", "--config", &config("paper.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rel = |k: &str, want: f64| ((v[k].as_f64().unwrap() - want) / want).abs();
    assert!(rel("Ze_ohm", 86.282) < 1e-4);
    assert!(rel("Zo_ohm", 14.8211) < 1e-4);
    assert!(rel("Z11_ohm", 50.5516) < 1e-4);
    assert!(rel("Z12_ohm", 35.7304) < 1e-4);
    assert!((v["k"].as_f64().unwrap() - 2.413).abs() < 1e-3);

    let v = json(&meander(&["extract", "--config", &config("uncoupled.json")]));
    assert!((v["Ze_ohm"].as_f64().unwrap() - 50.0).abs() < 1e-9);
    assert!((v["k"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["tau_e_ns_per_m"].as_f64().unwrap() - 5.0).abs() < 1e-9);
}

#[test]
fn extract_rejects_non_positive_definite_capacitance() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bad.json", r#"{"L_nH_per_m": [300, 100], "C_pF_per_m": [100, -120]}"#);
    let out = meander(&["extract", "--config", &p]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("C_pF_per_m"));
}

#[test]
fn respond_writes_selected_nodes() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("r.csv");
    let out = meander(&["respond", "--config", &config("paper.json"), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time_s,V1_V,V2_V,V3_V"));
    // 3 ns at 2.5 ps
    assert_eq!(lines.count(), 1201);

    let out = meander(&[
        "respond", "--config", &config("paper.json"), "--out", csv.to_str().unwrap(), "--nodes", "v4,v2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("time_s,V4_V,V2_V\n"));

    let out = meander(&["respond", "--config", &config("paper.json"), "--out", csv.to_str().unwrap(), "--nodes", "v9"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn equalize_reports_matched_amplitudes() {
    let out = meander(&["equalize", "--config", &config("paper.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in [
        "k", "y0_matched_S", "z0_matched_ohm", "y0_S", "v_c", "v_o", "v_e", "eq9_residual", "eq9_applicable",
        "separation_ok",
    ] {
        assert!(!v[key].is_null(), "missing {key}");
    }
    let vo = v["v_o"].as_f64().unwrap();
    let ve = v["v_e"].as_f64().unwrap();
    assert!((vo - ve).abs() < 1e-12);
    assert!(v["design"].is_null());

    let v = json(&meander(&["equalize", "--config", &config("paper.json"), "--design", "86.282"]));
    let zo = v["design"]["z_odd_ohm"].as_f64().unwrap();
    assert!((86.282 / zo - (1.0 + 2f64.sqrt()).powi(2)).abs() < 1e-9);
}

#[test]
fn verify_exit_codes() {
    let out = meander(&["verify", "--config", &config("paper.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], Value::Bool(true));
    assert!(v["deviation_v3"].as_f64().unwrap() < 0.01);

    assert_eq!(meander(&["verify", "--config", &config("uncoupled.json")]).status.code(), Some(0));
    assert_eq!(meander(&["verify", "--config", &config("truncated.json")]).status.code(), Some(2));
    assert_eq!(meander(&["verify", "--config", "/nonexistent.json"]).status.code(), Some(1));
}

#[test]
fn plot_renders_one_polyline_per_column() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("r.csv");
    let svg = dir.path().join("r.svg");
    meander(&["respond", "--config", &config("paper.json"), "--out", csv.to_str().unwrap()]);
    let out = meander(&["plot", csv.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    let lines: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("polyline")).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|n| n.attribute("points").unwrap().split(' ').count() == 1201));

    let bad = write(&dir, "t.csv", "time_s\n0\n1e-12\n");
    let out = meander(&["plot", &bad, "--out", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |tag: &str| {
        let csv = dir.path().join(format!("{tag}.csv"));
        let svg = dir.path().join(format!("{tag}.svg"));
        meander(&["respond", "--config", &config("paper.json"), "--out", csv.to_str().unwrap()]);
        meander(&["plot", csv.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
        let eq = meander(&["equalize", "--config", &config("paper.json")]).stdout;
        (std::fs::read(csv).unwrap(), std::fs::read(svg).unwrap(), eq)
    };
    assert_eq!(run("a"), run("b"));
}
