use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use msetarx::io::ModelSpecDocument;
use msetarx::{make_dgp, Dgp};
use serde_json::Value;

fn msetarx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msetarx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn diagnostic(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("a diagnostic line");
    serde_json::from_str(line).expect("diagnostic is JSON")
}

fn write_model(dir: &Path, name: &str, doc: &ModelSpecDocument) -> String {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(doc).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "m.json", &ModelSpecDocument::from_spec(&make_dgp(Dgp::Dgp1)));
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = msetarx(&["simulate", "--model", &model, "--n", "10", "--seed", "7", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert!(text.starts_with("t,y1,y2\n"));
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn trace_adds_regime_column() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "m.json", &ModelSpecDocument::from_spec(&make_dgp(Dgp::Dgp2)));
    let out = dir.path().join("s.csv");
    let o = msetarx(&["simulate", "--model", &model, "--n", "20", "--seed", "1", "--out", out.to_str().unwrap(), "--trace"]);
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t,y1,y2,f1,f2,regime\n"));
    let data = msetarx::io::read_series(&out).unwrap();
    let regimes = data.regimes.unwrap();
    assert!(regimes[0].is_none());
    assert!(regimes[1..].iter().all(|r| r.map_or(false, |j| j < 3)));
}

#[test]
fn unknown_algorithm_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "m.json", &ModelSpecDocument::from_spec(&make_dgp(Dgp::Dgp1)));
    let data = dir.path().join("s.csv");
    msetarx(&["simulate", "--model", &model, "--n", "50", "--seed", "1", "--out", data.to_str().unwrap()]);
    let out = dir.path().join("fit.json");
    let o = msetarx(&[
        "fit", "--model-config", &model, "--data", data.to_str().unwrap(),
        "--algorithm", "foo", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(diagnostic(&o)["error"], "usage");
    assert!(!out.exists());
}

#[test]
fn validation_errors_exit_3_with_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = ModelSpecDocument::from_spec(&make_dgp(Dgp::Dgp1));
    doc.regimes.retain(|r| r.index != vec![3, 2]);
    doc.partition[0] = vec![0.5, -0.5];
    let model = write_model(dir.path(), "bad.json", &doc);
    let o = msetarx(&["simulate", "--model", &model, "--n", "10", "--seed", "1", "--out", "unused.csv"]);
    assert_eq!(o.status.code(), Some(3));
    let d = diagnostic(&o);
    assert_eq!(d["error"], "validation");
    let v: Vec<String> = d["violations"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect();
    assert!(v.iter().any(|m| m.contains("breakpoints not increasing")), "{:?}", v);
}

#[test]
fn missing_regime_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = ModelSpecDocument::from_spec(&make_dgp(Dgp::Dgp1));
    doc.regimes.retain(|r| r.index != vec![3, 2]);
    let model = write_model(dir.path(), "bad.json", &doc);
    let o = msetarx(&["stationarity", "--model", &model, "--out", "unused.json"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(diagnostic(&o)["message"].as_str().unwrap().contains("missing regime (3,2)"));
}

#[test]
fn malformed_json_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    fs::write(&path, "{\n  \"dims\": {\"D\": 2,,\n}").unwrap();
    let o = msetarx(&["stationarity", "--model", path.to_str().unwrap(), "--out", "unused.json"]);
    assert_eq!(o.status.code(), Some(3));
    let msg = diagnostic(&o)["message"].as_str().unwrap().to_string();
    assert!(msg.contains("line 2") && msg.contains("column"), "{}", msg);
}

#[test]
fn ragged_series_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "m.json", &ModelSpecDocument::from_spec(&make_dgp(Dgp::Dgp1)));
    let data = dir.path().join("s.csv");
    fs::write(&data, "t,y1,y2\n0,1,2\n1,3\n").unwrap();
    let o = msetarx(&[
        "fit", "--model-config", &model, "--data", data.to_str().unwrap(),
        "--algorithm", "batch", "--out", dir.path().join("f.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let d = diagnostic(&o);
    assert_eq!(d["error"], "parse");
    assert!(d["message"].as_str().unwrap().contains("row 2"));
}

#[test]
fn insufficient_data_is_an_estimation_error() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "m.json", &ModelSpecDocument::from_spec(&make_dgp(Dgp::Dgp1)));
    let data = dir.path().join("s.csv");
    msetarx(&["simulate", "--model", &model, "--n", "12", "--seed", "1", "--out", data.to_str().unwrap()]);
    let o = msetarx(&[
        "fit", "--model-config", &model, "--data", data.to_str().unwrap(),
        "--algorithm", "batch", "--out", dir.path().join("f.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(diagnostic(&o)["error"], "estimation");
}

#[test]
fn fit_with_trajectory_and_structure_only_config() {
    let dir = tempfile::tempdir().unwrap();
    let spec = make_dgp(Dgp::Dgp2);
    let model = write_model(dir.path(), "m.json", &ModelSpecDocument::from_spec(&spec));
    let data = dir.path().join("s.csv");
    let o = msetarx(&["simulate", "--model", &model, "--n", "3000", "--seed", "4", "--out", data.to_str().unwrap()]);
    assert!(o.status.success());

    let fit = dir.path().join("fit.json");
    let traj = dir.path().join("traj.csv");
    let o = msetarx(&[
        "fit", "--model-config", &model, "--data", data.to_str().unwrap(), "--algorithm", "adaptive",
        "--upsilon", "0.5,0.6,0.7", "--out", fit.to_str().unwrap(), "--trajectory", traj.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(&fit).unwrap()).unwrap();
    assert_eq!(report["settings"]["upsilon"], serde_json::json!([0.5, 0.6, 0.7]));
    assert_eq!(report["total_regime_time"], 2999);
    let traj_text = fs::read_to_string(&traj).unwrap();
    assert!(traj_text.starts_with("step,regime,max_abs_error\n"));
    assert_eq!(traj_text.lines().count(), 3000);

    let mut doc = ModelSpecDocument::from_spec(&spec);
    doc.regimes.clear();
    doc.exogenous = None;
    doc.noise_cov_eps = None;
    let bare = write_model(dir.path(), "bare.json", &doc);
    let o = msetarx(&[
        "fit", "--model-config", &bare, "--data", data.to_str().unwrap(), "--algorithm", "recursive",
        "--out", fit.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = msetarx(&[
        "fit", "--model-config", &bare, "--data", data.to_str().unwrap(), "--algorithm", "adaptive",
        "--out", fit.to_str().unwrap(), "--trajectory", traj.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stationarity_report_with_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "m.json", &ModelSpecDocument::from_spec(&make_dgp(Dgp::Dgp2)));
    let out = dir.path().join("r.json");
    let o = msetarx(&["stationarity", "--model", &model, "--out", out.to_str().unwrap(), "--cycle", "1,1;1,3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["regimes"][1]["stable"], false);
    assert!((r["exogenous"]["radius"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(r["cycles"].as_array().unwrap().len(), 1);

    let dgp1 = write_model(dir.path(), "m1.json", &ModelSpecDocument::from_spec(&make_dgp(Dgp::Dgp1)));
    let o = msetarx(&["stationarity", "--model", &dgp1, "--out", out.to_str().unwrap(), "--cycle", "1,1;1,2"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(diagnostic(&o)["error"], "precondition");
}

#[test]
fn reproduce_dgp1_intercepts() {
    let dir = tempfile::tempdir().unwrap();
    let o = msetarx(&["reproduce", "dgp1", "--seed", "1", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fit: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    assert_eq!(fit["total_regime_time"], 49_994);
    let spec = make_dgp(Dgp::Dgp1);
    for r in fit["regimes"].as_array().unwrap() {
        let tuple: Vec<usize> = r["index"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap() as usize).collect();
        let truth = &spec.coefficients(&tuple).unwrap().a0;
        for (est, want) in r["a0"].as_array().unwrap().iter().zip(truth) {
            assert!((est.as_f64().unwrap() - want).abs() <= 0.06);
        }
    }
    for name in ["model.json", "series.csv", "stationarity.json", "table.txt"] {
        assert!(dir.path().join(name).exists(), "{}", name);
    }
    let reloaded = msetarx::io::load_model(dir.path().join("model.json")).unwrap();
    assert_eq!(reloaded, spec);
}

#[test]
fn unknown_process_name_is_a_usage_error() {
    let o = msetarx(&["reproduce", "dgp9", "--seed", "1", "--out-dir", "unused"]);
    assert_eq!(o.status.code(), Some(2));
    let o = msetarx(&["simulate"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(diagnostic(&o)["exit_code"], 2);
}
