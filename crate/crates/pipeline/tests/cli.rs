use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vortex-spike")).args(args).current_dir(cwd).output().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn malformed_config_exits_one_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{ "delta": 0.3, "unknown": 1 }"#).unwrap();
    let o = run(&["ground-state", "--config", "bad.json", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_bundle_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["diagnose", "missing", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = json(&dir.path().join("out/error.json"));
    assert_eq!(err["exit_code"], 1);
}

#[test]
fn ground_state_is_bit_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(&["ground-state", "--out", "a"], dir.path());
    let b = run(&["ground-state", "--out", "b", "--threads", "2"], dir.path());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(b.status.success());
    assert_eq!(a.stdout, b.stdout);
    for name in ["ground_state.csv", "ground_state.json", "audit.json"] {
        let x = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let y = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let s = json(&dir.path().join("a/ground_state.json"));
    assert!(s["lambda"].as_f64().unwrap() > 0.0);
    assert!(s["max_ode_residual"].as_f64().unwrap() < 1e-9);
    let csv = std::fs::read_to_string(dir.path().join("a/ground_state.csv")).unwrap();
    assert!(csv.starts_with(&format!("# config_hash {}", s["config_hash"].as_str().unwrap())));
}

#[test]
fn solve_diagnose_and_plot_on_a_coarse_grid() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.json"), r#"{ "grid": { "step": 0.125 }, "levels": 48 }"#).unwrap();
    let o = run(&["solve", "--config", "run.json", "--delta", "0.35", "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bundle = dir.path().join("out/delta_0.3500");
    let manifest = json(&bundle.join("manifest.json"));
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 8);
    for f in files {
        assert!(bundle.join(f["file"].as_str().unwrap()).exists());
    }
    let record = json(&bundle.join("diagnostics.json"));
    assert_eq!(record["config_hash"], manifest["config_hash"]);
    assert!(record["tau_star"].as_f64().unwrap().abs() <= 0.15);

    // total vorticity misses its threshold at this δ, so diagnose reports failure
    let d = run(&["diagnose", bundle.to_str().unwrap()], dir.path());
    assert_eq!(d.status.code(), Some(2));
    let table = String::from_utf8_lossy(&d.stdout);
    assert!(table.contains("pde_residual") && table.contains("FAIL"));

    let before = std::fs::read(bundle.join("surface.svg")).unwrap();
    std::fs::remove_file(bundle.join("streamlines.svg")).unwrap();
    let p = run(&["plot", bundle.to_str().unwrap()], dir.path());
    assert!(p.status.success(), "{}", String::from_utf8_lossy(&p.stderr));
    assert!(bundle.join("streamlines.svg").exists());
    assert_eq!(std::fs::read(bundle.join("surface.svg")).unwrap(), before);

    std::fs::write(bundle.join("eta.bin"), b"garbage").unwrap();
    let bad = run(&["diagnose", bundle.to_str().unwrap()], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}
