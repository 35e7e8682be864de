use std::path::PathBuf;
use vortex_pipeline::config::{ConfigError, Overrides, RunConfig};

fn write(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let p = dir.path().join("run.json");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn defaults_validate_without_warnings() {
    let cfg = RunConfig::default();
    assert_eq!(cfg.p, 2);
    assert_eq!(cfg.delta_list.len(), 7);
    assert!(cfg.validate().unwrap().is_empty());
}

#[test]
fn missing_file_is_a_read_error() {
    let e = RunConfig::load(Some(std::path::Path::new("/nonexistent/run.json")), &Overrides::default()).unwrap_err();
    assert!(matches!(e, ConfigError::Read { .. }));
}

#[test]
fn partial_document_keeps_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, r#"{ "delta": 0.3, "threads": 3, "grid": { "step": 0.125 } }"#);
    let (cfg, warnings) = RunConfig::load(Some(&p), &Overrides::default()).unwrap();
    assert!(warnings.is_empty());
    assert_eq!((cfg.delta, cfg.threads, cfg.grid.step, cfg.rescale), (0.3, 3, 0.125, 10.0));
    let over = Overrides { delta: Some(0.25), out: Some("elsewhere".into()), threads: Some(1) };
    let (cfg, _) = RunConfig::load(Some(&p), &over).unwrap();
    assert_eq!((cfg.delta, cfg.threads), (0.25, 1));
    assert_eq!(cfg.out, PathBuf::from("elsewhere"));
}

#[test]
fn malformed_and_unknown_keys_are_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    for text in ["{ not json", r#"{ "deltaa": 0.3 }"#, r#"{ "grid": { "stepp": 0.1 } }"#, r#"{ "delta": "x" }"#] {
        let p = write(&dir, text);
        let e = RunConfig::load(Some(&p), &Overrides::default()).unwrap_err();
        assert!(matches!(e, ConfigError::Parse(_)), "{text}: {e}");
    }
}

#[test]
fn unusable_values_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for text in [
        r#"{ "grid": { "lx": 8.0, "nx": 64 } }"#,
        r#"{ "grid": { "step": 0.0 } }"#,
        r#"{ "grid": { "step": 0.5 } }"#,
        r#"{ "delta": 1.2 }"#,
        r#"{ "delta_list": [0.3, -0.1] }"#,
        r#"{ "tolerances": { "tau": 0.0 } }"#,
        r#"{ "p": 0 }"#,
        r#"{ "g": -1.0 }"#,
        r#"{ "rescale": 0.0 }"#,
        r#"{ "tau_hint": 0.5 }"#,
        r#"{ "levels": 2 }"#,
    ] {
        let p = write(&dir, text);
        let e = RunConfig::load(Some(&p), &Overrides::default()).unwrap_err();
        assert!(matches!(e, ConfigError::Invalid(_)), "{text}: {e}");
    }
}

#[test]
fn deltas_outside_the_validated_range_warn() {
    let cfg = RunConfig { delta: 0.15, delta_list: vec![0.3, 0.7], ..RunConfig::default() };
    let w = cfg.validate().unwrap();
    assert_eq!(w.len(), 2, "{w:?}");
}

#[test]
fn hash_ignores_output_and_threads_only() {
    let base = RunConfig::default();
    let h = base.hash();
    assert_eq!(h.len(), 64);
    assert!(h.chars().all(|c| c.is_ascii_hexdigit()));
    assert_eq!(RunConfig { out: "x".into(), threads: 7, ..base.clone() }.hash(), h);
    assert_ne!(base.at_delta(0.3).hash(), h);
    assert_ne!(RunConfig { rescale: 5.0, ..base.clone() }.hash(), h);
}

#[test]
fn explicit_grid_is_used_when_complete() {
    let mut cfg = RunConfig::default();
    cfg.grid.lx = Some(14.0);
    cfg.grid.nx = Some(256);
    cfg.grid.ny = Some(39);
    let g = cfg.grid.grid(0.4).unwrap();
    assert_eq!((g.nx, g.ny, g.lx), (256, 39, 14.0));
    cfg.grid.nx = Some(64);
    assert!(cfg.grid.grid(0.4).is_err());
    cfg.delta = 0.4;
    cfg.delta_list = vec![0.4];
    assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))));
}
