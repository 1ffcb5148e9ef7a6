use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use twophase::spectral::snapshot::save_snapshot;
use twophase::spectral::{Grid, SpectralField, C64};

fn twophase(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twophase"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn cos3x(path: &Path) {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let mut f = SpectralField::scalar_zeros(&g);
    f.comp_mut(0)[g.index_of([3, 0, 0])] = C64::new(0.5, 0.0);
    f.comp_mut(0)[g.index_of([-3, 0, 0])] = C64::new(0.5, 0.0);
    save_snapshot(path, &f).unwrap();
}

#[test]
fn besov_norm_of_single_mode_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("cos.tpsf");
    cos3x(&snap);
    for s in [-1.0, 0.0, 0.5, 2.0] {
        let o = twophase(dir.path(), &["besov", "--snapshot", snap.to_str().unwrap(), "--s", &s.to_string()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v = stdout_json(&o);
        let expected = 2f64.powf(s) * PI * 2f64.sqrt();
        let norm = v["norm"].as_f64().unwrap();
        assert!((norm - expected).abs() < 1e-12 * expected, "s={s}: {norm} vs {expected}");
        let blocks = v["blocks"].as_array().unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0]["j"], 1);
    }
    let o = twophase(dir.path(), &["besov", "--snapshot", snap.to_str().unwrap(), "--s", "0", "--low", "0"]);
    assert_eq!(stdout_json(&o)["norm"].as_f64().unwrap(), 0.0);
}

#[test]
fn linear_propagator_check_passes_and_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = twophase(dir.path(), &["linear", "--check", "lemma-a1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["pass"], true);
    let lin = dir.path().join("linear");
    for f in ["lemma_low.csv", "lemma_high.csv"] {
        assert!(lin.join(f).is_file(), "{f} missing");
    }
}

#[test]
fn quick_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = twophase(dir.path(), &["verify", "--suite", "quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["pass"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 5);
    assert!(dir.path().join("verify").join("verify.json").is_file());
}

#[test]
fn errors_exit_with_code_two_and_json_kind() {
    let dir = tempfile::tempdir().unwrap();
    let o = twophase(dir.path(), &["besov", "--snapshot", "does-not-exist.tpsf", "--s", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "Io");

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "taus = [0.1, 0.2, 0.05]\n").unwrap();
    let o = twophase(dir.path(), &["relaxation", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "InvalidConfig");

    std::fs::write(&cfg, "unknown_key = 1\n").unwrap();
    let o = twophase(dir.path(), &["relaxation", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
