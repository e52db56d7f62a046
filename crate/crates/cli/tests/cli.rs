use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn compass(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compass"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "status {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn chessboard_flag_follows_amplitude() {
    let dir = tempfile::tempdir().unwrap();
    ok(&compass(
        dir.path(),
        &["wigner", "--alpha", "5", "--prefix", "big"],
    ));
    ok(&compass(
        dir.path(),
        &["wigner", "--alpha", "1", "--prefix", "small"],
    ));
    let big = read_json(&dir.path().join("big_tiles.json"));
    let small = read_json(&dir.path().join("small_tiles.json"));
    assert_eq!(big["tile_report"]["has_chessboard"], true);
    assert_eq!(small["tile_report"]["has_chessboard"], false);
    let ratio = big["tile_report"]["tile_area_over_vacuum_footprint"]
        .as_f64()
        .unwrap();
    assert!(ratio < 0.1, "{ratio}");
}

#[test]
fn vacuum_grid_integrates_to_one() {
    let dir = tempfile::tempdir().unwrap();
    ok(&compass(
        dir.path(),
        &[
            "wigner", "--state", "coherent", "--alpha", "0", "--prefix", "vac",
        ],
    ));
    let meta = read_json(&dir.path().join("vac.json"));
    let integral = meta["results"]["integral"].as_f64().unwrap();
    assert!((integral - 1.0).abs() < 2e-3, "{integral}");
    let csv = fs::read_to_string(dir.path().join("vac.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x,p,W"));
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["wigner", "--alpha", "3", "--res", "121"];
    ok(&compass(a.path(), &args));
    ok(&compass(b.path(), &args));
    for name in ["wigner.csv", "wigner.json", "wigner_tiles.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "alpha = 2.5\nres = 51\nprefix = \"fromfile\"\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    ok(&compass(dir.path(), &["--config", cfg_s, "wigner"]));
    let meta = read_json(&dir.path().join("fromfile.json"));
    assert_eq!(meta["config"]["alpha"], 2.5);
    assert_eq!(meta["config"]["grid"]["nx"], 51);

    ok(&compass(
        dir.path(),
        &[
            "--config", cfg_s, "wigner", "--alpha", "1.5", "--prefix", "flag",
        ],
    ));
    let meta = read_json(&dir.path().join("flag.json"));
    assert_eq!(meta["config"]["alpha"], 1.5);
    assert_eq!(meta["config"]["grid"]["nx"], 51);
}

#[test]
fn angles_default_to_units_of_pi() {
    let dir = tempfile::tempdir().unwrap();
    ok(&compass(
        dir.path(),
        &[
            "wigner",
            "--alpha",
            "1",
            "--alpha-phase",
            "0.5",
            "--res",
            "11",
            "--prefix",
            "pi",
        ],
    ));
    ok(&compass(
        dir.path(),
        &[
            "--radians",
            "wigner",
            "--alpha",
            "1",
            "--alpha-phase",
            "0.5",
            "--res",
            "11",
            "--prefix",
            "rad",
        ],
    ));
    let pi = read_json(&dir.path().join("pi.json"))["config"]["alpha_phase_rad"]
        .as_f64()
        .unwrap();
    let rad = read_json(&dir.path().join("rad.json"))["config"]["alpha_phase_rad"]
        .as_f64()
        .unwrap();
    assert!((pi - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    assert_eq!(rad, 0.5);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = compass(dir.path(), &["wigner", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let out = compass(dir.path(), &["wigner", "--state", "squeezed"]);
    assert_eq!(out.status.code(), Some(2));
    let out = compass(dir.path(), &["protocol", "--mode", "bogus"]);
    assert_eq!(out.status.code(), Some(2));

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "alpah = 3\n").unwrap();
    let out = compass(dir.path(), &["--config", cfg.to_str().unwrap(), "wigner"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpah"));
}

#[test]
fn numeric_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // without a dispersive phase, detecting atom A in the orthogonal Ramsey state has zero probability
    let out = compass(
        dir.path(),
        &[
            "protocol",
            "--alpha",
            "0",
            "--phi",
            "0",
            "--phi-prime",
            "0",
            "--theta-a",
            "0",
            "--theta-a-prime",
            "1",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn coarse_grid_still_exports() {
    let dir = tempfile::tempdir().unwrap();
    let out = compass(dir.path(), &["wigner", "--alpha", "5", "--res", "5"]);
    ok(&out);
    let tiles = read_json(&dir.path().join("wigner_tiles.json"));
    assert!(tiles["tile_report"].is_null());
    assert!(tiles["error"].as_str().unwrap().contains("coarse"));
    let csv = fs::read_to_string(dir.path().join("wigner.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 25);
}

#[test]
fn protocol_prepares_the_compass() {
    let dir = tempfile::tempdir().unwrap();
    ok(&compass(dir.path(), &["protocol", "--alpha", "2"]));
    let meta = read_json(&dir.path().join("protocol_prepare.json"));
    let f = meta["results"]["fidelity_with_compass"].as_f64().unwrap();
    assert!(1.0 - f < 1e-10, "{f}");

    ok(&compass(
        dir.path(),
        &["protocol", "--mode", "completeness", "--phi", "0.3"],
    ));
    let meta = read_json(&dir.path().join("protocol_completeness.json"));
    let sum = meta["results"]["sum"].as_f64().unwrap();
    assert!((sum - 1.0).abs() < 1e-12, "{sum}");

    ok(&compass(
        dir.path(),
        &["protocol", "--mode", "scan", "--scan-res", "9"],
    ));
    let csv = fs::read_to_string(dir.path().join("protocol_scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 81);
}

#[test]
fn decoherence_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    ok(&compass(
        dir.path(),
        &[
            "decohere",
            "--kt-max",
            "0.2",
            "--kt-steps",
            "3",
            "--snapshots",
            "0.05",
            "--oracle-check",
            "--res",
            "81",
        ],
    ));
    let meta = read_json(&dir.path().join("decohere_curve.json"));
    assert!(meta["results"]["rk4_max_trace_distance"].as_f64().unwrap() < 1e-6);
    assert!(meta["results"]["lifetime_over_t_c"].as_f64().unwrap() > 0.0);
    let snap = read_json(&dir.path().join("decohere_kt0.05.json"));
    let f = snap["results"]["snapshot"]["fidelity_with_initial"]
        .as_f64()
        .unwrap();
    assert!(f > 0.0 && f < 1.0, "{f}");
}

#[test]
fn probe_orders_revivals() {
    let dir = tempfile::tempdir().unwrap();
    ok(&compass(dir.path(), &["probe", "--alpha", "4", "--oracle"]));
    let summary = read_json(&dir.path().join("probe_summary.json"));
    assert_eq!(summary["compass_lt_cat_lt_coherent"], true);
    assert!(summary["jc_max_difference"].as_f64().unwrap() < 1e-10);
    for s in ["compass", "cat", "coherent"] {
        assert!(dir.path().join(format!("probe_{s}.csv")).exists());
    }
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = compass(dir.path(), &["selftest"]);
    ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
}
