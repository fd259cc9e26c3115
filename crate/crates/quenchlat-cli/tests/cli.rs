//! End-to-end tests of the `quenchlat` binary: exit-code contract, artifact
//! layout, CSV schema, agreement statistics and reproducibility guarantees.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::json;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quenchlat"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn quenchlat");
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_err(cmd: &mut Command, expected_code: i32) -> Output {
    let out = cmd.output().expect("spawn quenchlat");
    assert_eq!(
        out.status.code(),
        Some(expected_code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, value: &serde_json::Value) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_vec_pretty(value).unwrap()).unwrap();
    path
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).unwrap_or_else(|e| panic!("{path:?}: {e}")))
        .unwrap_or_else(|e| panic!("{path:?}: {e}"))
}

/// Square-region config with the two-configuration superposition state
/// `|left pair> + alpha |diagonal pair>` on a 2x2 cell.
fn square_config(alpha: f64, engines: serde_json::Value) -> serde_json::Value {
    json!({
        "schema_version": 1,
        "seed": 7,
        "state": {"nu": [2, 2], "terms": [
            {"amp": [1.0, 0.0], "sites": [0, 2]},
            {"amp": [alpha, 0.0], "sites": [0, 3]}
        ]},
        "region": {"shape": "rectangle", "lx": 1.0, "ly": 1.0},
        "times": {"unit": "zeta", "values": [0.5, 1.5, 2.5]},
        "engines": engines,
        "params": {"analytic_grid": 96, "mc_samples": 60000, "stationary_grid": 256}
    })
}

#[test]
fn stationary_report_contains_the_reference_value() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), &square_config(0.5, json!(["stationary"])));
    let out_dir = tmp.path().join("out");
    run_ok(bin().arg("run").arg(&config).arg("--out").arg(&out_dir));

    let report = read_json(&out_dir.join("report.json"));
    let value = report["stationary_value"].as_f64().expect("stationary_value");
    assert!(
        (value - 0.652301).abs() < 1e-5,
        "stationary entropy density {value} is off the alpha = 1/2 reference"
    );
    assert!(out_dir.join("stationary.csv").is_file());
}

#[test]
fn analytic_and_mc_agree_on_an_aligned_square() {
    let tmp = tempfile::tempdir().unwrap();
    let config =
        write_config(tmp.path(), &square_config(10.0 / 7.0, json!(["analytic", "mc"])));
    let out_dir = tmp.path().join("out");
    run_ok(bin().arg("run").arg(&config).arg("--out").arg(&out_dir));

    let report = read_json(&out_dir.join("report.json"));
    let comparisons = report["comparisons"].as_array().expect("comparisons");
    let pair = comparisons
        .iter()
        .find(|c| c["engine_a"] == "analytic" && c["engine_b"] == "mc")
        .expect("analytic/mc comparison");
    let pull = pair["max_pull"].as_f64().expect("max_pull");
    assert!(pull < 4.0, "analytic vs mc max pull {pull} exceeds 4 standard errors");
    assert!(pair["max_abs_gap"].as_f64().unwrap() >= 0.0);
}

#[test]
fn empty_engine_list_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), &square_config(0.5, json!([])));
    let out = run_err(bin().arg("run").arg(&config), 1);
    assert!(
        stderr_of(&out).contains("engines"),
        "stderr should name the empty engines list: {}",
        stderr_of(&out)
    );
}

#[test]
fn malformed_config_json_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("config.json");
    fs::write(&path, b"{not json").unwrap();
    run_err(bin().arg("run").arg(&path), 1);
}

#[test]
fn analytic_engine_rejects_a_pentagon() {
    let tmp = tempfile::tempdir().unwrap();
    let mut value = square_config(0.5, json!(["analytic"]));
    value["region"] = json!({"shape": "regular_polygon", "q": 5, "circumradius": 1.0});
    let config = write_config(tmp.path(), &value);
    let out = run_err(bin().arg("run").arg(&config), 1);
    assert!(stderr_of(&out).contains("analytic"), "stderr: {}", stderr_of(&out));
}

#[test]
fn thermo_engine_rejects_superpositions() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), &square_config(0.5, json!(["exact-thermo"])));
    let out = run_err(bin().arg("run").arg(&config), 1);
    assert!(stderr_of(&out).contains("classical"), "stderr: {}", stderr_of(&out));
}

#[test]
fn unknown_figure_id_is_a_config_error() {
    let out = run_err(bin().args(["reproduce", "fig99"]), 1);
    assert!(stderr_of(&out).contains("fig99"), "stderr: {}", stderr_of(&out));
}

#[test]
fn csv_header_and_line_endings_are_stable() {
    let tmp = tempfile::tempdir().unwrap();
    let mut value = square_config(0.5, json!(["stationary"]));
    value["times"] = json!({"unit": "zeta", "values": [0.25]});
    let config = write_config(tmp.path(), &value);
    let out_dir = tmp.path().join("out");
    run_ok(bin().arg("run").arg(&config).arg("--out").arg(&out_dir));

    let bytes = fs::read(out_dir.join("stationary.csv")).unwrap();
    let text = String::from_utf8(bytes.clone()).expect("CSV must be UTF-8");
    assert!(
        text.starts_with("t,zeta,entropy_density,stderr,engine\n"),
        "unexpected header in {text:?}"
    );
    assert!(!bytes.contains(&b'\r'), "CSV must use LF line endings");
    assert!(text.ends_with('\n'));
    assert_eq!(text.lines().count(), 2, "header plus one data row");
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 5);
    assert_eq!(row[4], "stationary");
    assert!(row[3].is_empty(), "deterministic engines leave stderr empty");
}

#[test]
fn resolved_config_reruns_bit_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let mut value = square_config(10.0 / 7.0, json!(["analytic", "mc"]));
    value["times"] = json!({"unit": "zeta", "values": [0.5, 1.5]});
    value["params"]["mc_samples"] = json!(20000);
    let config = write_config(tmp.path(), &value);
    let out1 = tmp.path().join("out1");
    run_ok(bin().arg("run").arg(&config).arg("--out").arg(&out1));

    // Re-run the resolved config from the report into a fresh directory,
    // capping the worker count: neither may change a single byte.
    let report = read_json(&out1.join("report.json"));
    let resolved = tmp.path().join("resolved.json");
    fs::write(&resolved, serde_json::to_vec_pretty(&report["resolved_config"]).unwrap())
        .unwrap();
    let out2 = tmp.path().join("out2");
    run_ok(bin()
        .arg("run")
        .arg(&resolved)
        .arg("--out")
        .arg(&out2)
        .args(["--threads", "1"]));

    for name in ["analytic.csv", "mc.csv"] {
        let a = fs::read(out1.join(name)).unwrap();
        let b = fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between the original and resolved re-run");
    }

    // No temp-file litter: the output directory holds exactly the artifacts.
    let mut names: Vec<String> = fs::read_dir(&out1)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["analytic.csv", "mc.csv", "report.json"]);
}

#[test]
fn seed_env_overrides_config_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let mut value = square_config(0.8, json!(["mc"]));
    value["times"] = json!({"unit": "zeta", "values": [1.0]});
    value["params"]["mc_samples"] = json!(20000);
    let config = write_config(tmp.path(), &value);

    let run = |dir: &Path, env: Option<&str>| {
        let mut cmd = bin();
        cmd.arg("run").arg(&config).arg("--out").arg(dir);
        if let Some(seed) = env {
            cmd.env("QUENCHLAT_SEED", seed);
        }
        run_ok(&mut cmd);
        fs::read(dir.join("mc.csv")).unwrap()
    };

    let baseline = run(&tmp.path().join("a"), None);
    let same_seed = run(&tmp.path().join("b"), Some("7"));
    let other_seed = run(&tmp.path().join("c"), Some("8"));

    assert_eq!(baseline, same_seed, "env seed equal to the config seed must not change anything");
    assert_ne!(baseline, other_seed, "a different env seed must change the Monte Carlo stream");
    let report = read_json(&tmp.path().join("c").join("report.json"));
    assert_eq!(report["seed"].as_u64(), Some(8));
    assert_eq!(report["resolved_config"]["seed"].as_u64(), Some(8));

    let bad = bin()
        .arg("run")
        .arg(&config)
        .env("QUENCHLAT_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn reproduce_fig7_emits_every_variant() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("fig7");
    run_ok(bin()
        .args(["reproduce", "fig7", "--mc-samples", "2000", "--time-points", "4"])
        .arg("--out")
        .arg(&out_dir));

    for variant in ["deg0", "deg12", "deg24"] {
        let dir = out_dir.join(variant);
        for name in ["config.json", "mc.csv", "stationary.csv", "report.json"] {
            assert!(dir.join(name).is_file(), "missing {variant}/{name}");
        }
        let mc = fs::read_to_string(dir.join("mc.csv")).unwrap();
        assert_eq!(mc.lines().count(), 5, "header plus four time points");
        let config = read_json(&dir.join("config.json"));
        assert_eq!(config["schema_version"].as_u64(), Some(1));
        assert_eq!(config["params"]["mc_samples"].as_u64(), Some(2000));
        // the emitted config re-runs as-is
        assert_eq!(config["engines"][0], "mc");
    }
}
