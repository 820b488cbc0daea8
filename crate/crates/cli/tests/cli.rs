//! End-to-end tests of the `overnight` binary: artifacts, exit codes, and
//! diagnostics.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_overnight"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

const SMALL_CSV: &str = "\
Date,Open,High,Low,Close,Adj Close,Volume
2020-01-02,100,101,99,100.5,100.5,1000
2020-01-03,100.8,102,100,101,101,900
2020-01-06,101.2,103,100,102,102,500
";

const SIM_CONF: &str = "\
n_assets = 2
n_days = 12
base_price = 100
noise_sigma = 0.01
permanent_impact = 0.00001
temporary_impact = 0.0000001
expansion_size = 100
contraction_fraction = 0.9
trading_cost_rate = 0.0001
market_neutral = true
seed = 11
";

#[test]
fn decompose_writes_all_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bars.csv", SMALL_CSV);
    let out = run_in(tmp.path(), &["decompose", "--input", "bars.csv", "--output-dir", "out"]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    for artifact in [
        "bars_returns.csv",
        "bars_overnight_curve.csv",
        "bars_intraday_curve.csv",
        "bars_summary.json",
        "bars_quality.json",
        "bars_bars.csv",
    ] {
        assert!(tmp.path().join("out").join(artifact).exists(), "{artifact}");
    }
    // 3 bars -> 2 curve points per leg
    let curve = fs::read_to_string(tmp.path().join("out/bars_overnight_curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 3); // header + 2 points
}

#[test]
fn decompose_insufficient_data_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "tiny.csv",
        "Date,Open,High,Low,Close,Adj Close,Volume\n2020-01-02,100,101,99,100.5,100.5,1000\n",
    );
    let out = run_in(tmp.path(), &["decompose", "--input", "tiny.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("insufficient data"), "{}", stderr_of(&out));
}

#[test]
fn decompose_missing_input_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["decompose", "--input", "nope.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("nope.csv"));
}

#[test]
fn decompose_with_schema_override() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "odd.csv",
        "day,first,last\n2020-01-02,100,101\n2020-01-03,101.5,102\n",
    );
    write(
        tmp.path(),
        "schema.json",
        r#"{"date": "day", "open": "first", "close": "last"}"#,
    );
    let out = run_in(
        tmp.path(),
        &["decompose", "--input", "odd.csv", "--schema", "schema.json", "--output-dir", "out"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let summary = fs::read_to_string(tmp.path().join("out/odd_summary.json")).unwrap();
    assert!(summary.contains("\"bar_count\": 2"));
}

#[test]
fn robustness_full_report_with_calendar_and_alt_opens() {
    let tmp = tempfile::tempdir().unwrap();
    // alt-open column rides along in the same file
    write(
        tmp.path(),
        "bars.csv",
        "Date,Open,High,Low,Close,Adj Close,Volume,Open10
2020-01-02,100,101,99,100.5,100.5,1000,100.2
2020-01-03,100.8,102,100,101,101,900,100.9
2020-01-06,101.2,103,100,102,102,500,101.4
2020-01-07,101.9,103,101,101.2,101.2,700,102.0
",
    );
    write(tmp.path(), "events.csv", "symbol,event_date\nbars,2020-01-06\n");
    let out = run_in(
        tmp.path(),
        &[
            "robustness",
            "--input",
            "bars.csv",
            "--output-dir",
            "out",
            "--exclusions",
            "events.csv",
            "--window-before",
            "1",
            "--window-after",
            "1",
            "--cutoff",
            "2020-01-06",
            "--alt-open-column",
            "Open10",
        ],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/bars_robustness.json")).unwrap())
            .unwrap();
    assert_eq!(report["exclusions"]["evaluable"], true);
    assert_eq!(report["exclusions"]["outputs"]["excluded_days"], 2);
    assert_eq!(report["cost"]["evaluable"], true);
    assert_eq!(report["dispersion"]["evaluable"], true);
    assert_eq!(report["shifted_open"]["evaluable"], true);
    assert_eq!(report["divergence"]["evaluable"], true);
    // 4 bars give 1 pair before the cutoff; regime needs 2 per side
    assert_eq!(report["regime"]["evaluable"], false);
}

#[test]
fn robustness_without_optional_inputs_marks_not_evaluable() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bars.csv", SMALL_CSV);
    let out = run_in(tmp.path(), &["robustness", "--input", "bars.csv", "--output-dir", "out"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/bars_robustness.json")).unwrap())
            .unwrap();
    assert_eq!(report["exclusions"]["evaluable"], false);
    assert_eq!(report["shifted_open"]["evaluable"], false);
}

#[test]
fn robustness_malformed_calendar_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bars.csv", SMALL_CSV);
    write(tmp.path(), "events.csv", "not,a,calendar\n1,2,3\n");
    let out = run_in(
        tmp.path(),
        &["robustness", "--input", "bars.csv", "--exclusions", "events.csv"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("events.csv"));
}

#[test]
fn robustness_unknown_check_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bars.csv", SMALL_CSV);
    let out = run_in(
        tmp.path(),
        &["robustness", "--input", "bars.csv", "--checks", "dispersion,frobnicate"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("frobnicate"));
}

#[test]
fn simulate_writes_bars_ledger_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "sim.conf", SIM_CONF);
    let out = run_in(
        tmp.path(),
        &["simulate", "--config", "sim.conf", "--output-dir", "sim", "--decompose"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    for artifact in [
        "asset_000.csv",
        "asset_001.csv",
        "index.csv",
        "ledger.csv",
        "sim_summary.json",
        "index_returns.csv",
        "index_overnight_curve.csv",
    ] {
        assert!(tmp.path().join("sim").join(artifact).exists(), "{artifact}");
    }
    let ledger = fs::read_to_string(tmp.path().join("sim/ledger.csv")).unwrap();
    assert_eq!(ledger.lines().next().unwrap(), "day,mtm_gain,cost,net,gross_position");
    assert_eq!(ledger.lines().count(), 13); // header + 12 days

    // simulator output re-ingests through the decompose pipeline unchanged
    let out2 = run_in(
        tmp.path(),
        &["decompose", "--input", "sim/asset_000.csv", "--raw", "--output-dir", "out2"],
    );
    assert!(out2.status.success(), "{}", stderr_of(&out2));
}

#[test]
fn simulate_abort_names_day_and_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "bad.conf",
        "n_assets = 2\nn_days = 5\nbase_price = 100\nnoise_sigma = 0\npermanent_impact = 0.02\n\
         temporary_impact = 0\nexpansion_size = 100\ncontraction_fraction = 1\n\
         trading_cost_rate = 0\nmarket_neutral = true\nseed = 1\n",
    );
    let out = run_in(tmp.path(), &["simulate", "--config", "bad.conf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("day 0"), "{}", stderr_of(&out));
}

#[test]
fn simulate_invalid_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bad.conf", "n_assets = 3\nmarket_neutral = true\nn_days = 5\n");
    let out = run_in(tmp.path(), &["simulate", "--config", "bad.conf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("even"));
}

fn decompose_fixture(tmp: &Path) {
    write(tmp, "bars.csv", SMALL_CSV);
    let out = run_in(tmp, &["decompose", "--input", "bars.csv", "--output-dir", "out"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
}

#[test]
fn render_produces_svg_grid() {
    let tmp = tempfile::tempdir().unwrap();
    decompose_fixture(tmp.path());
    write(
        tmp.path(),
        "manifest.json",
        r#"[{"symbol": "BARS", "overnight": "out/bars_overnight_curve.csv", "intraday": "out/bars_intraday_curve.csv"}]"#,
    );
    let out = run_in(
        tmp.path(),
        &["render", "--manifest", "manifest.json", "--output", "fig.svg"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let svg = fs::read_to_string(tmp.path().join("fig.svg")).unwrap();
    assert_eq!(svg.matches("<path").count(), 2);
    assert!(svg.contains("-100%"));
    assert!(svg.starts_with("<svg"));
    assert!(svg.ends_with("</svg>"));
}

#[test]
fn render_empty_curve_is_placeholder_not_failure() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "empty.csv", "date,value\n");
    write(
        tmp.path(),
        "manifest.json",
        r#"[{"symbol": "EMPTY", "overnight": "empty.csv", "intraday": "empty.csv"}]"#,
    );
    let out = run_in(
        tmp.path(),
        &["render", "--manifest", "manifest.json", "--output", "fig.svg"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let svg = fs::read_to_string(tmp.path().join("fig.svg")).unwrap();
    assert!(svg.contains("no data"));
}

#[test]
fn render_missing_curve_file_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "manifest.json",
        r#"[{"symbol": "X", "overnight": "gone.csv", "intraday": "gone.csv"}]"#,
    );
    let out = run_in(tmp.path(), &["render", "--manifest", "manifest.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("gone.csv"));
}

#[test]
fn render_log_scale_panels() {
    let tmp = tempfile::tempdir().unwrap();
    decompose_fixture(tmp.path());
    write(
        tmp.path(),
        "manifest.json",
        r#"[{"symbol": "BARS", "overnight": "out/bars_overnight_curve.csv", "intraday": "out/bars_intraday_curve.csv"}]"#,
    );
    let out = run_in(
        tmp.path(),
        &["render", "--manifest", "manifest.json", "--output", "fig.svg", "--scale", "log"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let svg = fs::read_to_string(tmp.path().join("fig.svg")).unwrap();
    assert!(!svg.contains("-100%"));
}
