//! End-to-end runs of the `sarima` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sarima_core::ingest::save_csv;
use sarima_core::kernel::simulate;
use sarima_core::{ModelOrder, ParamVector, TimeSeries};

fn sarima(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sarima"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = sarima(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn error_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("stderr has the error line");
    serde_json::from_str(line).unwrap_or_else(|_| panic!("not JSON: {text}"))
}

fn read_json(path: impl AsRef<Path>) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn airline_data(dir: &Path) -> PathBuf {
    let order = ModelOrder::new(1, 1, 0, 0, 1, 1, 12).unwrap();
    let params = ParamVector {
        ar: vec![0.5],
        ma: vec![],
        sar: vec![],
        sma: vec![-0.6],
        sigma2: 1.0,
    };
    let s = simulate(&order, &params, 160, 11, 100).unwrap();
    let s = TimeSeries::new(s.start(), s.values().iter().map(|v| v + 500.0).collect()).unwrap();
    let path = dir.join("data.csv");
    save_csv(&s, &path).unwrap();
    path
}

#[test]
fn help_matches_golden_files() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let cwd = std::env::temp_dir();
    for sub in ["", "search", "fit", "diagnose", "forecast", "impact", "fetch", "simulate"] {
        let mut args = vec![];
        if !sub.is_empty() {
            args.push(sub);
        }
        args.push("--help");
        let text = ok(&args, &cwd);
        let name = if sub.is_empty() { "help.txt".to_string() } else { format!("help-{sub}.txt") };
        let path = golden.join(name);
        if update {
            fs::write(&path, &text).unwrap();
        } else {
            let expected = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
            assert_eq!(text, expected, "{} is stale; rerun with UPDATE_GOLDEN=1", path.display());
        }
    }
}

#[test]
fn search_space_flag_counts_cells() {
    let dir = tempfile::tempdir().unwrap();
    let data = airline_data(dir.path());
    let stdout = ok(
        &[
            "search",
            "--csv",
            data.to_str().unwrap(),
            "--space",
            "p=0..1,q=0..1,d=1,D=1,P=0,Q=0",
            "--out",
            "s",
            "--jobs",
            "2",
        ],
        dir.path(),
    );
    assert!(stdout.starts_with("selected "));
    let board = read_json(dir.path().join("s/leaderboard.json"));
    assert_eq!(board["total_cells"], 4);
    let rows = fs::read_to_string(dir.path().join("s/leaderboard.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + board["entries"].as_array().unwrap().len());
    for name in ["selection.json", "shortlist.csv", "test_performance.csv", "failures.csv", "series.csv", "manifest.json"] {
        assert!(dir.path().join("s").join(name).exists(), "{name}");
    }
}

#[test]
fn search_then_fit_gives_the_stored_fit() {
    let dir = tempfile::tempdir().unwrap();
    let data = airline_data(dir.path());
    let data = data.to_str().unwrap();
    ok(
        &["search", "--csv", data, "--space", "p=0..1,q=0..1,d=1,D=1,P=0,Q=0..1", "--out", "s"],
        dir.path(),
    );
    let selection = read_json(dir.path().join("s/selection.json"));
    let order = selection["order_flag"].as_str().unwrap();
    assert_eq!(order, "1,1,0,0,1,1,12");
    ok(&["fit", "--csv", data, "--order", order, "--out", "f"], dir.path());
    let fitted = read_json(dir.path().join("f/fit.json"));
    assert_eq!(fitted["fit"], selection["fit"]);
}

#[test]
fn white_noise_fit_variance_is_mean_square() {
    let dir = tempfile::tempdir().unwrap();
    let values = [0.3, -1.2, 0.8, 2.1, -0.4, -0.9, 1.5, 0.2, -0.7, 0.6, 1.1, -1.6, 0.05, -0.35];
    let s = TimeSeries::new("2010-01".parse().unwrap(), values.to_vec()).unwrap();
    save_csv(&s, &dir.path().join("noise.csv")).unwrap();
    ok(
        &["fit", "--order", "0,0,0,0,0,0", "--csv", "noise.csv", "--test-len", "0", "--out", "o"],
        dir.path(),
    );
    let fitted = read_json(dir.path().join("o/fit.json"));
    let mean_square = values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64;
    let sigma2 = fitted["fit"]["sigma2"].as_f64().unwrap();
    assert!((sigma2 - mean_square).abs() < 1e-12 * mean_square, "{sigma2} vs {mean_square}");
}

#[test]
fn forecast_bands_are_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let data = airline_data(dir.path());
    ok(
        &["forecast", "--csv", data.to_str().unwrap(), "--order", "1,1,0,0,1,1", "--h", "12", "--out", "fc", "--svg"],
        dir.path(),
    );
    let text = fs::read_to_string(dir.path().join("fc/forecast.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 12);
    for r in &rows {
        let (mean, lo80, hi80, lo95, hi95) = (r[0], r[2], r[3], r[4], r[5]);
        assert!(lo95 <= lo80 && lo80 <= mean && mean <= hi80 && hi80 <= hi95, "{r:?}");
    }
    assert!(dir.path().join("fc/accuracy.json").exists());
    let svg = fs::read_to_string(dir.path().join("fc/forecast_bands.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn impact_single_period_example() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("f.csv"),
        "date,mean,se,lo80,hi80,lo95,hi95\n2021-04,100,5,95,105,90,110\n",
    )
    .unwrap();
    fs::write(dir.path().join("observed.csv"), "date,value\n2021-03,111\n2021-04,120\n").unwrap();
    let stdout = ok(&["impact", "--forecast", "f.csv", "--csv", "observed.csv", "--out", "i"], dir.path());
    assert!(stdout.contains("2021-04..2021-04"));
    let rows = fs::read_to_string(dir.path().join("i/impact.csv")).unwrap();
    let row: Vec<&str> = rows.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..5], &["2021-04", "120", "100", "20", "20"]);
    assert_eq!(row[7], "30");
    assert_eq!(row[8], "10");
    assert_eq!(row[11], "33.3333");
    assert_eq!(row[12], "9.09091");
    let summary = fs::read_to_string(dir.path().join("i/impact_summary.csv")).unwrap();
    assert_eq!(
        summary,
        "estimate,mean_nominal,mean_percent\npoint,20,20\nlower_80,25,26.3158\nupper_80,15,14.2857\nlower_95,30,33.3333\nupper_95,10,9.09091\n"
    );
}

#[test]
fn impact_with_order_projects_over_the_comparison_window() {
    let dir = tempfile::tempdir().unwrap();
    let data = airline_data(dir.path());
    ok(
        &[
            "impact",
            "--csv",
            data.to_str().unwrap(),
            "--order",
            "1,1,0,0,1,1",
            "--train-end",
            "2010-12",
            "--out",
            "i",
        ],
        dir.path(),
    );
    let summary = read_json(dir.path().join("i/impact_summary.json"));
    // training ends 2010-12, test is 2011, comparison runs to the series end
    assert_eq!(summary["summary"]["start"], "2012-01");
    assert_eq!(summary["summary"]["end"], "2013-04");
    let overlay = fs::read_to_string(dir.path().join("i/comparison_overlay.csv")).unwrap();
    assert_eq!(overlay.lines().count(), 1 + 160);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let data = airline_data(dir.path());
    let data = data.to_str().unwrap();
    for out in ["a", "b"] {
        ok(&["diagnose", "--csv", data, "--order", "1,1,0,0,1,1", "--out", out], dir.path());
    }
    let manifest = read_json(dir.path().join("a/manifest.json"));
    let outputs = manifest["outputs"].as_array().unwrap();
    assert!(outputs.len() >= 6);
    for name in outputs {
        let name = name.as_str().unwrap();
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    assert_eq!(manifest["input"]["observations"], 160);
    assert_eq!(manifest["input"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn config_file_sets_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    airline_data(dir.path());
    fs::write(
        dir.path().join("run.toml"),
        "csv = \"data.csv\"\ntest-len = 6\nprecision = 3\n\n[fit]\norder = \"0,1,1,0,1,1\"\nout = \"cfg\"\n",
    )
    .unwrap();
    ok(&["fit", "--config", "run.toml", "--test-len", "12"], dir.path());
    let manifest = read_json(dir.path().join("cfg/manifest.json"));
    assert_eq!(manifest["precision"], 3);
    assert_eq!(manifest["config"]["split"]["test_len"], 12);
    assert_eq!(manifest["config"]["model"]["order"], "0,1,1,0,1,1,12");

    fs::write(dir.path().join("bad.toml"), "[fit]\nnot-a-flag = 1\n").unwrap();
    let out = sarima(&["fit", "--config", "bad.toml", "--csv", "data.csv", "--order", "0,1,1,0,1,1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"], "ConfigError");
}

#[test]
fn exit_codes_by_error_category() {
    let dir = tempfile::tempdir().unwrap();
    let out = sarima(&["fit", "--csv", "x.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"], "UsageError");

    let out = sarima(&["fit", "--csv", "missing.csv", "--order", "0,1,1,0,1,1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["exit_code"], 2);

    let zeros: String = (1..=12).map(|m| format!("2000-{m:02},0\n")).collect();
    fs::write(dir.path().join("zero.csv"), zeros).unwrap();
    let out = sarima(&["fit", "--csv", "zero.csv", "--order", "0,0,0,0,0,0", "--test-len", "0"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_json(&out)["exit_code"], 3);

    let out = sarima(&["--version"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn fetch_normalizes_a_local_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("raw.csv"), "mes;valor\n01/2020;1.234,5\n02/2020;2,25\n03/2020;3\n").unwrap();
    ok(
        &[
            "fetch",
            "--csv",
            "raw.csv",
            "--delimiter",
            ";",
            "--decimal",
            "comma",
            "--value-col",
            "valor",
            "--to",
            "2020-02",
            "--out",
            "o",
            "--svg",
        ],
        dir.path(),
    );
    let text = fs::read_to_string(dir.path().join("o/series.csv")).unwrap();
    assert_eq!(text, "date,value\n2020-01,1234.5\n2020-02,2.25\n");
    assert!(dir.path().join("o/series.svg").exists());
}

#[test]
fn simulate_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str, seed: &'static str| {
        vec!["simulate", "--order", "1,0,0,0,0,0", "--ar", "-0.4", "--n", "50", "--seed", seed, "--out", out]
    };
    ok(&args("a", "5"), dir.path());
    ok(&args("b", "5"), dir.path());
    ok(&args("c", "6"), dir.path());
    let read = |d: &str| fs::read(dir.path().join(d).join("series.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));

    let out = sarima(&["simulate", "--order", "1,0,0,0,0,0", "--out", "x"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"], "ShapeMismatch");
}
