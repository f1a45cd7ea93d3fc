use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use serde_json::Value;

fn etl(args: &[&str], seed: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_etl"));
    c.args(args).env_remove("ETL_SEED");
    if let Some(s) = seed {
        c.env("ETL_SEED", s);
    }
    c.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run_cfg(cfg: &Path, out: &Path, extra: &[&str], seed: Option<&str>) -> Output {
    let mut args = vec!["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    etl(&args, seed)
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

const CONSTANT: &str = r#"{
  "experiment": { "kind": "additive_transfer" },
  "sampler": { "kind": "constant", "dim": 1, "value": 0.75 },
  "t_sampling": { "grid_per_axis": 4 }
}"#;

const FRESNEL: &str = r#"{
  "experiment": { "kind": "multiplicative_transfer" },
  "sampler": { "kind": "trig", "terms": [{ "coef": [1.0, 0.0], "phase": [0.0, 0.0, 1.0] }], "real": true },
  "schedule": {
    "discrete": { "start": 1e3, "ratio": 10, "count": 3 },
    "continuous": { "start": 100, "ratio": 3.1622776601683795, "count": 3 }
  },
  "quad": { "step": 1e-4 },
  "tolerances": { "tol": 0.02, "limit_tol": 0.05, "spread_tol": 0.03 },
  "t_sampling": { "low_discrepancy": 0, "random": 6 },
  "seed": 11
}"#;

#[test]
fn constant_additive_exits_zero_with_zero_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", CONSTANT);
    let o = run_cfg(&cfg, dir.path(), &[], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    assert_eq!(r["results"]["deviation"].as_f64(), Some(0.0));
    assert_eq!(r["status"], "pass");
    // Defaults are echoed.
    assert_eq!(r["config"]["tolerances"]["tol"].as_f64(), Some(0.02));
    assert!(r["config"]["schedule"]["discrete"]["start"].is_number());
    assert!(r["config"]["quad"]["step"].is_number());
}

#[test]
fn fresnel_multiplicative_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "f.json", FRESNEL);
    let o = run_cfg(&cfg, dir.path(), &[], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(report(dir.path())["results"]["deviation"].as_f64().unwrap() < 0.02);
}

#[test]
fn zero_tolerance_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "z.json", &CONSTANT.replace("\"t_sampling\"", "\"tolerances\": { \"tol\": 0 },\n  \"t_sampling\""));
    assert_eq!(run_cfg(&cfg, dir.path(), &[], None).status.code(), Some(2));
}

#[test]
fn schema_violations_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let neg = write(dir.path(), "n.json", &CONSTANT.replace("\"t_sampling\"", "\"tolerances\": { \"tol\": -1 },\n  \"t_sampling\""));
    assert_eq!(run_cfg(&neg, dir.path(), &[], None).status.code(), Some(3));
    let unknown = write(dir.path(), "u.json", r#"{ "experiment": { "kind": "cesaro_limit" }, "bogus": 1 }"#);
    assert_eq!(run_cfg(&unknown, dir.path(), &[], None).status.code(), Some(3));
    let missing = dir.path().join("absent.json");
    assert_eq!(run_cfg(&missing, dir.path(), &[], None).status.code(), Some(3));
    let cfg = write(dir.path(), "c.json", CONSTANT);
    assert_eq!(run_cfg(&cfg, dir.path(), &[], Some("not-a-number")).status.code(), Some(3));
}

#[test]
fn unknown_suite_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = etl(&["suite", "nightly", "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn seed_override_and_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "f.json", FRESNEL);
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    run_cfg(&cfg, &a, &["--workers", "1"], Some("5"));
    run_cfg(&cfg, &b, &["--workers", "3"], Some("5"));
    run_cfg(&cfg, &c, &[], None);
    let read = |d: &Path, f: &str| std::fs::read(d.join(f)).unwrap();
    assert_eq!(read(&a, "series.csv"), read(&b, "series.csv"));
    assert_eq!(read(&a, "report.json"), read(&b, "report.json"));
    assert_eq!(report(&a)["seed"].as_u64(), Some(5));
    assert_eq!(report(&c)["seed"].as_u64(), Some(11));
    assert_ne!(read(&a, "series.csv"), read(&c, "series.csv"));
}

#[test]
fn series_csv_is_rfc4180_with_fixed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "f.json", FRESNEL);
    run_cfg(&cfg, dir.path(), &[], None);
    let mut rd = csv::Reader::from_path(dir.path().join("series.csv")).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "series", "scale_index", "scale", "window_lo_0", "window_hi_0", "estimate_re", "estimate_im",
            "estimate_norm", "residual"
        ]
    );
    let rows: Vec<_> = rd.records().map(Result::unwrap).collect();
    // Continuous side plus six dilates, three scales each.
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|r| r[5].parse::<f64>().is_ok() && r[7].parse::<f64>().is_ok()));
}

#[test]
fn series_labels_with_commas_round_trip() {
    use etl::runner::{report::series_csv, SeriesRow};
    let row = SeriesRow {
        series: "t=[0.5, 0.25]".into(),
        scale_index: 0,
        scale: 10.0,
        window: None,
        estimate: etl::values::VectorValue::scalar(0.5),
        residual: None,
    };
    let text = series_csv(&[row]).unwrap();
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let rec = rd.records().next().unwrap().unwrap();
    assert_eq!(&rec[0], "t=[0.5, 0.25]");
    assert_eq!(rec.len(), 7);
}

#[test]
fn schema_prints_json() {
    let o = etl(&["schema"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["title"], "ExperimentConfig");
}

#[test]
fn smoke_suite_under_a_minute() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let o = etl(&["suite", "smoke", "--out", dir.path().to_str().unwrap()], None);
    let secs = start.elapsed().as_secs_f64();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(secs < 60.0, "smoke took {secs:.1}s");
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("suite_report.json")).unwrap()).unwrap();
    assert_eq!(r["criteria"].as_array().unwrap().len(), 13);
    let table = String::from_utf8_lossy(&o.stdout);
    assert_eq!(table.lines().filter(|l| l.starts_with('C')).count(), 13);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        let text = std::fs::read_to_string(&p).unwrap();
        etl::runner::parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        n += 1;
    }
    assert!(n >= 5);
}
