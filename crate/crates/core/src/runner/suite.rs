//! Built-in suites. `acceptance` runs every criterion at its stated scale,
//! `smoke` runs the same configs scaled down.

use std::f64::consts::SQRT_2;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::transfer::Status;

use super::report::{report_json, series_csv};
use super::{parse_config, run_experiment, with_workers, ExperimentConfig, Outcome, RunError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Acceptance,
    Smoke,
}

impl std::str::FromStr for Suite {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        match s {
            "acceptance" => Ok(Suite::Acceptance),
            "smoke" => Ok(Suite::Smoke),
            other => Err(RunError::Config(format!(
                "unknown suite {other:?} (expected acceptance or smoke)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    fn le(label: &str, value: f64, threshold: f64) -> Self {
        Self {
            label: label.into(),
            value,
            threshold,
            relation: Relation::Le,
            pass: value <= threshold,
        }
    }

    fn ge(label: &str, value: f64, threshold: f64) -> Self {
        Self {
            label: label.into(),
            value,
            threshold,
            relation: Relation::Ge,
            pass: value >= threshold,
        }
    }

    /// Passes when the run ended with `want`; the value is 1 on a match.
    fn status(label: &str, got: Status, want: Status) -> Self {
        Self {
            label: format!("{label} status {got:?} (want {want:?})"),
            value: f64::from(u8::from(got == want)),
            threshold: 1.0,
            relation: Relation::Ge,
            pass: got == want,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
    pub pass: bool,
}

type CriterionFn = fn(bool, u64) -> Result<Vec<Check>, RunError>;

/// Identifier, name and body of each criterion.
pub const CRITERIA: [(usize, &str, CriterionFn); 13] = [
    (1, "additive transfer, indicator of a rotation", c1),
    (2, "additive transfer, two-parameter uniform windows", c2),
    (3, "multiplicative transfer, cos(2πx²)", c3),
    (4, "Tauberian passage", c4),
    (5, "Fatou and dominated convergence", c5),
    (6, "ess-limsup transfer", c6),
    (7, "density of sections", c7),
    (8, "Weyl discrepancy of a polynomial torus orbit", c8),
    (9, "Heisenberg reduction and base orbit", c9),
    (10, "double multiple averages on the circle", c10),
    (11, "intersection measures stay positive", c11),
    (12, "generalized polynomial distribution", c12),
    (13, "determinism across worker counts", c13),
];

/// Runs one criterion; errors are recorded as a failed criterion.
pub fn run_criterion(id: usize, suite: Suite, seed: u64) -> Option<CriterionResult> {
    let (id, name, f) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let (checks, error) = match f(suite == Suite::Acceptance, seed) {
        Ok(c) => (c, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let pass = error.is_none() && !checks.is_empty() && checks.iter().all(|c| c.pass);
    Some(CriterionResult {
        id: *id,
        name: name.to_string(),
        checks,
        pass,
        seconds: start.elapsed().as_secs_f64(),
        error,
    })
}

pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    let criteria: Vec<_> = CRITERIA
        .iter()
        .filter_map(|c| run_criterion(c.0, suite, seed))
        .collect();
    let pass = criteria.iter().all(|c| c.pass);
    SuiteReport {
        suite,
        seed,
        criteria,
        pass,
    }
}

/// One line per criterion, then the failing checks.
pub fn render_table(r: &SuiteReport) -> String {
    let mut s = String::new();
    for c in &r.criteria {
        s += &format!(
            "C{:<3}{}  {:<50}{:>8.1}s\n",
            c.id,
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.seconds
        );
        if let Some(e) = &c.error {
            s += &format!("      error: {e}\n");
        }
        for k in c.checks.iter().filter(|k| !k.pass) {
            let rel = match k.relation {
                Relation::Le => "<=",
                Relation::Ge => ">=",
            };
            s += &format!("      {}: {:.6e} not {rel} {:.6e}\n", k.label, k.value, k.threshold);
        }
    }
    s += &format!("{}\n", if r.pass { "suite passed" } else { "suite FAILED" });
    s
}

/// CLI entry: runs the suite, prints the table, writes `suite_report.json`
/// into `out`, returns the exit code.
pub fn emit_suite(name: &str, out: &Path, seed: u64) -> i32 {
    let suite: Suite = match name.parse() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("etl: {e}");
            return 3;
        }
    };
    let r = run_suite(suite, seed);
    print!("{}", render_table(&r));
    let written = std::fs::create_dir_all(out).and_then(|_| {
        std::fs::write(
            out.join("suite_report.json"),
            serde_json::to_string_pretty(&r).expect("serializable") + "\n",
        )
    });
    if let Err(e) = written {
        eprintln!("etl: cannot write suite_report.json: {e}");
        return 1;
    }
    if r.pass {
        0
    } else {
        for c in r.criteria.iter().filter(|c| !c.pass) {
            eprintln!("etl: criterion C{} failed: {}", c.id, c.name);
        }
        1
    }
}

fn config(mut v: Value, seed: u64) -> Result<ExperimentConfig, RunError> {
    v["seed"] = json!(seed);
    parse_config(&v.to_string())
}

fn run(v: Value, seed: u64) -> Result<Outcome, RunError> {
    run_experiment(&config(v, seed)?)
}

fn num(o: &Outcome, ptr: &str) -> Result<f64, RunError> {
    o.results
        .pointer(ptr)
        .and_then(Value::as_f64)
        .ok_or_else(|| RunError::Eval(format!("missing result {ptr}")))
}

fn pick<T>(full: bool, a: T, b: T) -> T {
    if full {
        a
    } else {
        b
    }
}

fn sched(start: f64, ratio: f64, count: usize) -> Value {
    json!({ "start": start, "ratio": ratio, "count": count })
}

fn cos_trig(poly: Value) -> Value {
    json!({ "kind": "trig", "terms": [{ "coef": [1.0, 0.0], "phase": poly }], "real": true })
}

fn rotation(alpha: f64, below: f64) -> Value {
    json!({ "kind": "rotation", "alpha": alpha, "below": below })
}

fn c1(full: bool, seed: u64) -> Result<Vec<Check>, RunError> {
    let o = run(
        json!({
            "experiment": { "kind": "additive_transfer" },
            "sampler": { "kind": "indicator", "set": rotation(SQRT_2, 0.5) },
            "schedule": {
                "discrete": pick(full, sched(1e3, 10.0, 3), sched(1e2, 10.0, 3)),
                "continuous": pick(full, sched(1e2, 10.0, 3), sched(1e1, 10.0, 3)),
            },
            "quad": { "step": 1e-3 },
            "tolerances": { "tol": 0.02 },
            "t_sampling": { "grid_per_axis": 64 },
        }),
        seed,
    )?;
    Ok(vec![
        Check::status("transfer", o.status, Status::Pass),
        Check::le("deviation", num(&o, "/deviation")?, 0.02),
        Check::le("|discrete − 1/2|", (num(&o, "/discrete_side/components/0/0")? - 0.5).abs(), 0.02),
        Check::le(
            "|continuous − 1/2|",
            (num(&o, "/continuous_side/value/components/0/0")? - 0.5).abs(),
            0.02,
        ),
    ])
}

fn c2(full: bool, seed: u64) -> Result<Vec<Check>, RunError> {
    let s = pick(full, sched(1e2, 10.0, 3), sched(1e2, 10f64.sqrt(), 3));
    let o = run(
        json!({
            "experiment": { "kind": "additive_transfer" },
            "sampler": { "kind": "product", "factors": [
                { "kind": "sawtooth" },
                { "kind": "indicator", "set": rotation(3f64.sqrt(), 0.5) },
            ]},
            "scheme": { "kind": "uniform" },
            "schedule": { "discrete": s, "continuous": s },
            "quad": { "step": 1e-3 },
            "tolerances": { "tol": 0.03 },
            "t_sampling": { "grid_per_axis": 8 },
        }),
        seed,
    )?;
    Ok(vec![
        Check::status("transfer", o.status, Status::Pass),
        Check::le("deviation", num(&o, "/deviation")?, 0.03),
    ])
}

fn c3_config(full: bool) -> Value {
    json!({
        "experiment": { "kind": "multiplicative_transfer" },
        "sampler": cos_trig(json!([0.0, 0.0, 1.0])),
        "schedule": {
            "discrete": pick(full, sched(1e4, 10.0, 3), sched(1e4, 10f64.sqrt(), 3)),
            "continuous": pick(full, sched(1e2, 10f64.sqrt(), 3), sched(1e2, 10f64.sqrt(), 3)),
        },
        "quad": { "step": 1e-4 },
        "tolerances": { "tol": 0.02, "limit_tol": 0.05, "spread_tol": 0.03 },
        "t_sampling": { "low_discrepancy": 0, "random": pick(full, 16, 4) },
    })
}

fn c3(full: bool, seed: u64) -> Result<Vec<Check>, RunError> {
    let o = run(c3_config(full), seed)?;
    Ok(vec![
        Check::status("transfer", o.status, Status::Pass),
        Check::le("constancy spread", num(&o, "/constancy_spread")?, 0.03),
        Check::le("deviation", num(&o, "/deviation")?, 0.02),
        Check::le("|continuous|", num(&o, "/continuous_side/value/norm")?, 0.01),
    ])
}

fn c4(full: bool, seed: u64) -> Result<Vec<Check>, RunError> {
    let s = pick(full, sched(1e3, 10.0, 3), sched(1e2, 10.0, 3));
    let o = run(
        json!({
            "experiment": { "kind": "tauberian", "sequence": { "kind": "running_average", "c": 1.0 }, "alpha": 3.0 },
            "sampler": cos_trig(json!([0.0, 1.0])),
            "schedule": { "discrete": s, "continuous": s },
            "quad": { "step": 1e-2 },
            "tolerances": { "tol": 1e-3 },
        }),
        seed,
    )?;
    let control = run(
        json!({
            "experiment": { "kind": "tauberian", "sequence": { "kind": "sin_log" }, "alpha": 7.0 },
            "schedule": { "discrete": s, "continuous": s },
            "tolerances": { "tol": 1e-3 },
        }),
        seed,
    )?;
    Ok(vec![
        Check::status("running average", o.status, Status::Pass),
        Check::le("increment ratio", num(&o, "/worst_ratio")?, 1.0),
        Check::le("|tail − Cesàro|", num(&o, "/deviation")?, 1e-3),
        Check::status("sin(2π log n) control", control.status, Status::Inconclusive),
    ])
}

fn c5(_full: bool, seed: u64) -> Result<Vec<Check>, RunError> {
    let o = run(
        json!({
            "experiment": { "kind": "fatou_dct", "grid_points": 1000, "terms": 500 },
            "sampler": { "kind": "trig", "terms": [{ "coef": [1.0, 0.0], "phase": [0.0, 1.0] }] },
            "tolerances": { "tol": 0.01 },
        }),
        seed,
    )?;
    Ok(vec![
        Check::le("tail max ‖∫f_n‖", num(&o, "/lhs")?, 0.01),
        Check::le("|∫limsup‖f_n‖ − 1|", (num(&o, "/rhs")? - 1.0).abs(), 1e-9),
        Check::ge("margin", num(&o, "/margin")?, 0.98),
    ])
}

fn c6(_full: bool, seed: u64) -> Result<Vec<Check>, RunError> {
    let o = run(
        json!({
            "experiment": { "kind": "ess_limsup", "limit": [0.0], "deltas": [1.0, 0.5, 0.25, 0.125] },
            "sampler": cos_trig(json!([0.0, 1.0])),
            "schedule": {
                "discrete": sched(1e2, 10.0, 3),
                "continuous": sched(1e2, 10.0, 3),
            },
            "quad": { "step": 1e-3 },
            "tolerances": { "tol": 0.02 },
        }),
        seed,
    )?;
    let levels = o.results["levels"].as_array().map_or(0, Vec::len);
    let last = num(&o, &format!("/levels/{}/level", levels.saturating_sub(1)))?;
    let monotone = o.results["monotone"].as_bool().unwrap_or(false);
    Ok(vec![
        Check::status("ess-limsup", o.status, Status::Pass),
        Check::ge("levels monotone", f64::from(u8::from(monotone)), 1.0),
        Check::le("final level", last, 0.02),
        Check::le("|continuous|", num(&o, "/continuous/value/norm")?, 0.01),
    ])
}

fn c7(full: bool, seed: u64) -> Result<Vec<Check>, RunError> {
    let s = pick(full, sched(1e2, 10.0, 3), sched(1e1, 10.0, 3));
    let tr = run(
        json!({
            "experiment": { "kind": "section_density", "mode": "translate",
                "set": { "kind": "periodic", "period": [1.0], "offset": [0.0], "len": [0.5] } },
            "schedule": { "discrete": s, "continuous": s },
            "tolerances": { "tol": 0.005 },
            "t_sampling": { "grid_per_axis": 64 },
        }),
        seed,
    )?;
    let di = run(
        json!({
            "experiment": { "kind": "section_density", "mode": "dilate", "set": rotation(SQRT_2, 1.0 / 3.0) },
            "schedule": { "discrete": pick(full, sched(1e3, 10.0, 3), sched(1e3, 10f64.sqrt(), 3)), "continuous": s },
            "quad": { "step": 1e-3 },
            "tolerances": { "tol": 0.02 },
        }),
        seed,
    )?;
    Ok(vec![
        Check::status("translate", tr.status, Status::Pass),
        Check::le("|∫D(S_t)dt − 1/2|", (num(&tr, "/discrete_side/components/0/0")? - 0.5).abs(), 0.005),
        Check::le(
            "|D(S) − 1/2|",
            (num(&tr, "/continuous_side/value/components/0/0")? - 0.5).abs(),
            0.005,
        ),
        Check::status("dilate", di.status, Status::Pass),
        Check::le("dilate spread", num(&di, "/constancy_spread")?, 0.02),
        Check::le(
            "|D − 1/3|",
            (num(&di, "/continuous_side/value/components/0/0")? - 1.0 / 3.0).abs(),
            0.02,
        ),
    ])
}

fn c8(full: bool, seed: u64) -> Result<Vec<Check>, RunError> {
    let starts: Vec<f64> = (0..pick(full, 5, 2)).map(|i| i as f64 * 1e3).collect();
    let o = run(
        json!({
            "experiment": { "kind": "weyl", "window_len": 1e3, "starts": starts, "kmax": 3, "panel": true },
            "sampler": { "kind": "torus_orbit", "alpha": [SQRT_2, 3f64.sqrt()], "polys": [[0.0, 1.0], [0.0, 0.0, 1.0]] },
            "quad": { "step": pick(full, 1e-3, 1e-2) },
            "tolerances": { "tol": 0.05 },
        }),
        seed,
    )?;
    Ok(vec![
        Check::ge("frequencies", num(&o, "/frequencies")?, 48.0),
        Check::le("max discrepancy", num(&o, "/max_discrepancy")?, 0.05),
    ])
}

fn c9(full: bool, seed: u64) -> Result<Vec<Check>, RunError> {
    let o = run(
        json!({
            "experiment": { "kind": "heisenberg_contract", "samples": 1000,
                "generator": [SQRT_2, 3f64.sqrt(), 0.5], "window_len": pick(full, 1e4, 1e3), "kmax": 2 },
            "quad": { "step": 1e-2 },
            "tolerances": { "tol": 0.05 },
        }),
        seed,
    )?;
    Ok(vec![
        Check::le("idempotence", num(&o, "/idempotence_error")?, 1e-9),
        Check::le("lattice invariance", num(&o, "/invariance_error")?, 1e-9),
        Check::le("base discrepancy", num(&o, "/base_discrepancy")?, 0.05),
    ])
}

fn c10(full: bool, seed: u64) -> Result<Vec<Check>, RunError> {
    let cos = json!([{ "freq": [1], "coef": [0.5, 0.0] }, { "freq": [-1], "coef": [0.5, 0.0] }]);
    let flow = json!({ "kind": "torus", "alpha": [SQRT_2] });
    let s = pick(full, sched(1e2, 10.0, 3), sched(1e2, 10f64.sqrt(), 3));
    let o = run(
        json!({
            "experiment": { "kind": "multiple_average" },
            "sampler": { "kind": "multiple_average", "grid": 1024, "factors": [
                { "flow": flow, "poly": [0.0, 1.0], "observable": cos },
                { "flow": flow, "poly": [0.0, 2.0], "observable": cos },
            ]},
            "schedule": { "discrete": s, "continuous": s },
            "quad": { "step": 3.7e-3 },
            "tolerances": { "tol": 0.03, "limit_tol": 0.02 },
            "t_sampling": { "low_discrepancy": pick(full, 8, 3) },
        }),
        seed,
    )?;
    Ok(vec![
        Check::status("cross-check", o.status, Status::Pass),
        Check::le("‖limit‖₁", num(&o, "/limit_norm")?, 0.02),
        Check::le("deviation", num(&o, "/deviation")?, 0.03),
    ])
}

/// `∫∫ 1_A(x)·1_A(x+u)·1_A(x+2u) dx du` on an `n × n` midpoint grid.
pub fn double_intersection_oracle(len: f64, n: usize) -> f64 {
    use rayon::prelude::*;
    let inside = |x: f64| x.rem_euclid(1.0) < len;
    let h = 1.0 / n as f64;
    let total: u64 = (0..n)
        .into_par_iter()
        .map(|j| {
            let u = (j as f64 + 0.5) * h;
            (0..n)
                .filter(|&i| {
                    let x = (i as f64 + 0.5) * h;
                    inside(x) && inside(x + u) && inside(x + 2.0 * u)
                })
                .count() as u64
        })
        .sum();
    total as f64 * h * h
}

fn c11(full: bool, seed: u64) -> Result<Vec<Check>, RunError> {
    let o = run(
        json!({
            "experiment": { "kind": "liminf", "threshold": 0.005 },
            "sampler": { "kind": "intersection_measure", "alphas": [[SQRT_2], [SQRT_2]],
                "polys": [[0.0, 1.0], [0.0, 2.0]],
                "set": { "kind": "boxes", "boxes": [{ "lo": [0.0], "hi": [0.25] }] },
                "grid": 1024 },
            "schedule": {
                "discrete": sched(1e3, 10f64.powf(0.25), 5),
                "continuous": pick(full, sched(1e3, 10f64.powf(0.25), 5), sched(1e2, 10f64.powf(0.25), 5)),
            },
            "quad": { "step": 0.05 },
        }),
        seed,
    )?;
    let oracle = double_intersection_oracle(0.25, pick(full, 10_000, 1_000));
    Ok(vec![
        Check::ge("liminf proxy", num(&o, "/bounds/lo")?, 0.005),
        Check::ge("quadrature oracle", oracle, 0.01),
    ])
}

fn c12(full: bool, seed: u64) -> Result<Vec<Check>, RunError> {
    let frac = |a: f64| json!({ "op": "frac", "arg": { "op": "poly", "poly": [0.0, a] } });
    let o = run(
        json!({
            "experiment": { "kind": "gp_distribution", "step": 0.1, "t_max": pick(full, 1e6, 1e5),
                "target": "product_uniform" },
            "sampler": { "kind": "gp", "node": { "op": "mul", "a": frac(SQRT_2), "b": frac(3f64.sqrt()) } },
            "tolerances": { "tol": 0.02 },
        }),
        seed,
    )?;
    Ok(vec![
        Check::le("KS distance", num(&o, "/ks")?, 0.02),
        Check::le("flagged fraction", num(&o, "/flagged_fraction")?, 1e-4),
    ])
}

fn c13(full: bool, seed: u64) -> Result<Vec<Check>, RunError> {
    let cfg = config(c3_config(full), seed)?;
    let render = |workers| -> Result<(String, String), RunError> {
        let o = with_workers(Some(workers), || run_experiment(&cfg))?;
        Ok((report_json(&cfg, &o), series_csv(&o.series)?))
    };
    let (r1, s1) = render(1)?;
    let (r4, s4) = render(4)?;
    let same = |a: &str, b: &str| f64::from(u8::from(a == b));
    Ok(vec![
        Check::ge("report.json identical for 1 and 4 workers", same(&r1, &r4), 1.0),
        Check::ge("series.csv identical for 1 and 4 workers", same(&s1, &s4), 1.0),
    ])
}
