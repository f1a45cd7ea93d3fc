//! `report.json` and `series.csv`.

use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::averaging::LimitEstimate;
use crate::geometry::AxisBox;
use crate::transfer::Status;
use crate::values::VectorValue;

use super::config::ExperimentConfig;
use super::RunError;

/// One line of `series.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub series: String,
    pub scale_index: usize,
    pub scale: f64,
    pub window: Option<AxisBox>,
    pub estimate: VectorValue,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub results: Value,
    pub series: Vec<SeriesRow>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn new(status: Status, results: Value) -> Self {
        Self {
            status,
            results,
            series: Vec::new(),
            notes: Vec::new(),
        }
    }
}

pub fn rows_from(name: &str, e: &LimitEstimate) -> Vec<SeriesRow> {
    e.series
        .iter()
        .map(|p| SeriesRow {
            series: name.to_string(),
            scale_index: p.level,
            scale: p.scale,
            window: Some(p.window.clone()),
            estimate: p.estimate.clone(),
            residual: Some(p.residual),
        })
        .collect()
}

/// Components as `[re, im]` pairs.
pub fn value_json(v: &VectorValue) -> Value {
    if v.width() <= 8 {
        json!({
            "components": v.components().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "norm": v.norm(),
        })
    } else {
        json!({ "width": v.width(), "norm": v.norm() })
    }
}

pub fn limit_json(e: &LimitEstimate) -> Value {
    json!({
        "value": value_json(&e.value),
        "residual": e.residual,
        "converged": e.converged,
        "tol": e.tol,
        "scales_used": e.scales_used,
    })
}

#[derive(Serialize)]
struct Report<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    status: Status,
    pass: bool,
    exit_code: i32,
    config: &'a ExperimentConfig,
    results: &'a Value,
    notes: &'a [String],
}

pub fn report_json(cfg: &ExperimentConfig, o: &Outcome) -> String {
    let r = Report {
        tool: "etl",
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        status: o.status,
        pass: o.status == Status::Pass,
        exit_code: super::exit_code(o.status),
        config: cfg,
        results: &o.results,
        notes: &o.notes,
    };
    serde_json::to_string_pretty(&r).expect("report serializes")
}

pub fn write_report(path: &Path, cfg: &ExperimentConfig, o: &Outcome) -> Result<(), RunError> {
    std::fs::write(path, report_json(cfg, o) + "\n")?;
    Ok(())
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

/// RFC 4180 rendering of the rows. Window columns are padded to the widest
/// window; width-one estimates fill `estimate_re`/`estimate_im`, wider ones
/// leave them empty and fill `estimate_norm` only.
pub fn series_csv(rows: &[SeriesRow]) -> Result<String, RunError> {
    let d = rows
        .iter()
        .filter_map(|r| r.window.as_ref().map(AxisBox::dim))
        .max()
        .unwrap_or(0);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["series".to_string(), "scale_index".into(), "scale".into()];
    header.extend((0..d).map(|i| format!("window_lo_{i}")));
    header.extend((0..d).map(|i| format!("window_hi_{i}")));
    header.extend(["estimate_re", "estimate_im", "estimate_norm", "residual"].map(String::from));
    w.write_record(&header).map_err(RunError::eval)?;
    for r in rows {
        let mut rec = vec![r.series.clone(), r.scale_index.to_string(), fmt(r.scale)];
        for side in 0..2 {
            for i in 0..d {
                rec.push(match &r.window {
                    Some(b) if i < b.dim() => fmt(if side == 0 { b.lo()[i] } else { b.hi()[i] }),
                    _ => String::new(),
                });
            }
        }
        if r.estimate.width() == 1 {
            let z = r.estimate.components()[0];
            rec.push(fmt(z.re));
            rec.push(fmt(z.im));
        } else {
            rec.push(String::new());
            rec.push(String::new());
        }
        rec.push(fmt(r.estimate.norm()));
        rec.push(r.residual.map(fmt).unwrap_or_default());
        w.write_record(&rec).map_err(RunError::eval)?;
    }
    let bytes = w.into_inner().map_err(RunError::eval)?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn write_series(path: &Path, rows: &[SeriesRow]) -> Result<(), RunError> {
    std::fs::write(path, series_csv(rows)?)?;
    Ok(())
}
