//! Dispatch from a config to the validators.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::averaging::{continuous_average, QuadSpec, ScaleSchedule};
use crate::density::{density_convergence_check, density_estimate, section_density_check, DensityKind, SectionMode};
use crate::dynamics::{
    frequencies, gp_distribution, heisenberg_reduce, product_uniform_cdf, weyl_discrepancies, Heis,
    HeisenbergFlow, Poly,
};
use crate::geometry::{AxisBox, Scheme, SchemeKind};
use crate::sampling::{t_samples, TGrid};
use crate::transfer::{
    additive_transfer_check, continuous_bounds, continuous_scheme_limit, ess_limsup_transfer_check,
    fatou_dct_verify, folner_reduction_check, liminf_limsup_transfer_check, linear_image_check,
    multiplicative_transfer_check, tauberian_verify, GridSequence, InequalityReport, Method, Status,
    TPoints, TransferParams, TransferReport,
};
use crate::values::{FnSampler, NormKind, SeqSampler, VectorValue};

use super::config::{BuiltSampler, ExperimentConfig, ExperimentSpec, MethodSpec, SequenceSpec, TargetCdf};
use super::report::{limit_json, rows_from, value_json, Outcome, SeriesRow};
use super::RunError;

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    params: TransferParams,
    quad: QuadSpec,
}

impl Ctx<'_> {
    fn built(&self) -> Result<BuiltSampler, RunError> {
        self.cfg
            .sampler
            .as_ref()
            .ok_or_else(|| RunError::Config("this experiment needs a sampler".into()))?
            .build()
    }

    fn sampler(&self) -> Result<FnSampler, RunError> {
        Ok(self.built()?.sampler())
    }

    fn scheme(&self, dim: usize) -> Result<Scheme, RunError> {
        self.cfg.scheme.build(dim)
    }

    fn c(&self, dim: usize) -> Vec<f64> {
        self.cfg.t_sampling.c.clone().unwrap_or_else(|| vec![1.0; dim])
    }

    fn samples(&self, dim: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let c = self.c(dim);
        let s = t_samples(&c, &self.cfg.t_sampling.build(self.cfg.seed));
        (c, s)
    }

    fn grid(&self, dim: usize) -> TGrid {
        TGrid::unit(dim, self.cfg.t_sampling.grid_per_axis)
    }
}

fn transfer_outcome(r: &TransferReport) -> Outcome {
    let per_t: Vec<Value> = r
        .per_t
        .iter()
        .map(|e| json!({ "t": e.t, "limit": limit_json(&e.estimate) }))
        .collect();
    let mut o = Outcome::new(
        r.status,
        json!({
            "deviation": r.deviation,
            "discrete_side": value_json(&r.discrete_side),
            "continuous_side": limit_json(&r.continuous_side),
            "constancy_spread": r.constancy_spread,
            "tol": r.tol,
            "limit_tol": r.limit_tol,
            "spread_tol": r.spread_tol,
            "pass": r.pass,
            "per_t": per_t,
        }),
    );
    o.series = rows_from("continuous", &r.continuous_side);
    for e in &r.per_t {
        o.series.extend(rows_from(&format!("t={:?}", e.t), &e.estimate));
    }
    o.notes = r.notes.clone();
    o
}

fn ineq_json(r: &InequalityReport) -> Value {
    serde_json::to_value(r).expect("serializable")
}

fn status_of(pass: bool) -> Status {
    if pass {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Runs one configured experiment on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let tol = cfg.tolerances.tol;
    if tol == 0.0 {
        let mut o = Outcome::new(Status::Inconclusive, json!({ "tol": 0.0 }));
        o.notes.push("tol = 0: residuals of finite-scale estimates cannot reach zero".into());
        return Ok(o);
    }
    let seed = cfg.seed;
    let quad = cfg.quad.build();
    let t = &cfg.tolerances;
    let params = TransferParams {
        discrete: cfg.schedule.discrete.build(seed),
        continuous: cfg.schedule.continuous.build(seed),
        quad: quad.clone(),
        tol,
        limit_tol: t.limit_tol,
        spread_tol: t.spread_tol,
        tail: t.tail,
    };
    let ctx = Ctx { cfg, params, quad };
    match &cfg.experiment {
        ExperimentSpec::CesaroLimit => {
            let f = ctx.sampler()?;
            let scheme = ctx.scheme(f.dim())?;
            let e = continuous_scheme_limit(
                &f,
                &scheme,
                &ctx.params.continuous,
                &ctx.quad,
                ctx.params.limit_tol(),
                t.tail,
            )?;
            let status = if e.converged { Status::Pass } else { Status::Inconclusive };
            let mut o = Outcome::new(status, json!({ "limit": limit_json(&e) }));
            o.series = rows_from("continuous", &e);
            o.notes.extend(ctx.quad.resolution_warning(&f));
            Ok(o)
        }
        ExperimentSpec::AdditiveTransfer => {
            let f = ctx.sampler()?;
            let scheme = ctx.scheme(f.dim())?;
            let r = additive_transfer_check(&f, &scheme, &ctx.grid(f.dim()), &ctx.params)?;
            Ok(transfer_outcome(&r))
        }
        ExperimentSpec::MultiplicativeTransfer => {
            let f = ctx.sampler()?;
            let scheme = ctx.scheme(f.dim())?;
            let (c, ts) = ctx.samples(f.dim());
            let r = multiplicative_transfer_check(&f, &scheme, &c, &ts, &ctx.params)?;
            Ok(transfer_outcome(&r))
        }
        ExperimentSpec::LiminfLimsup { method } => {
            let f = ctx.sampler()?;
            let scheme = ctx.scheme(f.dim())?;
            let (m, pts) = match method {
                MethodSpec::Additive => (Method::Additive, TPoints::Grid(ctx.grid(f.dim()))),
                MethodSpec::Multiplicative => {
                    let (c, points) = ctx.samples(f.dim());
                    (Method::Multiplicative, TPoints::Samples { c, points })
                }
            };
            let r = liminf_limsup_transfer_check(&f, m, &scheme, &pts, &ctx.params, t.slack)?;
            let pass = r.liminf.pass && r.limsup.pass;
            Ok(Outcome::new(
                status_of(pass),
                json!({
                    "liminf": ineq_json(&r.liminf),
                    "limsup": ineq_json(&r.limsup),
                    "continuous": r.continuous,
                    "per_t": r.per_t.iter().map(|(t, b)| json!({ "t": t, "bounds": b })).collect::<Vec<_>>(),
                }),
            ))
        }
        ExperimentSpec::EssLimsup { limit, deltas } => {
            let f = ctx.sampler()?;
            let scheme = ctx.scheme(f.dim())?;
            let l = real_value(limit, f.norm_kind())?;
            let sampling = cfg.t_sampling.build(seed);
            let r = ess_limsup_transfer_check(&f, &scheme, &l, deltas, &sampling, &ctx.params)?;
            let mut o = Outcome::new(
                r.status,
                json!({
                    "levels": r.levels.iter().map(|l| json!({ "delta": l.delta, "level": l.level, "worst_t": l.worst_t })).collect::<Vec<_>>(),
                    "monotone": r.monotone,
                    "continuous": limit_json(&r.continuous),
                    "continuous_deviation": r.continuous_deviation,
                }),
            );
            o.series = rows_from("continuous", &r.continuous);
            o.notes = r.warnings;
            Ok(o)
        }
        ExperimentSpec::Tauberian { sequence, alpha } => {
            let v = match sequence {
                SequenceSpec::SinLog => SeqSampler::real(1, 1.0, |n| {
                    (std::f64::consts::TAU * (n[0].max(1) as f64).ln()).sin()
                }),
                SequenceSpec::RunningAverage { c } => {
                    let f = ctx.sampler()?;
                    if f.dim() != 1 || f.width() != 1 {
                        return Err(RunError::Config("running averages need a scalar sampler in one variable".into()));
                    }
                    running_averages(&f, *c, &ctx.params.discrete, &ctx.quad)?
                }
            };
            let r = tauberian_verify(&v, *alpha, &ctx.params.discrete, tol, t.tail, seed)?;
            let mut o = Outcome::new(
                r.status,
                json!({
                    "hypothesis_ok": r.hypothesis_ok,
                    "worst_ratio": r.worst_ratio,
                    "cesaro": limit_json(&r.cesaro),
                    "tail": r.tail.as_ref().map(limit_json),
                    "deviation": r.deviation,
                }),
            );
            o.series = rows_from("cesaro", &r.cesaro);
            if let Some(tl) = &r.tail {
                o.series.extend(rows_from("tail", tl));
            }
            o.notes = r.notes;
            Ok(o)
        }
        ExperimentSpec::FatouDct { grid_points, terms } => {
            let f = ctx.sampler()?;
            if f.dim() != 1 {
                return Err(RunError::Config("fatou_dct needs a sampler in one variable".into()));
            }
            if *grid_points == 0 || *terms == 0 {
                return Err(RunError::Config("grid_points and terms must be positive".into()));
            }
            let g = *grid_points;
            let xs: Vec<f64> = (0..g).map(|i| (i as f64 + 0.5) / g as f64).collect();
            let seq_terms = (1..=*terms)
                .map(|n| xs.iter().map(|x| f.evaluate(&[n as f64 * x])).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(RunError::eval)?;
            let seq = GridSequence {
                weights: vec![1.0 / g as f64; g],
                terms: seq_terms,
                bound: f.bound(),
                pointwise_limit: None,
            };
            let r = fatou_dct_verify(&seq, tol)?;
            Ok(Outcome::new(
                status_of(r.pass),
                json!({
                    "lhs": r.lhs,
                    "rhs": r.rhs,
                    "margin": r.margin,
                    "every_n_ok": r.every_n_ok,
                    "dct_deviation": r.dct_deviation,
                }),
            ))
        }
        ExperimentSpec::FolnerReduction => {
            let f = ctx.sampler()?;
            let scheme = ctx.scheme(f.dim())?;
            let SchemeKind::Folner { sequence } = scheme.kind() else {
                return Err(RunError::Config("folner_reduction needs a Følner scheme".into()));
            };
            let r = folner_reduction_check(&f, sequence, None, &ctx.params)?;
            let mut o = Outcome::new(
                r.status,
                json!({
                    "uniform": r.uniform.as_ref().map(limit_json),
                    "target": value_json(&r.target),
                    "folner": limit_json(&r.folner),
                    "deviation": r.deviation,
                    "sandwich": r.sandwich.as_ref().map(|(a, b)| json!([ineq_json(a), ineq_json(b)])),
                }),
            );
            o.series = rows_from("folner", &r.folner);
            if let Some(u) = &r.uniform {
                o.series.extend(rows_from("uniform", u));
            }
            Ok(o)
        }
        ExperimentSpec::Density { set, density, ambient } => {
            let s = set.build()?;
            let d = density_estimate(
                &s,
                *density,
                *ambient,
                &ctx.params.continuous,
                &ctx.quad,
                ctx.params.limit_tol(),
                t.tail,
            )?;
            let status = match density {
                DensityKind::Standard | DensityKind::Uniform if !d.converged => Status::Inconclusive,
                _ => Status::Pass,
            };
            let mut o = Outcome::new(
                status,
                json!({
                    "value": d.value,
                    "path": d.path,
                    "bounds": d.bounds,
                    "limit": limit_json(&d.limit),
                }),
            );
            o.series = rows_from("density", &d.limit);
            Ok(o)
        }
        ExperimentSpec::SectionDensity { set, mode, uniform } => {
            let s = set.build()?;
            let pts = match mode {
                SectionMode::Translate => TPoints::Grid(ctx.grid(s.dim())),
                SectionMode::Dilate => {
                    let (c, points) = ctx.samples(s.dim());
                    TPoints::Samples { c, points }
                }
            };
            let r = section_density_check(&s, *mode, *uniform, &pts, &ctx.params)?;
            let mut o = transfer_outcome(&r.report);
            if let Value::Object(m) = &mut o.results {
                m.insert("path".into(), serde_json::to_value(r.path).expect("enum"));
            }
            Ok(o)
        }
        ExperimentSpec::DensityConvergence {
            limit,
            mode,
            eps,
            uniform,
        } => {
            let f = ctx.sampler()?;
            let l = real_value(limit, f.norm_kind())?;
            let ts = match mode {
                SectionMode::Translate => ctx.grid(f.dim()).points,
                SectionMode::Dilate => ctx.samples(f.dim()).1,
            };
            let r = density_convergence_check(&f, &l, *mode, eps, &ts, *uniform, &ctx.params)?;
            let mut o = Outcome::new(
                r.status,
                json!({
                    "hypothesis_ok": r.hypothesis_ok,
                    "entries": r.entries.iter().map(|e| json!({
                        "eps": e.eps,
                        "section_upper": e.section_upper,
                        "density_upper": e.density_upper,
                        "pass": e.pass,
                    })).collect::<Vec<_>>(),
                }),
            );
            o.notes = r.notes;
            Ok(o)
        }
        ExperimentSpec::Weyl {
            window_len,
            starts,
            kmax,
            panel,
        } => {
            let BuiltSampler::Orbit(orbit) = ctx.built()? else {
                return Err(RunError::Config("weyl needs a torus_orbit sampler".into()));
            };
            let ks = frequencies(orbit.torus_dim(), *kmax);
            let mut o = Outcome::new(Status::Pass, Value::Null);
            let mut worst: f64 = 0.0;
            let mut table = Vec::new();
            for (wi, s) in starts.iter().enumerate() {
                let w = AxisBox::closed(vec![*s], vec![s + window_len]).map_err(|e| RunError::Config(e.to_string()))?;
                let ds = if *panel {
                    ks.iter()
                        .map(|k| orbit.weyl_discrepancy(k, &w, ctx.quad.step_for(0)))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(RunError::eval)?
                } else {
                    weyl_discrepancies(&orbit.sampler(), &ks, &w, &ctx.quad).map_err(RunError::eval)?
                };
                for (k, d) in ks.iter().zip(&ds) {
                    worst = worst.max(*d);
                    o.series.push(SeriesRow {
                        series: format!("k={k:?}"),
                        scale_index: wi,
                        scale: *window_len,
                        window: Some(w.clone()),
                        estimate: VectorValue::scalar(*d),
                        residual: None,
                    });
                }
                table.push(json!({ "start": s, "max": ds.iter().cloned().fold(0.0, f64::max) }));
            }
            o.status = status_of(worst <= tol);
            o.results = json!({ "max_discrepancy": worst, "frequencies": ks.len(), "windows": table });
            Ok(o)
        }
        ExperimentSpec::HeisenbergContract {
            samples,
            generator,
            base,
            window_len,
            kmax,
        } => {
            let (idem, inv) = heisenberg_contract(*samples, seed);
            let flow = HeisenbergFlow::new(
                Heis::new(generator[0], generator[1], generator[2]),
                Heis::new(base[0], base[1], base[2]),
            );
            let proj = flow.base_orbit_sampler(Poly::monomial(1.0, 1));
            let w = AxisBox::closed(vec![0.0], vec![*window_len]).map_err(|e| RunError::Config(e.to_string()))?;
            let ds = weyl_discrepancies(&proj, &frequencies(2, *kmax), &w, &ctx.quad).map_err(RunError::eval)?;
            let worst = ds.iter().cloned().fold(0.0, f64::max);
            let pass = idem <= 1e-9 && inv <= 1e-9 && worst <= tol;
            Ok(Outcome::new(
                status_of(pass),
                json!({
                    "idempotence_error": idem,
                    "invariance_error": inv,
                    "base_discrepancy": worst,
                }),
            ))
        }
        ExperimentSpec::MultipleAverage => {
            let BuiltSampler::Multiple(ma) = ctx.built()? else {
                return Err(RunError::Config("multiple_average needs a multiple_average sampler".into()));
            };
            let scheme = ctx.scheme(ma.dim())?;
            let (c, points) = ctx.samples(ma.dim());
            let pts = TPoints::Samples { c: c.clone(), points: points.clone() };
            let r = match ma.linear_image() {
                Some(li) => {
                    let expand = |v: &VectorValue| li.expand(v);
                    linear_image_check(&li.coeffs, &expand, Method::Multiplicative, &scheme, &pts, &ctx.params)?
                }
                None => multiplicative_transfer_check(&ma.sampler(), &scheme, &c, &points, &ctx.params)?,
            };
            let mut o = transfer_outcome(&r);
            let limit_norm = r.continuous_side.value.norm();
            if let Value::Object(m) = &mut o.results {
                m.insert("limit_norm".into(), json!(limit_norm));
            }
            Ok(o)
        }
        ExperimentSpec::Liminf { threshold } => {
            let f = ctx.sampler()?;
            let scheme = ctx.scheme(f.dim())?;
            let b = continuous_bounds(&f, &scheme, &ctx.params.continuous, &ctx.quad, t.tail)?;
            Ok(Outcome::new(
                status_of(b.lo >= *threshold),
                json!({ "bounds": b, "threshold": threshold }),
            ))
        }
        ExperimentSpec::GpDistribution {
            step,
            t_max,
            eta,
            target,
            bins,
            flagged_tol,
        } => {
            let BuiltSampler::Gp(g) = ctx.built()? else {
                return Err(RunError::Config("gp_distribution needs a gp sampler".into()));
            };
            let cdf: fn(f64) -> f64 = match target {
                TargetCdf::Uniform => |u| u.clamp(0.0, 1.0),
                TargetCdf::ProductUniform => product_uniform_cdf,
            };
            let r = gp_distribution(&g, *step, *t_max, *eta, cdf, (0.0, 1.0, *bins))?;
            let pass = r.ks <= tol && r.flagged_fraction <= *flagged_tol;
            let mut o = Outcome::new(status_of(pass), serde_json::to_value(&r).expect("serializable"));
            for (i, b) in r.histogram.iter().enumerate() {
                o.series.push(SeriesRow {
                    series: "histogram".into(),
                    scale_index: i,
                    scale: b.hi - b.lo,
                    window: AxisBox::half_open(vec![b.lo], vec![b.hi]).ok(),
                    estimate: VectorValue::scalar(b.empirical),
                    residual: Some((b.empirical - b.target).abs()),
                });
            }
            Ok(o)
        }
    }
}

/// `v_n = (1/(nc)) ∫_0^{nc} f` from prefix sums of per-step integrals, for
/// every `n` the verifier can touch.
fn running_averages(f: &FnSampler, c: f64, sched: &ScaleSchedule, q: &QuadSpec) -> Result<SeqSampler, RunError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(RunError::Config("running average needs c > 0".into()));
    }
    let n_max = sched
        .boxes(1)?
        .iter()
        .map(|b| b.hi()[0].floor() as usize)
        .max()
        .unwrap_or(1)
        + 2;
    let pieces = (1..=n_max)
        .into_par_iter()
        .map(|k| {
            let b = AxisBox::half_open(vec![(k - 1) as f64 * c], vec![k as f64 * c]).expect("one axis");
            continuous_average(f, &b, q).map(|e| e.value.components()[0] * c)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut prefix = Vec::with_capacity(n_max + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    prefix.push(acc);
    for p in pieces {
        acc += p;
        prefix.push(acc);
    }
    let bound = f.bound();
    Ok(SeqSampler::complex(1, bound, move |n| {
        let n = n[0].max(1) as usize;
        prefix.get(n).map_or(Complex64::new(f64::NAN, 0.0), |s| s / (n as f64 * c))
    }))
}

fn real_value(limit: &[f64], norm: &NormKind) -> Result<VectorValue, RunError> {
    VectorValue::new(limit.iter().map(|x| Complex64::new(*x, 0.0)).collect(), norm.clone())
        .map_err(|e| RunError::Config(format!("limit: {e}")))
}

/// Largest idempotence and lattice-invariance errors of the Heisenberg
/// reduction over seeded random elements, measured on the circle.
pub fn heisenberg_contract(samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let circ = |a: f64, b: f64| {
        let d = (a - b).abs();
        d.min(1.0 - d)
    };
    let (mut idem, mut inv): (f64, f64) = (0.0, 0.0);
    for _ in 0..samples {
        let g = Heis::new(
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
        );
        let gamma = Heis::new(
            rng.gen_range(-5i32..=5) as f64,
            rng.gen_range(-5i32..=5) as f64,
            rng.gen_range(-5i32..=5) as f64,
        );
        let r = heisenberg_reduce(g.as_array());
        let rr = heisenberg_reduce(r);
        let rg = heisenberg_reduce(gamma.mul(&g).as_array());
        for j in 0..3 {
            idem = idem.max(circ(r[j], rr[j]));
            inv = inv.max(circ(r[j], rg[j]));
        }
    }
    (idem, inv)
}
