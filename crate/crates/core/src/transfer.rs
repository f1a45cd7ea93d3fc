//! Validators comparing discrete lattice limits with continuous averages.
//!
//! The additive method shifts `f` by lattice points (`n ↦ f(t+n)`) and
//! integrates the resulting limits over `t ∈ [0,1]^d`; the multiplicative
//! method dilates (`n ↦ f(nt)`) and expects the limits to agree for almost
//! every `t`.

use std::collections::BTreeMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::averaging::{
    self, discrete_averages, discrete_window_levels, estimate_from_levels,
    continuous_averages, window_levels, AveragingError, Bounds, Level, LimitEstimate, QuadSpec,
    ScaleSchedule,
};
use crate::geometry::{
    sign_patterns, FolnerSequence, GeometryError, Region, Scheme, Sign,
};
use crate::sampling::{t_samples, TGrid, TSampling};
use crate::values::{FnSampler, SeqSampler, ValueError, VectorValue};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransferError {
    #[error(transparent)]
    Averaging(#[from] AveragingError),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("orthant estimates missing for {missing} of {expected} sign patterns")]
    OrthantMissing { missing: usize, expected: usize },
    #[error("orthant limits disagree: spread {spread:.3e} exceeds {tol:.3e}")]
    OrthantDisagreement { spread: f64, tol: f64 },
    #[error("sample {index} of term {term} has norm {norm} above bound {bound}")]
    Unbounded {
        term: usize,
        index: usize,
        norm: f64,
        bound: f64,
    },
}

impl From<GeometryError> for TransferError {
    fn from(e: GeometryError) -> Self {
        Self::Averaging(e.into())
    }
}

pub type Result<T, E = TransferError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    InvalidInput,
}

/// Schedules and tolerances shared by the transfer validators.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferParams {
    pub discrete: ScaleSchedule,
    pub continuous: ScaleSchedule,
    pub quad: QuadSpec,
    /// Deviation tolerance.
    pub tol: f64,
    /// Residual tolerance for each limit estimate; defaults to `tol`.
    pub limit_tol: Option<f64>,
    /// Constancy tolerance for dilated limits; defaults to `tol`.
    pub spread_tol: Option<f64>,
    pub tail: usize,
}

impl TransferParams {
    pub fn new(discrete: ScaleSchedule, continuous: ScaleSchedule, quad: QuadSpec, tol: f64) -> Self {
        Self {
            discrete,
            continuous,
            quad,
            tol,
            limit_tol: None,
            spread_tol: None,
            tail: 3,
        }
    }

    pub fn limit_tol(&self) -> f64 {
        self.limit_tol.unwrap_or(self.tol)
    }

    pub fn spread_tol(&self) -> f64 {
        self.spread_tol.unwrap_or(self.tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TEstimate {
    pub t: Vec<f64>,
    pub estimate: LimitEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub per_t: Vec<TEstimate>,
    /// `∫ A_t dt` (additive) or the consensus `L` (multiplicative).
    pub discrete_side: VectorValue,
    pub continuous_side: LimitEstimate,
    pub deviation: f64,
    pub constancy_spread: Option<f64>,
    pub tol: f64,
    pub limit_tol: f64,
    pub spread_tol: Option<f64>,
    pub pass: bool,
    pub status: Status,
    pub notes: Vec<String>,
}

impl TransferReport {
    /// Re-evaluates the pass flag at another tolerance, scaling the residual
    /// and spread tolerances in proportion.
    pub fn pass_at(&self, tol: f64) -> bool {
        if self.status == Status::InvalidInput || self.tol <= 0.0 {
            return false;
        }
        let k = tol / self.tol;
        let limit_tol = self.limit_tol * k;
        let cont_ok = self.continuous_side.residual <= limit_tol;
        let dev_ok = self.deviation <= tol;
        match self.constancy_spread {
            None => cont_ok && dev_ok && self.per_t.iter().all(|e| e.estimate.residual <= limit_tol),
            Some(spread) => {
                let converged = self
                    .per_t
                    .iter()
                    .filter(|e| e.estimate.residual <= limit_tol)
                    .count();
                converged == self.per_t.len()
                    && converged >= 2
                    && cont_ok
                    && dev_ok
                    && spread <= self.spread_tol.unwrap_or(self.tol) * k
            }
        }
    }
}

/// A linear map applied to every window average.
pub type Expand<'a> = dyn Fn(&VectorValue) -> VectorValue + Sync + 'a;

/// Averages over a list of windows.
pub type WindowAverager<'a> = dyn Fn(&[Region]) -> averaging::Result<Vec<VectorValue>> + Sync + 'a;

/// How orthant estimates are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineMode {
    /// All orthants must agree; the result is their mean.
    Mean,
    /// Real values; the smallest orthant value.
    Liminf,
    /// Real values; the largest orthant value.
    Limsup,
}

/// Combines one-sided estimates, one per sign pattern, into a two-sided one.
pub fn orthant_combine(
    per_orthant: &BTreeMap<Vec<Sign>, LimitEstimate>,
    tol: f64,
    mode: CombineMode,
) -> Result<LimitEstimate> {
    let dim = per_orthant.keys().next().map(Vec::len).unwrap_or(0);
    let expected = 1usize << dim;
    let present = sign_patterns(dim)
        .iter()
        .filter(|s| per_orthant.contains_key(*s))
        .count();
    if dim == 0 || present != expected {
        return Err(TransferError::OrthantMissing {
            missing: expected.saturating_sub(present).max(1),
            expected,
        });
    }
    let ests: Vec<&LimitEstimate> = per_orthant.values().collect();
    let residual = ests.iter().map(|e| e.residual).fold(0.0, f64::max);
    let series = ests.iter().flat_map(|e| e.series.iter().cloned()).collect();
    let scales_used = ests[0].scales_used.clone();
    let value = match mode {
        CombineMode::Mean => {
            let vals: Vec<&VectorValue> = ests.iter().map(|e| &e.value).collect();
            let spread = VectorValue::max_pairwise_distance(&vals)?;
            if spread > tol {
                return Err(TransferError::OrthantDisagreement { spread, tol });
            }
            let owned: Vec<VectorValue> = vals.into_iter().cloned().collect();
            VectorValue::mean(&owned)?
        }
        CombineMode::Liminf | CombineMode::Limsup => {
            let mut best: Option<(f64, &VectorValue)> = None;
            for e in &ests {
                let x = e.value.real_part(1e-9)?;
                let better = match best {
                    None => true,
                    Some((b, _)) => {
                        (mode == CombineMode::Liminf && x < b)
                            || (mode == CombineMode::Limsup && x > b)
                    }
                };
                if better {
                    best = Some((x, &e.value));
                }
            }
            best.expect("non-empty").1.clone()
        }
    };
    Ok(LimitEstimate {
        value,
        residual,
        converged: ests.iter().all(|e| e.converged) && residual <= tol,
        tol,
        scales_used,
        series,
    })
}

/// Which side of the scheme a window list belongs to.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Discrete,
    Continuous,
}

fn levels_for(
    scheme: &Scheme,
    sched: &ScaleSchedule,
    side: Side,
    signs: Option<&[Sign]>,
) -> averaging::Result<Vec<Level>> {
    match side {
        Side::Discrete => discrete_window_levels(scheme, sched, signs),
        Side::Continuous => window_levels(scheme, sched, signs),
    }
}

fn limit_on_levels(
    avg: &WindowAverager<'_>,
    levels: &[Level],
    tol: f64,
    tail: usize,
) -> Result<LimitEstimate> {
    let flat: Vec<Region> = levels.iter().flat_map(|l| l.windows.iter().cloned()).collect();
    let values = avg(&flat)?;
    let mut it = values.into_iter();
    let assembled = levels
        .iter()
        .map(|l| {
            let ws = l
                .windows
                .iter()
                .map(|r| (r.bounding_box(), it.next().expect("one value per window")))
                .collect();
            (l.scale, ws)
        })
        .collect();
    Ok(estimate_from_levels(assembled, tol, tail)?)
}

/// The limit of `avg` under a scheme. Two-sided schemes are evaluated per
/// orthant; an orthant disagreement yields a non-converged estimate and a
/// note.
fn scheme_limit(
    avg: &WindowAverager<'_>,
    scheme: &Scheme,
    sched: &ScaleSchedule,
    side: Side,
    tol: f64,
    tail: usize,
) -> Result<(LimitEstimate, Option<String>)> {
    if !scheme.is_two_sided() {
        let levels = levels_for(scheme, sched, side, None)?;
        return Ok((limit_on_levels(avg, &levels, tol, tail)?, None));
    }
    let per = per_orthant_limits(avg, scheme, sched, side, tol, tail)?;
    match orthant_combine(&per, tol, CombineMode::Mean) {
        Ok(e) => Ok((e, None)),
        Err(TransferError::OrthantDisagreement { spread, .. }) => {
            let mut first = per.into_values().next().expect("non-empty");
            first.residual = first.residual.max(spread);
            first.converged = false;
            Ok((first, Some(format!("orthant limits disagree by {spread:.3e}"))))
        }
        Err(e) => Err(e),
    }
}

fn per_orthant_limits(
    avg: &WindowAverager<'_>,
    scheme: &Scheme,
    sched: &ScaleSchedule,
    side: Side,
    tol: f64,
    tail: usize,
) -> Result<BTreeMap<Vec<Sign>, LimitEstimate>> {
    let mut per = BTreeMap::new();
    for s in sign_patterns(scheme.dim()) {
        let levels = levels_for(scheme, sched, side, Some(&s))?;
        per.insert(s, limit_on_levels(avg, &levels, tol, tail)?);
    }
    Ok(per)
}

/// Continuous averager with midpoint quadrature; records the largest
/// refinement gap.
fn quad_averager<'a>(
    f: &'a FnSampler,
    q: &'a QuadSpec,
    gap: &'a Mutex<f64>,
) -> impl Fn(&[Region]) -> averaging::Result<Vec<VectorValue>> + Sync + 'a {
    move |ws: &[Region]| {
        let quads = continuous_averages(f, ws, q)?;
        let worst = quads.iter().filter_map(|e| e.refine_gap).fold(0.0, f64::max);
        let mut g = gap.lock().expect("gap lock");
        *g = g.max(worst);
        Ok(quads.into_iter().map(|e| e.value).collect())
    }
}

fn check_dims(f: &FnSampler, scheme: &Scheme) -> Result<()> {
    if f.dim() != scheme.dim() {
        return Err(TransferError::InvalidInput(format!(
            "sampler dimension {} does not match scheme dimension {}",
            f.dim(),
            scheme.dim()
        )));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(TransferError::InvalidInput(format!("tolerance {tol} must be >= 0")));
    }
    Ok(())
}

/// Lattice limits of `n ↦ lift(t)(n)` for each `t`, in order.
fn per_t_limits(
    ts: &[Vec<f64>],
    lift: &(dyn Fn(&[f64]) -> Result<SeqSampler> + Sync),
    expand: Option<&Expand<'_>>,
    scheme: &Scheme,
    sched: &ScaleSchedule,
    tol: f64,
    tail: usize,
) -> Result<(Vec<TEstimate>, Vec<String>)> {
    let results: Vec<Result<(TEstimate, Option<String>)>> = ts
        .par_iter()
        .map(|t| {
            let s = lift(t)?;
            let avg = |ws: &[Region]| {
                let v = discrete_averages(&s, ws)?;
                Ok(match expand {
                    Some(e) => v.iter().map(e).collect(),
                    None => v,
                })
            };
            let (estimate, note) = scheme_limit(&avg, scheme, sched, Side::Discrete, tol, tail)?;
            Ok((
                TEstimate {
                    t: t.clone(),
                    estimate,
                },
                note.map(|n| format!("t = {t:?}: {n}")),
            ))
        })
        .collect();
    let mut out = Vec::with_capacity(ts.len());
    let mut notes = Vec::new();
    for r in results {
        let (e, n) = r?;
        out.push(e);
        notes.extend(n);
    }
    Ok((out, notes))
}

/// Additive transfer with midpoint quadrature on the continuous side.
pub fn additive_transfer_check(
    f: &FnSampler,
    scheme: &Scheme,
    t_grid: &TGrid,
    params: &TransferParams,
) -> Result<TransferReport> {
    check_dims(f, scheme)?;
    if t_grid.points.iter().flatten().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(TransferError::InvalidInput("t-grid must lie in [0,1]^d".into()));
    }
    let gap = Mutex::new(0.0);
    let cont = quad_averager(f, &params.quad, &gap);
    let lift = |t: &[f64]| Ok(SeqSampler::shifted(f, t)?);
    let mut report = additive_core(&lift, None, &cont, scheme, t_grid, params)?;
    push_quad_notes(&mut report.notes, f, &params.quad, &gap);
    Ok(report)
}

fn push_quad_notes(notes: &mut Vec<String>, f: &FnSampler, q: &QuadSpec, gap: &Mutex<f64>) {
    if let Some(w) = q.resolution_warning(f) {
        notes.push(w);
    }
    if q.refine {
        notes.push(format!(
            "largest half-step refinement gap {:.3e}",
            *gap.lock().expect("gap lock")
        ));
    }
}

pub(crate) fn additive_core(
    lift: &(dyn Fn(&[f64]) -> Result<SeqSampler> + Sync),
    expand: Option<&Expand<'_>>,
    cont: &WindowAverager<'_>,
    scheme: &Scheme,
    t_grid: &TGrid,
    params: &TransferParams,
) -> Result<TransferReport> {
    check_tol(params.tol)?;
    if t_grid.is_empty() {
        return Err(TransferError::InvalidInput("empty t-grid".into()));
    }
    let ltol = params.limit_tol();
    let (per_t, mut notes) = per_t_limits(
        &t_grid.points,
        lift,
        expand,
        scheme,
        &params.discrete,
        ltol,
        params.tail,
    )?;
    let mut integral: Option<VectorValue> = None;
    for (e, w) in per_t.iter().zip(&t_grid.weights) {
        let term = e.estimate.value.scale_real(*w);
        integral = Some(match integral {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
    }
    let discrete_side = integral.expect("non-empty grid");
    let (continuous_side, note) = scheme_limit(
        cont,
        scheme,
        &params.continuous,
        Side::Continuous,
        ltol,
        params.tail,
    )?;
    notes.extend(note);
    let deviation = discrete_side.distance(&continuous_side.value)?;
    let bad: Vec<&TEstimate> = per_t.iter().filter(|e| !e.estimate.converged).collect();
    if let Some(first) = bad.first() {
        notes.push(format!(
            "{} of {} shifted limits did not converge (first at t = {:?}, residual {:.3e})",
            bad.len(),
            per_t.len(),
            first.t,
            first.estimate.residual
        ));
    }
    if !continuous_side.converged {
        notes.push(format!(
            "continuous limit did not converge (residual {:.3e})",
            continuous_side.residual
        ));
    }
    let pass = bad.is_empty() && continuous_side.converged && deviation <= params.tol;
    Ok(TransferReport {
        per_t,
        discrete_side,
        continuous_side,
        deviation,
        constancy_spread: None,
        tol: params.tol,
        limit_tol: ltol,
        spread_tol: None,
        pass,
        status: if pass { Status::Pass } else { Status::Fail },
        notes,
    })
}

/// Multiplicative transfer: `t_samples` must lie in `(0, c]`.
pub fn multiplicative_transfer_check(
    f: &FnSampler,
    scheme: &Scheme,
    c: &[f64],
    t_samples: &[Vec<f64>],
    params: &TransferParams,
) -> Result<TransferReport> {
    check_dims(f, scheme)?;
    check_samples_in(c, t_samples)?;
    let gap = Mutex::new(0.0);
    let cont = quad_averager(f, &params.quad, &gap);
    let lift = |t: &[f64]| Ok(SeqSampler::dilated(f, t)?);
    let mut report = multiplicative_core(&lift, None, &cont, scheme, t_samples, params)?;
    push_quad_notes(&mut report.notes, f, &params.quad, &gap);
    Ok(report)
}

/// Transfer check for `f = E ∘ g` with `E` linear: window averages of the
/// coefficient sampler `g` are mapped through `E` before any comparison, so
/// residuals and deviations are measured in the norm of the image.
pub fn linear_image_check(
    g: &FnSampler,
    expand: &Expand<'_>,
    method: Method,
    scheme: &Scheme,
    ts: &TPoints,
    params: &TransferParams,
) -> Result<TransferReport> {
    check_dims(g, scheme)?;
    let gap = Mutex::new(0.0);
    let inner = quad_averager(g, &params.quad, &gap);
    let cont = |ws: &[Region]| -> averaging::Result<Vec<VectorValue>> {
        Ok(inner(ws)?.iter().map(expand).collect())
    };
    let mut report = match (method, ts) {
        (Method::Additive, TPoints::Grid(grid)) => {
            let lift = |t: &[f64]| Ok(SeqSampler::shifted(g, t)?);
            additive_core(&lift, Some(expand), &cont, scheme, grid, params)?
        }
        (Method::Multiplicative, TPoints::Samples { c, points }) => {
            check_samples_in(c, points)?;
            let lift = |t: &[f64]| Ok(SeqSampler::dilated(g, t)?);
            multiplicative_core(&lift, Some(expand), &cont, scheme, points, params)?
        }
        _ => {
            return Err(TransferError::InvalidInput(
                "additive checks take a t-grid, multiplicative checks take samples".into(),
            ))
        }
    };
    push_quad_notes(&mut report.notes, g, &params.quad, &gap);
    Ok(report)
}

fn check_samples_in(c: &[f64], ts: &[Vec<f64>]) -> Result<()> {
    for t in ts {
        if t.len() != c.len() || t.iter().zip(c).any(|(x, ci)| !(*x > 0.0 && x <= ci)) {
            return Err(TransferError::InvalidInput(format!(
                "sample {t:?} is outside (0, c] with c = {c:?}"
            )));
        }
    }
    Ok(())
}

pub(crate) fn multiplicative_core(
    lift: &(dyn Fn(&[f64]) -> Result<SeqSampler> + Sync),
    expand: Option<&Expand<'_>>,
    cont: &WindowAverager<'_>,
    scheme: &Scheme,
    t_samples: &[Vec<f64>],
    params: &TransferParams,
) -> Result<TransferReport> {
    check_tol(params.tol)?;
    let ltol = params.limit_tol();
    let (per_t, mut notes) =
        per_t_limits(t_samples, lift, expand, scheme, &params.discrete, ltol, params.tail)?;
    let (continuous_side, note) = scheme_limit(
        cont,
        scheme,
        &params.continuous,
        Side::Continuous,
        ltol,
        params.tail,
    )?;
    notes.extend(note);
    let converged: Vec<&VectorValue> = per_t
        .iter()
        .filter(|e| e.estimate.converged)
        .map(|e| &e.estimate.value)
        .collect();
    let spread = VectorValue::max_pairwise_distance(&converged)?;
    let (consensus, deviation) = if converged.is_empty() {
        (continuous_side.value.scale_real(0.0), f64::INFINITY)
    } else {
        let owned: Vec<VectorValue> = converged.iter().map(|v| (*v).clone()).collect();
        let l = VectorValue::mean(&owned)?;
        let dev = l.distance(&continuous_side.value)?;
        (l, dev)
    };
    let non_converged = per_t.len() - converged.len();
    let status = if converged.len() < 2 {
        notes.push(format!(
            "only {} of {} dilated limits converged",
            converged.len(),
            per_t.len()
        ));
        Status::Inconclusive
    } else if non_converged > 0 {
        let first = per_t.iter().find(|e| !e.estimate.converged).expect("exists");
        notes.push(format!(
            "{non_converged} of {} dilated limits did not converge (first at t = {:?}, residual {:.3e})",
            per_t.len(),
            first.t,
            first.estimate.residual
        ));
        Status::Fail
    } else if !continuous_side.converged {
        notes.push(format!(
            "continuous limit did not converge (residual {:.3e})",
            continuous_side.residual
        ));
        Status::Fail
    } else if spread <= params.spread_tol() && deviation <= params.tol {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(TransferReport {
        per_t,
        discrete_side: consensus,
        continuous_side,
        deviation,
        constancy_spread: Some(spread),
        tol: params.tol,
        limit_tol: ltol,
        spread_tol: Some(params.spread_tol()),
        pass: status == Status::Pass,
        status,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Ge,
    Le,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs` for `Ge`, `rhs − lhs` for `Le`.
    pub margin: f64,
    pub slack: f64,
    pub direction: Direction,
    pub pass: bool,
}

impl InequalityReport {
    pub fn new(lhs: f64, rhs: f64, direction: Direction, slack: f64) -> Self {
        let margin = match direction {
            Direction::Ge => lhs - rhs,
            Direction::Le => rhs - lhs,
        };
        Self {
            lhs,
            rhs,
            margin,
            slack,
            direction,
            pass: margin >= -slack,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Additive,
    Multiplicative,
}

/// Both sides of the liminf and limsup inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub liminf: InequalityReport,
    pub limsup: InequalityReport,
    pub per_t: Vec<(Vec<f64>, Bounds)>,
    pub continuous: Bounds,
}

/// Tail bounds of every window estimate in the latter half of the levels.
fn estimate_bounds(e: &LimitEstimate) -> Result<Bounds> {
    let n_levels = e.scales_used.len();
    let mut by_level: Vec<Vec<f64>> = vec![Vec::new(); n_levels];
    for p in &e.series {
        if p.level < n_levels {
            by_level[p.level].push(p.estimate.real_part(1e-9)?);
        }
    }
    let half = n_levels / 2;
    let quarter = n_levels - (n_levels / 4).max(1);
    let mm = |from: usize| {
        by_level[from..]
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)))
    };
    let (lo, hi) = mm(half);
    let (qlo, qhi) = mm(quarter);
    Ok(Bounds {
        lo,
        hi,
        stability: (qlo - lo).abs().max((hi - qhi).abs()),
    })
}

fn scheme_bounds(
    avg: &WindowAverager<'_>,
    scheme: &Scheme,
    sched: &ScaleSchedule,
    side: Side,
    tail: usize,
) -> Result<Bounds> {
    if !scheme.is_two_sided() {
        let levels = levels_for(scheme, sched, side, None)?;
        return estimate_bounds(&limit_on_levels(avg, &levels, f64::INFINITY, tail)?);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut stability: f64 = 0.0;
    for s in sign_patterns(scheme.dim()) {
        let levels = levels_for(scheme, sched, side, Some(&s))?;
        let b = estimate_bounds(&limit_on_levels(avg, &levels, f64::INFINITY, tail)?)?;
        lo = lo.min(b.lo);
        hi = hi.max(b.hi);
        stability = stability.max(b.stability);
    }
    Ok(Bounds { lo, hi, stability })
}

/// Parameter points and weights for the liminf/limsup check.
#[derive(Debug, Clone, PartialEq)]
pub enum TPoints {
    Grid(TGrid),
    Samples { c: Vec<f64>, points: Vec<Vec<f64>> },
}

/// Checks `liminf(continuous) ≥ ∫ liminf(discrete_t)` and
/// `limsup(continuous) ≤ ∫ limsup(discrete_t)` using tail min/max proxies.
/// `slack` defaults to twice the largest proxy instability.
pub fn liminf_limsup_transfer_check(
    f: &FnSampler,
    method: Method,
    scheme: &Scheme,
    ts: &TPoints,
    params: &TransferParams,
    slack: Option<f64>,
) -> Result<BoundsReport> {
    check_dims(f, scheme)?;
    if f.width() != 1 {
        return Err(TransferError::InvalidInput("bounds need a real scalar sampler".into()));
    }
    let gap = Mutex::new(0.0);
    let cont = quad_averager(f, &params.quad, &gap);
    let lift = |t: &[f64]| -> Result<SeqSampler> {
        Ok(match method {
            Method::Additive => SeqSampler::shifted(f, t)?,
            Method::Multiplicative => SeqSampler::dilated(f, t)?,
        })
    };
    bounds_core(&lift, &cont, method, scheme, ts, params, slack)
}

pub(crate) fn bounds_core(
    lift: &(dyn Fn(&[f64]) -> Result<SeqSampler> + Sync),
    cont: &WindowAverager<'_>,
    method: Method,
    scheme: &Scheme,
    ts: &TPoints,
    params: &TransferParams,
    slack: Option<f64>,
) -> Result<BoundsReport> {
    let (points, weights): (Vec<Vec<f64>>, Vec<f64>) = match (ts, method) {
        (TPoints::Grid(g), Method::Additive) => (g.points.clone(), g.weights.clone()),
        (TPoints::Samples { c, points }, Method::Multiplicative) => {
            check_samples_in(c, points)?;
            let n = points.len().max(1) as f64;
            (points.clone(), vec![1.0 / n; points.len()])
        }
        _ => {
            return Err(TransferError::InvalidInput(
                "additive checks take a t-grid, multiplicative checks take samples".into(),
            ))
        }
    };
    if points.is_empty() {
        return Err(TransferError::InvalidInput("no parameter points".into()));
    }
    let per_t: Vec<(Vec<f64>, Bounds)> = points
        .par_iter()
        .map(|t| {
            let s = lift(t)?;
            let avg = |ws: &[Region]| discrete_averages(&s, ws);
            Ok((
                t.clone(),
                scheme_bounds(&avg, scheme, &params.discrete, Side::Discrete, params.tail)?,
            ))
        })
        .collect::<Result<_>>()?;
    let continuous = scheme_bounds(cont, scheme, &params.continuous, Side::Continuous, params.tail)?;
    let int_lo: f64 = per_t.iter().zip(&weights).map(|((_, b), w)| w * b.lo).sum();
    let int_hi: f64 = per_t.iter().zip(&weights).map(|((_, b), w)| w * b.hi).sum();
    let slack = slack.unwrap_or_else(|| {
        let worst = per_t
            .iter()
            .map(|(_, b)| b.stability)
            .fold(continuous.stability, f64::max);
        (2.0 * worst).max(1e-9)
    });
    Ok(BoundsReport {
        liminf: InequalityReport::new(continuous.lo, int_lo, Direction::Ge, slack),
        limsup: InequalityReport::new(continuous.hi, int_hi, Direction::Le, slack),
        per_t,
        continuous,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EssLevel {
    pub delta: f64,
    /// Max over sampled `t ∈ (0, δ]^d` of the tail max of `‖avg − L‖`.
    pub level: f64,
    pub worst_t: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EssLimsupReport {
    pub levels: Vec<EssLevel>,
    pub monotone: bool,
    pub continuous: LimitEstimate,
    pub continuous_deviation: f64,
    pub pass: bool,
    pub status: Status,
    pub warnings: Vec<String>,
}

/// For each `δ`, bounds the essential limsup over `t ∈ (0, δ]^d` of the
/// dilated averages' distance to `L`, then checks the continuous limit.
pub fn ess_limsup_transfer_check(
    f: &FnSampler,
    scheme: &Scheme,
    l: &VectorValue,
    deltas: &[f64],
    sampling: &TSampling,
    params: &TransferParams,
) -> Result<EssLimsupReport> {
    check_dims(f, scheme)?;
    check_tol(params.tol)?;
    if deltas.is_empty() || deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(TransferError::InvalidInput("δ-schedule must be positive and non-empty".into()));
    }
    let d = scheme.dim();
    let unit = t_samples(&vec![1.0; d], sampling);
    let mut levels = Vec::with_capacity(deltas.len());
    let mut warnings = Vec::new();
    for &delta in deltas {
        let ts: Vec<Vec<f64>> = unit
            .iter()
            .map(|u| u.iter().map(|x| x * delta).collect())
            .collect();
        let per: Vec<(Vec<f64>, f64)> = ts
            .par_iter()
            .map(|t| {
                let s = SeqSampler::dilated(f, t)?;
                let avg = |ws: &[Region]| discrete_averages(&s, ws);
                let worst = tail_distance(&avg, scheme, &params.discrete, l, params.tail)?;
                Ok((t.clone(), worst))
            })
            .collect::<Result<_>>()?;
        let (worst_t, level) = per
            .into_iter()
            .fold((Vec::new(), f64::NEG_INFINITY), |acc, (t, v)| {
                if v > acc.1 {
                    (t, v)
                } else {
                    acc
                }
            });
        levels.push(EssLevel {
            delta,
            level,
            worst_t,
        });
    }
    let mut monotone = true;
    for w in levels.windows(2) {
        if w[1].level > w[0].level + params.tol / 2.0 {
            monotone = false;
            warnings.push(format!(
                "level rose from {:.3e} at δ = {} to {:.3e} at δ = {}",
                w[0].level, w[0].delta, w[1].level, w[1].delta
            ));
        }
    }
    let gap = Mutex::new(0.0);
    let cont = quad_averager(f, &params.quad, &gap);
    let (continuous, note) = scheme_limit(
        &cont,
        scheme,
        &params.continuous,
        Side::Continuous,
        params.limit_tol(),
        params.tail,
    )?;
    warnings.extend(note);
    let continuous_deviation = continuous.value.distance(l)?;
    let final_level = levels.last().map(|l| l.level).unwrap_or(f64::INFINITY);
    let pass = final_level <= params.tol
        && continuous.converged
        && continuous_deviation <= params.tol;
    Ok(EssLimsupReport {
        levels,
        monotone,
        continuous,
        continuous_deviation,
        pass,
        status: if pass { Status::Pass } else { Status::Fail },
        warnings,
    })
}

/// Largest `‖avg − L‖` over the windows of the latter half of the levels.
fn tail_distance(
    avg: &WindowAverager<'_>,
    scheme: &Scheme,
    sched: &ScaleSchedule,
    l: &VectorValue,
    tail: usize,
) -> Result<f64> {
    let signs: Vec<Option<Vec<Sign>>> = if scheme.is_two_sided() {
        sign_patterns(scheme.dim()).into_iter().map(Some).collect()
    } else {
        vec![None]
    };
    let mut worst: f64 = 0.0;
    for s in signs {
        let levels = levels_for(scheme, sched, Side::Discrete, s.as_deref())?;
        let e = limit_on_levels(avg, &levels, f64::INFINITY, tail)?;
        let half = e.scales_used.len() / 2;
        for p in e.series.iter().filter(|p| p.level >= half) {
            worst = worst.max(p.estimate.distance(l)?);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauberianReport {
    pub hypothesis_ok: bool,
    /// Largest `n_i · ‖v_{n+e_i} − v_n‖ / α` seen by the spot-check.
    pub worst_ratio: f64,
    pub cesaro: LimitEstimate,
    pub tail: Option<LimitEstimate>,
    pub deviation: Option<f64>,
    pub pass: bool,
    pub status: Status,
    pub notes: Vec<String>,
}

/// Spot-checks `‖v_{n+e_i} − v_n‖ ≤ α/n_i`, then compares the Cesàro
/// limit of `v` with the limit of `v_n` itself.
pub fn tauberian_verify(
    v: &SeqSampler,
    alpha: f64,
    sched: &ScaleSchedule,
    tol: f64,
    tail: usize,
    seed: u64,
) -> Result<TauberianReport> {
    use rand::{Rng, SeedableRng};
    check_tol(tol)?;
    let d = v.dim();
    let boxes = sched.boxes(d)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst_ratio: f64 = 0.0;
    let mut worst_at: Vec<i64> = Vec::new();
    let mut check_point = |n: &[i64]| -> Result<()> {
        let base = v.evaluate(n)?;
        for i in 0..d {
            let mut m = n.to_vec();
            m[i] += 1;
            let step = v.evaluate(&m)?.distance(&base)?;
            let ratio = step * n[i] as f64 / alpha;
            if ratio > worst_ratio {
                worst_ratio = ratio;
                worst_at = n.to_vec();
            }
        }
        Ok(())
    };
    for b in &boxes {
        let corner: Vec<i64> = b.hi().iter().map(|x| x.floor().max(1.0) as i64).collect();
        check_point(&corner)?;
        for _ in 0..8 {
            let p: Vec<i64> = b
                .hi()
                .iter()
                .map(|x| {
                    let hi = x.floor().max(1.0) as i64;
                    rng.gen_range(1..=hi)
                })
                .collect();
            check_point(&p)?;
        }
    }
    let levels: Vec<Level> = boxes
        .iter()
        .map(|b| Level {
            scale: b.min_edge(),
            windows: vec![b.clone().into()],
        })
        .collect();
    let cesaro = averaging::discrete_limit(v, &levels, tol, tail)?;
    let mut notes = Vec::new();
    if worst_ratio > 1.0 + 1e-9 {
        notes.push(format!(
            "increment bound violated: n·‖Δv‖/α = {worst_ratio:.3} at n = {worst_at:?}"
        ));
        return Ok(TauberianReport {
            hypothesis_ok: false,
            worst_ratio,
            cesaro,
            tail: None,
            deviation: None,
            pass: false,
            status: Status::InvalidInput,
            notes,
        });
    }
    if !cesaro.converged {
        notes.push(format!(
            "Cesàro limit did not converge (residual {:.3e}); no conclusion",
            cesaro.residual
        ));
        return Ok(TauberianReport {
            hypothesis_ok: true,
            worst_ratio,
            cesaro,
            tail: None,
            deviation: None,
            pass: false,
            status: Status::Inconclusive,
            notes,
        });
    }
    let tail_levels = boxes
        .iter()
        .map(|b| {
            let n: Vec<i64> = b.hi().iter().map(|x| x.floor().max(1.0) as i64).collect();
            Ok((b.min_edge(), vec![(b.clone(), v.evaluate(&n)?)]))
        })
        .collect::<Result<Vec<_>>>()?;
    let tail_est = estimate_from_levels(tail_levels, tol, tail)?;
    let deviation = tail_est.value.distance(&cesaro.value)?;
    let pass = tail_est.converged && deviation <= tol;
    if !tail_est.converged {
        notes.push(format!(
            "sequence tail did not settle (residual {:.3e})",
            tail_est.residual
        ));
    }
    Ok(TauberianReport {
        hypothesis_ok: true,
        worst_ratio,
        cesaro,
        tail: Some(tail_est),
        deviation: Some(deviation),
        pass,
        status: if pass { Status::Pass } else { Status::Fail },
        notes,
    })
}

/// Functions `f_1, …, f_N` sampled on a finite weighted grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSequence {
    /// Cell measures; they sum to the measure of the space.
    pub weights: Vec<f64>,
    /// `terms[n][i] = f_{n+1}(x_i)`.
    pub terms: Vec<Vec<VectorValue>>,
    pub bound: f64,
    pub pointwise_limit: Option<Vec<VectorValue>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FatouReport {
    /// Tail max of `‖Σ w_i f_n(x_i)‖`.
    pub lhs: f64,
    /// `Σ w_i · tail max ‖f_n(x_i)‖`.
    pub rhs: f64,
    pub margin: f64,
    /// The finite inequality `‖∫f_n‖ ≤ ∫‖f_n‖` held for every `n`.
    pub every_n_ok: bool,
    /// Tail max of `‖∫f_n − ∫f‖` when pointwise limits are given.
    pub dct_deviation: Option<f64>,
    pub pass: bool,
}

fn integrate(weights: &[f64], values: &[VectorValue]) -> Result<VectorValue> {
    let mut acc = values[0].scale_real(weights[0]);
    for (w, v) in weights.iter().zip(values).skip(1) {
        acc = acc.add(&v.scale_real(*w))?;
    }
    Ok(acc)
}

/// Fatou-type inequality and dominated convergence on grid realizations.
pub fn fatou_dct_verify(seq: &GridSequence, tol: f64) -> Result<FatouReport> {
    check_tol(tol)?;
    let m = seq.weights.len();
    if m == 0 || seq.terms.is_empty() {
        return Err(TransferError::InvalidInput("empty grid sequence".into()));
    }
    if seq.weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(TransferError::InvalidInput("weights must be non-negative".into()));
    }
    for (n, term) in seq.terms.iter().enumerate() {
        if term.len() != m {
            return Err(TransferError::InvalidInput(format!(
                "term {n} has {} samples, grid has {m}",
                term.len()
            )));
        }
        for (i, v) in term.iter().enumerate() {
            let norm = v.norm();
            if !(norm <= seq.bound * (1.0 + 1e-12)) {
                return Err(TransferError::Unbounded {
                    term: n,
                    index: i,
                    norm,
                    bound: seq.bound,
                });
            }
        }
    }
    let tail_start = seq.terms.len() / 2;
    let mut every_n_ok = true;
    let mut lhs: f64 = 0.0;
    let mut pointwise_max = vec![0.0f64; m];
    let limit_integral = match &seq.pointwise_limit {
        Some(l) if l.len() == m => Some(integrate(&seq.weights, l)?),
        Some(_) => {
            return Err(TransferError::InvalidInput("pointwise limit has wrong length".into()))
        }
        None => None,
    };
    let mut dct: Option<f64> = limit_integral.as_ref().map(|_| 0.0);
    for (n, term) in seq.terms.iter().enumerate() {
        let integral = integrate(&seq.weights, term)?;
        let norm_int = integral.norm();
        let int_norm: f64 = seq.weights.iter().zip(term).map(|(w, v)| w * v.norm()).sum();
        if norm_int > int_norm * (1.0 + 1e-12) + 1e-15 {
            every_n_ok = false;
        }
        if n >= tail_start {
            lhs = lhs.max(norm_int);
            for (p, v) in pointwise_max.iter_mut().zip(term) {
                *p = p.max(v.norm());
            }
            if let (Some(li), Some(d)) = (&limit_integral, dct.as_mut()) {
                *d = d.max(integral.distance(li)?);
            }
        }
    }
    let rhs: f64 = seq.weights.iter().zip(&pointwise_max).map(|(w, p)| w * p).sum();
    let dct_ok = dct.is_none_or(|d| d <= tol);
    Ok(FatouReport {
        lhs,
        rhs,
        margin: rhs - lhs,
        every_n_ok,
        dct_deviation: dct,
        pass: every_n_ok && lhs <= rhs + tol && dct_ok,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FolnerReport {
    /// The uniform limit established first, when `L` was not supplied.
    pub uniform: Option<LimitEstimate>,
    pub target: VectorValue,
    pub folner: LimitEstimate,
    pub deviation: f64,
    /// Real mode: Følner liminf/limsup against the uniform bounds.
    pub sandwich: Option<(InequalityReport, InequalityReport)>,
    pub pass: bool,
    pub status: Status,
}

/// Følner averages along `F` converge to the uniform Cesàro limit `L`.
/// When `l` is `None` the uniform limit is estimated first from
/// `params.discrete` windows, and a non-converged estimate is a
/// precondition failure. Følner indices come from `params.continuous`.
pub fn folner_reduction_check(
    f: &FnSampler,
    sequence: &FolnerSequence,
    l: Option<&VectorValue>,
    params: &TransferParams,
) -> Result<FolnerReport> {
    if f.dim() != sequence.dim() {
        return Err(TransferError::InvalidInput("sampler and sequence dimensions differ".into()));
    }
    check_tol(params.tol)?;
    let gap = Mutex::new(0.0);
    let cont = quad_averager(f, &params.quad, &gap);
    let ltol = params.limit_tol();
    let uniform_scheme = Scheme::uniform(f.dim());
    let (uniform, target) = match l {
        Some(l) => (None, l.clone()),
        None => {
            let (u, _) = scheme_limit(
                &cont,
                &uniform_scheme,
                &params.discrete,
                Side::Continuous,
                ltol,
                params.tail,
            )?;
            if !u.converged {
                return Err(TransferError::Precondition(format!(
                    "uniform limit not established (residual {:.3e})",
                    u.residual
                )));
            }
            let v = u.value.clone();
            (Some(u), v)
        }
    };
    let scheme = Scheme::folner(sequence.clone());
    let (folner, _) = scheme_limit(&cont, &scheme, &params.continuous, Side::Continuous, ltol, params.tail)?;
    let deviation = folner.value.distance(&target)?;
    let pass = folner.converged && deviation <= params.tol;
    Ok(FolnerReport {
        uniform,
        target,
        folner,
        deviation,
        sandwich: None,
        pass,
        status: if pass { Status::Pass } else { Status::Fail },
    })
}

/// Real mode: `liminf_uniform ≤ liminf_Følner` and
/// `limsup_Følner ≤ limsup_uniform`, with tail min/max proxies.
pub fn folner_sandwich_check(
    f: &FnSampler,
    sequence: &FolnerSequence,
    params: &TransferParams,
    slack: Option<f64>,
) -> Result<(InequalityReport, InequalityReport)> {
    if f.width() != 1 {
        return Err(TransferError::InvalidInput("sandwich needs a real sampler".into()));
    }
    let gap = Mutex::new(0.0);
    let cont = quad_averager(f, &params.quad, &gap);
    let ub = scheme_bounds(
        &cont,
        &Scheme::uniform(f.dim()),
        &params.discrete,
        Side::Continuous,
        params.tail,
    )?;
    let fb = scheme_bounds(
        &cont,
        &Scheme::folner(sequence.clone()),
        &params.continuous,
        Side::Continuous,
        params.tail,
    )?;
    let slack = slack.unwrap_or((2.0 * ub.stability.max(fb.stability)).max(1e-9));
    Ok((
        InequalityReport::new(fb.lo, ub.lo, Direction::Ge, slack),
        InequalityReport::new(fb.hi, ub.hi, Direction::Le, slack),
    ))
}

/// Windowed tail bounds of a real sampler under a scheme, for callers that
/// want the proxies directly.
pub fn continuous_bounds(
    f: &FnSampler,
    scheme: &Scheme,
    sched: &ScaleSchedule,
    q: &QuadSpec,
    tail: usize,
) -> Result<Bounds> {
    let gap = Mutex::new(0.0);
    let cont = quad_averager(f, q, &gap);
    scheme_bounds(&cont, scheme, sched, Side::Continuous, tail)
}

/// Continuous limit of a sampler under a scheme, evaluated per orthant and
/// combined for two-sided schemes.
pub fn continuous_scheme_limit(
    f: &FnSampler,
    scheme: &Scheme,
    sched: &ScaleSchedule,
    q: &QuadSpec,
    tol: f64,
    tail: usize,
) -> Result<LimitEstimate> {
    let gap = Mutex::new(0.0);
    let cont = quad_averager(f, q, &gap);
    Ok(scheme_limit(&cont, scheme, sched, Side::Continuous, tol, tail)?.0)
}

/// Per-orthant continuous limits, for two-sided diagnostics.
pub fn continuous_orthant_limits(
    f: &FnSampler,
    scheme: &Scheme,
    sched: &ScaleSchedule,
    q: &QuadSpec,
    tol: f64,
    tail: usize,
) -> Result<BTreeMap<Vec<Sign>, LimitEstimate>> {
    let gap = Mutex::new(0.0);
    let cont = quad_averager(f, q, &gap);
    per_orthant_limits(&cont, scheme, sched, Side::Continuous, tol, tail)
}

/// Discrete limit of a sequence under a scheme.
pub fn discrete_scheme_limit(
    s: &SeqSampler,
    scheme: &Scheme,
    sched: &ScaleSchedule,
    tol: f64,
    tail: usize,
) -> Result<LimitEstimate> {
    let avg = |ws: &[Region]| discrete_averages(s, ws);
    Ok(scheme_limit(&avg, scheme, sched, Side::Discrete, tol, tail)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FolnerKind;
    use crate::geometry::SchemeKind;
    use num_complex::Complex64;
    use std::f64::consts::{PI, SQRT_2};

    fn re(v: &VectorValue) -> f64 {
        v.components()[0].re
    }

    fn params(disc_end: f64, cont_end: f64, h: f64, tol: f64) -> TransferParams {
        TransferParams::new(
            ScaleSchedule::geometric(disc_end / 100.0, 10.0, 3),
            ScaleSchedule::geometric(cont_end / 100.0, 10.0, 3),
            QuadSpec::new(h),
            tol,
        )
    }

    #[test]
    fn constant_additive_is_exact() {
        let f = FnSampler::real(1, 1.0, |_| 1.0);
        for scheme in [Scheme::standard(1), Scheme::uniform(1)] {
            let r = additive_transfer_check(&f, &scheme, &TGrid::unit(1, 4), &params(1e3, 1e2, 0.1, 1e-9))
                .unwrap();
            assert!(r.pass, "{r:?}");
            assert!(r.deviation < 1e-12);
        }
    }

    #[test]
    fn sawtooth_shift_limits_are_fractional_part() {
        let f = FnSampler::real(1, 1.0, |x| x[0].rem_euclid(1.0));
        let grid = TGrid::unit(1, 8);
        let r = additive_transfer_check(&f, &Scheme::standard(1), &grid, &params(1e3, 1e3, 1e-3, 1e-3))
            .unwrap();
        for e in &r.per_t {
            assert!((re(&e.estimate.value) - e.t[0]).abs() < 1e-9);
        }
        assert!((re(&r.discrete_side) - 0.5).abs() < 1e-12);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn constant_multiplicative_has_zero_spread() {
        let f = FnSampler::real(1, 2.0, |_| 2.0);
        let ts = vec![vec![0.3], vec![0.7], vec![SQRT_2 - 1.0]];
        let r = multiplicative_transfer_check(&f, &Scheme::standard(1), &[1.0], &ts, &params(1e3, 1e2, 0.1, 1e-6))
            .unwrap();
        assert_eq!(r.constancy_spread, Some(0.0));
        assert!(r.pass);
    }

    #[test]
    fn cosine_multiplicative_matches_geometric_series() {
        let f = FnSampler::real(1, 1.0, |x| (2.0 * PI * x[0]).cos());
        let ts = vec![vec![SQRT_2 - 1.0], vec![(3.0f64).sqrt() - 1.0], vec![PI - 3.0]];
        let r = multiplicative_transfer_check(&f, &Scheme::standard(1), &[1.0], &ts, &params(1e4, 1e3, 1e-3, 0.01))
            .unwrap();
        for e in &r.per_t {
            let t = e.t[0];
            let n = 1e4;
            let bound = 1.0 / (n * (PI * t).sin().abs());
            assert!(re(&e.estimate.value).abs() <= bound + 1e-12);
        }
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn samples_outside_range_are_rejected() {
        let f = FnSampler::real(1, 1.0, |_| 1.0);
        let err = multiplicative_transfer_check(&f, &Scheme::standard(1), &[0.5], &[vec![0.7]], &params(1e3, 1e2, 0.1, 0.1));
        assert!(matches!(err, Err(TransferError::InvalidInput(_))));
    }

    #[test]
    fn single_converged_sample_is_inconclusive() {
        let f = FnSampler::real(1, 1.0, |_| 1.0);
        let r = multiplicative_transfer_check(&f, &Scheme::standard(1), &[1.0], &[vec![0.3]], &params(1e3, 1e2, 0.1, 0.1))
            .unwrap();
        assert_eq!(r.status, Status::Inconclusive);
        assert!(!r.pass);
    }

    fn fake(value: f64) -> LimitEstimate {
        LimitEstimate {
            value: VectorValue::scalar(value),
            residual: 0.0,
            converged: true,
            tol: 0.01,
            scales_used: vec![1.0],
            series: Vec::new(),
        }
    }

    #[test]
    fn orthant_combine_examples() {
        let mut per = BTreeMap::new();
        per.insert(vec![Sign::Plus], fake(0.3));
        per.insert(vec![Sign::Minus], fake(0.7));
        let e = orthant_combine(&per, 0.01, CombineMode::Limsup).unwrap();
        assert_eq!(re(&e.value), 0.7);
        let e = orthant_combine(&per, 0.01, CombineMode::Liminf).unwrap();
        assert_eq!(re(&e.value), 0.3);
        match orthant_combine(&per, 0.01, CombineMode::Mean) {
            Err(TransferError::OrthantDisagreement { spread, .. }) => {
                assert!((spread - 0.4).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
        per.insert(vec![Sign::Minus], fake(0.3));
        assert_eq!(re(&orthant_combine(&per, 0.01, CombineMode::Mean).unwrap().value), 0.3);
        per.remove(&vec![Sign::Plus]);
        assert!(matches!(
            orthant_combine(&per, 0.01, CombineMode::Mean),
            Err(TransferError::OrthantMissing { .. })
        ));
    }

    #[test]
    fn two_sided_constant_limit() {
        let f = FnSampler::real(2, 1.0, |_| 0.25);
        let scheme = Scheme::new(SchemeKind::TwoSidedStandard, 2).unwrap();
        let r = additive_transfer_check(&f, &scheme, &TGrid::unit(2, 2), &params(100.0, 20.0, 0.5, 1e-9))
            .unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn fatou_strict_for_characters() {
        let m = 200;
        let weights = vec![1.0 / m as f64; m];
        let terms: Vec<Vec<VectorValue>> = (1..100)
            .map(|n| {
                (0..m)
                    .map(|i| {
                        let x = (i as f64 + 0.5) / m as f64;
                        VectorValue::complex(Complex64::from_polar(1.0, 2.0 * PI * n as f64 * x))
                    })
                    .collect()
            })
            .collect();
        let r = fatou_dct_verify(
            &GridSequence {
                weights,
                terms,
                bound: 1.0,
                pointwise_limit: None,
            },
            1e-9,
        )
        .unwrap();
        assert!(r.pass && r.lhs < 1e-12 && (r.rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fatou_rejects_unbounded_terms() {
        let seq = GridSequence {
            weights: vec![1.0],
            terms: vec![vec![VectorValue::scalar(2.0)]],
            bound: 1.0,
            pointwise_limit: None,
        };
        assert!(matches!(fatou_dct_verify(&seq, 0.1), Err(TransferError::Unbounded { .. })));
    }

    #[test]
    fn tauberian_alternating_harmonic() {
        let v = SeqSampler::real(1, 3.0, |n| {
            1.0 + if n[0] % 2 == 0 { 1.0 } else { -1.0 } / n[0] as f64
        });
        let sched = ScaleSchedule::geometric(1e3, 10.0, 4);
        let r = tauberian_verify(&v, 2.01, &sched, 1e-2, 3, 1).unwrap();
        assert!(r.hypothesis_ok);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn tauberian_flags_violated_hypothesis() {
        let v = SeqSampler::real(1, 1.0, |n| if n[0] % 2 == 0 { 1.0 } else { -1.0 });
        let sched = ScaleSchedule::geometric(1e2, 10.0, 3);
        let r = tauberian_verify(&v, 1.0, &sched, 1e-2, 3, 1).unwrap();
        assert_eq!(r.status, Status::InvalidInput);
    }

    #[test]
    fn folner_shifted_windows_cosine() {
        let f = FnSampler::real(1, 1.0, |x| (2.0 * PI * x[0]).cos());
        let seq = FolnerSequence::new(
            1,
            FolnerKind::ShiftedBoxes {
                side: 1.0,
                len_power: 0.5,
                drift: 1.0,
                drift_power: 1.0,
            },
        )
        .unwrap();
        let p = params(1e4, 1e6, 1e-3, 0.01);
        let r = folner_reduction_check(&f, &seq, None, &p).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn folner_needs_uniform_limit() {
        let f = FnSampler::real(1, 1.0, |x| (x[0].max(1.0).ln()).sin());
        let seq = FolnerSequence::growing_boxes(1, 1.0).unwrap();
        let p = params(1e4, 1e4, 1e-2, 1e-3);
        assert!(matches!(
            folner_reduction_check(&f, &seq, None, &p),
            Err(TransferError::Precondition(_))
        ));
    }

    #[test]
    fn inequality_report_directions() {
        let r = InequalityReport::new(0.4, 0.5, Direction::Ge, 0.05);
        assert!(!r.pass);
        let r = InequalityReport::new(0.48, 0.5, Direction::Ge, 0.05);
        assert!(r.pass);
        let r = InequalityReport::new(0.6, 0.5, Direction::Le, 0.0);
        assert!(!r.pass && (r.margin + 0.1).abs() < 1e-12);
    }
}
