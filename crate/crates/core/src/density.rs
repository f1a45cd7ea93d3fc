//! Densities of subsets of `Z^d` and `R^d`, section densities and
//! convergence in density.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::averaging::{
    continuous_averages, discrete_averages, estimate_from_levels, window_levels, Bounds, Level,
    LimitEstimate, QuadSpec, ScaleSchedule,
};
use crate::geometry::{AxisBox, Region, Scheme};
use crate::sampling::TGrid;
use crate::transfer::{
    additive_core, bounds_core, multiplicative_core, BoundsReport, Method, Result, Status, TPoints,
    TransferError, TransferParams, TransferReport,
};
use crate::values::{FnSampler, SeqSampler, VectorValue};

pub type Membership = dyn Fn(&[f64]) -> bool + Send + Sync;
pub type MeasureFn = dyn Fn(&AxisBox) -> f64 + Send + Sync;

/// Closed forms for the Lebesgue measure of `S ∩ box`.
#[derive(Clone)]
pub enum ExactForm {
    /// `S` is a finite union of boxes.
    Boxes(Region),
    /// `S = Π_i (c_i + [0, len_i) + period_i·Z)`.
    Periodic {
        period: Vec<f64>,
        offset: Vec<f64>,
        len: Vec<f64>,
    },
    /// Any closed form for `w(S ∩ box)`.
    Measure(Arc<MeasureFn>),
}

impl fmt::Debug for ExactForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactForm::Boxes(r) => write!(f, "Boxes({} boxes)", r.boxes().len()),
            ExactForm::Periodic { period, offset, len } => {
                write!(f, "Periodic {{ period: {period:?}, offset: {offset:?}, len: {len:?} }}")
            }
            ExactForm::Measure(_) => write!(f, "Measure(..)"),
        }
    }
}

/// Measure of `(c + [0,len) + pZ) ∩ (−∞, x]`, relative to `x = c`.
fn periodic_cdf(x: f64, p: f64, c: f64, len: f64) -> f64 {
    let y = x - c;
    let k = (y / p).floor();
    k * len + (y - k * p).clamp(0.0, len)
}

impl ExactForm {
    pub fn measure_in(&self, b: &AxisBox) -> f64 {
        if b.is_empty() {
            return 0.0;
        }
        match self {
            ExactForm::Boxes(r) => r
                .disjoint_boxes()
                .iter()
                .map(|piece| {
                    piece
                        .lo()
                        .iter()
                        .zip(piece.hi())
                        .zip(b.lo().iter().zip(b.hi()))
                        .map(|((a, c), (lo, hi))| (c.min(*hi) - a.max(*lo)).max(0.0))
                        .product::<f64>()
                })
                .sum(),
            ExactForm::Periodic { period, offset, len } => (0..b.dim())
                .map(|i| {
                    periodic_cdf(b.hi()[i], period[i], offset[i], len[i])
                        - periodic_cdf(b.lo()[i], period[i], offset[i], len[i])
                })
                .product(),
            ExactForm::Measure(m) => m(b),
        }
    }
}

/// A subset of `R^d` given by a membership predicate.
#[derive(Clone)]
pub struct DensitySet {
    dim: usize,
    membership: Arc<Membership>,
    exact: Option<ExactForm>,
}

impl fmt::Debug for DensitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensitySet")
            .field("dim", &self.dim)
            .field("exact", &self.exact)
            .finish()
    }
}

impl DensitySet {
    pub fn new(dim: usize, membership: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        Self {
            dim,
            membership: Arc::new(membership),
            exact: None,
        }
    }

    pub fn with_exact(mut self, exact: ExactForm) -> Self {
        self.exact = Some(exact);
        self
    }

    /// `Π_i (offset_i + [0, len_i) + period_i·Z)` with its closed form.
    pub fn periodic(period: Vec<f64>, offset: Vec<f64>, len: Vec<f64>) -> Self {
        let (p, o, l) = (period.clone(), offset.clone(), len.clone());
        Self::new(period.len(), move |x| {
            x.iter()
                .enumerate()
                .all(|(i, xi)| (xi - o[i]).rem_euclid(p[i]) < l[i])
        })
        .with_exact(ExactForm::Periodic {
            period,
            offset,
            len,
        })
    }

    /// A finite union of half-open boxes.
    pub fn boxes(region: Region) -> Self {
        let r = region.clone();
        Self::new(region.dim(), move |x| r.contains(x)).with_exact(ExactForm::Boxes(region))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exact(&self) -> Option<&ExactForm> {
        self.exact.as_ref()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        (self.membership)(x)
    }

    /// `{x : x ∉ S}`. The closed form is kept when it can be complemented.
    pub fn complement(&self) -> Self {
        let m = self.membership.clone();
        let out = Self::new(self.dim, move |x| !m(x));
        match &self.exact {
            Some(e) => {
                let e = e.clone();
                out.with_exact(ExactForm::Measure(Arc::new(move |b| b.volume() - e.measure_in(b))))
            }
            None => out,
        }
    }

    /// Indicator as a real sampler.
    pub fn indicator(&self) -> FnSampler {
        let m = self.membership.clone();
        FnSampler::real(self.dim, 1.0, move |x| if m(x) { 1.0 } else { 0.0 })
    }

    /// Spot-checks membership against the closed form on small cubes around
    /// the given points. Returns the largest discrepancy in measure fraction.
    pub fn check_exact(&self, centers: &[Vec<f64>], side: f64, q: &QuadSpec) -> Result<f64> {
        let Some(exact) = &self.exact else {
            return Ok(0.0);
        };
        let ind = self.indicator();
        let mut worst: f64 = 0.0;
        for c in centers {
            let b = AxisBox::half_open(
                c.iter().map(|x| x - side / 2.0).collect(),
                c.iter().map(|x| x + side / 2.0).collect(),
            )?;
            let quad = crate::averaging::continuous_average(&ind, &b, q)?.value;
            let e = exact.measure_in(&b) / b.volume();
            worst = worst.max((quad.components()[0].re - e).abs());
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Standard,
    Upper,
    Lower,
    Uniform,
    UpperUniform,
    LowerUniform,
}

impl DensityKind {
    pub fn is_uniform(self) -> bool {
        matches!(
            self,
            DensityKind::Uniform | DensityKind::UpperUniform | DensityKind::LowerUniform
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Ambient {
    Lattice,
    Continuum,
}

/// How a continuum measure was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurePath {
    Exact,
    Quadrature,
    Counting,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub kind: DensityKind,
    pub ambient: Ambient,
    pub path: MeasurePath,
    /// Limit estimate over the window levels (meaningful for the plain and
    /// uniform kinds).
    pub limit: LimitEstimate,
    /// Tail min and max over every window of the latter half of the levels.
    pub bounds: Bounds,
    /// The requested quantity: the limit, or the upper/lower bound.
    pub value: f64,
    /// Converged limit for plain kinds; always true for bound kinds.
    pub converged: bool,
}

/// Window averager for the continuum measure of `S`.
fn continuum_averager<'a>(
    s: &'a DensitySet,
    q: &'a QuadSpec,
) -> (
    Box<dyn Fn(&[Region]) -> crate::averaging::Result<Vec<VectorValue>> + Sync + 'a>,
    MeasurePath,
) {
    match &s.exact {
        Some(exact) => (
            Box::new(move |ws: &[Region]| {
                Ok(ws
                    .iter()
                    .map(|r| {
                        let w = r.measure();
                        let m: f64 = r.disjoint_boxes().iter().map(|b| exact.measure_in(b)).sum();
                        VectorValue::scalar(if w > 0.0 { m / w } else { 0.0 })
                    })
                    .collect())
            }),
            MeasurePath::Exact,
        ),
        None => {
            let ind = s.indicator();
            (
                Box::new(move |ws: &[Region]| {
                    Ok(continuous_averages(&ind, ws, q)?
                        .into_iter()
                        .map(|e| e.value)
                        .collect())
                }),
                MeasurePath::Quadrature,
            )
        }
    }
}

fn lattice_indicator(s: &DensitySet, map: impl Fn(usize, i64) -> f64 + Send + Sync + 'static) -> SeqSampler {
    let m = s.membership.clone();
    let d = s.dim;
    SeqSampler::real(d, 1.0, move |n| {
        let x: Vec<f64> = (0..d).map(|i| map(i, n[i])).collect();
        if m(&x) {
            1.0
        } else {
            0.0
        }
    })
}

fn bounds_over(e: &LimitEstimate) -> Bounds {
    let n = e.scales_used.len();
    let mm = |from: usize| {
        e.series
            .iter()
            .filter(|p| p.level >= from)
            .map(|p| p.estimate.components()[0].re)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
    };
    let (lo, hi) = mm(n / 2);
    let (qlo, qhi) = mm(n - (n / 4).max(1));
    Bounds {
        lo,
        hi,
        stability: (qlo - lo).abs().max((hi - qhi).abs()),
    }
}

/// Estimates a density of `S` along the schedule. Uniform kinds use the
/// uniform window family; `q` is used only when no closed form exists.
pub fn density_estimate(
    s: &DensitySet,
    kind: DensityKind,
    ambient: Ambient,
    sched: &ScaleSchedule,
    q: &QuadSpec,
    tol: f64,
    tail: usize,
) -> Result<DensityEstimate> {
    let scheme = if kind.is_uniform() {
        Scheme::uniform(s.dim)
    } else {
        Scheme::standard(s.dim)
    };
    let levels = window_levels(&scheme, sched, None)?;
    let flat: Vec<Region> = levels.iter().flat_map(|l| l.windows.iter().cloned()).collect();
    let (values, path) = match ambient {
        Ambient::Lattice => {
            let seq = lattice_indicator(s, |_, n| n as f64);
            (discrete_averages(&seq, &flat)?, MeasurePath::Counting)
        }
        Ambient::Continuum => {
            let (avg, path) = continuum_averager(s, q);
            (avg(&flat)?, path)
        }
    };
    let limit = estimate_from_levels(assemble(&levels, values), tol, tail)?;
    let bounds = bounds_over(&limit);
    let (value, converged) = match kind {
        DensityKind::Standard | DensityKind::Uniform => {
            (limit.value.components()[0].re, limit.converged)
        }
        DensityKind::Upper | DensityKind::UpperUniform => (bounds.hi, true),
        DensityKind::Lower | DensityKind::LowerUniform => (bounds.lo, true),
    };
    Ok(DensityEstimate {
        kind,
        ambient,
        path,
        limit,
        bounds,
        value,
        converged,
    })
}

fn assemble(
    levels: &[Level],
    values: Vec<VectorValue>,
) -> Vec<(f64, Vec<(AxisBox, VectorValue)>)> {
    let mut it = values.into_iter();
    levels
        .iter()
        .map(|l| {
            (
                l.scale,
                l.windows
                    .iter()
                    .map(|r| (r.bounding_box(), it.next().expect("value per window")))
                    .collect(),
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum SectionMode {
    /// `S_t = {n : t + n ∈ S}`.
    Translate,
    /// `S_t = {n : n t ∈ S}`.
    Dilate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionReport {
    pub report: TransferReport,
    pub path: MeasurePath,
}

fn section_lift(
    s: &DensitySet,
    mode: SectionMode,
) -> impl Fn(&[f64]) -> Result<SeqSampler> + Sync + '_ {
    move |t: &[f64]| {
        let t: Vec<f64> = t.to_vec();
        Ok(match mode {
            SectionMode::Translate => lattice_indicator(s, move |i, n| t[i] + n as f64),
            SectionMode::Dilate => lattice_indicator(s, move |i, n| n as f64 * t[i]),
        })
    }
}

/// Translate mode integrates `D(S_t)` over the t-grid and compares with
/// `D(S)`; dilate mode checks that `D(S_t)` is constant over the samples and
/// equal to `D(S)`. `uniform` selects uniform (Banach) densities.
pub fn section_density_check(
    s: &DensitySet,
    mode: SectionMode,
    uniform: bool,
    ts: &TPoints,
    params: &TransferParams,
) -> Result<SectionReport> {
    let scheme = if uniform {
        Scheme::uniform(s.dim)
    } else {
        Scheme::standard(s.dim)
    };
    let (cont, path) = continuum_averager(s, &params.quad);
    let lift = section_lift(s, mode);
    let report = match (mode, ts) {
        (SectionMode::Translate, TPoints::Grid(g)) => additive_core(&lift, None, &*cont, &scheme, g, params)?,
        (SectionMode::Dilate, TPoints::Samples { c, points }) => {
            for t in points {
                if t.len() != c.len() || t.iter().zip(c).any(|(x, ci)| !(*x > 0.0 && x <= ci)) {
                    return Err(TransferError::InvalidInput(format!(
                        "sample {t:?} is outside (0, c]"
                    )));
                }
            }
            multiplicative_core(&lift, None, &*cont, &scheme, points, params)?
        }
        _ => {
            return Err(TransferError::InvalidInput(
                "translate mode takes a t-grid, dilate mode takes samples".into(),
            ))
        }
    };
    Ok(SectionReport { report, path })
}

/// Lower/upper density inequalities between `S` and its sections.
pub fn section_density_bounds(
    s: &DensitySet,
    mode: SectionMode,
    uniform: bool,
    ts: &TPoints,
    params: &TransferParams,
    slack: Option<f64>,
) -> Result<BoundsReport> {
    let scheme = if uniform {
        Scheme::uniform(s.dim)
    } else {
        Scheme::standard(s.dim)
    };
    let (cont, _) = continuum_averager(s, &params.quad);
    let lift = section_lift(s, mode);
    let method = match mode {
        SectionMode::Translate => Method::Additive,
        SectionMode::Dilate => Method::Multiplicative,
    };
    bounds_core(&lift, &*cont, method, &scheme, ts, params, slack)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsEntry {
    pub eps: f64,
    /// Largest upper density of `{n : ‖v_n − L‖ > ε}` over the sampled sections.
    pub section_upper: f64,
    /// Upper density estimate of `S_ε = {x : ‖f(x) − L‖ > ε}`.
    pub density_upper: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityConvergenceReport {
    pub entries: Vec<EpsEntry>,
    pub hypothesis_ok: bool,
    pub pass: bool,
    pub status: Status,
    pub notes: Vec<String>,
}

pub const DEFAULT_EPS: [f64; 3] = [0.2, 0.1, 0.05];

/// Checks that `f → L` in (uniform) density: first that the sampled discrete
/// sections do, then that every `S_ε` has upper density at most `tol`.
pub fn density_convergence_check(
    f: &FnSampler,
    l: &VectorValue,
    mode: SectionMode,
    eps_list: &[f64],
    ts: &[Vec<f64>],
    uniform: bool,
    params: &TransferParams,
) -> Result<DensityConvergenceReport> {
    if l.width() != f.width() {
        return Err(TransferError::InvalidInput("L has the wrong width".into()));
    }
    let eps_list: Vec<f64> = if eps_list.is_empty() {
        DEFAULT_EPS.to_vec()
    } else {
        eps_list.to_vec()
    };
    let kind = if uniform {
        DensityKind::UpperUniform
    } else {
        DensityKind::Upper
    };
    let dim = f.dim();
    let mut entries = Vec::new();
    let mut hypothesis_ok = true;
    let mut notes = Vec::new();
    for &eps in &eps_list {
        let (f1, l1) = (f.clone(), l.clone());
        let far = move |x: &[f64]| {
            let mut buf = vec![Complex64::new(0.0, 0.0); f1.width()];
            f1.eval_into(x, &mut buf);
            let v = VectorValue::new(buf, f1.norm_kind().clone()).expect("width checked");
            v.distance(&l1).map(|d| d > eps).unwrap_or(true)
        };
        let set = DensitySet::new(dim, far);
        let mut section_upper: f64 = 0.0;
        for t in ts {
            let t = t.clone();
            let section = match mode {
                SectionMode::Translate => {
                    let t2 = t.clone();
                    lattice_indicator(&set, move |i, n| t2[i] + n as f64)
                }
                SectionMode::Dilate => {
                    let t2 = t.clone();
                    lattice_indicator(&set, move |i, n| n as f64 * t2[i])
                }
            };
            let scheme = if uniform {
                Scheme::uniform(dim)
            } else {
                Scheme::standard(dim)
            };
            let levels = window_levels(&scheme, &params.discrete, None)?;
            let flat: Vec<Region> = levels.iter().flat_map(|l| l.windows.iter().cloned()).collect();
            let vals = discrete_averages(&section, &flat)?;
            let est = estimate_from_levels(assemble(&levels, vals), f64::INFINITY, params.tail)?;
            section_upper = section_upper.max(bounds_over(&est).hi);
        }
        if section_upper > params.tol {
            hypothesis_ok = false;
            notes.push(format!(
                "sections at ε = {eps} have upper density {section_upper:.4} above {}",
                params.tol
            ));
        }
        let d = density_estimate(
            &set,
            kind,
            Ambient::Continuum,
            &params.continuous,
            &params.quad,
            f64::INFINITY,
            params.tail,
        )?;
        entries.push(EpsEntry {
            eps,
            section_upper,
            density_upper: d.value,
            pass: d.value <= params.tol,
        });
    }
    let status = if !hypothesis_ok {
        Status::Inconclusive
    } else if entries.iter().all(|e| e.pass) {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(DensityConvergenceReport {
        entries,
        hypothesis_ok,
        pass: status == Status::Pass,
        status,
        notes,
    })
}

/// `w(S ∩ (0, b])` for `S = ∪_k [2^k, 2^k + 2^{k−1})`, `b > 0`.
pub fn log_block_measure(b: f64) -> f64 {
    let mut total = 0.0;
    let mut start = 1.0f64;
    while start < b {
        total += (b - start).clamp(0.0, start / 2.0);
        start *= 2.0;
    }
    total
}

/// `∪_k [2^k, 2^k + 2^{k−1})` on the positive half-line, with closed form.
pub fn log_blocks() -> DensitySet {
    DensitySet::new(1, |x| {
        if x[0] < 1.0 {
            return false;
        }
        let k = x[0].log2().floor();
        let start = 2f64.powf(k);
        x[0] >= start && x[0] < 1.5 * start
    })
    .with_exact(ExactForm::Measure(Arc::new(|b| {
        log_block_measure(b.hi()[0].max(0.0)) - log_block_measure(b.lo()[0].max(0.0))
    })))
}

/// Uniform grid over `[0,1]^d` as parameter points.
pub fn translate_points(dim: usize, per_axis: usize) -> TPoints {
    TPoints::Grid(TGrid::unit(dim, per_axis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn sched() -> ScaleSchedule {
        ScaleSchedule::geometric(1e2, 10.0, 3)
    }

    #[test]
    fn even_blocks_have_density_half() {
        let s = DensitySet::periodic(vec![2.0], vec![0.0], vec![1.0]);
        let d = density_estimate(&s, DensityKind::Standard, Ambient::Continuum, &sched(), &QuadSpec::new(0.01), 1e-3, 3)
            .unwrap();
        assert_eq!(d.path, MeasurePath::Exact);
        assert!((d.value - 0.5).abs() < 1e-12 && d.converged);
    }

    #[test]
    fn even_integers_have_density_half() {
        let s = DensitySet::new(1, |x| (x[0] as i64) % 2 == 0);
        let d = density_estimate(&s, DensityKind::Standard, Ambient::Lattice, &sched(), &QuadSpec::new(0.01), 1e-3, 3)
            .unwrap();
        assert_eq!(d.value, 0.5);
    }

    #[test]
    fn log_blocks_closed_form() {
        assert_eq!(log_block_measure(1.0), 0.0);
        assert_eq!(log_block_measure(1.5), 0.5);
        assert_eq!(log_block_measure(2.0), 0.5);
        assert_eq!(log_block_measure(4.0), 1.5);
        // exact measure agrees with membership quadrature
        let s = log_blocks();
        let centers: Vec<Vec<f64>> = (1..20).map(|k| vec![k as f64 * 3.7]).collect();
        assert!(s.check_exact(&centers, 2.0, &QuadSpec::new(1e-4)).unwrap() < 1e-3);
    }

    #[test]
    fn log_blocks_upper_and_lower() {
        let s = log_blocks();
        let sched = ScaleSchedule::geometric(64.0, 2f64.powf(1.0 / 32.0), 320);
        let q = QuadSpec::new(0.01);
        let up = density_estimate(&s, DensityKind::Upper, Ambient::Continuum, &sched, &q, 1.0, 3).unwrap();
        let lo = density_estimate(&s, DensityKind::Lower, Ambient::Continuum, &sched, &q, 1.0, 3).unwrap();
        assert!((up.value - 2.0 / 3.0).abs() < 0.02, "{}", up.value);
        assert!((lo.value - 0.5).abs() < 0.02, "{}", lo.value);
    }

    #[test]
    fn complement_sums_to_one() {
        let s = DensitySet::periodic(vec![1.0], vec![0.0], vec![0.3]);
        let c = s.complement();
        let q = QuadSpec::new(0.01);
        let a = density_estimate(&s, DensityKind::Standard, Ambient::Continuum, &sched(), &q, 1e-3, 3).unwrap();
        let b = density_estimate(&c, DensityKind::Standard, Ambient::Continuum, &sched(), &q, 1e-3, 3).unwrap();
        assert!((a.value + b.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn translate_sections_of_half_blocks() {
        let s = DensitySet::periodic(vec![1.0], vec![0.0], vec![0.5]);
        let p = TransferParams::new(sched(), sched(), QuadSpec::new(0.01), 0.005);
        let r = section_density_check(&s, SectionMode::Translate, false, &translate_points(1, 16), &p).unwrap();
        for e in &r.report.per_t {
            let expect = if e.t[0] < 0.5 { 1.0 } else { 0.0 };
            assert_eq!(e.estimate.value.components()[0].re, expect);
        }
        assert!(r.report.pass);
    }

    #[test]
    fn negative_control_is_inconclusive() {
        let delta = 0.2;
        let f = FnSampler::real(1, 1.0, move |x| {
            if (x[0] * SQRT_2).rem_euclid(1.0) < delta {
                1.0
            } else {
                0.0
            }
        });
        let p = TransferParams::new(sched(), sched(), QuadSpec::new(0.01), 0.05);
        let ts = vec![vec![0.25], vec![0.75]];
        let r = density_convergence_check(&f, &VectorValue::scalar(0.0), SectionMode::Translate, &[0.5], &ts, false, &p)
            .unwrap();
        assert!(!r.pass);
        assert_eq!(r.status, Status::Inconclusive);
        assert!((r.entries[0].density_upper - delta).abs() < 0.02);
    }

    #[test]
    fn decaying_function_converges_in_density() {
        let f = FnSampler::real(1, 1.0, |x| 1.0 / (1.0 + x[0].abs()));
        let p = TransferParams::new(
            ScaleSchedule::geometric(1e3, 10.0, 3),
            ScaleSchedule::geometric(1e3, 10.0, 3),
            QuadSpec::new(0.01),
            0.05,
        );
        let ts = vec![vec![0.3], vec![0.6]];
        let r = density_convergence_check(&f, &VectorValue::scalar(0.0), SectionMode::Dilate, &[], &ts, false, &p)
            .unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.entries.len(), 3);
    }
}
