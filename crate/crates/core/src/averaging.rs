//! Lattice sums, midpoint quadrature and limit estimation along scale
//! schedules.
//!
//! Every sum goes through [`chunked_sum`], which splits the index range into
//! chunks whose shape depends only on the range length and the value width.
//! Chunks are summed in parallel and combined by a fixed pairwise tree, so the
//! result does not depend on how many worker threads rayon uses.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{AxisBox, Closure, GeometryError, Region, Scheme, SchemeKind, Sign};
use crate::values::{FnSampler, SeqSampler, ValueError, VectorValue};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AveragingError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error("scale schedule is empty")]
    EmptySchedule,
    #[error("tail length {tail} needs at least 2 levels and at most {levels}")]
    InvalidTail { tail: usize, levels: usize },
    #[error("scale schedule is not strictly increasing at level {0}")]
    NotIncreasing(usize),
    #[error("quadrature step must be positive and finite")]
    InvalidStep,
    #[error("non-finite value while averaging over {0:?}")]
    NonFinite(AxisBox),
    #[error("invalid schedule parameter: {0}")]
    InvalidSchedule(String),
}

pub type Result<T, E = AveragingError> = std::result::Result<T, E>;

const MIN_CHUNK: u64 = 4096;
const MAX_CHUNK_CELLS: u64 = 1 << 16;

fn zero(width: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); width]
}

/// Sums `body` over `[0, total)`.
///
/// `body(start, end, acc)` must add the contributions of indices
/// `start..end` into `acc`.
pub fn chunked_sum<F>(total: u64, width: usize, body: F) -> Vec<Complex64>
where
    F: Fn(u64, u64, &mut [Complex64]) + Sync,
{
    if total == 0 {
        return zero(width);
    }
    let max_chunks = (MAX_CHUNK_CELLS / width.max(1) as u64).max(16);
    let chunk = MIN_CHUNK.max(total.div_ceil(max_chunks));
    let n_chunks = total.div_ceil(chunk);
    let parts: Vec<Vec<Complex64>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = zero(width);
            body(c * chunk, ((c + 1) * chunk).min(total), &mut acc);
            acc
        })
        .collect();
    pairwise(parts)
}

fn pairwise(mut parts: Vec<Vec<Complex64>>) -> Vec<Complex64> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop().unwrap_or_default()
}

fn finite(c: &[Complex64]) -> bool {
    c.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `Σ_{n ∈ Z^d ∩ b} s(n)` (raw sum, not normalized).
pub fn discrete_sum(s: &SeqSampler, b: &AxisBox) -> Result<Vec<Complex64>> {
    check_dim(s.dim(), b.dim())?;
    if let Some(fs) = s.factors() {
        let mut acc = Complex64::new(1.0, 0.0);
        for (i, f) in fs.iter().enumerate() {
            let axis = AxisBox::new(vec![b.lo()[i]], vec![b.hi()[i]], b.closure())?;
            acc *= discrete_sum(f, &axis)?[0];
        }
        return Ok(vec![acc]);
    }
    let range = b.lattice_points()?;
    let width = s.width();
    let d = s.dim();
    let sum = if d == 1 {
        let first = range.first().first().copied().unwrap_or(0);
        chunked_sum(range.len(), width, |start, end, acc| {
            let mut buf = zero(width);
            for k in start..end {
                s.eval_into(&[first + k as i64], &mut buf);
                for (a, v) in acc.iter_mut().zip(&buf) {
                    *a += v;
                }
            }
        })
    } else {
        chunked_sum(range.len(), width, |start, end, acc| {
            let mut buf = zero(width);
            let mut p = vec![0i64; d];
            for k in start..end {
                range.point(k, &mut p);
                s.eval_into(&p, &mut buf);
                for (a, v) in acc.iter_mut().zip(&buf) {
                    *a += v;
                }
            }
        })
    };
    if !finite(&sum) {
        return Err(AveragingError::NonFinite(b.clone()));
    }
    Ok(sum)
}

/// `(1/w(b)) Σ_{n ∈ Z^d ∩ (lo, hi]} s(n)`; zero for an empty box.
pub fn discrete_average(s: &SeqSampler, b: &AxisBox) -> Result<VectorValue> {
    let w = b.volume();
    if w == 0.0 {
        return Ok(s.zero_value());
    }
    let sum = discrete_sum(s, b)?;
    Ok(VectorValue::new(
        sum.into_iter().map(|z| z / w).collect(),
        s.norm_kind().clone(),
    )?)
}

/// Lattice average over a finite union of boxes, normalized by its measure.
pub fn discrete_region_average(s: &SeqSampler, r: &Region) -> Result<VectorValue> {
    let w = r.measure();
    if w == 0.0 {
        return Ok(s.zero_value());
    }
    let mut acc = zero(s.width());
    for piece in r.disjoint_boxes() {
        let piece = piece.with_closure(Closure::HalfOpenLoExclusive);
        for (a, v) in acc.iter_mut().zip(discrete_sum(s, &piece)?) {
            *a += v;
        }
    }
    Ok(VectorValue::new(
        acc.into_iter().map(|z| z / w).collect(),
        s.norm_kind().clone(),
    )?)
}

/// Midpoint-rule settings. A single step is broadcast to every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub step: Vec<f64>,
    #[serde(default)]
    pub refine: bool,
}

impl QuadSpec {
    pub fn new(step: f64) -> Self {
        Self {
            step: vec![step],
            refine: false,
        }
    }

    pub fn refined(mut self) -> Self {
        self.refine = true;
        self
    }

    pub fn step_for(&self, axis: usize) -> f64 {
        *self.step.get(axis).or(self.step.last()).unwrap_or(&f64::NAN)
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.step.is_empty() || (self.step.len() != 1 && self.step.len() != dim) {
            return Err(AveragingError::InvalidStep);
        }
        if self.step.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(AveragingError::InvalidStep);
        }
        Ok(())
    }

    fn halved(&self) -> Self {
        Self {
            step: self.step.iter().map(|h| h / 2.0).collect(),
            refine: false,
        }
    }

    /// Warning text when `h·|f′|` exceeds 0.1 on some axis.
    pub fn resolution_warning(&self, f: &FnSampler) -> Option<String> {
        let d = f.derivative_bound()?;
        let worst = (0..f.dim()).map(|i| self.step_for(i) * d).fold(0.0, f64::max);
        (worst > 0.1).then(|| {
            format!("quadrature step times derivative bound is {worst:.3}, above 0.1")
        })
    }
}

/// Result of a midpoint quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadEstimate {
    pub value: VectorValue,
    /// Half-step estimate, present when refinement was requested.
    pub half_step: Option<VectorValue>,
    /// `‖value − half_step‖`.
    pub refine_gap: Option<f64>,
}

fn midpoint_integral(f: &FnSampler, b: &AxisBox, q: &QuadSpec) -> Result<Vec<Complex64>> {
    let d = f.dim();
    let width = f.width();
    if let Some(fs) = f.factors() {
        let mut acc = Complex64::new(1.0, 0.0);
        for (i, fi) in fs.iter().enumerate() {
            let axis = AxisBox::closed(vec![b.lo()[i]], vec![b.hi()[i]])?;
            let qi = QuadSpec::new(q.step_for(i));
            acc *= midpoint_integral(fi, &axis, &qi)?[0];
        }
        return Ok(vec![acc]);
    }
    let edges = b.edges();
    let mut counts = Vec::with_capacity(d);
    let mut steps = Vec::with_capacity(d);
    let mut total: u64 = 1;
    for (i, e) in edges.iter().enumerate() {
        let n = (e / q.step_for(i)).ceil().max(1.0);
        if n > 1e15 {
            return Err(GeometryError::TooLarge(n as u64).into());
        }
        let n = n as u64;
        total = total
            .checked_mul(n)
            .ok_or(GeometryError::TooLarge(u64::MAX))?;
        counts.push(n);
        steps.push(e / n as f64);
    }
    let cell: f64 = steps.iter().product();
    let lo = b.lo();
    let sum = if d == 1 {
        let (a, h) = (lo[0], steps[0]);
        chunked_sum(total, width, |start, end, acc| {
            let mut buf = zero(width);
            for k in start..end {
                f.eval_into(&[a + (k as f64 + 0.5) * h], &mut buf);
                for (s, v) in acc.iter_mut().zip(&buf) {
                    *s += v;
                }
            }
        })
    } else {
        chunked_sum(total, width, |start, end, acc| {
            let mut buf = zero(width);
            let mut x = vec![0.0; d];
            for k in start..end {
                let mut idx = k;
                for axis in (0..d).rev() {
                    let c = counts[axis];
                    x[axis] = lo[axis] + ((idx % c) as f64 + 0.5) * steps[axis];
                    idx /= c;
                }
                f.eval_into(&x, &mut buf);
                for (s, v) in acc.iter_mut().zip(&buf) {
                    *s += v;
                }
            }
        })
    };
    let out: Vec<Complex64> = sum.into_iter().map(|z| z * cell).collect();
    if !finite(&out) {
        return Err(AveragingError::NonFinite(b.clone()));
    }
    Ok(out)
}

fn average_from_integral(f: &FnSampler, integral: Vec<Complex64>, w: f64) -> VectorValue {
    VectorValue::from_parts_unchecked(
        integral.into_iter().map(|z| z / w).collect(),
        f.norm_kind().clone(),
    )
}

/// Midpoint approximation of `(1/w(b)) ∫_b f`; zero for an empty box.
pub fn continuous_average(f: &FnSampler, b: &AxisBox, q: &QuadSpec) -> Result<QuadEstimate> {
    check_dim(f.dim(), b.dim())?;
    q.validate(f.dim())?;
    let w = b.volume();
    if w == 0.0 {
        return Ok(QuadEstimate {
            value: f.zero_value(),
            half_step: q.refine.then(|| f.zero_value()),
            refine_gap: q.refine.then_some(0.0),
        });
    }
    let value = average_from_integral(f, midpoint_integral(f, b, q)?, w);
    if !q.refine {
        return Ok(QuadEstimate {
            value,
            half_step: None,
            refine_gap: None,
        });
    }
    let half = average_from_integral(f, midpoint_integral(f, b, &q.halved())?, w);
    let gap = value.distance(&half)?;
    Ok(QuadEstimate {
        value,
        half_step: Some(half),
        refine_gap: Some(gap),
    })
}

/// Continuous average over a finite union of boxes.
pub fn continuous_region_average(f: &FnSampler, r: &Region, q: &QuadSpec) -> Result<QuadEstimate> {
    if let [single] = r.boxes() {
        return continuous_average(f, single, q);
    }
    q.validate(f.dim())?;
    let w = r.measure();
    let mut acc = zero(f.width());
    let mut acc_half = q.refine.then(|| zero(f.width()));
    for piece in r.disjoint_boxes() {
        for (a, v) in acc.iter_mut().zip(midpoint_integral(f, &piece, q)?) {
            *a += v;
        }
        if let Some(h) = acc_half.as_mut() {
            for (a, v) in h.iter_mut().zip(midpoint_integral(f, &piece, &q.halved())?) {
                *a += v;
            }
        }
    }
    if w == 0.0 {
        return Ok(QuadEstimate {
            value: f.zero_value(),
            half_step: None,
            refine_gap: None,
        });
    }
    let value = average_from_integral(f, acc, w);
    let half_step = acc_half.map(|h| average_from_integral(f, h, w));
    let refine_gap = match &half_step {
        Some(h) => Some(value.distance(h)?),
        None => None,
    };
    Ok(QuadEstimate {
        value,
        half_step,
        refine_gap,
    })
}

/// One-dimensional windows that all share one endpoint and grow
/// monotonically can be summed segment by segment. Returns the segment
/// boxes, in order, when that applies.
fn nested_segments(windows: &[AxisBox]) -> Option<Vec<AxisBox>> {
    if windows.len() < 2 || windows.iter().any(|w| w.dim() != 1 || w.is_empty()) {
        return None;
    }
    let closure = windows[0].closure();
    if windows.iter().any(|w| w.closure() != closure) {
        return None;
    }
    let lo0 = windows[0].lo()[0];
    let hi0 = windows[0].hi()[0];
    let same_lo = windows.iter().all(|w| w.lo()[0] == lo0);
    let same_hi = windows.iter().all(|w| w.hi()[0] == hi0);
    if same_lo && windows.windows(2).all(|p| p[0].hi()[0] < p[1].hi()[0]) {
        let mut segs = vec![windows[0].clone()];
        for p in windows.windows(2) {
            segs.push(AxisBox::new(vec![p[0].hi()[0]], vec![p[1].hi()[0]], closure).ok()?);
        }
        return Some(segs);
    }
    if same_hi && windows.windows(2).all(|p| p[0].lo()[0] > p[1].lo()[0]) {
        let mut segs = vec![windows[0].clone()];
        for p in windows.windows(2) {
            segs.push(AxisBox::new(vec![p[1].lo()[0]], vec![p[0].lo()[0]], closure).ok()?);
        }
        return Some(segs);
    }
    None
}

fn cumulative(parts: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(parts.len());
    let mut acc: Option<Vec<Complex64>> = None;
    for p in parts {
        let next = match acc {
            None => p,
            Some(mut a) => {
                for (x, y) in a.iter_mut().zip(&p) {
                    *x += y;
                }
                a
            }
        };
        out.push(next.clone());
        acc = Some(next);
    }
    out
}

/// Lattice averages over many windows. Nested one-dimensional windows are
/// summed incrementally.
pub fn discrete_averages(s: &SeqSampler, windows: &[Region]) -> Result<Vec<VectorValue>> {
    let singles: Option<Vec<AxisBox>> = windows
        .iter()
        .map(|r| match r.boxes() {
            [b] => Some(b.clone()),
            _ => None,
        })
        .collect();
    if let Some(boxes) = singles.as_deref() {
        if let Some(segs) = nested_segments(boxes) {
            let parts = segs
                .iter()
                .map(|b| discrete_sum(s, &b.clone().with_closure(Closure::HalfOpenLoExclusive)))
                .collect::<Result<Vec<_>>>()?;
            return cumulative(parts)
                .into_iter()
                .zip(boxes)
                .map(|(sum, b)| {
                    let w = b.volume();
                    Ok(VectorValue::new(
                        sum.into_iter().map(|z| z / w).collect(),
                        s.norm_kind().clone(),
                    )?)
                })
                .collect();
        }
    }
    windows.iter().map(|r| discrete_region_average(s, r)).collect()
}

/// Continuous averages over many windows; nested one-dimensional windows are
/// integrated incrementally.
pub fn continuous_averages(
    f: &FnSampler,
    windows: &[Region],
    q: &QuadSpec,
) -> Result<Vec<QuadEstimate>> {
    q.validate(f.dim())?;
    let singles: Option<Vec<AxisBox>> = windows
        .iter()
        .map(|r| match r.boxes() {
            [b] => Some(b.clone()),
            _ => None,
        })
        .collect();
    if let Some(boxes) = singles.as_deref() {
        if let Some(segs) = nested_segments(boxes) {
            let run = |q: &QuadSpec| -> Result<Vec<VectorValue>> {
                let parts = segs
                    .iter()
                    .map(|b| midpoint_integral(f, b, q))
                    .collect::<Result<Vec<_>>>()?;
                Ok(cumulative(parts)
                    .into_iter()
                    .zip(boxes)
                    .map(|(i, b)| average_from_integral(f, i, b.volume()))
                    .collect())
            };
            let values = run(q)?;
            let halves = if q.refine { Some(run(&q.halved())?) } else { None };
            return values
                .into_iter()
                .enumerate()
                .map(|(k, value)| {
                    let half_step = halves.as_ref().map(|h| h[k].clone());
                    let refine_gap = match &half_step {
                        Some(h) => Some(value.distance(h)?),
                        None => None,
                    };
                    Ok(QuadEstimate {
                        value,
                        half_step,
                        refine_gap,
                    })
                })
                .collect();
        }
    }
    windows
        .iter()
        .map(|r| continuous_region_average(f, r, q))
        .collect()
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(GeometryError::DimensionMismatch { expected, got }.into());
    }
    Ok(())
}

/// Window positions used to approximate uniform (Banach) averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowFamily {
    /// Offsets range over `[0, H − L]` with `H = horizon_ratio · L`.
    #[serde(default = "default_horizon")]
    pub horizon_ratio: f64,
    #[serde(default = "default_random_offsets")]
    pub random_offsets: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_horizon() -> f64 {
    4.0
}

fn default_random_offsets() -> usize {
    2
}

impl Default for WindowFamily {
    fn default() -> Self {
        Self {
            horizon_ratio: default_horizon(),
            random_offsets: default_random_offsets(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScaleKind {
    /// Cubes (or `aspect`-shaped boxes) `(0, start·ratio^k]` for `k < count`.
    Geometric {
        start: f64,
        ratio: f64,
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        aspect: Option<Vec<f64>>,
    },
    Explicit { boxes: Vec<AxisBox> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleSchedule {
    #[serde(flatten)]
    pub kind: ScaleKind,
    #[serde(default)]
    pub family: WindowFamily,
}

impl ScaleSchedule {
    pub fn geometric(start: f64, ratio: f64, count: usize) -> Self {
        Self {
            kind: ScaleKind::Geometric {
                start,
                ratio,
                count,
                aspect: None,
            },
            family: WindowFamily::default(),
        }
    }

    /// Geometric schedule from `start` to `end` with `count` levels.
    pub fn geometric_range(start: f64, end: f64, count: usize) -> Self {
        let ratio = if count > 1 {
            (end / start).powf(1.0 / (count - 1) as f64)
        } else {
            2.0
        };
        Self::geometric(start, ratio, count)
    }

    pub fn explicit(boxes: Vec<AxisBox>) -> Self {
        Self {
            kind: ScaleKind::Explicit { boxes },
            family: WindowFamily::default(),
        }
    }

    pub fn with_family(mut self, family: WindowFamily) -> Self {
        self.family = family;
        self
    }

    pub fn with_aspect(mut self, a: Vec<f64>) -> Self {
        if let ScaleKind::Geometric { aspect, .. } = &mut self.kind {
            *aspect = Some(a);
        }
        self
    }

    /// Base boxes `b_k` in dimension `dim`.
    pub fn boxes(&self, dim: usize) -> Result<Vec<AxisBox>> {
        let boxes = match &self.kind {
            ScaleKind::Geometric {
                start,
                ratio,
                count,
                aspect,
            } => {
                if !(start.is_finite() && *start > 0.0 && ratio.is_finite() && *ratio > 1.0) {
                    return Err(AveragingError::InvalidSchedule(
                        "geometric schedule needs start > 0 and ratio > 1".into(),
                    ));
                }
                let shape = aspect.clone().unwrap_or_else(|| vec![1.0; dim]);
                if shape.len() != dim || shape.iter().any(|a| !(*a >= 1.0 && a.is_finite())) {
                    return Err(AveragingError::InvalidSchedule(
                        "aspect must have one entry >= 1 per axis".into(),
                    ));
                }
                (0..*count)
                    .map(|k| {
                        let s = start * ratio.powi(k as i32);
                        AxisBox::half_open(vec![0.0; dim], shape.iter().map(|a| a * s).collect())
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            ScaleKind::Explicit { boxes } => {
                if let Some(b) = boxes.iter().find(|b| b.dim() != dim) {
                    return Err(GeometryError::DimensionMismatch {
                        expected: dim,
                        got: b.dim(),
                    }
                    .into());
                }
                boxes.clone()
            }
        };
        if boxes.is_empty() {
            return Err(AveragingError::EmptySchedule);
        }
        for k in 1..boxes.len() {
            if boxes[k].min_edge() <= boxes[k - 1].min_edge() {
                return Err(AveragingError::NotIncreasing(k));
            }
        }
        Ok(boxes)
    }

    /// `l(b_k)` for every level, using the schedule's own dimension when it
    /// is explicit and `d = 1` otherwise.
    pub fn scales(&self) -> Result<Vec<f64>> {
        let dim = match &self.kind {
            ScaleKind::Explicit { boxes } => boxes.first().map(AxisBox::dim).unwrap_or(1),
            ScaleKind::Geometric { aspect, .. } => aspect.as_ref().map_or(1, Vec::len),
        };
        Ok(self.boxes(dim)?.iter().map(AxisBox::min_edge).collect())
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            ScaleKind::Geometric { count, .. } => *count,
            ScaleKind::Explicit { boxes } => boxes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The windows evaluated at one scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub scale: f64,
    pub windows: Vec<Region>,
}

/// Offsets `{0, √H, H/2, H − L}` plus seeded random offsets, per axis.
pub fn uniform_offsets(edges: &[f64], family: &WindowFamily, level: usize) -> Vec<Vec<f64>> {
    let h: Vec<f64> = edges.iter().map(|l| family.horizon_ratio.max(1.0) * l).collect();
    let mut out = vec![
        vec![0.0; edges.len()],
        h.iter().zip(edges).map(|(h, l)| h.sqrt().min(h - l)).collect(),
        h.iter().zip(edges).map(|(h, l)| (h / 2.0).min(h - l)).collect(),
        h.iter().zip(edges).map(|(h, l)| h - l).collect(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(family.seed ^ (level as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    for _ in 0..family.random_offsets {
        out.push(
            h.iter()
                .zip(edges)
                .map(|(h, l)| rng.gen::<f64>() * (h - l))
                .collect(),
        );
    }
    out
}

/// Windows for a one-sided scheme (standard, uniform or Følner) in the
/// orthant given by `signs`.
pub fn window_levels(
    scheme: &Scheme,
    sched: &ScaleSchedule,
    signs: Option<&[Sign]>,
) -> Result<Vec<Level>> {
    let d = scheme.dim();
    let base = sched.boxes(d)?;
    let mut levels = Vec::with_capacity(base.len());
    for (k, b) in base.iter().enumerate() {
        let scale = b.min_edge();
        let windows: Vec<Region> = match scheme.kind() {
            SchemeKind::StandardCesaro | SchemeKind::TwoSidedStandard => vec![b.clone().into()],
            SchemeKind::UniformCesaro | SchemeKind::TwoSidedUniform => {
                uniform_offsets(&b.edges(), &sched.family, k)
                    .iter()
                    .map(|a| b.translate(a).map(Region::from))
                    .collect::<Result<_, _>>()?
            }
            SchemeKind::Folner { sequence } => {
                vec![sequence.region((scale.ceil() as usize).max(1))?]
            }
        };
        let windows = match signs {
            Some(s) => windows
                .iter()
                .map(|r| r.mirror(s))
                .collect::<Result<_, _>>()?,
            None => windows,
        };
        levels.push(Level { scale, windows });
    }
    Ok(levels)
}

/// Uniform windows for the discrete side of a Følner scheme, and the scheme's
/// own windows otherwise.
pub fn discrete_window_levels(
    scheme: &Scheme,
    sched: &ScaleSchedule,
    signs: Option<&[Sign]>,
) -> Result<Vec<Level>> {
    match scheme.kind() {
        SchemeKind::Folner { .. } => window_levels(&Scheme::uniform(scheme.dim()), sched, signs),
        _ => window_levels(scheme, sched, signs),
    }
}

/// One evaluated window in a limit estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub level: usize,
    pub scale: f64,
    pub window: AxisBox,
    pub estimate: VectorValue,
    /// Running residual over the levels up to and including this one.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub value: VectorValue,
    pub residual: f64,
    pub converged: bool,
    pub tol: f64,
    pub scales_used: Vec<f64>,
    pub series: Vec<SeriesPoint>,
}

/// Aggregates evaluated levels. Each level contributes the mean of its
/// window estimates; the residual is the largest pairwise distance among all
/// window estimates of the last `tail` levels.
pub fn estimate_from_levels(
    levels: Vec<(f64, Vec<(AxisBox, VectorValue)>)>,
    tol: f64,
    tail: usize,
) -> Result<LimitEstimate> {
    if levels.is_empty() || levels.iter().all(|(_, w)| w.is_empty()) {
        return Err(AveragingError::EmptySchedule);
    }
    if tail < 2 || tail > levels.len() {
        return Err(AveragingError::InvalidTail {
            tail,
            levels: levels.len(),
        });
    }
    let mut series = Vec::new();
    let mut level_values = Vec::with_capacity(levels.len());
    for (k, (scale, windows)) in levels.iter().enumerate() {
        let vals: Vec<VectorValue> = windows.iter().map(|(_, v)| v.clone()).collect();
        level_values.push(VectorValue::mean(&vals)?);
        let first = k.saturating_sub(tail - 1);
        let mut pool: Vec<&VectorValue> = Vec::new();
        for (_, ws) in &levels[first..=k] {
            pool.extend(ws.iter().map(|(_, v)| v));
        }
        let residual = VectorValue::max_pairwise_distance(&pool)?;
        for (b, v) in windows {
            series.push(SeriesPoint {
                level: k,
                scale: *scale,
                window: b.clone(),
                estimate: v.clone(),
                residual,
            });
        }
    }
    let residual = series.last().map(|p| p.residual).unwrap_or(f64::INFINITY);
    Ok(LimitEstimate {
        value: level_values.pop().expect("non-empty"),
        residual,
        converged: residual <= tol,
        tol,
        scales_used: levels.iter().map(|(s, _)| *s).collect(),
        series,
    })
}

/// Limit of lattice averages over the given window levels.
pub fn discrete_limit(
    s: &SeqSampler,
    levels: &[Level],
    tol: f64,
    tail: usize,
) -> Result<LimitEstimate> {
    let flat: Vec<Region> = levels.iter().flat_map(|l| l.windows.iter().cloned()).collect();
    let values = discrete_averages(s, &flat)?;
    estimate_from_levels(assemble(levels, values), tol, tail)
}

/// Limit of continuous averages over the given window levels. Returns the
/// estimate and the largest refinement gap seen (0 when not refining).
pub fn continuous_limit(
    f: &FnSampler,
    levels: &[Level],
    q: &QuadSpec,
    tol: f64,
    tail: usize,
) -> Result<(LimitEstimate, f64)> {
    let flat: Vec<Region> = levels.iter().flat_map(|l| l.windows.iter().cloned()).collect();
    let quads = continuous_averages(f, &flat, q)?;
    let gap = quads
        .iter()
        .filter_map(|e| e.refine_gap)
        .fold(0.0, f64::max);
    let values = quads.into_iter().map(|e| e.value).collect();
    Ok((estimate_from_levels(assemble(levels, values), tol, tail)?, gap))
}

/// Limit of an arbitrary window functional.
pub fn limit_over_levels(
    levels: &[Level],
    avg: impl Fn(&Region) -> Result<VectorValue>,
    tol: f64,
    tail: usize,
) -> Result<LimitEstimate> {
    let flat: Vec<Region> = levels.iter().flat_map(|l| l.windows.iter().cloned()).collect();
    let values = flat.iter().map(avg).collect::<Result<Vec<_>>>()?;
    estimate_from_levels(assemble(levels, values), tol, tail)
}

fn assemble(levels: &[Level], values: Vec<VectorValue>) -> Vec<(f64, Vec<(AxisBox, VectorValue)>)> {
    let mut it = values.into_iter();
    levels
        .iter()
        .map(|l| {
            let ws = l
                .windows
                .iter()
                .map(|r| (r.bounding_box(), it.next().expect("one value per window")))
                .collect();
            (l.scale, ws)
        })
        .collect()
}

/// Evaluates `avg` at each scale `l(b_k)` of the schedule and estimates its
/// limit from the last `tail` values.
pub fn cesaro_limit(
    avg: impl Fn(f64) -> VectorValue,
    sched: &ScaleSchedule,
    tol: f64,
    tail: usize,
) -> Result<LimitEstimate> {
    let dim = match &sched.kind {
        ScaleKind::Explicit { boxes } => boxes.first().map(AxisBox::dim).unwrap_or(1),
        ScaleKind::Geometric { aspect, .. } => aspect.as_ref().map_or(1, Vec::len),
    };
    let boxes = sched.boxes(dim)?;
    let levels = boxes
        .iter()
        .map(|b| {
            let s = b.min_edge();
            (s, vec![(b.clone(), avg(s))])
        })
        .collect();
    estimate_from_levels(levels, tol, tail)
}

/// Inner estimates of liminf and limsup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
    /// How much the bounds move when the tail is halved.
    pub stability: f64,
}

/// Min and max over the latter half of a value sequence.
pub fn bounds_of(values: &[f64]) -> Result<Bounds> {
    if values.is_empty() {
        return Err(AveragingError::EmptySchedule);
    }
    let half = &values[values.len() / 2..];
    let quarter = &values[values.len() - (values.len() / 4).max(1)..];
    let mm = |v: &[f64]| {
        v.iter()
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

/// Tail min and max of a real average along the schedule.
pub fn cesaro_bounds(avg: impl Fn(f64) -> f64, sched: &ScaleSchedule) -> Result<Bounds> {
    let values: Vec<f64> = sched.scales()?.into_iter().map(avg).collect();
    bounds_of(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    fn re(v: &VectorValue) -> f64 {
        v.components()[0].re
    }

    #[test]
    fn constant_sequence_average() {
        let s = SeqSampler::real(1, 2.0, |_| 2.0);
        let b = AxisBox::from_origin(&[17.0]).unwrap();
        assert_eq!(re(&discrete_average(&s, &b).unwrap()), 2.0);
    }

    #[test]
    fn alternating_sequence_cancels() {
        let s = SeqSampler::real(1, 1.0, |n| if n[0] % 2 == 0 { 1.0 } else { -1.0 });
        let b = AxisBox::from_origin(&[200.0]).unwrap();
        assert_eq!(re(&discrete_average(&s, &b).unwrap()), 0.0);
    }

    #[test]
    fn rational_character_average_vanishes() {
        let t = 1.0 / 3.0;
        let s = SeqSampler::complex(1, 1.0, move |n| {
            Complex64::from_polar(1.0, 2.0 * PI * n[0] as f64 * t)
        });
        let b = AxisBox::from_origin(&[300.0]).unwrap();
        assert!(discrete_average(&s, &b).unwrap().norm() < 1e-12);
    }

    #[test]
    fn midpoint_examples() {
        let f = FnSampler::real(1, 3.0, |_| 3.0);
        let b = AxisBox::closed(vec![0.0], vec![10.0]).unwrap();
        let q = QuadSpec::new(0.1);
        assert_eq!(re(&continuous_average(&f, &b, &q).unwrap().value), 3.0);

        let f = FnSampler::real(1, 1.0, |x| (2.0 * PI * x[0]).sin());
        let b = AxisBox::closed(vec![0.0], vec![1000.0]).unwrap();
        let v = continuous_average(&f, &b, &QuadSpec::new(1e-3)).unwrap().value;
        assert!(re(&v).abs() < 1e-6);

        let f = FnSampler::real(1, 1.0, |x| x[0]);
        let b = AxisBox::closed(vec![0.0], vec![1.0]).unwrap();
        let v = continuous_average(&f, &b, &QuadSpec::new(1e-4)).unwrap().value;
        assert!((re(&v) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn refinement_reports_gap() {
        let f = FnSampler::real(1, 1.0, |x| x[0] * x[0]);
        let b = AxisBox::closed(vec![0.0], vec![1.0]).unwrap();
        let e = continuous_average(&f, &b, &QuadSpec::new(0.1).refined()).unwrap();
        // midpoint error for x^2 on step h is -h^2/12 per unit length
        let gap = e.refine_gap.unwrap();
        assert!((gap - (0.01 - 0.0025) / 12.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_samples_error() {
        let b = AxisBox::closed(vec![0.0], vec![1.0]).unwrap();
        let g = FnSampler::real(1, 1.0, |x| if x[0] > 0.5 { f64::NAN } else { 0.0 });
        assert!(matches!(
            continuous_average(&g, &b, &QuadSpec::new(0.1)),
            Err(AveragingError::NonFinite(_))
        ));
    }

    #[test]
    fn separable_fast_path_matches_direct() {
        let f1 = FnSampler::real(1, 1.0, |x| (x[0] * 1.3).sin());
        let f2 = FnSampler::real(1, 1.0, |x| (x[0] * 0.7).cos());
        let p = FnSampler::product(vec![f1.clone(), f2.clone()]).unwrap();
        let direct = FnSampler::real(2, 1.0, |x| (x[0] * 1.3).sin() * (x[1] * 0.7).cos());
        let b = AxisBox::closed(vec![0.5, -1.0], vec![7.0, 3.5]).unwrap();
        let q = QuadSpec::new(0.01);
        let a = continuous_average(&p, &b, &q).unwrap().value;
        let c = continuous_average(&direct, &b, &q).unwrap().value;
        assert!(a.distance(&c).unwrap() < 1e-12);

        let sa = SeqSampler::shifted(&p, &[0.1, 0.2]).unwrap();
        let sd = SeqSampler::shifted(&direct, &[0.1, 0.2]).unwrap();
        let b = AxisBox::half_open(vec![-3.0, 2.0], vec![20.0, 31.0]).unwrap();
        let a = discrete_average(&sa, &b).unwrap();
        let c = discrete_average(&sd, &b).unwrap();
        assert!(a.distance(&c).unwrap() < 1e-12);
    }

    #[test]
    fn nested_windows_match_direct() {
        let f = FnSampler::real(1, 1.0, |x| (x[0] * SQRT_2).cos());
        let windows: Vec<Region> = [10.0, 25.5, 80.0]
            .iter()
            .map(|b| AxisBox::from_origin(&[*b]).unwrap().into())
            .collect();
        let q = QuadSpec::new(1e-3);
        let nested = continuous_averages(&f, &windows, &q).unwrap();
        for (w, e) in windows.iter().zip(&nested) {
            let direct = continuous_region_average(&f, w, &q).unwrap();
            assert!(direct.value.distance(&e.value).unwrap() < 1e-9);
        }
        let s = SeqSampler::dilated(&f, &[0.37]).unwrap();
        let nested = discrete_averages(&s, &windows).unwrap();
        for (w, v) in windows.iter().zip(&nested) {
            let direct = discrete_region_average(&s, w).unwrap();
            assert!(direct.distance(v).unwrap() < 1e-12);
        }
    }

    #[test]
    fn cesaro_limit_examples() {
        let sched = ScaleSchedule::geometric(10.0, 10.0, 6);
        let e = cesaro_limit(|b| VectorValue::scalar(1.0 / b), &sched, 1e-3, 3).unwrap();
        assert!(e.converged);
        assert!((re(&e.value) - 1e-6).abs() < 1e-15);

        let sched = ScaleSchedule::geometric(10.0, 1.5, 30);
        let e = cesaro_limit(|b| VectorValue::scalar(b.ln().sin()), &sched, 0.1, 5).unwrap();
        assert!(!e.converged);
    }

    #[test]
    fn cesaro_limit_rejects_bad_tail() {
        let sched = ScaleSchedule::geometric(10.0, 10.0, 3);
        let err = cesaro_limit(|_| VectorValue::scalar(0.0), &sched, 1.0, 1).unwrap_err();
        assert_eq!(err, AveragingError::InvalidTail { tail: 1, levels: 3 });
        let err = cesaro_limit(|_| VectorValue::scalar(0.0), &sched, 1.0, 4).unwrap_err();
        assert_eq!(err, AveragingError::InvalidTail { tail: 4, levels: 3 });
    }

    #[test]
    fn cesaro_bounds_examples() {
        let sched = ScaleSchedule::geometric(10.0, 10.0, 6);
        let b = cesaro_bounds(|_| 0.3, &sched).unwrap();
        assert_eq!((b.lo, b.hi), (0.3, 0.3));
        let b = cesaro_bounds(
            |b| 0.5 + if (b.log10().round() as i64) % 2 == 0 { 0.25 } else { -0.25 },
            &sched,
        )
        .unwrap();
        assert_eq!((b.lo, b.hi), (0.25, 0.75));
    }

    #[test]
    fn uniform_windows_stay_in_horizon() {
        let fam = WindowFamily {
            horizon_ratio: 4.0,
            random_offsets: 5,
            seed: 9,
        };
        for a in uniform_offsets(&[100.0, 10.0], &fam, 3) {
            assert!(a[0] >= 0.0 && a[0] <= 300.0);
            assert!(a[1] >= 0.0 && a[1] <= 30.0);
        }
        assert_eq!(uniform_offsets(&[100.0], &fam, 1), uniform_offsets(&[100.0], &fam, 1));
    }

    #[test]
    fn schedule_must_increase() {
        let s = ScaleSchedule::explicit(vec![
            AxisBox::from_origin(&[10.0]).unwrap(),
            AxisBox::from_origin(&[5.0]).unwrap(),
        ]);
        assert_eq!(s.boxes(1).unwrap_err(), AveragingError::NotIncreasing(1));
    }

    #[test]
    fn chunked_sum_shape_is_fixed() {
        let a = chunked_sum(1_000_000, 1, |s, e, acc| {
            for k in s..e {
                acc[0] += Complex64::new(1.0 / (k as f64 + 1.0), 0.0);
            }
        });
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| {
            chunked_sum(1_000_000, 1, |s, e, acc| {
                for k in s..e {
                    acc[0] += Complex64::new(1.0 / (k as f64 + 1.0), 0.0);
                }
            })
        });
        assert_eq!(a[0].re.to_bits(), b[0].re.to_bits());
    }
}
