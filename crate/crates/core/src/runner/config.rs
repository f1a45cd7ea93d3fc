//! Declarative experiment configuration.

use std::f64::consts::TAU;

use num_complex::Complex64;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::averaging::{QuadSpec, ScaleKind, ScaleSchedule, WindowFamily};
use crate::density::{Ambient, DensityKind, DensitySet, ExactForm, SectionMode};
use crate::dynamics::{
    intersection_measure_sampler, multiple_average_sampler, torus_orbit, Factor, Flow, GpNode, Heis,
    HeisenbergFlow, MultipleAverage, Observable, Poly, PolyTerm, TorusFlow, TrigTerm,
};
use crate::geometry::{AxisBox, FolnerKind, FolnerSequence, Region, Scheme, SchemeKind};
use crate::sampling::TSampling;
use crate::values::FnSampler;

use super::RunError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSpec,
    #[serde(default)]
    pub sampler: Option<SamplerSpec>,
    #[serde(default)]
    pub scheme: SchemeSpec,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub quad: QuadConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub t_sampling: TSamplingSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentSpec {
    /// Continuous limit of the sampler under the scheme.
    CesaroLimit,
    AdditiveTransfer,
    MultiplicativeTransfer,
    LiminfLimsup {
        method: MethodSpec,
    },
    EssLimsup {
        /// Real components of the claimed limit.
        limit: Vec<f64>,
        deltas: Vec<f64>,
    },
    Tauberian {
        sequence: SequenceSpec,
        alpha: f64,
    },
    /// `f_n(x) = sampler(n·x)` on a midpoint grid of `[0,1]`.
    FatouDct {
        grid_points: usize,
        terms: usize,
    },
    /// Needs a Følner scheme.
    FolnerReduction,
    Density {
        set: SetSpec,
        density: DensityKind,
        ambient: Ambient,
    },
    SectionDensity {
        set: SetSpec,
        mode: SectionMode,
        #[serde(default)]
        uniform: bool,
    },
    DensityConvergence {
        limit: Vec<f64>,
        mode: SectionMode,
        #[serde(default)]
        eps: Vec<f64>,
        #[serde(default)]
        uniform: bool,
    },
    /// Weyl discrepancies of a torus-orbit sampler.
    Weyl {
        window_len: f64,
        starts: Vec<f64>,
        kmax: i64,
        /// Integrate the linearized phase on each step instead of using
        /// midpoint values.
        #[serde(default)]
        panel: bool,
    },
    HeisenbergContract {
        samples: usize,
        generator: [f64; 3],
        #[serde(default)]
        base: [f64; 3],
        window_len: f64,
        kmax: i64,
    },
    /// Continuous limit of a multiple-average sampler and its
    /// multiplicative cross-check.
    MultipleAverage,
    /// Liminf proxy of the continuous averages of a real sampler.
    Liminf {
        threshold: f64,
    },
    GpDistribution {
        step: f64,
        t_max: f64,
        #[serde(default = "default_gp_eta")]
        eta: f64,
        target: TargetCdf,
        #[serde(default = "default_bins")]
        bins: usize,
        #[serde(default = "default_flagged_tol")]
        flagged_tol: f64,
    },
}

fn default_gp_eta() -> f64 {
    1e-6
}
fn default_bins() -> usize {
    20
}
fn default_flagged_tol() -> f64 {
    1e-4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum MethodSpec {
    Additive,
    Multiplicative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum TargetCdf {
    /// Uniform on `[0,1]`.
    Uniform,
    /// Product of two independent uniforms.
    ProductUniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceSpec {
    /// `v_n = (1/(nc)) ∫_0^{nc} f`, by quadrature.
    RunningAverage { c: f64 },
    /// `v_n = sin(2π log n)`.
    SinLog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerSpec {
    Constant {
        dim: usize,
        value: f64,
    },
    /// `Σ c_j e^{2πi p_j(x)}`, or its real part.
    Trig {
        terms: Vec<PhaseTerm>,
        #[serde(default)]
        real: bool,
    },
    /// `{x}` in one variable.
    Sawtooth,
    /// `1 / (1 + |x|)` in one variable.
    Reciprocal,
    Indicator {
        set: SetSpec,
    },
    /// Product of one-variable real samplers, one per axis.
    Product {
        factors: Vec<SamplerSpec>,
    },
    Gp {
        node: GpSpec,
    },
    TorusOrbit {
        alpha: Vec<f64>,
        #[serde(default)]
        omega: Vec<f64>,
        polys: Vec<PolySpec>,
    },
    MultipleAverage {
        factors: Vec<FactorSpec>,
        #[serde(default)]
        grid: Option<usize>,
    },
    IntersectionMeasure {
        /// One rotation vector per polynomial.
        alphas: Vec<Vec<f64>>,
        polys: Vec<PolySpec>,
        set: SetSpec,
        #[serde(default = "default_torus_grid")]
        grid: usize,
    },
}

fn default_torus_grid() -> usize {
    1 << 10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PhaseTerm {
    /// `[re, im]`.
    pub coef: [f64; 2],
    pub phase: PolySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub flow: FlowSpec,
    pub poly: PolySpec,
    pub observable: Vec<TrigTermSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FlowSpec {
    Torus { alpha: Vec<f64> },
    Heisenberg { generator: [f64; 3] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TrigTermSpec {
    pub freq: Vec<i64>,
    pub coef: [f64; 2],
}

/// Either univariate coefficients `[c0, c1, …]` or explicit terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum PolySpec {
    Univariate(Vec<f64>),
    Terms { terms: Vec<TermSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coef: f64,
    pub exp: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum GpSpec {
    Const { value: f64 },
    Var { index: usize },
    Poly { poly: PolySpec },
    Add { a: Box<GpSpec>, b: Box<GpSpec> },
    Mul { a: Box<GpSpec>, b: Box<GpSpec> },
    Floor { arg: Box<GpSpec> },
    Frac { arg: Box<GpSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    /// `Π_i (offset_i + [0, len_i) + period_i·Z)`.
    Periodic {
        period: Vec<f64>,
        offset: Vec<f64>,
        len: Vec<f64>,
    },
    /// `{x : {αx} < below}` in one variable.
    Rotation { alpha: f64, below: f64 },
    /// Union of half-open boxes.
    Boxes { boxes: Vec<BoxSpec> },
    /// `∪_k [2^k, 2^k + 2^{k−1})`.
    LogBlocks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeSpec {
    #[default]
    Standard,
    Uniform,
    TwoSidedStandard,
    TwoSidedUniform,
    /// `Φ_N = [0, N·side]^d`.
    FolnerGrowing { side: f64 },
    /// `Φ_N = [a_N, a_N + side·N^len_power]^d`, `a_N = drift·N^drift_power`.
    FolnerShifted {
        side: f64,
        len_power: f64,
        drift: f64,
        drift_power: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ScaleSpec {
    pub start: f64,
    pub ratio: f64,
    pub count: usize,
    #[serde(default)]
    pub aspect: Option<Vec<f64>>,
    #[serde(default = "default_horizon")]
    pub horizon_ratio: f64,
    #[serde(default = "default_offsets")]
    pub random_offsets: usize,
}

fn default_horizon() -> f64 {
    4.0
}
fn default_offsets() -> usize {
    2
}

impl ScaleSpec {
    pub fn geometric(start: f64, ratio: f64, count: usize) -> Self {
        Self {
            start,
            ratio,
            count,
            aspect: None,
            horizon_ratio: default_horizon(),
            random_offsets: default_offsets(),
        }
    }

    pub fn build(&self, seed: u64) -> ScaleSchedule {
        ScaleSchedule {
            kind: ScaleKind::Geometric {
                start: self.start,
                ratio: self.ratio,
                count: self.count,
                aspect: self.aspect.clone(),
            },
            family: WindowFamily {
                horizon_ratio: self.horizon_ratio,
                random_offsets: self.random_offsets,
                seed,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub discrete: ScaleSpec,
    pub continuous: ScaleSpec,
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        Self {
            discrete: ScaleSpec::geometric(100.0, 10.0, 3),
            continuous: ScaleSpec::geometric(100.0, 10.0, 3),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default)]
    pub refine: bool,
}

fn default_step() -> f64 {
    1e-3
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            step: default_step(),
            refine: false,
        }
    }
}

impl QuadConfig {
    pub fn build(&self) -> QuadSpec {
        let q = QuadSpec::new(self.step);
        if self.refine {
            q.refined()
        } else {
            q
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Residual tolerance of each limit; `tol` when absent.
    #[serde(default)]
    pub limit_tol: Option<f64>,
    /// Constancy tolerance of dilated limits; `tol` when absent.
    #[serde(default)]
    pub spread_tol: Option<f64>,
    /// Inequality slack; twice the worst bound stability when absent.
    #[serde(default)]
    pub slack: Option<f64>,
    #[serde(default = "default_tail")]
    pub tail: usize,
}

fn default_tol() -> f64 {
    0.02
}
fn default_tail() -> usize {
    3
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            limit_tol: None,
            spread_tol: None,
            slack: None,
            tail: default_tail(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TSamplingSpec {
    /// Grid points per axis for additive checks.
    #[serde(default = "default_grid")]
    pub grid_per_axis: usize,
    /// Multiplicative samples lie in `(0, c]`; all ones when absent.
    #[serde(default)]
    pub c: Option<Vec<f64>>,
    #[serde(default = "default_ld")]
    pub low_discrepancy: usize,
    #[serde(default)]
    pub random: usize,
    #[serde(default = "default_q_max")]
    pub q_max: u64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_power")]
    pub power: i32,
}

fn default_grid() -> usize {
    16
}
fn default_ld() -> usize {
    8
}
fn default_q_max() -> u64 {
    12
}
fn default_eta() -> f64 {
    1e-3
}
fn default_power() -> i32 {
    1
}

impl Default for TSamplingSpec {
    fn default() -> Self {
        Self {
            grid_per_axis: default_grid(),
            c: None,
            low_discrepancy: default_ld(),
            random: 0,
            q_max: default_q_max(),
            eta: default_eta(),
            power: default_power(),
        }
    }
}

impl TSamplingSpec {
    pub fn build(&self, seed: u64) -> TSampling {
        TSampling {
            low_discrepancy: self.low_discrepancy,
            random: self.random,
            seed,
            q_max: self.q_max,
            eta: self.eta,
            power: self.power,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_report")]
    pub report: String,
    #[serde(default = "default_series")]
    pub series: String,
}

fn default_report() -> String {
    "report.json".into()
}
fn default_series() -> String {
    "series.csv".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            report: default_report(),
            series: default_series(),
        }
    }
}

impl ExperimentConfig {
    /// Fills every optional field with the value the runner will use.
    pub fn materialize(&mut self) {
        let tol = self.tolerances.tol;
        self.tolerances.limit_tol.get_or_insert(tol);
        self.tolerances.spread_tol.get_or_insert(tol);
        if self.t_sampling.c.is_none() {
            let d = self.sampler.as_ref().and_then(|s| s.dim().ok()).unwrap_or(1);
            self.t_sampling.c = Some(vec![1.0; d]);
        }
    }

    /// Semantic checks that the JSON schema cannot express.
    pub fn validate(&self) -> Result<(), RunError> {
        let t = &self.tolerances;
        if !(t.tol >= 0.0 && t.tol.is_finite()) {
            return Err(RunError::Config(format!("tol must be non-negative, got {}", t.tol)));
        }
        for (name, v) in [("limit_tol", t.limit_tol), ("spread_tol", t.spread_tol), ("slack", t.slack)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(RunError::Config(format!("{name} must be non-negative")));
                }
            }
        }
        if t.tail < 2 {
            return Err(RunError::Config("tail must be at least 2".into()));
        }
        if !(self.quad.step > 0.0 && self.quad.step.is_finite()) {
            return Err(RunError::Config("quad.step must be positive".into()));
        }
        for s in [&self.schedule.discrete, &self.schedule.continuous] {
            if !(s.start > 0.0 && s.ratio > 1.0 && s.count >= t.tail) {
                return Err(RunError::Config(
                    "schedules need start > 0, ratio > 1 and count >= tail".into(),
                ));
            }
        }
        if self.t_sampling.grid_per_axis == 0 {
            return Err(RunError::Config("grid_per_axis must be positive".into()));
        }
        Ok(())
    }
}

impl PolySpec {
    pub fn build(&self) -> Result<Poly, RunError> {
        match self {
            PolySpec::Univariate(c) => Ok(Poly::univariate(c)),
            PolySpec::Terms { terms } => {
                let dim = terms.first().map(|t| t.exp.len()).unwrap_or(1);
                Ok(Poly::new(
                    dim,
                    terms
                        .iter()
                        .map(|t| PolyTerm {
                            coef: t.coef,
                            exp: t.exp.clone(),
                        })
                        .collect(),
                )?)
            }
        }
    }
}

impl GpSpec {
    pub fn build(&self) -> Result<GpNode, RunError> {
        Ok(match self {
            GpSpec::Const { value } => GpNode::constant(*value),
            GpSpec::Var { index } => GpNode::var(*index),
            GpSpec::Poly { poly } => GpNode::poly(poly.build()?),
            GpSpec::Add { a, b } => GpNode::add(a.build()?, b.build()?),
            GpSpec::Mul { a, b } => GpNode::mul(a.build()?, b.build()?),
            GpSpec::Floor { arg } => GpNode::floor(arg.build()?),
            GpSpec::Frac { arg } => GpNode::frac(arg.build()?),
        })
    }
}

impl SetSpec {
    pub fn build(&self) -> Result<DensitySet, RunError> {
        match self {
            SetSpec::Periodic { period, offset, len } => {
                if period.len() != offset.len() || period.len() != len.len() || period.is_empty() {
                    return Err(RunError::Config("periodic set needs matching lengths".into()));
                }
                if period.iter().any(|p| !(*p > 0.0)) {
                    return Err(RunError::Config("periods must be positive".into()));
                }
                Ok(DensitySet::periodic(period.clone(), offset.clone(), len.clone()))
            }
            SetSpec::Rotation { alpha, below } => {
                if *alpha == 0.0 || !(0.0..=1.0).contains(below) {
                    return Err(RunError::Config("rotation set needs α ≠ 0 and 0 ≤ below ≤ 1".into()));
                }
                let p = 1.0 / alpha.abs();
                let (a, b) = (*alpha, *below);
                let m = move |x: &[f64]| (a * x[0]).rem_euclid(1.0) < b;
                let offset = if a > 0.0 { 0.0 } else { -b * p };
                Ok(DensitySet::new(1, m).with_exact(ExactForm::Periodic {
                    period: vec![p],
                    offset: vec![offset],
                    len: vec![b * p],
                }))
            }
            SetSpec::Boxes { boxes } => {
                let bs = boxes
                    .iter()
                    .map(|b| AxisBox::half_open(b.lo.clone(), b.hi.clone()))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| RunError::Config(e.to_string()))?;
                let r = Region::new(bs).map_err(|e| RunError::Config(e.to_string()))?;
                Ok(DensitySet::boxes(r))
            }
            SetSpec::LogBlocks => Ok(crate::density::log_blocks()),
        }
    }
}

fn c64(c: [f64; 2]) -> Complex64 {
    Complex64::new(c[0], c[1])
}

impl SchemeSpec {
    pub fn build(&self, dim: usize) -> Result<Scheme, RunError> {
        let kind = match self {
            SchemeSpec::Standard => SchemeKind::StandardCesaro,
            SchemeSpec::Uniform => SchemeKind::UniformCesaro,
            SchemeSpec::TwoSidedStandard => SchemeKind::TwoSidedStandard,
            SchemeSpec::TwoSidedUniform => SchemeKind::TwoSidedUniform,
            SchemeSpec::FolnerGrowing { side } => SchemeKind::Folner {
                sequence: FolnerSequence::new(dim, FolnerKind::GrowingBoxes { side: *side })
                    .map_err(|e| RunError::Config(e.to_string()))?,
            },
            SchemeSpec::FolnerShifted {
                side,
                len_power,
                drift,
                drift_power,
            } => SchemeKind::Folner {
                sequence: FolnerSequence::new(
                    dim,
                    FolnerKind::ShiftedBoxes {
                        side: *side,
                        len_power: *len_power,
                        drift: *drift,
                        drift_power: *drift_power,
                    },
                )
                .map_err(|e| RunError::Config(e.to_string()))?,
            },
        };
        Scheme::new(kind, dim).map_err(|e| RunError::Config(e.to_string()))
    }
}

/// A built sampler together with the structure some experiments need.
pub enum BuiltSampler {
    Plain(FnSampler),
    Orbit(crate::dynamics::TorusOrbit),
    Multiple(MultipleAverage),
    Gp(GpNode),
}

impl BuiltSampler {
    pub fn sampler(&self) -> FnSampler {
        match self {
            BuiltSampler::Plain(f) => f.clone(),
            BuiltSampler::Orbit(o) => o.sampler(),
            BuiltSampler::Multiple(m) => m.sampler(),
            BuiltSampler::Gp(g) => {
                let g = g.clone();
                let d = g.arity().max(1);
                FnSampler::real(d, f64::INFINITY, move |x| g.eval(x, 0.0).value)
            }
        }
    }
}

impl SamplerSpec {
    /// Parameter dimension of the sampler.
    pub fn dim(&self) -> Result<usize, RunError> {
        Ok(match self {
            SamplerSpec::Constant { dim, .. } => *dim,
            SamplerSpec::Trig { terms, .. } => terms
                .first()
                .map(|t| t.phase.build().map(|p| p.dim()))
                .transpose()?
                .unwrap_or(1),
            SamplerSpec::Sawtooth | SamplerSpec::Reciprocal => 1,
            SamplerSpec::Indicator { set } => set.build()?.dim(),
            SamplerSpec::Product { factors } => factors.len(),
            SamplerSpec::Gp { node } => node.build()?.arity().max(1),
            SamplerSpec::TorusOrbit { polys, .. } => polys
                .first()
                .map(|p| p.build().map(|p| p.dim()))
                .transpose()?
                .unwrap_or(1),
            SamplerSpec::MultipleAverage { factors, .. } => factors
                .first()
                .map(|f| f.poly.build().map(|p| p.dim()))
                .transpose()?
                .unwrap_or(1),
            SamplerSpec::IntersectionMeasure { polys, .. } => polys
                .first()
                .map(|p| p.build().map(|p| p.dim()))
                .transpose()?
                .unwrap_or(1),
        })
    }

    pub fn build(&self) -> Result<BuiltSampler, RunError> {
        Ok(match self {
            SamplerSpec::Constant { dim, value } => {
                let v = *value;
                BuiltSampler::Plain(
                    FnSampler::real(*dim, v.abs(), move |_| v).with_derivative_bound(0.0),
                )
            }
            SamplerSpec::Trig { terms, real } => {
                let built: Vec<(Complex64, Poly)> = terms
                    .iter()
                    .map(|t| Ok((c64(t.coef), t.phase.build()?)))
                    .collect::<Result<_, RunError>>()?;
                let dim = built.first().map(|(_, p)| p.dim()).unwrap_or(1);
                if built.iter().any(|(_, p)| p.dim() != dim) {
                    return Err(RunError::Config("trig phases differ in dimension".into()));
                }
                let bound: f64 = built.iter().map(|(c, _)| c.norm()).sum();
                let real = *real;
                let eval = move |x: &[f64]| -> Complex64 {
                    built
                        .iter()
                        .map(|(c, p)| c * Complex64::from_polar(1.0, TAU * p.eval_unchecked(x).rem_euclid(1.0)))
                        .sum()
                };
                BuiltSampler::Plain(if real {
                    FnSampler::real(dim, bound, move |x| eval(x).re)
                } else {
                    FnSampler::complex(dim, bound, eval)
                })
            }
            SamplerSpec::Sawtooth => {
                BuiltSampler::Plain(FnSampler::real(1, 1.0, |x| x[0] - x[0].floor()))
            }
            SamplerSpec::Reciprocal => BuiltSampler::Plain(
                FnSampler::real(1, 1.0, |x| 1.0 / (1.0 + x[0].abs())).with_derivative_bound(1.0),
            ),
            SamplerSpec::Indicator { set } => BuiltSampler::Plain(set.build()?.indicator()),
            SamplerSpec::Product { factors } => {
                let fs = factors
                    .iter()
                    .map(|f| match f.build()? {
                        BuiltSampler::Plain(s) => Ok(s),
                        _ => Err(RunError::Config("product factors must be plain samplers".into())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                BuiltSampler::Plain(FnSampler::product(fs)?)
            }
            SamplerSpec::Gp { node } => BuiltSampler::Gp(node.build()?),
            SamplerSpec::TorusOrbit { alpha, omega, polys } => {
                let omega = if omega.is_empty() {
                    vec![0.0; alpha.len()]
                } else {
                    omega.clone()
                };
                let flow = TorusFlow::new(alpha.clone(), omega)?;
                let polys = polys.iter().map(PolySpec::build).collect::<Result<Vec<_>, _>>()?;
                BuiltSampler::Orbit(torus_orbit(&flow, polys)?)
            }
            SamplerSpec::MultipleAverage { factors, grid } => {
                let fs = factors
                    .iter()
                    .map(|f| {
                        let flow = match &f.flow {
                            FlowSpec::Torus { alpha } => Flow::Torus(TorusFlow::rotation(alpha.clone())),
                            FlowSpec::Heisenberg { generator } => Flow::Heisenberg(HeisenbergFlow::new(
                                Heis::new(generator[0], generator[1], generator[2]),
                                Heis::new(0.0, 0.0, 0.0),
                            )),
                        };
                        Ok(Factor {
                            flow,
                            poly: f.poly.build()?,
                            obs: Observable::Trig(
                                f.observable
                                    .iter()
                                    .map(|t| TrigTerm {
                                        freq: t.freq.clone(),
                                        coef: c64(t.coef),
                                    })
                                    .collect(),
                            ),
                        })
                    })
                    .collect::<Result<Vec<_>, RunError>>()?;
                BuiltSampler::Multiple(multiple_average_sampler(fs, *grid)?)
            }
            SamplerSpec::IntersectionMeasure {
                alphas,
                polys,
                set,
                grid,
            } => {
                let flows: Vec<TorusFlow> = alphas.iter().map(|a| TorusFlow::rotation(a.clone())).collect();
                let polys = polys.iter().map(PolySpec::build).collect::<Result<Vec<_>, _>>()?;
                BuiltSampler::Plain(intersection_measure_sampler(&flows, &polys, &set.build()?, *grid)?)
            }
        })
    }
}
