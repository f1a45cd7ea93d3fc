//! Concrete systems: polynomials, generalized polynomials, torus and
//! Heisenberg flows, Weyl sums, multiple-average and intersection samplers.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::averaging::{chunked_sum, continuous_average, AveragingError, QuadSpec};
use crate::density::DensitySet;
use crate::geometry::AxisBox;
use crate::values::{uniform_weights, FnSampler, NormKind, ValueError, VectorValue};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("frequency vector must be non-zero")]
    ZeroFrequency,
    #[error("polynomial {0} does not vanish at the origin")]
    NonZeroAtOrigin(usize),
    #[error("set has zero measure on the phase-space grid")]
    NullSet,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Averaging(#[from] AveragingError),
}

pub type Result<T, E = DynamicsError> = std::result::Result<T, E>;

fn frac(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

fn e(cycles: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * frac(cycles))
}

// ---------------------------------------------------------------- polynomials

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub coef: f64,
    pub exp: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PolyRepr {
    dim: usize,
    terms: Vec<PolyTerm>,
}

#[derive(Debug, Clone, PartialEq)]
enum Horner {
    Leaf(f64),
    /// `Σ_k c_k(x_{var+1..}) · x_var^k`
    Node { var: usize, coeffs: Vec<Horner> },
}

impl Horner {
    fn build(terms: &[(f64, &[u32])], var: usize, dim: usize) -> Horner {
        if var == dim {
            return Horner::Leaf(terms.iter().map(|(c, _)| c).sum());
        }
        let deg = terms.iter().map(|(_, e)| e[var]).max().unwrap_or(0) as usize;
        let coeffs = (0..=deg)
            .map(|k| {
                let sub: Vec<(f64, &[u32])> =
                    terms.iter().filter(|(_, e)| e[var] as usize == k).cloned().collect();
                Horner::build(&sub, var + 1, dim)
            })
            .collect();
        Horner::Node { var, coeffs }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Horner::Leaf(c) => *c,
            Horner::Node { var, coeffs } => coeffs
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * x[*var] + c.eval(x)),
        }
    }
}

/// A real polynomial in `d` variables, evaluated by nested Horner schemes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct Poly {
    dim: usize,
    terms: Vec<PolyTerm>,
    horner: Horner,
}

impl TryFrom<PolyRepr> for Poly {
    type Error = DynamicsError;
    fn try_from(r: PolyRepr) -> Result<Self> {
        Poly::new(r.dim, r.terms)
    }
}

impl From<Poly> for PolyRepr {
    fn from(p: Poly) -> Self {
        PolyRepr {
            dim: p.dim,
            terms: p.terms,
        }
    }
}

impl Poly {
    pub fn new(dim: usize, terms: Vec<PolyTerm>) -> Result<Self> {
        for t in &terms {
            if t.exp.len() != dim {
                return Err(DynamicsError::DimensionMismatch {
                    expected: dim,
                    got: t.exp.len(),
                });
            }
            if !t.coef.is_finite() {
                return Err(DynamicsError::InvalidInput("non-finite coefficient".into()));
            }
        }
        let refs: Vec<(f64, &[u32])> = terms.iter().map(|t| (t.coef, t.exp.as_slice())).collect();
        let horner = Horner::build(&refs, 0, dim);
        Ok(Self { dim, terms, horner })
    }

    /// `Σ_k c[k] t^k` in one variable.
    pub fn univariate(coeffs: &[f64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, c)| PolyTerm {
                coef: *c,
                exp: vec![k as u32],
            })
            .collect();
        Self::new(1, terms).expect("one variable")
    }

    /// `c · t^k` in one variable.
    pub fn monomial(coef: f64, k: u32) -> Self {
        Self::new(1, vec![PolyTerm { coef, exp: vec![k] }]).expect("one variable")
    }

    /// `Σ_i c_i x_i`.
    pub fn linear(coefs: &[f64]) -> Self {
        let d = coefs.len();
        let terms = coefs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut exp = vec![0; d];
                exp[i] = 1;
                PolyTerm { coef: *c, exp }
            })
            .collect();
        Self::new(d, terms).expect("matching exponents")
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, Vec::new()).expect("no terms")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[PolyTerm] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|t| t.coef != 0.0)
            .map(|t| t.exp.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(DynamicsError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.horner.eval(x))
    }

    /// Evaluation without the dimension check, for hot loops.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.horner.eval(x)
    }

    pub fn constant_term(&self) -> f64 {
        self.horner.eval(&vec![0.0; self.dim])
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exp[var] > 0)
            .map(|t| {
                let mut exp = t.exp.clone();
                exp[var] -= 1;
                PolyTerm {
                    coef: t.coef * t.exp[var] as f64,
                    exp,
                }
            })
            .collect();
        Poly::new(self.dim, terms).expect("same dimension")
    }
}

// ------------------------------------------------------ generalized polynomials

/// Expression tree built from polynomials by sums, products, integer and
/// fractional parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum GpNode {
    Const { value: f64 },
    Var { index: usize },
    Poly { poly: Poly },
    Add { a: Box<GpNode>, b: Box<GpNode> },
    Mul { a: Box<GpNode>, b: Box<GpNode> },
    Floor { arg: Box<GpNode> },
    FracPart { arg: Box<GpNode> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpValue {
    pub value: f64,
    /// Some floor or fractional-part argument was within `eta` of an integer.
    pub near_discontinuity: bool,
}

impl GpNode {
    pub fn constant(value: f64) -> Self {
        GpNode::Const { value }
    }
    pub fn var(index: usize) -> Self {
        GpNode::Var { index }
    }
    pub fn poly(poly: Poly) -> Self {
        GpNode::Poly { poly }
    }
    pub fn add(a: GpNode, b: GpNode) -> Self {
        GpNode::Add {
            a: Box::new(a),
            b: Box::new(b),
        }
    }
    pub fn mul(a: GpNode, b: GpNode) -> Self {
        GpNode::Mul {
            a: Box::new(a),
            b: Box::new(b),
        }
    }
    pub fn floor(arg: GpNode) -> Self {
        GpNode::Floor { arg: Box::new(arg) }
    }
    pub fn frac(arg: GpNode) -> Self {
        GpNode::FracPart { arg: Box::new(arg) }
    }

    /// Largest variable index used plus one.
    pub fn arity(&self) -> usize {
        match self {
            GpNode::Const { .. } => 0,
            GpNode::Var { index } => index + 1,
            GpNode::Poly { poly } => poly.dim(),
            GpNode::Add { a, b } | GpNode::Mul { a, b } => a.arity().max(b.arity()),
            GpNode::Floor { arg } | GpNode::FracPart { arg } => arg.arity(),
        }
    }

    pub fn eval(&self, x: &[f64], eta: f64) -> GpValue {
        let mut flag = false;
        let value = self.eval_inner(x, eta, &mut flag);
        GpValue {
            value,
            near_discontinuity: flag,
        }
    }

    fn eval_inner(&self, x: &[f64], eta: f64, flag: &mut bool) -> f64 {
        match self {
            GpNode::Const { value } => *value,
            GpNode::Var { index } => x[*index],
            GpNode::Poly { poly } => poly.eval_unchecked(&x[..poly.dim()]),
            GpNode::Add { a, b } => a.eval_inner(x, eta, flag) + b.eval_inner(x, eta, flag),
            GpNode::Mul { a, b } => a.eval_inner(x, eta, flag) * b.eval_inner(x, eta, flag),
            GpNode::Floor { arg } => {
                let v = arg.eval_inner(x, eta, flag);
                *flag |= (v - v.round()).abs() <= eta;
                v.floor()
            }
            GpNode::FracPart { arg } => {
                let v = arg.eval_inner(x, eta, flag);
                *flag |= (v - v.round()).abs() <= eta;
                v - v.floor()
            }
        }
    }
}

pub fn gp_eval(g: &GpNode, x: &[f64], eta: f64) -> GpValue {
    g.eval(x, eta)
}

/// `u − u ln u`: distribution function of a product of two independent
/// uniform variables on `[0,1]`.
pub fn product_uniform_cdf(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u - u * u.ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistBin {
    pub lo: f64,
    pub hi: f64,
    pub empirical: f64,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpDistributionReport {
    pub samples: usize,
    pub flagged: usize,
    pub flagged_fraction: f64,
    /// Kolmogorov–Smirnov distance to the target distribution function.
    pub ks: f64,
    pub histogram: Vec<HistBin>,
}

/// Empirical distribution of `g(t)` at `t = step, 2·step, …, t_max`
/// (one-parameter), compared with a target distribution function. Flagged
/// samples are kept and counted.
pub fn gp_distribution(
    g: &GpNode,
    step: f64,
    t_max: f64,
    eta: f64,
    target: impl Fn(f64) -> f64 + Sync,
    bins: (f64, f64, usize),
) -> Result<GpDistributionReport> {
    if g.arity() > 1 {
        return Err(DynamicsError::DimensionMismatch {
            expected: 1,
            got: g.arity(),
        });
    }
    if !(step > 0.0 && t_max >= step) {
        return Err(DynamicsError::InvalidInput("need 0 < step <= t_max".into()));
    }
    let (lo, hi, nbins) = bins;
    if !(hi > lo) || nbins == 0 {
        return Err(DynamicsError::InvalidInput("empty histogram range".into()));
    }
    let n = (t_max / step + 1e-9).floor() as usize;
    let evals: Vec<GpValue> = (1..=n)
        .into_par_iter()
        .map(|j| g.eval(&[j as f64 * step], eta))
        .collect();
    let flagged = evals.iter().filter(|v| v.near_discontinuity).count();
    let mut values: Vec<f64> = evals.into_iter().map(|v| v.value).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(DynamicsError::InvalidInput("non-finite sample".into()));
    }
    values.par_sort_unstable_by(f64::total_cmp);
    let nf = n as f64;
    let ks = values
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let f = target(*v);
            (f - i as f64 / nf).abs().max(((i + 1) as f64 / nf - f).abs())
        })
        .reduce(|| 0.0, f64::max);
    let width = (hi - lo) / nbins as f64;
    let mut counts = vec![0usize; nbins];
    for v in &values {
        if *v >= lo && *v < hi {
            counts[(((v - lo) / width) as usize).min(nbins - 1)] += 1;
        }
    }
    let histogram = counts
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let a = lo + k as f64 * width;
            let b = if k + 1 == nbins { hi } else { a + width };
            HistBin {
                lo: a,
                hi: b,
                empirical: *c as f64 / nf,
                target: target(b) - target(a),
            }
        })
        .collect();
    Ok(GpDistributionReport {
        samples: n,
        flagged,
        flagged_fraction: flagged as f64 / nf,
        ks,
        histogram,
    })
}

// ---------------------------------------------------------------- torus flows

/// `T^s ω = ω + sα mod 1` on `[0,1)^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusFlow {
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub omega: Vec<f64>,
}

impl TorusFlow {
    pub fn new(alpha: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        if alpha.len() != omega.len() {
            return Err(DynamicsError::DimensionMismatch {
                expected: alpha.len(),
                got: omega.len(),
            });
        }
        Ok(Self {
            omega: omega.into_iter().map(frac).collect(),
            alpha,
        })
    }

    /// Flow from the origin.
    pub fn rotation(alpha: Vec<f64>) -> Self {
        let m = alpha.len();
        Self {
            alpha,
            omega: vec![0.0; m],
        }
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn act(&self, s: f64, w: &[f64], out: &mut [f64]) {
        for ((o, w), a) in out.iter_mut().zip(w).zip(&self.alpha) {
            *o = frac(w + s * a);
        }
    }
}

/// `t ↦ (ω_j + p_j(t)·α_j mod 1)_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusOrbit {
    flow: TorusFlow,
    polys: Vec<Poly>,
}

/// Builds the orbit of the flow's base point along one polynomial per
/// coordinate, or a single polynomial shared by all coordinates.
pub fn torus_orbit(flow: &TorusFlow, polys: Vec<Poly>) -> Result<TorusOrbit> {
    let m = flow.dim();
    let polys = match polys.len() {
        1 => vec![polys[0].clone(); m],
        n if n == m => polys,
        n => return Err(DynamicsError::DimensionMismatch { expected: m, got: n }),
    };
    let d = polys[0].dim();
    if let Some(p) = polys.iter().find(|p| p.dim() != d) {
        return Err(DynamicsError::DimensionMismatch {
            expected: d,
            got: p.dim(),
        });
    }
    Ok(TorusOrbit {
        flow: flow.clone(),
        polys,
    })
}

impl TorusOrbit {
    pub fn dim(&self) -> usize {
        self.polys[0].dim()
    }

    pub fn torus_dim(&self) -> usize {
        self.flow.dim()
    }

    pub fn position(&self, t: &[f64]) -> Vec<f64> {
        (0..self.torus_dim())
            .map(|j| frac(self.flow.omega[j] + self.polys[j].eval_unchecked(t) * self.flow.alpha[j]))
            .collect()
    }

    /// Point-valued sampler into `[0,1)^m`, one real component per
    /// coordinate.
    pub fn sampler(&self) -> FnSampler {
        let me = self.clone();
        let m = self.torus_dim();
        FnSampler::new(
            self.dim(),
            m,
            NormKind::Sup,
            1.0,
            Arc::new(move |t: &[f64], out: &mut [Complex64]| {
                for (j, o) in out.iter_mut().enumerate() {
                    let x = frac(me.flow.omega[j] + me.polys[j].eval_unchecked(t) * me.flow.alpha[j]);
                    *o = Complex64::new(x, 0.0);
                }
            }),
        )
        .expect("sup norm")
    }

    /// `k·g(t)` in cycles, reduced coordinatewise for precision.
    fn cycles(&self, k: &[i64], t: &[f64]) -> f64 {
        (0..self.torus_dim())
            .map(|j| {
                k[j] as f64 * frac(self.flow.omega[j] + self.polys[j].eval_unchecked(t) * self.flow.alpha[j])
            })
            .sum()
    }

    /// Weyl discrepancy over a one-parameter window, with the phase
    /// linearized on each panel of width `h` and integrated exactly there.
    /// Accurate while `h²·|φ''|` is small, however fast the phase turns.
    pub fn weyl_discrepancy(&self, k: &[i64], window: &AxisBox, h: f64) -> Result<f64> {
        check_freq(k, self.torus_dim())?;
        if self.dim() != 1 || window.dim() != 1 {
            return Err(DynamicsError::InvalidInput(
                "panel rule needs a one-parameter orbit".into(),
            ));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(DynamicsError::InvalidInput("step must be positive".into()));
        }
        let (a, b) = (window.lo()[0], window.hi()[0]);
        let len = b - a;
        if len <= 0.0 {
            return Ok(0.0);
        }
        let derivs: Vec<Poly> = self.polys.iter().map(|p| p.derivative(0)).collect();
        let n = (len / h).ceil().max(1.0) as u64;
        let hh = len / n as f64;
        let sum = chunked_sum(n, 1, |s, e_, acc| {
            for i in s..e_ {
                let t = [a + (i as f64 + 0.5) * hh];
                let rate: f64 = (0..self.torus_dim())
                    .map(|j| k[j] as f64 * derivs[j].eval_unchecked(&t) * self.flow.alpha[j])
                    .sum();
                let x = std::f64::consts::PI * rate * hh;
                let sinc = if x.abs() < 1e-8 { 1.0 } else { x.sin() / x };
                acc[0] += e(self.cycles(k, &t)) * sinc;
            }
        });
        Ok((sum[0].norm() * hh / len).min(1.0))
    }
}

fn check_freq(k: &[i64], m: usize) -> Result<()> {
    if k.len() != m {
        return Err(DynamicsError::DimensionMismatch {
            expected: m,
            got: k.len(),
        });
    }
    if k.iter().all(|x| *x == 0) {
        return Err(DynamicsError::ZeroFrequency);
    }
    Ok(())
}

/// All `k ∈ Z^m` with `0 < |k|∞ ≤ kmax`, in lexicographic order.
pub fn frequencies(m: usize, kmax: i64) -> Vec<Vec<i64>> {
    let side = (2 * kmax + 1) as usize;
    (0..side.pow(m as u32))
        .map(|mut idx| {
            let mut k = vec![0i64; m];
            for j in (0..m).rev() {
                k[j] = (idx % side) as i64 - kmax;
                idx /= side;
            }
            k
        })
        .filter(|k| k.iter().any(|x| *x != 0))
        .collect()
}

/// `|(1/w) ∫_window e^{2πi k·g(t)} dt|` by midpoint quadrature, for an orbit
/// sampler whose real components are the torus coordinates.
pub fn weyl_discrepancy(orbit: &FnSampler, k: &[i64], window: &AxisBox, q: &QuadSpec) -> Result<f64> {
    Ok(weyl_discrepancies(orbit, &[k.to_vec()], window, q)?[0])
}

/// Several frequencies in one quadrature pass.
pub fn weyl_discrepancies(
    orbit: &FnSampler,
    ks: &[Vec<i64>],
    window: &AxisBox,
    q: &QuadSpec,
) -> Result<Vec<f64>> {
    for k in ks {
        check_freq(k, orbit.width())?;
    }
    let inner = orbit.clone();
    let ks2: Vec<Vec<i64>> = ks.to_vec();
    let m = orbit.width();
    let chars = FnSampler::new(
        orbit.dim(),
        ks.len(),
        NormKind::Sup,
        1.0,
        Arc::new(move |t: &[f64], out: &mut [Complex64]| {
            let mut g = [Complex64::new(0.0, 0.0); 16];
            let mut big = Vec::new();
            let g: &mut [Complex64] = if m <= 16 {
                &mut g[..m]
            } else {
                big.resize(m, Complex64::new(0.0, 0.0));
                &mut big
            };
            inner.eval_into(t, g);
            for (o, k) in out.iter_mut().zip(&ks2) {
                let c: f64 = k.iter().zip(g.iter()).map(|(k, x)| *k as f64 * x.re).sum();
                *o = e(c);
            }
        }),
    )?;
    let avg = continuous_average(&chars, window, q)?;
    Ok(avg.value.components().iter().map(|z| z.norm().min(1.0)).collect())
}

// ------------------------------------------------------------------ Heisenberg

/// `[[1, x, z], [0, 1, y], [0, 0, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Heis {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Heis {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn mul(&self, o: &Heis) -> Heis {
        Heis {
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z + self.x * o.y,
        }
    }

    pub fn inverse(&self) -> Heis {
        Heis {
            x: -self.x,
            y: -self.y,
            z: -self.z + self.x * self.y,
        }
    }

    /// `u^s` along the one-parameter subgroup through `u`.
    pub fn pow(&self, s: f64) -> Heis {
        Heis {
            x: s * self.x,
            y: s * self.y,
            z: s * (self.z - self.x * self.y / 2.0) + s * s * self.x * self.y / 2.0,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Representative of the coset `Γg` in the fundamental domain `[0,1)³`,
/// where `Γ` is the integer Heisenberg group acting on the left.
pub fn heisenberg_reduce(g: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = g;
    [frac(x), frac(y), frac(z - x.floor() * y)]
}

/// `Γg ↦ Γ g u^s` on the Heisenberg nilmanifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergFlow {
    pub generator: Heis,
    pub base: Heis,
}

impl HeisenbergFlow {
    pub fn new(generator: Heis, base: Heis) -> Self {
        let b = heisenberg_reduce(base.as_array());
        Self {
            generator,
            base: Heis::new(b[0], b[1], b[2]),
        }
    }

    pub fn act(&self, s: f64, w: &[f64], out: &mut [f64]) {
        let g = Heis::new(w[0], w[1], w[2]).mul(&self.generator.pow(s));
        out.copy_from_slice(&heisenberg_reduce(g.as_array()));
    }

    pub fn point_at(&self, s: f64) -> [f64; 3] {
        let mut out = [0.0; 3];
        self.act(s, &self.base.as_array(), &mut out);
        out
    }

    /// `t ↦ Γ·base·u^{p(t)}` as a three-component sampler.
    pub fn orbit_sampler(&self, p: Poly) -> FnSampler {
        let me = *self;
        FnSampler::new(
            p.dim(),
            3,
            NormKind::Sup,
            1.0,
            Arc::new(move |t: &[f64], out: &mut [Complex64]| {
                let g = me.point_at(p.eval_unchecked(t));
                for (o, v) in out.iter_mut().zip(g) {
                    *o = Complex64::new(v, 0.0);
                }
            }),
        )
        .expect("sup norm")
    }

    /// Projection of the orbit to the base torus `(x, y) mod 1`.
    pub fn base_orbit_sampler(&self, p: Poly) -> FnSampler {
        let me = *self;
        FnSampler::new(
            p.dim(),
            2,
            NormKind::Sup,
            1.0,
            Arc::new(move |t: &[f64], out: &mut [Complex64]| {
                let g = me.point_at(p.eval_unchecked(t));
                out[0] = Complex64::new(g[0], 0.0);
                out[1] = Complex64::new(g[1], 0.0);
            }),
        )
        .expect("sup norm")
    }
}

// ------------------------------------------------------------ phase space

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Flow {
    Torus(TorusFlow),
    Heisenberg(HeisenbergFlow),
}

impl Flow {
    pub fn space_dim(&self) -> usize {
        match self {
            Flow::Torus(f) => f.dim(),
            Flow::Heisenberg(_) => 3,
        }
    }

    pub fn act(&self, s: f64, w: &[f64], out: &mut [f64]) {
        match self {
            Flow::Torus(f) => f.act(s, w, out),
            Flow::Heisenberg(f) => f.act(s, w, out),
        }
    }

    fn same_space(&self, o: &Flow) -> bool {
        match (self, o) {
            (Flow::Torus(a), Flow::Torus(b)) => a.dim() == b.dim(),
            (Flow::Heisenberg(_), Flow::Heisenberg(_)) => true,
            _ => false,
        }
    }

    pub fn default_grid(&self) -> usize {
        match self {
            Flow::Torus(_) => 1 << 10,
            Flow::Heisenberg(_) => 1 << 6,
        }
    }
}

/// Midpoint grid on `[0,1)^m` with `per_axis^m` points.
pub fn phase_grid(m: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let total = per_axis.pow(m as u32);
    (0..total)
        .map(|mut idx| {
            let mut p = vec![0.0; m];
            for j in (0..m).rev() {
                p[j] = ((idx % per_axis) as f64 + 0.5) / per_axis as f64;
                idx /= per_axis;
            }
            p
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub freq: Vec<i64>,
    pub coef: Complex64,
}

pub type ObservableFn = dyn Fn(&[f64]) -> Complex64 + Send + Sync;

/// A bounded function on the phase space.
#[derive(Clone)]
pub enum Observable {
    /// Finite sum `Σ c_k e^{2πi k·ω}`.
    Trig(Vec<TrigTerm>),
    Func { f: Arc<ObservableFn>, bound: f64 },
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Trig(t) => write!(f, "Trig({t:?})"),
            Observable::Func { bound, .. } => write!(f, "Func {{ bound: {bound} }}"),
        }
    }
}

impl Observable {
    /// `cos(2π k·ω)`.
    pub fn cos(k: Vec<i64>) -> Self {
        let neg: Vec<i64> = k.iter().map(|x| -x).collect();
        Observable::Trig(vec![
            TrigTerm {
                freq: k,
                coef: Complex64::new(0.5, 0.0),
            },
            TrigTerm {
                freq: neg,
                coef: Complex64::new(0.5, 0.0),
            },
        ])
    }

    /// `e^{2πi k·ω}`.
    pub fn character(k: Vec<i64>) -> Self {
        Observable::Trig(vec![TrigTerm {
            freq: k,
            coef: Complex64::new(1.0, 0.0),
        }])
    }

    pub fn constant(c: f64, m: usize) -> Self {
        Observable::Trig(vec![TrigTerm {
            freq: vec![0; m],
            coef: Complex64::new(c, 0.0),
        }])
    }

    pub fn func(bound: f64, f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> Self {
        Observable::Func {
            f: Arc::new(f),
            bound,
        }
    }

    pub fn bound(&self) -> f64 {
        match self {
            Observable::Trig(t) => t.iter().map(|t| t.coef.norm()).sum(),
            Observable::Func { bound, .. } => *bound,
        }
    }

    pub fn eval(&self, w: &[f64]) -> Complex64 {
        match self {
            Observable::Trig(t) => t
                .iter()
                .map(|t| {
                    let c: f64 = t.freq.iter().zip(w).map(|(k, x)| *k as f64 * x).sum();
                    t.coef * e(c)
                })
                .sum(),
            Observable::Func { f, .. } => f(w),
        }
    }
}

/// One factor `T_i^{p_i(x)} f_i` of a multiple average.
#[derive(Debug, Clone)]
pub struct Factor {
    pub flow: Flow,
    pub poly: Poly,
    pub obs: Observable,
}

/// `x ↦ [ω ↦ Π_i f_i(T_i^{p_i(x)} ω)]` embedded on a phase-space grid.
#[derive(Debug, Clone)]
pub struct MultipleAverage {
    factors: Vec<Factor>,
    per_axis: usize,
}

/// Averages of a multiple average expressed through scalar coefficient
/// functions: `F(x) = Σ_j c_j(x) · B_j` with fixed grid vectors `B_j`.
#[derive(Debug, Clone)]
pub struct LinearImage {
    pub coeffs: FnSampler,
    basis: Arc<Vec<Vec<Complex64>>>,
    weights: Arc<[f64]>,
}

impl LinearImage {
    pub fn expand(&self, c: &VectorValue) -> VectorValue {
        let n = self.weights.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (cj, bj) in c.components().iter().zip(self.basis.iter()) {
            for (o, b) in out.iter_mut().zip(bj) {
                *o += cj * b;
            }
        }
        VectorValue::new(out, NormKind::L1Weighted(self.weights.clone())).expect("grid width")
    }

    pub fn width(&self) -> usize {
        self.weights.len()
    }
}

pub fn multiple_average_sampler(factors: Vec<Factor>, per_axis: Option<usize>) -> Result<MultipleAverage> {
    let first = factors
        .first()
        .ok_or_else(|| DynamicsError::InvalidInput("no factors".into()))?;
    let d = first.poly.dim();
    for f in &factors {
        if !f.flow.same_space(&first.flow) {
            return Err(DynamicsError::InvalidInput("factors act on different spaces".into()));
        }
        if f.poly.dim() != d {
            return Err(DynamicsError::DimensionMismatch {
                expected: d,
                got: f.poly.dim(),
            });
        }
        if let Observable::Trig(ts) = &f.obs {
            if let Some(t) = ts.iter().find(|t| t.freq.len() != f.flow.space_dim()) {
                return Err(DynamicsError::DimensionMismatch {
                    expected: f.flow.space_dim(),
                    got: t.freq.len(),
                });
            }
        }
    }
    let per_axis = per_axis.unwrap_or_else(|| first.flow.default_grid());
    Ok(MultipleAverage { factors, per_axis })
}

impl MultipleAverage {
    pub fn dim(&self) -> usize {
        self.factors[0].poly.dim()
    }

    pub fn space_dim(&self) -> usize {
        self.factors[0].flow.space_dim()
    }

    pub fn grid(&self) -> Vec<Vec<f64>> {
        phase_grid(self.space_dim(), self.per_axis)
    }

    pub fn bound(&self) -> f64 {
        self.factors.iter().map(|f| f.obs.bound()).product()
    }

    /// The grid-embedded sampler, evaluated pointwise on the grid.
    pub fn sampler(&self) -> FnSampler {
        let grid = Arc::new(self.grid());
        let weights = uniform_weights(grid.len());
        let factors = self.factors.clone();
        let m = self.space_dim();
        FnSampler::new(
            self.dim(),
            grid.len(),
            NormKind::L1Weighted(weights),
            self.bound(),
            Arc::new(move |x: &[f64], out: &mut [Complex64]| {
                let s: Vec<f64> = factors.iter().map(|f| f.poly.eval_unchecked(x)).collect();
                let mut moved = vec![0.0; m];
                for (o, w) in out.iter_mut().zip(grid.iter()) {
                    let mut prod = Complex64::new(1.0, 0.0);
                    for (f, si) in factors.iter().zip(&s) {
                        f.flow.act(*si, w, &mut moved);
                        prod *= f.obs.eval(&moved);
                    }
                    *o = prod;
                }
            }),
        )
        .expect("weights match grid")
    }

    /// Coefficient form, available for torus flows with trigonometric
    /// observables. Averages of `coeffs` mapped by `expand` equal averages of
    /// [`MultipleAverage::sampler`].
    pub fn linear_image(&self) -> Option<LinearImage> {
        let mut term_lists = Vec::new();
        let mut alphas = Vec::new();
        for f in &self.factors {
            match (&f.flow, &f.obs) {
                (Flow::Torus(t), Observable::Trig(ts)) => {
                    term_lists.push(ts.clone());
                    alphas.push(t.alpha.clone());
                }
                _ => return None,
            }
        }
        let m = self.space_dim();
        // every choice of one term per factor
        let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
        for ts in &term_lists {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    (0..ts.len()).map(move |i| {
                        let mut c = c.clone();
                        c.push(i);
                        c
                    })
                })
                .collect();
        }
        let grid = self.grid();
        let weights = uniform_weights(grid.len());
        let mut basis = Vec::with_capacity(combos.len());
        // (coefficient, per-factor k_i·α_i) for each combination
        let mut coef_terms: Vec<(Complex64, Vec<f64>)> = Vec::with_capacity(combos.len());
        for c in &combos {
            let mut total = vec![0i64; m];
            let mut coef = Complex64::new(1.0, 0.0);
            let mut rates = Vec::with_capacity(c.len());
            for (i, &j) in c.iter().enumerate() {
                let t = &term_lists[i][j];
                coef *= t.coef;
                for (tot, k) in total.iter_mut().zip(&t.freq) {
                    *tot += k;
                }
                rates.push(t.freq.iter().zip(&alphas[i]).map(|(k, a)| *k as f64 * a).sum());
            }
            basis.push(
                grid.iter()
                    .map(|w| e(total.iter().zip(w).map(|(k, x)| *k as f64 * x).sum()))
                    .collect::<Vec<_>>(),
            );
            coef_terms.push((coef, rates));
        }
        let polys: Vec<Poly> = self.factors.iter().map(|f| f.poly.clone()).collect();
        let bound: f64 = coef_terms.iter().map(|(c, _)| c.norm()).fold(0.0, f64::max);
        let coeffs = FnSampler::new(
            self.dim(),
            coef_terms.len(),
            NormKind::Sup,
            bound,
            Arc::new(move |x: &[f64], out: &mut [Complex64]| {
                let s: Vec<f64> = polys.iter().map(|p| p.eval_unchecked(x)).collect();
                for (o, (c, rates)) in out.iter_mut().zip(&coef_terms) {
                    let cyc: f64 = rates.iter().zip(&s).map(|(r, si)| frac(r * si)).sum();
                    *o = c * e(cyc);
                }
            }),
        )
        .expect("sup norm");
        Some(LinearImage {
            coeffs,
            basis: Arc::new(basis),
            weights,
        })
    }
}

/// `x ↦ μ(A ∩ ⋂_i (A − p_i(x)·α_i))` on the torus, counted on a
/// `per_axis^m` midpoint grid.
pub fn intersection_measure_sampler(
    flows: &[TorusFlow],
    polys: &[Poly],
    a: &DensitySet,
    per_axis: usize,
) -> Result<FnSampler> {
    if flows.len() != polys.len() || flows.is_empty() {
        return Err(DynamicsError::InvalidInput(
            "need one flow per polynomial".into(),
        ));
    }
    let m = flows[0].dim();
    if a.dim() != m {
        return Err(DynamicsError::DimensionMismatch {
            expected: m,
            got: a.dim(),
        });
    }
    for (i, p) in polys.iter().enumerate() {
        if flows[i].dim() != m {
            return Err(DynamicsError::DimensionMismatch {
                expected: m,
                got: flows[i].dim(),
            });
        }
        if p.constant_term() != 0.0 {
            return Err(DynamicsError::NonZeroAtOrigin(i));
        }
    }
    let grid: Vec<Vec<f64>> = phase_grid(m, per_axis)
        .into_iter()
        .filter(|w| a.contains(w))
        .collect();
    if grid.is_empty() {
        return Err(DynamicsError::NullSet);
    }
    let total = per_axis.pow(m as u32) as f64;
    let flows = flows.to_vec();
    let polys = polys.to_vec();
    let a = a.clone();
    let d = polys[0].dim();
    Ok(FnSampler::real(d, 1.0, move |x| {
        let shifts: Vec<Vec<f64>> = flows
            .iter()
            .zip(&polys)
            .map(|(f, p)| {
                let s = p.eval_unchecked(x);
                f.alpha.iter().map(|al| frac(s * al)).collect()
            })
            .collect();
        let mut moved = vec![0.0; m];
        let hits = grid
            .iter()
            .filter(|w| {
                shifts.iter().all(|sh| {
                    for j in 0..m {
                        moved[j] = frac(w[j] + sh[j]);
                    }
                    a.contains(&moved)
                })
            })
            .count();
        hits as f64 / total
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::SQRT_2;

    #[test]
    fn poly_examples() {
        assert_eq!(Poly::monomial(1.0, 2).eval(&[3.0]).unwrap(), 9.0);
        let p = Poly::new(
            2,
            vec![
                PolyTerm { coef: 1.0, exp: vec![1, 1] },
                PolyTerm { coef: 2.0, exp: vec![1, 0] },
            ],
        )
        .unwrap();
        assert_eq!(p.eval(&[1.0, 2.0]).unwrap(), 4.0);
        assert_eq!(Poly::linear(&[SQRT_2]).eval(&[1.0]).unwrap(), SQRT_2);
        assert!(p.eval(&[1.0]).is_err());
        assert_eq!(p.derivative(0).eval(&[5.0, 2.0]).unwrap(), 4.0);
        assert_eq!(p.degree(), 2);
        let js = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Poly>(&js).unwrap(), p);
    }

    #[test]
    fn gp_examples() {
        let s2 = || GpNode::poly(Poly::linear(&[SQRT_2]));
        let v = GpNode::floor(s2()).eval(&[1.0], 1e-9);
        assert_eq!((v.value, v.near_discontinuity), (1.0, false));
        let g = GpNode::mul(GpNode::frac(GpNode::var(0)), GpNode::frac(s2()));
        let v = g.eval(&[0.0], 1e-9);
        assert_eq!((v.value, v.near_discontinuity), (0.0, true));
        let g = GpNode::floor(GpNode::mul(GpNode::constant(3.0), GpNode::frac(s2())));
        assert_eq!(g.eval(&[10.0], 1e-9).value, 0.0);
    }

    #[test]
    fn gp_identity_holds_everywhere() {
        let inner = GpNode::add(
            GpNode::poly(Poly::univariate(&[0.0, 0.3, SQRT_2])),
            GpNode::mul(GpNode::floor(GpNode::var(0)), GpNode::constant(0.7)),
        );
        for i in 0..2000 {
            let t = [i as f64 * 0.05 - 20.0];
            let g = inner.eval(&t, 1e-9).value;
            let f = GpNode::frac(inner.clone()).eval(&t, 1e-9).value;
            let fl = GpNode::floor(inner.clone()).eval(&t, 1e-9).value;
            assert!((0.0..1.0).contains(&f));
            assert!((f + fl - g).abs() < 1e-12);
        }
    }

    #[test]
    fn orbit_examples() {
        let o = torus_orbit(&TorusFlow::rotation(vec![SQRT_2]), vec![Poly::monomial(1.0, 1)]).unwrap();
        assert!((o.position(&[1.0])[0] - 0.41421356237309515).abs() < 1e-15);
        let o = torus_orbit(&TorusFlow::rotation(vec![SQRT_2]), vec![Poly::monomial(1.0, 2)]).unwrap();
        assert!((o.position(&[10.0])[0] - 0.42135623730950).abs() < 1e-12);
        let f = TorusFlow::new(vec![SQRT_2], vec![0.3]).unwrap();
        let o = torus_orbit(&f, vec![Poly::zero(1)]).unwrap();
        assert_eq!(o.position(&[123.0]), vec![0.3]);
    }

    #[test]
    fn heisenberg_reduce_examples() {
        assert_eq!(heisenberg_reduce([0.3, 0.7, 0.2]), [0.3, 0.7, 0.2]);
        let r = heisenberg_reduce([1.3, 0.7, 0.2]);
        let want = [0.3, 0.7, 0.5];
        for j in 0..3 {
            assert!((r[j] - want[j]).abs() < 1e-12);
        }
        assert_eq!(heisenberg_reduce([2.0, 3.0, 5.0]), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn heisenberg_lattice_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let g = Heis::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let r = heisenberg_reduce(g.as_array());
            assert_eq!(heisenberg_reduce(r), r);
            let gamma = Heis::new(
                rng.gen_range(-4..=4) as f64,
                rng.gen_range(-4..=4) as f64,
                rng.gen_range(-4..=4) as f64,
            );
            let r2 = heisenberg_reduce(gamma.mul(&g).as_array());
            for j in 0..3 {
                let d = (r[j] - r2[j]).abs();
                assert!(d.min(1.0 - d) < 1e-9, "{r:?} {r2:?}");
            }
        }
    }

    #[test]
    fn heisenberg_powers() {
        let u = Heis::new(0.3, -1.2, 0.7);
        let u3 = u.mul(&u).mul(&u);
        let p = u.pow(3.0);
        assert!((u3.x - p.x).abs() < 1e-12 && (u3.y - p.y).abs() < 1e-12 && (u3.z - p.z).abs() < 1e-12);
        let a = u.pow(0.4).mul(&u.pow(1.1));
        assert!((a.z - u.pow(1.5).z).abs() < 1e-12);
        let i = u.mul(&u.inverse());
        assert!(i.x.abs() < 1e-15 && i.y.abs() < 1e-15 && i.z.abs() < 1e-15);
    }

    #[test]
    fn weyl_linear_orbit_matches_closed_form() {
        let o = torus_orbit(&TorusFlow::rotation(vec![SQRT_2]), vec![Poly::monomial(1.0, 1)]).unwrap();
        let w = AxisBox::closed(vec![0.0], vec![1e4]).unwrap();
        let exact = |a: f64, b: f64| {
            (Complex64::from_polar(1.0, TAU * SQRT_2 * b) - Complex64::from_polar(1.0, TAU * SQRT_2 * a)).norm()
                / (TAU * SQRT_2 * (b - a))
        };
        let mid = weyl_discrepancy(&o.sampler(), &[1], &w, &QuadSpec::new(1e-3)).unwrap();
        let panel = o.weyl_discrepancy(&[1], &w, 1e-1).unwrap();
        let want = exact(0.0, 1e4);
        assert!(mid < 1e-3 && (mid - want).abs() < 1e-6, "{mid} {want}");
        assert!((panel - want).abs() < 1e-9, "{panel} {want}");
    }

    #[test]
    fn weyl_constant_orbit_is_one() {
        let o = torus_orbit(&TorusFlow::new(vec![1.0], vec![0.25]).unwrap(), vec![Poly::zero(1)]).unwrap();
        let w = AxisBox::closed(vec![0.0], vec![10.0]).unwrap();
        let d = weyl_discrepancy(&o.sampler(), &[1], &w, &QuadSpec::new(0.1)).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert!((o.weyl_discrepancy(&[3], &w, 0.1).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            weyl_discrepancy(&o.sampler(), &[0], &w, &QuadSpec::new(0.1)),
            Err(DynamicsError::ZeroFrequency)
        ));
    }

    #[test]
    fn panel_rule_agrees_with_fine_midpoint() {
        let f = TorusFlow::rotation(vec![SQRT_2, 3f64.sqrt()]);
        let o = torus_orbit(&f, vec![Poly::monomial(1.0, 1), Poly::monomial(1.0, 2)]).unwrap();
        let w = AxisBox::closed(vec![20.0], vec![40.0]).unwrap();
        let mid = weyl_discrepancy(&o.sampler(), &[1, 1], &w, &QuadSpec::new(1e-5)).unwrap();
        let panel = o.weyl_discrepancy(&[1, 1], &w, 1e-2).unwrap();
        assert!((mid - panel).abs() < 1e-4, "{mid} {panel}");
    }

    #[test]
    fn frequency_enumeration() {
        assert_eq!(frequencies(2, 3).len(), 48);
        assert_eq!(frequencies(1, 2), vec![vec![-2], vec![-1], vec![1], vec![2]]);
    }

    #[test]
    fn constant_multiple_average() {
        let f = Factor {
            flow: Flow::Torus(TorusFlow::rotation(vec![SQRT_2])),
            poly: Poly::monomial(1.0, 1),
            obs: Observable::constant(1.0, 1),
        };
        let ma = multiple_average_sampler(vec![f], Some(16)).unwrap();
        let v = ma.sampler().evaluate(&[3.7]).unwrap();
        assert!(v.components().iter().all(|z| (*z - 1.0).norm() < 1e-12));
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_image_reproduces_sampler() {
        let mk = |k: u32| Factor {
            flow: Flow::Torus(TorusFlow::rotation(vec![SQRT_2])),
            poly: Poly::monomial(k as f64, 1),
            obs: Observable::cos(vec![1]),
        };
        let ma = multiple_average_sampler(vec![mk(1), mk(2)], Some(64)).unwrap();
        let li = ma.linear_image().unwrap();
        let s = ma.sampler();
        for x in [0.0, 0.37, 12.5, -3.1] {
            let direct = s.evaluate(&[x]).unwrap();
            let via = li.expand(&li.coeffs.evaluate(&[x]).unwrap());
            assert!(direct.distance(&via).unwrap() < 1e-12);
            assert!(direct.norm() <= ma.bound() + 1e-12);
        }
    }

    #[test]
    fn heisenberg_multiple_average_is_bounded() {
        let u = Heis::new(SQRT_2, 3f64.sqrt(), 0.1);
        let f = |k: u32| Factor {
            flow: Flow::Heisenberg(HeisenbergFlow::new(u, Heis::new(0.0, 0.0, 0.0))),
            poly: Poly::monomial(k as f64, 1),
            obs: Observable::func(1.0, |w| Complex64::from_polar(1.0, TAU * w[2])),
        };
        let ma = multiple_average_sampler(vec![f(1), f(2)], Some(8)).unwrap();
        assert!(ma.linear_image().is_none());
        let v = ma.sampler().evaluate(&[0.7]).unwrap();
        assert!(v.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn intersection_measure_single_shift() {
        let a = DensitySet::periodic(vec![1.0], vec![0.0], vec![0.5]);
        let f = TorusFlow::rotation(vec![SQRT_2]);
        let s = intersection_measure_sampler(&[f], &[Poly::monomial(1.0, 1)], &a, 1024).unwrap();
        assert_eq!(s.evaluate(&[0.0]).unwrap().components()[0].re, 0.5);
        for x in [0.3, 1.7, 11.1] {
            let u = frac(x * SQRT_2);
            let d = u.min(1.0 - u);
            let want = (0.5 - d).max(0.0);
            let got = s.evaluate(&[x]).unwrap().components()[0].re;
            assert!((got - want).abs() < 2.0 / 1024.0, "{got} {want}");
        }
        let bad = intersection_measure_sampler(
            &[TorusFlow::rotation(vec![SQRT_2])],
            &[Poly::univariate(&[1.0, 1.0])],
            &a,
            64,
        );
        assert!(matches!(bad, Err(DynamicsError::NonZeroAtOrigin(0))));
        let empty = DensitySet::new(1, |_| false);
        assert!(matches!(
            intersection_measure_sampler(&[TorusFlow::rotation(vec![SQRT_2])], &[Poly::monomial(1.0, 1)], &empty, 64),
            Err(DynamicsError::NullSet)
        ));
    }

    #[test]
    fn product_uniform_distribution() {
        assert_eq!(product_uniform_cdf(0.0), 0.0);
        assert_eq!(product_uniform_cdf(1.0), 1.0);
        let g = GpNode::mul(
            GpNode::frac(GpNode::poly(Poly::linear(&[SQRT_2]))),
            GpNode::frac(GpNode::poly(Poly::linear(&[3f64.sqrt()]))),
        );
        let r = gp_distribution(&g, 0.1, 1e4, 1e-6, product_uniform_cdf, (0.0, 1.0, 10)).unwrap();
        assert_eq!(r.samples, 100_000);
        assert!(r.ks < 0.02, "{}", r.ks);
        let mass: f64 = r.histogram.iter().map(|b| b.empirical).sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }
}
