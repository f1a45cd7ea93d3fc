//! Vector values in `C^m` with a declared norm, plus function and sequence
//! samplers built on evaluation callbacks.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValueError {
    #[error("weight vector has length {weights}, components have length {components}")]
    WeightLength { weights: usize, components: usize },
    #[error("negative or non-finite weight at index {0}")]
    BadWeight(usize),
    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("imaginary part {0:e} exceeds tolerance")]
    NotReal(f64),
    #[error("sample norm {norm} exceeds declared bound {bound} at {at:?}")]
    BoundViolated { norm: f64, bound: f64, at: Vec<f64> },
    #[error("non-finite sample at {0:?}")]
    NonFinite(Vec<f64>),
    #[error("a separable product needs at least one factor")]
    EmptyProduct,
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "weights", rename_all = "snake_case")]
pub enum NormKind {
    Sup,
    L1Weighted(Arc<[f64]>),
    L2,
}

impl fmt::Debug for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Sup => write!(f, "Sup"),
            NormKind::L2 => write!(f, "L2"),
            NormKind::L1Weighted(w) => write!(f, "L1Weighted(len={})", w.len()),
        }
    }
}

impl NormKind {
    fn check_width(&self, width: usize) -> Result<(), ValueError> {
        if let NormKind::L1Weighted(w) = self {
            if w.len() != width {
                return Err(ValueError::WeightLength {
                    weights: w.len(),
                    components: width,
                });
            }
            if let Some(i) = w.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(ValueError::BadWeight(i));
            }
        }
        Ok(())
    }

    /// The norm of a raw component slice. Widths are assumed to match.
    pub fn apply(&self, c: &[Complex64]) -> f64 {
        match self {
            NormKind::Sup => c.iter().map(|z| z.norm()).fold(0.0, f64::max),
            NormKind::L2 => c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            NormKind::L1Weighted(w) => c.iter().zip(w.iter()).map(|(z, w)| w * z.norm()).sum(),
        }
    }
}

/// An element of `C^m` equipped with a norm.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorValue {
    components: Vec<Complex64>,
    norm_kind: NormKind,
}

impl fmt::Debug for VectorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.len() <= 4 {
            write!(f, "VectorValue({:?}, {:?})", self.components, self.norm_kind)
        } else {
            write!(
                f,
                "VectorValue(width={}, norm={:.6e}, {:?})",
                self.components.len(),
                self.norm(),
                self.norm_kind
            )
        }
    }
}

impl VectorValue {
    pub fn new(components: Vec<Complex64>, norm_kind: NormKind) -> Result<Self, ValueError> {
        norm_kind.check_width(components.len())?;
        Ok(Self {
            components,
            norm_kind,
        })
    }

    /// A one-component real value with the sup norm (absolute value).
    pub fn scalar(x: f64) -> Self {
        Self::complex(Complex64::new(x, 0.0))
    }

    pub fn complex(z: Complex64) -> Self {
        Self {
            components: vec![z],
            norm_kind: NormKind::Sup,
        }
    }

    pub fn zeros(width: usize, norm_kind: NormKind) -> Result<Self, ValueError> {
        Self::new(vec![Complex64::new(0.0, 0.0); width], norm_kind)
    }

    pub(crate) fn from_parts_unchecked(components: Vec<Complex64>, norm_kind: NormKind) -> Self {
        debug_assert!(norm_kind.check_width(components.len()).is_ok());
        Self {
            components,
            norm_kind,
        }
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn width(&self) -> usize {
        self.components.len()
    }

    pub fn norm_kind(&self) -> &NormKind {
        &self.norm_kind
    }

    pub fn norm(&self) -> f64 {
        self.norm_kind.apply(&self.components)
    }

    /// `‖self − other‖` in the norm of `self`.
    pub fn distance(&self, other: &VectorValue) -> Result<f64, ValueError> {
        self.check_same_width(other)?;
        let diff: Vec<Complex64> = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a - b)
            .collect();
        Ok(self.norm_kind.apply(&diff))
    }

    pub fn add(&self, other: &VectorValue) -> Result<VectorValue, ValueError> {
        self.check_same_width(other)?;
        Ok(Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
            norm_kind: self.norm_kind.clone(),
        })
    }

    pub fn sub(&self, other: &VectorValue) -> Result<VectorValue, ValueError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> VectorValue {
        Self {
            components: self.components.iter().map(|z| z * c).collect(),
            norm_kind: self.norm_kind.clone(),
        }
    }

    pub fn scale_real(&self, c: f64) -> VectorValue {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Mean of equally weighted values.
    pub fn mean(values: &[VectorValue]) -> Result<VectorValue, ValueError> {
        let first = values.first().ok_or(ValueError::WidthMismatch {
            expected: 1,
            got: 0,
        })?;
        let mut acc = vec![Complex64::new(0.0, 0.0); first.width()];
        for v in values {
            first.check_same_width(v)?;
            for (a, z) in acc.iter_mut().zip(&v.components) {
                *a += z;
            }
        }
        let inv = 1.0 / values.len() as f64;
        for a in &mut acc {
            *a *= inv;
        }
        Ok(Self {
            components: acc,
            norm_kind: first.norm_kind.clone(),
        })
    }

    /// The real part of a one-component value, rejecting values whose
    /// imaginary part exceeds `tol`.
    pub fn real_part(&self, tol: f64) -> Result<f64, ValueError> {
        if self.width() != 1 {
            return Err(ValueError::WidthMismatch {
                expected: 1,
                got: self.width(),
            });
        }
        let z = self.components[0];
        if z.im.abs() > tol {
            return Err(ValueError::NotReal(z.im));
        }
        Ok(z.re)
    }

    /// Maximum pairwise distance, 0 for fewer than two values.
    pub fn max_pairwise_distance(values: &[&VectorValue]) -> Result<f64, ValueError> {
        let mut worst: f64 = 0.0;
        for (i, a) in values.iter().enumerate() {
            for b in &values[i + 1..] {
                worst = worst.max(a.distance(b)?);
            }
        }
        Ok(worst)
    }

    fn check_same_width(&self, other: &VectorValue) -> Result<(), ValueError> {
        if self.width() != other.width() {
            return Err(ValueError::WidthMismatch {
                expected: self.width(),
                got: other.width(),
            });
        }
        Ok(())
    }
}

/// Embeds samples of a function on a probability grid as an `L¹`-normed value.
pub fn grid_embed(samples: &[Complex64], weights: &[f64]) -> Result<VectorValue, ValueError> {
    if samples.len() != weights.len() {
        return Err(ValueError::WeightLength {
            weights: weights.len(),
            components: samples.len(),
        });
    }
    if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(ValueError::BadWeight(i));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(ValueError::WeightSum(total));
    }
    VectorValue::new(samples.to_vec(), NormKind::L1Weighted(weights.into()))
}

/// Uniform probability weights on `n` points.
pub fn uniform_weights(n: usize) -> Arc<[f64]> {
    vec![1.0 / n as f64; n].into()
}

pub type FnEval = dyn Fn(&[f64], &mut [Complex64]) + Send + Sync;
pub type SeqEval = dyn Fn(&[i64], &mut [Complex64]) + Send + Sync;

/// A bounded function `R^d → C^m` given by an evaluation callback.
///
/// A sampler built with [`FnSampler::product`] remembers its one-dimensional
/// scalar factors, which lets box averages factor into products of
/// one-dimensional averages.
#[derive(Clone)]
pub struct FnSampler {
    dim: usize,
    width: usize,
    norm_kind: NormKind,
    bound: f64,
    eval: Arc<FnEval>,
    factors: Option<Arc<[FnSampler]>>,
    derivative_bound: Option<f64>,
}

impl fmt::Debug for FnSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnSampler")
            .field("dim", &self.dim)
            .field("width", &self.width)
            .field("bound", &self.bound)
            .field("separable", &self.factors.is_some())
            .finish()
    }
}

impl FnSampler {
    pub fn new(
        dim: usize,
        width: usize,
        norm_kind: NormKind,
        bound: f64,
        eval: Arc<FnEval>,
    ) -> Result<Self, ValueError> {
        norm_kind.check_width(width)?;
        Ok(Self {
            dim,
            width,
            norm_kind,
            bound,
            eval,
            factors: None,
            derivative_bound: None,
        })
    }

    pub fn real(dim: usize, bound: f64, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            dim,
            width: 1,
            norm_kind: NormKind::Sup,
            bound,
            eval: Arc::new(move |x, out| out[0] = Complex64::new(f(x), 0.0)),
            factors: None,
            derivative_bound: None,
        }
    }

    pub fn complex(
        dim: usize,
        bound: f64,
        f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            width: 1,
            norm_kind: NormKind::Sup,
            bound,
            eval: Arc::new(move |x, out| out[0] = f(x)),
            factors: None,
            derivative_bound: None,
        }
    }

    pub fn constant(dim: usize, value: VectorValue) -> Self {
        let bound = value.norm();
        let c = value.components.clone();
        Self {
            dim,
            width: value.width(),
            norm_kind: value.norm_kind.clone(),
            bound,
            eval: Arc::new(move |_, out| out.copy_from_slice(&c)),
            factors: None,
            derivative_bound: Some(0.0),
        }
    }

    /// `f(x) = Π_i f_i(x_i)` for one-dimensional scalar factors.
    pub fn product(factors: Vec<FnSampler>) -> Result<Self, ValueError> {
        if factors.is_empty() {
            return Err(ValueError::EmptyProduct);
        }
        for f in &factors {
            if f.dim != 1 {
                return Err(ValueError::DimensionMismatch {
                    expected: 1,
                    got: f.dim,
                });
            }
            if f.width != 1 {
                return Err(ValueError::WidthMismatch {
                    expected: 1,
                    got: f.width,
                });
            }
        }
        let factors: Arc<[FnSampler]> = factors.into();
        let bound = factors.iter().map(|f| f.bound).product();
        let fs = factors.clone();
        let eval = Arc::new(move |x: &[f64], out: &mut [Complex64]| {
            let mut acc = Complex64::new(1.0, 0.0);
            let mut buf = [Complex64::new(0.0, 0.0)];
            for (f, xi) in fs.iter().zip(x) {
                (f.eval)(std::slice::from_ref(xi), &mut buf);
                acc *= buf[0];
            }
            out[0] = acc;
        });
        Ok(Self {
            dim: factors.len(),
            width: 1,
            norm_kind: NormKind::Sup,
            bound,
            eval,
            factors: Some(factors),
            derivative_bound: None,
        })
    }

    pub fn with_derivative_bound(mut self, d: f64) -> Self {
        self.derivative_bound = Some(d);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn norm_kind(&self) -> &NormKind {
        &self.norm_kind
    }

    pub fn factors(&self) -> Option<&[FnSampler]> {
        self.factors.as_deref()
    }

    pub fn derivative_bound(&self) -> Option<f64> {
        self.derivative_bound
    }

    /// Evaluates into a caller-provided buffer of length `width`.
    #[inline]
    pub fn eval_into(&self, x: &[f64], out: &mut [Complex64]) {
        (self.eval)(x, out)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<VectorValue, ValueError> {
        if x.len() != self.dim {
            return Err(ValueError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.width];
        (self.eval)(x, &mut out);
        if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ValueError::NonFinite(x.to_vec()));
        }
        Ok(VectorValue::from_parts_unchecked(out, self.norm_kind.clone()))
    }

    pub fn zero_value(&self) -> VectorValue {
        VectorValue::from_parts_unchecked(
            vec![Complex64::new(0.0, 0.0); self.width],
            self.norm_kind.clone(),
        )
    }

    /// Checks `‖f(x)‖ ≤ bound` at each point.
    pub fn spot_check_bound<'a>(
        &self,
        points: impl IntoIterator<Item = &'a [f64]>,
    ) -> Result<(), ValueError> {
        let slack = 1e-12 * self.bound.max(1.0);
        for x in points {
            let v = self.evaluate(x)?;
            let n = v.norm();
            if n > self.bound + slack {
                return Err(ValueError::BoundViolated {
                    norm: n,
                    bound: self.bound,
                    at: x.to_vec(),
                });
            }
        }
        Ok(())
    }

    /// `a·self + b·other`, pointwise.
    pub fn linear_combination(
        &self,
        a: Complex64,
        other: &FnSampler,
        b: Complex64,
    ) -> Result<FnSampler, ValueError> {
        if self.dim != other.dim {
            return Err(ValueError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        if self.width != other.width {
            return Err(ValueError::WidthMismatch {
                expected: self.width,
                got: other.width,
            });
        }
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let width = self.width;
        let eval = Arc::new(move |x: &[f64], out: &mut [Complex64]| {
            let mut tmp = vec![Complex64::new(0.0, 0.0); width];
            f(x, out);
            g(x, &mut tmp);
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o = a * *o + b * t;
            }
        });
        FnSampler::new(
            self.dim,
            self.width,
            self.norm_kind.clone(),
            a.norm() * self.bound + b.norm() * other.bound,
            eval,
        )
    }
}

/// A bounded sequence `Z^d → C^m`.
#[derive(Clone)]
pub struct SeqSampler {
    dim: usize,
    width: usize,
    norm_kind: NormKind,
    bound: f64,
    eval: Arc<SeqEval>,
    factors: Option<Arc<[SeqSampler]>>,
}

impl fmt::Debug for SeqSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeqSampler")
            .field("dim", &self.dim)
            .field("width", &self.width)
            .field("bound", &self.bound)
            .field("separable", &self.factors.is_some())
            .finish()
    }
}

impl SeqSampler {
    pub fn new(
        dim: usize,
        width: usize,
        norm_kind: NormKind,
        bound: f64,
        eval: Arc<SeqEval>,
    ) -> Result<Self, ValueError> {
        norm_kind.check_width(width)?;
        Ok(Self {
            dim,
            width,
            norm_kind,
            bound,
            eval,
            factors: None,
        })
    }

    pub fn real(dim: usize, bound: f64, f: impl Fn(&[i64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            dim,
            width: 1,
            norm_kind: NormKind::Sup,
            bound,
            eval: Arc::new(move |n, out| out[0] = Complex64::new(f(n), 0.0)),
            factors: None,
        }
    }

    pub fn complex(
        dim: usize,
        bound: f64,
        f: impl Fn(&[i64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            width: 1,
            norm_kind: NormKind::Sup,
            bound,
            eval: Arc::new(move |n, out| out[0] = f(n)),
            factors: None,
        }
    }

    pub fn constant(dim: usize, value: VectorValue) -> Self {
        let bound = value.norm();
        let c = value.components.clone();
        Self {
            dim,
            width: value.width(),
            norm_kind: value.norm_kind.clone(),
            bound,
            eval: Arc::new(move |_, out| out.copy_from_slice(&c)),
            factors: None,
        }
    }

    /// `n ↦ f(t + n)`.
    pub fn shifted(f: &FnSampler, t: &[f64]) -> Result<Self, ValueError> {
        Self::lift(f, t, |n, t| t + n as f64)
    }

    /// `n ↦ f(n ∘ t)` with the componentwise product.
    pub fn dilated(f: &FnSampler, t: &[f64]) -> Result<Self, ValueError> {
        Self::lift(f, t, |n, t| n as f64 * t)
    }

    fn lift(f: &FnSampler, t: &[f64], map: fn(i64, f64) -> f64) -> Result<Self, ValueError> {
        if t.len() != f.dim {
            return Err(ValueError::DimensionMismatch {
                expected: f.dim,
                got: t.len(),
            });
        }
        if let Some(fs) = &f.factors {
            let factors: Vec<SeqSampler> = fs
                .iter()
                .zip(t)
                .map(|(fi, ti)| Self::lift(fi, std::slice::from_ref(ti), map))
                .collect::<Result<_, _>>()?;
            return Self::product(factors);
        }
        let t: Arc<[f64]> = t.into();
        let eval = f.eval.clone();
        let dim = f.dim;
        let lifted = Arc::new(move |n: &[i64], out: &mut [Complex64]| {
            let mut x = [0.0f64; 8];
            if dim <= 8 {
                for i in 0..dim {
                    x[i] = map(n[i], t[i]);
                }
                eval(&x[..dim], out);
            } else {
                let x: Vec<f64> = n.iter().zip(t.iter()).map(|(n, t)| map(*n, *t)).collect();
                eval(&x, out);
            }
        });
        Ok(Self {
            dim,
            width: f.width,
            norm_kind: f.norm_kind.clone(),
            bound: f.bound,
            eval: lifted,
            factors: None,
        })
    }

    /// `v(n) = Π_i v_i(n_i)` for one-dimensional scalar factors.
    pub fn product(factors: Vec<SeqSampler>) -> Result<Self, ValueError> {
        if factors.is_empty() {
            return Err(ValueError::EmptyProduct);
        }
        for f in &factors {
            if f.dim != 1 || f.width != 1 {
                return Err(ValueError::WidthMismatch {
                    expected: 1,
                    got: f.width.max(f.dim),
                });
            }
        }
        let factors: Arc<[SeqSampler]> = factors.into();
        let bound = factors.iter().map(|f| f.bound).product();
        let fs = factors.clone();
        let eval = Arc::new(move |n: &[i64], out: &mut [Complex64]| {
            let mut acc = Complex64::new(1.0, 0.0);
            let mut buf = [Complex64::new(0.0, 0.0)];
            for (f, ni) in fs.iter().zip(n) {
                (f.eval)(std::slice::from_ref(ni), &mut buf);
                acc *= buf[0];
            }
            out[0] = acc;
        });
        Ok(Self {
            dim: factors.len(),
            width: 1,
            norm_kind: NormKind::Sup,
            bound,
            eval,
            factors: Some(factors),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn norm_kind(&self) -> &NormKind {
        &self.norm_kind
    }

    pub fn factors(&self) -> Option<&[SeqSampler]> {
        self.factors.as_deref()
    }

    #[inline]
    pub fn eval_into(&self, n: &[i64], out: &mut [Complex64]) {
        (self.eval)(n, out)
    }

    pub fn evaluate(&self, n: &[i64]) -> Result<VectorValue, ValueError> {
        if n.len() != self.dim {
            return Err(ValueError::DimensionMismatch {
                expected: self.dim,
                got: n.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.width];
        (self.eval)(n, &mut out);
        if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ValueError::NonFinite(n.iter().map(|v| *v as f64).collect()));
        }
        Ok(VectorValue::from_parts_unchecked(out, self.norm_kind.clone()))
    }

    pub fn zero_value(&self) -> VectorValue {
        VectorValue::from_parts_unchecked(
            vec![Complex64::new(0.0, 0.0); self.width],
            self.norm_kind.clone(),
        )
    }

    pub fn spot_check_bound<'a>(
        &self,
        points: impl IntoIterator<Item = &'a [i64]>,
    ) -> Result<(), ValueError> {
        let slack = 1e-12 * self.bound.max(1.0);
        for n in points {
            let v = self.evaluate(n)?;
            if v.norm() > self.bound + slack {
                return Err(ValueError::BoundViolated {
                    norm: v.norm(),
                    bound: self.bound,
                    at: n.iter().map(|v| *v as f64).collect(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn norm_examples() {
        let v = VectorValue::new(vec![c(3.0), c(4.0)], NormKind::L2).unwrap();
        assert_eq!(v.norm(), 5.0);
        let v = VectorValue::new(vec![c(1.0), c(-2.0)], NormKind::Sup).unwrap();
        assert_eq!(v.norm(), 2.0);
        let w: Arc<[f64]> = vec![1.0 / 3.0; 3].into();
        let v = VectorValue::new(vec![c(1.0); 3], NormKind::L1Weighted(w)).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mismatched_weights_are_rejected() {
        let w: Arc<[f64]> = vec![0.5, 0.5].into();
        let err = VectorValue::new(vec![c(1.0); 3], NormKind::L1Weighted(w)).unwrap_err();
        assert_eq!(
            err,
            ValueError::WeightLength {
                weights: 2,
                components: 3
            }
        );
    }

    #[test]
    fn grid_embed_examples() {
        assert_eq!(grid_embed(&[c(1.0), c(1.0)], &[0.5, 0.5]).unwrap().norm(), 1.0);
        assert_eq!(grid_embed(&[c(1.0), c(-1.0)], &[0.5, 0.5]).unwrap().norm(), 1.0);
        assert!(grid_embed(&[c(1.0)], &[0.5, 0.5]).is_err());
        assert_eq!(
            grid_embed(&[c(1.0), c(1.0)], &[1.5, -0.5]).unwrap_err(),
            ValueError::BadWeight(1)
        );
    }

    #[test]
    fn real_part_rejects_imaginary() {
        let v = VectorValue::complex(Complex64::new(0.5, 1e-3));
        assert!(v.real_part(1e-9).is_err());
        assert_eq!(v.real_part(1e-2).unwrap(), 0.5);
    }

    #[test]
    fn product_sampler_matches_pointwise_product() {
        let f = FnSampler::real(1, 1.0, |x| x[0].sin());
        let g = FnSampler::real(1, 1.0, |x| (2.0 * x[0]).cos());
        let p = FnSampler::product(vec![f, g]).unwrap();
        let v = p.evaluate(&[0.3, 0.7]).unwrap().real_part(0.0).unwrap();
        assert!((v - 0.3f64.sin() * 1.4f64.cos()).abs() < 1e-15);
        let s = SeqSampler::shifted(&p, &[0.25, 0.5]).unwrap();
        assert!(s.factors().is_some());
        let v = s.evaluate(&[2, 3]).unwrap().real_part(0.0).unwrap();
        assert!((v - 2.25f64.sin() * 7.0f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn dilated_sequence_multiplies() {
        let f = FnSampler::real(1, 1e9, |x| x[0]);
        let s = SeqSampler::dilated(&f, &[0.5]).unwrap();
        assert_eq!(s.evaluate(&[7]).unwrap().real_part(0.0).unwrap(), 3.5);
    }

    #[test]
    fn bound_violation_is_reported() {
        let f = FnSampler::real(1, 0.5, |x| x[0]);
        let pts = [[0.1], [0.9]];
        let err = f.spot_check_bound(pts.iter().map(|p| &p[..])).unwrap_err();
        assert!(matches!(err, ValueError::BoundViolated { .. }));
    }
}
