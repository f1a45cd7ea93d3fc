//! Parameter grids and "almost every t" samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Midpoints of a uniform partition of a box `(0, c]`, with equal weights
/// summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct TGrid {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl TGrid {
    /// `per_axis^d` midpoints of `[0,1]^d`.
    pub fn unit(dim: usize, per_axis: usize) -> Self {
        Self::over(&vec![1.0; dim], per_axis)
    }

    pub fn over(c: &[f64], per_axis: usize) -> Self {
        let d = c.len();
        let per_axis = per_axis.max(1);
        let total = per_axis.pow(d as u32);
        let mut points = Vec::with_capacity(total);
        for mut k in 0..total {
            let mut p = vec![0.0; d];
            for axis in (0..d).rev() {
                p[axis] = c[axis] * ((k % per_axis) as f64 + 0.5) / per_axis as f64;
                k /= per_axis;
            }
            points.push(p);
        }
        Self {
            weights: vec![1.0 / total as f64; total],
            points,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// How to draw parameter samples standing in for "almost every t".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TSampling {
    /// Points of an additive recurrence with generalized golden-ratio steps.
    #[serde(default = "default_ld")]
    pub low_discrepancy: usize,
    #[serde(default)]
    pub random: usize,
    #[serde(default)]
    pub seed: u64,
    /// Reject `t` when some coordinate raised to `power` lies within
    /// `eta/q²` of a rational `p/q` with `q ≤ q_max`.
    #[serde(default = "default_q_max")]
    pub q_max: u64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_power")]
    pub power: i32,
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

impl Default for TSampling {
    fn default() -> Self {
        Self {
            low_discrepancy: default_ld(),
            random: 0,
            seed: 0,
            q_max: default_q_max(),
            eta: default_eta(),
            power: default_power(),
        }
    }
}

/// True when `x` is within `eta/q²` of some `p/q` with `1 ≤ q ≤ q_max`.
pub fn near_rational(x: f64, q_max: u64, eta: f64) -> bool {
    (1..=q_max).any(|q| {
        let qf = q as f64;
        let p = (x * qf).round();
        (x - p / qf).abs() < eta / (qf * qf)
    })
}

fn golden(d: usize) -> f64 {
    // unique positive root of x^(d+1) = x + 1
    let mut x: f64 = 2.0;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (d as f64 + 1.0));
    }
    x
}

/// Low-discrepancy plus seeded random samples in `(0, c]`, skipping
/// excluded points. The low-discrepancy part comes first.
pub fn t_samples(c: &[f64], spec: &TSampling) -> Vec<Vec<f64>> {
    let d = c.len();
    let g = golden(d);
    let alpha: Vec<f64> = (1..=d).map(|i| g.powi(-(i as i32)).fract()).collect();
    let excluded = |t: &[f64]| {
        spec.q_max > 0
            && t.iter()
                .any(|x| near_rational(x.powi(spec.power), spec.q_max, spec.eta))
    };
    let mut out = Vec::with_capacity(spec.low_discrepancy + spec.random);
    let mut k: u64 = 1;
    let mut guard = 0usize;
    while out.len() < spec.low_discrepancy && guard < 1_000_000 {
        let t: Vec<f64> = alpha
            .iter()
            .zip(c)
            .map(|(a, ci)| ci * (1.0 - (0.5 + k as f64 * a).fract()))
            .collect();
        k += 1;
        guard += 1;
        if !excluded(&t) {
            out.push(t);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let target = out.len() + spec.random;
    guard = 0;
    while out.len() < target && guard < 1_000_000 {
        let t: Vec<f64> = c.iter().map(|ci| ci * (1.0 - rng.gen::<f64>())).collect();
        guard += 1;
        if !excluded(&t) {
            out.push(t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_midpoints() {
        let g = TGrid::unit(1, 4);
        assert_eq!(g.points, vec![vec![0.125], vec![0.375], vec![0.625], vec![0.875]]);
        assert_eq!(g.weights.iter().sum::<f64>(), 1.0);
        let g = TGrid::unit(2, 8);
        assert_eq!(g.len(), 64);
    }

    #[test]
    fn samples_are_in_range_and_reproducible() {
        let spec = TSampling {
            low_discrepancy: 10,
            random: 6,
            seed: 42,
            ..TSampling::default()
        };
        let a = t_samples(&[0.5, 2.0], &spec);
        assert_eq!(a.len(), 16);
        for t in &a {
            assert!(t[0] > 0.0 && t[0] <= 0.5 && t[1] > 0.0 && t[1] <= 2.0);
        }
        assert_eq!(a, t_samples(&[0.5, 2.0], &spec));
    }

    #[test]
    fn rationals_are_excluded() {
        assert!(near_rational(0.5 + 1e-6, 10, 1e-3));
        assert!(near_rational(1.0 / 3.0, 10, 1e-3));
        assert!(!near_rational(std::f64::consts::SQRT_2 - 1.0, 10, 1e-3));
        let spec = TSampling {
            low_discrepancy: 50,
            q_max: 20,
            eta: 1e-2,
            ..TSampling::default()
        };
        for t in t_samples(&[1.0], &spec) {
            assert!(!near_rational(t[0], 20, 1e-2));
        }
    }
}
