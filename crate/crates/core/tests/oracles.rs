//! Library outputs against independently computed reference values.

use std::f64::consts::{SQRT_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use etl::averaging::{continuous_average, discrete_average, QuadSpec};
use etl::density::DensitySet;
use etl::dynamics::{
    heisenberg_reduce, intersection_measure_sampler, product_uniform_cdf, torus_orbit, Heis, Poly, TorusFlow,
};
use etl::geometry::{AxisBox, Region};
use etl::runner::suite::double_intersection_oracle;
use etl::values::{FnSampler, SeqSampler};

fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x)
}

#[test]
fn fresnel_average_is_quarter_over_b() {
    // ∫_0^b cos(2πx²) = 1/4 + sin(2πb²)/(4πb) + O(b⁻³); the sine vanishes at integer b.
    let f = FnSampler::real(1, 1.0, |x| (TAU * x[0] * x[0]).cos());
    for b in [50.0, 100.0, 400.0] {
        let got = continuous_average(&f, &AxisBox::from_origin(&[b]).unwrap(), &QuadSpec::new(1e-4))
            .unwrap()
            .value
            .components()[0]
            .re;
        assert!((got - 0.25 / b).abs() < 1e-6, "b = {b}: {got}");
    }
}

#[test]
fn character_averages_match_geometric_series() {
    let alpha = SQRT_2 - 1.0;
    let s = SeqSampler::complex(1, 1.0, move |n| e(n[0] as f64 * alpha));
    for n in [7i64, 100, 12345] {
        let got = discrete_average(&s, &AxisBox::from_origin(&[n as f64]).unwrap())
            .unwrap()
            .components()[0];
        let r = e(alpha);
        let want = r * (Complex64::new(1.0, 0.0) - r.powi(n as i32)) / (Complex64::new(1.0, 0.0) - r) / n as f64;
        assert!((got - want).norm() < 1e-12, "n = {n}");
    }
}

/// `|[0,a) ∩ ([0,a) − u) ∩ ([0,a) − 2u)|` by exact interval arithmetic.
fn triple_overlap(a: f64, u: f64) -> f64 {
    let mut cuts = vec![0.0, a];
    for s in [u, 2.0 * u] {
        for c in [(-s).rem_euclid(1.0), (a - s).rem_euclid(1.0)] {
            if c > 0.0 && c < a {
                cuts.push(c);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let inside = |x: f64| x.rem_euclid(1.0) < a;
    cuts.windows(2)
        .filter(|w| {
            let m = 0.5 * (w[0] + w[1]);
            inside(m + u) && inside(m + 2.0 * u)
        })
        .map(|w| w[1] - w[0])
        .sum()
}

#[test]
fn intersection_integral_is_one_thirty_second() {
    let n = 100_000;
    let exact: f64 = (0..n).map(|i| triple_overlap(0.25, (i as f64 + 0.5) / n as f64)).sum::<f64>() / n as f64;
    assert!((exact - 1.0 / 32.0).abs() < 1e-6, "{exact}");
    assert!((double_intersection_oracle(0.25, 4000) - 1.0 / 32.0).abs() < 1e-3);
}

#[test]
fn intersection_sampler_matches_interval_arithmetic() {
    let a = DensitySet::boxes(Region::new(vec![AxisBox::half_open(vec![0.0], vec![0.25]).unwrap()]).unwrap());
    let flows = [TorusFlow::rotation(vec![SQRT_2]), TorusFlow::rotation(vec![SQRT_2])];
    let polys = [Poly::univariate(&[0.0, 1.0]), Poly::univariate(&[0.0, 2.0])];
    let f = intersection_measure_sampler(&flows, &polys, &a, 1 << 12).unwrap();
    for x in [0.0, 0.1, 0.37, 3.3, 17.0] {
        let got = f.evaluate(&[x]).unwrap().components()[0].re;
        let want = triple_overlap(0.25, (x * SQRT_2).rem_euclid(1.0));
        assert!((got - want).abs() <= 3.0 / 4096.0, "x = {x}: {got} vs {want}");
    }
}

#[test]
fn product_uniform_cdf_matches_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 200_000;
    let draws: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * rng.gen::<f64>()).collect();
    for u in [0.05, 0.2, 0.5, 0.9] {
        let emp = draws.iter().filter(|&&d| d <= u).count() as f64 / n as f64;
        assert!((emp - product_uniform_cdf(u)).abs() < 5e-3, "u = {u}");
        assert!((product_uniform_cdf(u) - (u - u * u.ln())).abs() < 1e-12);
    }
}

fn matrix(h: &Heis) -> [[f64; 3]; 3] {
    let [x, y, z] = h.as_array();
    [[1.0, x, z], [0.0, 1.0, y], [0.0, 0.0, 1.0]]
}

fn matmul(a: [[f64; 3]; 3], b: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

#[test]
fn heisenberg_product_and_reduction_agree_with_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let circ = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(1.0);
        d.min(1.0 - d)
    };
    for _ in 0..200 {
        let g = Heis::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let gamma = Heis::new(
            rng.gen_range(-3..=3) as f64,
            rng.gen_range(-3..=3) as f64,
            rng.gen_range(-3..=3) as f64,
        );
        let m = matmul(matrix(&gamma), matrix(&g));
        let prod = gamma.mul(&g).as_array();
        assert!((prod[0] - m[0][1]).abs() < 1e-12);
        assert!((prod[1] - m[1][2]).abs() < 1e-12);
        assert!((prod[2] - m[0][2]).abs() < 1e-12);
        let r = heisenberg_reduce(g.as_array());
        let rg = heisenberg_reduce([m[0][1], m[1][2], m[0][2]]);
        for j in 0..3 {
            assert!((0.0..1.0).contains(&r[j]));
            assert!(circ(r[j], rg[j]) < 1e-9);
        }
    }
}

#[test]
fn panel_rule_matches_fine_midpoint_sum() {
    let orbit = torus_orbit(
        &TorusFlow::rotation(vec![SQRT_2, 3f64.sqrt()]),
        vec![Poly::univariate(&[0.0, 1.0]), Poly::univariate(&[0.0, 0.0, 1.0])],
    )
    .unwrap();
    let (a, b) = (3.0, 43.0);
    let w = AxisBox::closed(vec![a], vec![b]).unwrap();
    for k in [[1i64, 0], [0, 1], [2, -3]] {
        let n = 4_000_000;
        let h = (b - a) / n as f64;
        let direct: Complex64 = (0..n)
            .map(|i| {
                let t = a + (i as f64 + 0.5) * h;
                e(k[0] as f64 * t * SQRT_2 + k[1] as f64 * t * t * 3f64.sqrt())
            })
            .sum::<Complex64>()
            / n as f64;
        let got = orbit.weyl_discrepancy(&k, &w, 1e-2).unwrap();
        assert!((got - direct.norm()).abs() < 1e-4, "k = {k:?}: {got} vs {}", direct.norm());
    }
}

#[test]
fn rotation_indicator_average_is_its_length() {
    let f = FnSampler::real(1, 1.0, |x| f64::from(u8::from((x[0] * SQRT_2).rem_euclid(1.0) < 1.0 / 3.0)));
    let got = continuous_average(&f, &AxisBox::from_origin(&[1e4]).unwrap(), &QuadSpec::new(1e-3))
        .unwrap()
        .value
        .components()[0]
        .re;
    // Exact: (1/b)·∫ = 1/3 + O(1/b).
    assert!((got - 1.0 / 3.0).abs() < 1e-3, "{got}");
}
