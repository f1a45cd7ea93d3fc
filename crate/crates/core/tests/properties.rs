use num_complex::Complex64;
use proptest::prelude::*;

use etl::averaging::{chunked_sum, discrete_average};
use etl::dynamics::{heisenberg_reduce, Heis, Poly, PolyTerm};
use etl::geometry::AxisBox;
use etl::runner::{parse_config, ExperimentConfig};
use etl::values::{NormKind, SeqSampler, VectorValue};

fn pool(n: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chunked_sum_ignores_thread_count(total in 1u64..300_000, seed in 0u64..1000) {
        let body = |s: u64, e: u64, acc: &mut [Complex64]| {
            for i in s..e {
                let x = ((i ^ seed) as f64 * 0.618_033_988_7).sin();
                acc[0] += Complex64::new(x, x * x);
            }
        };
        let one = pool(1).install(|| chunked_sum(total, 1, body));
        let four = pool(4).install(|| chunked_sum(total, 1, body));
        prop_assert_eq!(one[0].re.to_bits(), four[0].re.to_bits());
        prop_assert_eq!(one[0].im.to_bits(), four[0].im.to_bits());
    }

    #[test]
    fn half_open_lattice_count(a in -1e4f64..1e4, len in 0.0f64..1e3) {
        let b = a + len;
        let n = AxisBox::half_open(vec![a], vec![b]).unwrap().lattice_points().unwrap().len();
        prop_assert_eq!(n as f64, b.floor() - a.floor());
    }

    #[test]
    fn constant_sequences_average_to_themselves(c in -5.0f64..5.0, lo in -100i64..100, len in 1i64..500) {
        let s = SeqSampler::real(1, c.abs(), move |_| c);
        let b = AxisBox::half_open(vec![lo as f64], vec![(lo + len) as f64]).unwrap();
        let v = discrete_average(&s, &b).unwrap().components()[0];
        prop_assert!((v.re - c).abs() < 1e-12 && v.im == 0.0);
    }

    #[test]
    fn norms_obey_the_triangle_inequality(
        xs in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..6),
        ys in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..6),
    ) {
        let w = xs.len().min(ys.len());
        let mk = |v: &[(f64, f64)]| {
            VectorValue::new(v[..w].iter().map(|&(a, b)| Complex64::new(a, b)).collect(), NormKind::L2).unwrap()
        };
        let (x, y) = (mk(&xs), mk(&ys));
        prop_assert!(x.add(&y).unwrap().norm() <= x.norm() + y.norm() + 1e-12);
        prop_assert!((x.distance(&y).unwrap() - y.distance(&x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn heisenberg_reduce_is_idempotent_and_invariant(
        x in -50.0f64..50.0, y in -50.0f64..50.0, z in -50.0f64..50.0,
        a in -4i32..4, b in -4i32..4, c in -4i32..4,
    ) {
        let r = heisenberg_reduce([x, y, z]);
        prop_assert!(r.iter().all(|v| (0.0..1.0).contains(v)));
        let rr = heisenberg_reduce(r);
        let g = Heis::new(a as f64, b as f64, c as f64).mul(&Heis::new(x, y, z));
        let rg = heisenberg_reduce(g.as_array());
        for j in 0..3 {
            let d1 = (r[j] - rr[j]).abs();
            let d2 = (r[j] - rg[j]).rem_euclid(1.0);
            prop_assert!(d1.min(1.0 - d1) < 1e-9);
            prop_assert!(d2.min(1.0 - d2) < 1e-9);
        }
    }

    #[test]
    fn poly_eval_matches_term_sum(
        terms in prop::collection::vec((-2.0f64..2.0, 0u32..4, 0u32..4), 1..6),
        t in (-3.0f64..3.0, -3.0f64..3.0),
    ) {
        let pts: Vec<PolyTerm> = terms.iter().map(|&(c, i, j)| PolyTerm { coef: c, exp: vec![i, j] }).collect();
        let p = Poly::new(2, pts).unwrap();
        let want: f64 = terms.iter().map(|&(c, i, j)| c * t.0.powi(i as i32) * t.1.powi(j as i32)).sum();
        let got = p.eval(&[t.0, t.1]).unwrap();
        prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()));
    }

    #[test]
    fn config_echo_round_trips(tol in 1e-4f64..0.5, grid in 1usize..64, seed in 0u64..1_000_000) {
        let text = format!(
            r#"{{ "experiment": {{ "kind": "additive_transfer" }},
                 "sampler": {{ "kind": "sawtooth" }},
                 "tolerances": {{ "tol": {tol} }},
                 "t_sampling": {{ "grid_per_axis": {grid} }},
                 "seed": {seed} }}"#
        );
        let cfg = parse_config(&text).unwrap();
        let echoed: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        prop_assert_eq!(&echoed, &cfg);
        prop_assert_eq!(cfg.tolerances.limit_tol, Some(tol));
    }
}
