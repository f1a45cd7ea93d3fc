//! Densities of a periodic set and of its translated and dilated sections.

use std::f64::consts::SQRT_2;

use etl::averaging::{QuadSpec, ScaleSchedule};
use etl::density::{density_estimate, log_blocks, section_density_check, Ambient, DensityKind, DensitySet, ExactForm, SectionMode};
use etl::sampling::{t_samples, TGrid, TSampling};
use etl::transfer::{TPoints, TransferParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sched = ScaleSchedule::geometric(1e2, 10.0, 3);
    let q = QuadSpec::new(1e-3);
    let params = TransferParams::new(ScaleSchedule::geometric(1e3, 10.0, 3), sched.clone(), q.clone(), 0.02);

    let half = DensitySet::periodic(vec![1.0], vec![0.0], vec![0.5]);
    let r = section_density_check(&half, SectionMode::Translate, false, &TPoints::Grid(TGrid::unit(1, 64)), &params)?;
    println!("∪[k, k+1/2): ∫D(S_t)dt = {:.4}, D(S) = {:.4}", r.report.discrete_side.components()[0].re, r.report.continuous_side.value.components()[0].re);

    let rot = DensitySet::new(1, |x| (x[0] * SQRT_2).rem_euclid(1.0) < 1.0 / 3.0)
        .with_exact(ExactForm::Periodic { period: vec![1.0 / SQRT_2], offset: vec![0.0], len: vec![1.0 / (3.0 * SQRT_2)] });
    let ts = t_samples(&[1.0], &TSampling::default());
    let r = section_density_check(&rot, SectionMode::Dilate, false, &TPoints::Samples { c: vec![1.0], points: ts }, &params)?;
    println!("{{x√2}} < 1/3: spread {:.2e}, D = {:.4}, {:?}", r.report.constancy_spread.unwrap_or(f64::NAN), r.report.continuous_side.value.components()[0].re, r.report.status);

    let fine = ScaleSchedule::geometric(64.0, 2f64.powf(1.0 / 32.0), 320);
    for kind in [DensityKind::Upper, DensityKind::Lower] {
        let d = density_estimate(&log_blocks(), kind, Ambient::Continuum, &fine, &q, 0.02, 3)?;
        println!("log blocks {kind:?} density {:.4}", d.value);
    }
    Ok(())
}
