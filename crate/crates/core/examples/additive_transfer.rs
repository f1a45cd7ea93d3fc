//! `∫_0^1 lim_N A_N f(t + ·) dt` against the continuous limit, for a
//! rotation indicator on a 64-point grid of shifts.

use std::f64::consts::SQRT_2;

use etl::averaging::{QuadSpec, ScaleSchedule};
use etl::geometry::Scheme;
use etl::sampling::TGrid;
use etl::transfer::{additive_transfer_check, TransferParams};
use etl::values::FnSampler;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = FnSampler::real(1, 1.0, |x| f64::from(u8::from((x[0] * SQRT_2).rem_euclid(1.0) < 0.5)));
    let params = TransferParams::new(
        ScaleSchedule::geometric(1e3, 10.0, 3),
        ScaleSchedule::geometric(1e2, 10.0, 3),
        QuadSpec::new(1e-3),
        0.02,
    );
    let r = additive_transfer_check(&f, &Scheme::standard(1), &TGrid::unit(1, 64), &params)?;
    println!("∫ discrete limits dt = {:.6}", r.discrete_side.components()[0].re);
    println!("continuous limit     = {:.6}", r.continuous_side.value.components()[0].re);
    println!("deviation {:.2e}  status {:?}", r.deviation, r.status);
    Ok(())
}
