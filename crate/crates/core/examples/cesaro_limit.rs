//! Continuous and discrete Cesàro limits of `1{{x√2} < 1/2}`.

use std::f64::consts::SQRT_2;

use etl::averaging::{QuadSpec, ScaleSchedule};
use etl::geometry::Scheme;
use etl::transfer::{continuous_scheme_limit, discrete_scheme_limit};
use etl::values::{FnSampler, SeqSampler};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = FnSampler::real(1, 1.0, |x| f64::from(u8::from((x[0] * SQRT_2).rem_euclid(1.0) < 0.5)));
    let sched = ScaleSchedule::geometric(1e2, 10.0, 4);
    let scheme = Scheme::standard(1);

    let cont = continuous_scheme_limit(&f, &scheme, &sched, &QuadSpec::new(1e-3), 0.01, 3)?;
    let disc = discrete_scheme_limit(&SeqSampler::shifted(&f, &[0.0])?, &scheme, &sched, 0.01, 3)?;
    for p in &cont.series {
        println!("b = {:>8}  continuous average {:.6}", p.scale, p.estimate.components()[0].re);
    }
    println!("continuous limit {:.6} (residual {:.1e})", cont.value.components()[0].re, cont.residual);
    println!("discrete limit   {:.6} (residual {:.1e})", disc.value.components()[0].re, disc.residual);
    Ok(())
}
