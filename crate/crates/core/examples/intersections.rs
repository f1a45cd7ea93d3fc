//! Averages of `μ(A ∩ (A − x√2) ∩ (A − 2x√2))` for `A = [0, 1/4)` stay
//! near `1/32`.

use std::f64::consts::SQRT_2;

use etl::averaging::{QuadSpec, ScaleSchedule};
use etl::density::DensitySet;
use etl::dynamics::{intersection_measure_sampler, Poly, TorusFlow};
use etl::geometry::{AxisBox, Region, Scheme};
use etl::runner::suite::double_intersection_oracle;
use etl::transfer::continuous_bounds;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = DensitySet::boxes(Region::new(vec![AxisBox::half_open(vec![0.0], vec![0.25])?])?);
    let flows = [TorusFlow::rotation(vec![SQRT_2]), TorusFlow::rotation(vec![SQRT_2])];
    let polys = [Poly::univariate(&[0.0, 1.0]), Poly::univariate(&[0.0, 2.0])];
    let f = intersection_measure_sampler(&flows, &polys, &a, 1024)?;
    println!("m(0) = {}", f.evaluate(&[0.0])?.components()[0].re);
    let b = continuous_bounds(&f, &Scheme::standard(1), &ScaleSchedule::geometric(1e2, 10f64.powf(0.25), 9), &QuadSpec::new(0.05), 3)?;
    println!("averages between {:.5} and {:.5}", b.lo, b.hi);
    println!("double quadrature {:.5}", double_intersection_oracle(0.25, 2000));
    Ok(())
}
