//! `x ↦ f(T^x ω)·f(T^{2x} ω)` with `f = cos(2πω)` on the circle rotated by
//! √2: the averages tend to zero in `L¹`.

use std::f64::consts::SQRT_2;

use etl::averaging::{QuadSpec, ScaleSchedule};
use etl::dynamics::{multiple_average_sampler, Factor, Flow, Observable, Poly, TorusFlow};
use etl::geometry::Scheme;
use etl::sampling::{t_samples, TSampling};
use etl::transfer::{linear_image_check, Method, TPoints, TransferParams};
use etl::values::VectorValue;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let flow = Flow::Torus(TorusFlow::rotation(vec![SQRT_2]));
    let factor = |k: f64| Factor { flow: flow.clone(), poly: Poly::univariate(&[0.0, k]), obs: Observable::cos(vec![1]) };
    let ma = multiple_average_sampler(vec![factor(1.0), factor(2.0)], Some(1024))?;
    let li = ma.linear_image().expect("trigonometric observables");
    let expand = |v: &VectorValue| li.expand(v);
    let params = TransferParams::new(
        ScaleSchedule::geometric(1e2, 10.0, 3),
        ScaleSchedule::geometric(1e2, 10.0, 3),
        QuadSpec::new(3.7e-3),
        0.03,
    );
    let ts = TPoints::Samples { c: vec![1.0], points: t_samples(&[1.0], &TSampling::default()) };
    let r = linear_image_check(&li.coeffs, &expand, Method::Multiplicative, &Scheme::standard(1), &ts, &params)?;
    println!("‖continuous limit‖₁ = {:.2e}", r.continuous_side.value.norm());
    println!("deviation {:.2e} over {} dilates, {:?}", r.deviation, r.per_t.len(), r.status);
    Ok(())
}
