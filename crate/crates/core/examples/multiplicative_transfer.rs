//! Dilated discrete averages of `cos(2πx²)` at seeded irrational `t`
//! against the continuous average, which decays like `1/(4b)`.

use etl::averaging::{QuadSpec, ScaleSchedule};
use etl::geometry::Scheme;
use etl::sampling::{t_samples, TSampling};
use etl::transfer::{multiplicative_transfer_check, TransferParams};
use etl::values::FnSampler;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = FnSampler::real(1, 1.0, |x| (std::f64::consts::TAU * x[0] * x[0]).cos());
    let ts = t_samples(&[1.0], &TSampling { low_discrepancy: 0, random: 8, seed: 1, ..TSampling::default() });
    let mut params = TransferParams::new(
        ScaleSchedule::geometric(1e4, 10.0, 3),
        ScaleSchedule::geometric(1e2, 10f64.sqrt(), 3),
        QuadSpec::new(1e-4),
        0.02,
    );
    params.limit_tol = Some(0.05);
    let r = multiplicative_transfer_check(&f, &Scheme::standard(1), &[1.0], &ts, &params)?;
    for e in &r.per_t {
        println!("t = {:.6}  limit {:+.2e}", e.t[0], e.estimate.value.components()[0].re);
    }
    println!(
        "continuous {:+.2e}  spread {:.2e}  deviation {:.2e}  {:?}",
        r.continuous_side.value.components()[0].re,
        r.constancy_spread.unwrap_or(f64::NAN),
        r.deviation,
        r.status
    );
    Ok(())
}
