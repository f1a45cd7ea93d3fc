//! Averages of `cos(2πx)` over drifting windows `[N, N + √N]` agree with the
//! uniform limit.

use etl::averaging::{QuadSpec, ScaleSchedule};
use etl::geometry::{FolnerKind, FolnerSequence};
use etl::transfer::{folner_reduction_check, TransferParams};
use etl::values::FnSampler;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = FnSampler::real(1, 1.0, |x| (std::f64::consts::TAU * x[0]).cos());
    let seq = FolnerSequence::new(
        1,
        FolnerKind::ShiftedBoxes { side: 1.0, len_power: 0.5, drift: 1.0, drift_power: 1.0 },
    )?;
    let params = TransferParams::new(
        ScaleSchedule::geometric(1e4, 10.0, 3),
        ScaleSchedule::geometric(1e4, 10.0, 3),
        QuadSpec::new(1e-3),
        0.01,
    );
    let r = folner_reduction_check(&f, &seq, None, &params)?;
    println!("Følner limit {:+.2e}, deviation {:.2e}, {:?}", r.folner.value.components()[0].re, r.deviation, r.status);
    Ok(())
}
