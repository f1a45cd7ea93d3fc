//! Cesàro versus ordinary limits for a sequence with `|v_{n+1} − v_n| ≤ α/n`,
//! and a control sequence whose Cesàro means oscillate.

use etl::averaging::ScaleSchedule;
use etl::transfer::tauberian_verify;
use etl::values::SeqSampler;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sched = ScaleSchedule::geometric(1e3, 10.0, 3);

    let v = SeqSampler::real(1, 3.0, |n| 1.0 + if n[0] % 2 == 0 { 1.0 } else { -1.0 } / n[0] as f64);
    let r = tauberian_verify(&v, 2.5, &sched, 1e-3, 3, 0)?;
    println!("1 ± 1/n: {:?}, deviation {:?}", r.status, r.deviation);

    let w = SeqSampler::real(1, 1.0, |n| (std::f64::consts::TAU * (n[0].max(1) as f64).ln()).sin());
    let r = tauberian_verify(&w, 7.0, &sched, 1e-3, 3, 0)?;
    println!("sin(2π log n): {:?}", r.status);
    for n in r.notes {
        println!("  {n}");
    }
    Ok(())
}
