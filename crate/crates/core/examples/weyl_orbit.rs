//! Weyl discrepancies of `t ↦ (t√2, t²√3)` on the 2-torus.

use etl::dynamics::{frequencies, torus_orbit, Poly, TorusFlow};
use etl::geometry::AxisBox;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let orbit = torus_orbit(
        &TorusFlow::rotation(vec![2f64.sqrt(), 3f64.sqrt()]),
        vec![Poly::univariate(&[0.0, 1.0]), Poly::univariate(&[0.0, 0.0, 1.0])],
    )?;
    let ks = frequencies(2, 3);
    for start in [0.0, 1e3, 2e3] {
        let w = AxisBox::closed(vec![start], vec![start + 1e3])?;
        let mut worst: f64 = 0.0;
        for k in &ks {
            worst = worst.max(orbit.weyl_discrepancy(k, &w, 1e-2)?);
        }
        println!("window [{start}, {}]: max over {} frequencies {worst:.2e}", start + 1e3, ks.len());
    }
    Ok(())
}
