//! Lattice reduction on the Heisenberg nilmanifold and equidistribution of
//! a nilflow's projection to the base torus.

use etl::averaging::QuadSpec;
use etl::dynamics::{frequencies, heisenberg_reduce, weyl_discrepancies, Heis, HeisenbergFlow, Poly};
use etl::geometry::AxisBox;
use etl::runner::run::heisenberg_contract;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Heis::new(2.7, -1.3, 5.9);
    let gamma = Heis::new(1.0, 2.0, -3.0);
    println!("reduce(g)     = {:?}", heisenberg_reduce(g.as_array()));
    println!("reduce(γ·g)   = {:?}", heisenberg_reduce(gamma.mul(&g).as_array()));
    let (idem, inv) = heisenberg_contract(1000, 0);
    println!("1000 samples: idempotence error {idem:.1e}, invariance error {inv:.1e}");

    let flow = HeisenbergFlow::new(Heis::new(2f64.sqrt(), 3f64.sqrt(), 0.5), Heis::new(0.0, 0.0, 0.0));
    let base = flow.base_orbit_sampler(Poly::monomial(1.0, 1));
    let w = AxisBox::closed(vec![0.0], vec![1e3])?;
    let d = weyl_discrepancies(&base, &frequencies(2, 2), &w, &QuadSpec::new(1e-2))?;
    println!("base torus Weyl discrepancy {:.2e}", d.iter().cloned().fold(0.0, f64::max));
    Ok(())
}
