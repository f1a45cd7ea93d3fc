//! `f_n(x) = e^{2πinx}` on a grid: the integrals vanish while `|f_n| = 1`.

use etl::transfer::{fatou_dct_verify, GridSequence};
use etl::values::VectorValue;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = 1000;
    let xs: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect();
    let terms = (1..=200)
        .map(|n| {
            xs.iter()
                .map(|x| VectorValue::complex(Complex64::from_polar(1.0, std::f64::consts::TAU * n as f64 * x)))
                .collect()
        })
        .collect();
    let seq = GridSequence { weights: vec![1.0 / m as f64; m], terms, bound: 1.0, pointwise_limit: None };
    let r = fatou_dct_verify(&seq, 0.01)?;
    println!("limsup ‖∫f_n‖ = {:.2e}", r.lhs);
    println!("∫ limsup ‖f_n‖ = {:.12}", r.rhs);
    println!("margin {:.4}  pass {}", r.margin, r.pass);
    Ok(())
}
