//! Distribution of `{√2 t}·{√3 t}` against `F(u) = u − u ln u`.

use etl::dynamics::{gp_distribution, product_uniform_cdf, GpNode, Poly};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let frac = |a: f64| GpNode::frac(GpNode::poly(Poly::univariate(&[0.0, a])));
    let g = GpNode::mul(frac(2f64.sqrt()), frac(3f64.sqrt()));
    let r = gp_distribution(&g, 0.1, 1e5, 1e-6, product_uniform_cdf, (0.0, 1.0, 10))?;
    for b in &r.histogram {
        println!("[{:.1}, {:.1})  empirical {:.4}  target {:.4}", b.lo, b.hi, b.empirical, b.target);
    }
    println!("KS {:.2e}, flagged {} of {}", r.ks, r.flagged, r.samples);
    Ok(())
}
