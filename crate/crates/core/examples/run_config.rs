//! Runs a JSON config the way `etl run` does and prints the report.

use etl::runner::{parse_config, report::report_json, run_experiment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/additive_constant.json").into());
    let cfg = parse_config(&std::fs::read_to_string(&path)?)?;
    let outcome = run_experiment(&cfg)?;
    println!("{}", report_json(&cfg, &outcome));
    Ok(())
}
