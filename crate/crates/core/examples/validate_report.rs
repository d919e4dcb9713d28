//! Prints the validation report as JSON. Pass `--quick` for the reduced run.

use gkp_channel::validate::{run, ValidateConfig};

fn main() {
    let quick = std::env::args().any(|a| a == "--quick");
    let config = ValidateConfig { quick, ..ValidateConfig::default() };
    let report = run(&config).expect("validation run");
    for check in &report.checks {
        let mark = if check.passed { "ok  " } else { "FAIL" };
        println!("{mark} {:<36} {:.3e} <= {:.1e}  {}", check.name, check.measured, check.tolerance, check.detail);
    }
    println!("passed: {}", report.passed);
}
