//! Average infidelity of the pure-loss channel on a β × γ grid.
//!
//! `cargo run --release --example fidelity_map -- [n] [order]`

use std::time::Instant;

use gkp_channel::channel::{fidelity_sweep, QuadratureSpec};

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(8);
    let order = args.next().unwrap_or(24);
    let start = Instant::now();
    let table = fidelity_sweep(&grid(0.02, 0.5, n), &grid(0.0, 0.5, n), QuadratureSpec::new(order)).expect("sweep");
    eprintln!("{} cells in {:.1?}", table.rows.len(), start.elapsed());
    for (gamma, beta, inf) in &table.argmin {
        println!("gamma {gamma:.4}  beta* {beta:.4}  infidelity {inf:.6e}");
    }
    for row in table.warnings() {
        eprintln!("warning at beta {} gamma {}: {}", row.beta, row.gamma, row.warning.as_deref().unwrap_or(""));
    }
}
