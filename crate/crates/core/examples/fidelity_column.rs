//! Infidelity against β for one loss rate.
//!
//! `cargo run --release --example fidelity_column -- <gamma> [points]`

use gkp_channel::channel::{fidelity_sweep, QuadratureSpec};

fn main() {
    let mut args = std::env::args().skip(1);
    let gamma: f64 = args.next().map_or(0.1, |a| a.parse().expect("gamma"));
    let n: usize = args.next().map_or(25, |a| a.parse().expect("points"));
    let betas: Vec<f64> = (0..n).map(|i| 0.02 + 0.48 * i as f64 / (n - 1) as f64).collect();
    let table = fidelity_sweep(&betas, &[gamma], QuadratureSpec::default()).expect("sweep");
    for row in &table.rows {
        println!("{:.4}  {:.12e}  {:.1e}", row.beta, row.infidelity, row.est_error.unwrap_or(0.0));
    }
}
