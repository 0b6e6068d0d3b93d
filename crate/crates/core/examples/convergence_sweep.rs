//! Trace distance between shaped QAM and the thermal state as the grid
//! grows, alongside the tail and the 6*eps approximation bound.
//!
//! `cargo run --release --example convergence_sweep -- 1.0 48`

use dmqkd::convergence::{convergence_sweep, SpacingRule};

fn main() -> dmqkd::Result<()> {
    let mut args = std::env::args().skip(1);
    let mbar: f64 = args.next().map_or(1.0, |s| s.parse().expect("mbar"));
    let dim: usize = args.next().map_or(48, |s| s.parse().expect("dim"));

    let rows = convergence_sweep(&[2, 3, 4, 6, 8, 12, 16], mbar, dim, 1, SpacingRule::MatchThermal)?;
    println!("mbar {mbar}, dim {dim}, tail {:.3e}, 6*tail {:.3e}", rows[0].tail_eps, rows[0].bound_6eps);
    println!("{:>3} {:>10} {:>10} {:>14} {:>14}", "m", "spacing", "nu", "trace_dist", "spectral");
    for r in &rows {
        println!(
            "{:>3} {:>10.5} {:>10.5} {:>14.6e} {:>14.6e}",
            r.m,
            r.spacing.unwrap_or(f64::NAN),
            r.nu.unwrap_or(f64::NAN),
            r.trace_dist,
            r.spectral_dist
        );
    }
    Ok(())
}
