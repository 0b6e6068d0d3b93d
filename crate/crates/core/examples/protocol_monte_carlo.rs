//! Prepare-and-measure Monte Carlo with MB-shaped 16-QAM: parameter
//! estimation and MAP vs minimum-distance symbol error rates.
//!
//! `cargo run --release --example protocol_monte_carlo -- 0.5 0.05 100000 7`

use dmqkd::bipartite::ChannelModel;
use dmqkd::convergence::{build_qam, SpacingRule};
use dmqkd::protocol::{run_protocol, AbortThresholds, ProtocolRun};

fn main() -> dmqkd::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, d: &str| args.get(i).cloned().unwrap_or_else(|| d.to_string());
    let tau: f64 = arg(0, "0.5").parse().expect("tau");
    let xi: f64 = arg(1, "0.05").parse().expect("xi");
    let rounds: usize = arg(2, "100000").parse().expect("rounds");
    let seed: u64 = arg(3, "7").parse().expect("seed");

    let c = build_qam(4, 1.0, SpacingRule::MatchThermal, 48)?;
    let run = ProtocolRun {
        channel: ChannelModel::new(tau, xi)?,
        rounds,
        test_fraction: 0.5,
        seed,
        abort: Some(AbortThresholds { tau_min: 0.3, xi_max: 0.2 }),
    };
    let t = run_protocol(&run, &c)?;
    let r = &t.result;
    println!("tau_hat {:.5} +- {:.5}   xi_hat {:.4}{}", r.tau_hat, r.tau_se, r.xi_hat, if r.xi_clamped { " (clamped)" } else { "" });
    println!("test {} / key {}   aborted {:?}", r.n_test, r.n_key, r.aborted);
    println!("SER  map {:.4}  md {:.4}  diff {:+.4} (se {:.4})", r.ser_map, r.ser_md, r.ser_map - r.ser_md, r.ser_diff_se);
    Ok(())
}
