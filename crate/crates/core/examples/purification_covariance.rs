//! Purify constellation states and compare the off-diagonal covariance
//! entry with the two-mode squeezed reference through a lossy channel.

use dmqkd::bipartite::{covariance_sweep, epr_reference, ChannelModel};
use dmqkd::convergence::SpacingRule;

fn main() -> dmqkd::Result<()> {
    let mbar = 1.0;
    let ch = ChannelModel::new(0.5, 0.01)?;
    let r = epr_reference(mbar)?;
    println!("reference: V_A {:.3}, Z {:.6}, squeezing r {:.4}", r.nu, r.z, r.squeeze_r);

    let rows = covariance_sweep(&[2, 4, 8, 16], mbar, 48, &ch, 0.0, SpacingRule::MatchThermal)?;
    println!("{:>3} {:>12} {:>12} {:>12} {:>12}", "m", "z_ch", "z_star", "cm_dist", "purif_td");
    for p in &rows {
        println!(
            "{:>3} {:>12.8} {:>12.8} {:>12.3e} {:>12.3e}",
            p.m, p.z_ch, p.z_star, p.cm_distance, p.purification_trace_dist
        );
    }
    let last = rows.last().unwrap();
    for row in last.covariance.to_array() {
        println!("  [{}]", row.map(|v| format!("{v:+.6}")).join(", "));
    }
    Ok(())
}
