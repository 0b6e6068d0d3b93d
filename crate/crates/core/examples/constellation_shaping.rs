//! Maxwell-Boltzmann shaping of square QAM: solve for the shaping parameter
//! that hits a mean photon number, inspect the priors, export to JSON.

use dmqkd::constellation::{feasible_spacing, qam_grid, shaped_qam, solve_nu_for_energy};

fn main() -> dmqkd::Result<()> {
    let (m, mbar) = (4, 1.0);
    let (lo, hi) = feasible_spacing(m, mbar).expect("m >= 3");
    println!("{m}x{m} QAM at mean energy {mbar}: spacing must lie in ({lo:.4}, {hi:.4})");

    for spacing in [lo * 1.05, 0.5 * (lo + hi), hi * 0.95] {
        let p = solve_nu_for_energy(&qam_grid(m, spacing)?, mbar)?;
        println!("  spacing {spacing:.4} -> nu {:.6}", p.nu);
    }

    let c = shaped_qam(m, 0.9, mbar)?;
    println!("spacing 0.9: energy {:.12}, first moment {:.1e}", c.mean_energy(), c.first_moment().norm());
    for (x, p) in c.points().iter().zip(c.probs()).take(4) {
        println!("  ({:+.2}, {:+.2})  p = {p:.5}", x.re, x.im);
    }
    println!("{}", c.to_json());
    Ok(())
}
