//! Coherent states on a truncated Fock basis: amplitudes, truncation loss
//! and the trace distance between two pure states.

use dmqkd::fock::{coherent_fock, thermal_state, DensityMatrix, FockVector};
use dmqkd::linalg::trace_norm_distance;
use dmqkd::C64;

fn main() -> dmqkd::Result<()> {
    let alpha = C64::new(1.0, 0.5);
    for dim in [4, 8, 16, 32] {
        let v = coherent_fock(alpha, dim)?;
        println!("dim {dim:>2}: kept norm {:.12}, lost {:.3e}", v.norm_sqr(), 1.0 - v.norm_sqr());
    }

    let dim = 24;
    let vac = DensityMatrix::pure(&FockVector::number(0, dim)?);
    let coh = DensityMatrix::pure(&coherent_fock(C64::new(1.0, 0.0), dim)?);
    let td = trace_norm_distance(&vac, &coh)?;
    println!("|0> vs |1>: trace distance {td:.9} (pure-state value {:.9})", 2.0 * (1.0 - (-1.0f64).exp()).sqrt());

    let th = thermal_state(1.0, dim)?;
    println!("thermal(1) on {dim} levels: trace {:.12}, deficit {:.3e}", th.trace(), th.deficit());
    Ok(())
}
