//! Leading eigenvalues and eigenprojectors of the constellation state
//! against the thermal spectrum.

use dmqkd::convergence::{build_qam, eigen_convergence, resolvable_branches, SpacingRule};
use dmqkd::fock::thermal_eigenvalues;

fn main() -> dmqkd::Result<()> {
    let (mbar, dim) = (1.0, 48);
    let branches = resolvable_branches(mbar, dim, 4);
    println!("thermal eigenvalues: {:?}", &thermal_eigenvalues(mbar, branches));

    for m in [2, 4, 8, 16] {
        let c = build_qam(m, mbar, SpacingRule::MatchThermal, dim)?;
        let g = eigen_convergence(&c, mbar, dim, branches)?;
        let proj: Vec<String> = g
            .proj_gap
            .iter()
            .zip(&g.identifiable)
            .map(|(p, ok)| match p {
                Some(p) => format!("{p:.2e}{}", if *ok { "" } else { "?" }),
                None => "-".into(),
            })
            .collect();
        let eig: Vec<String> = g.eig_gap.iter().map(|e| format!("{e:.2e}")).collect();
        println!("m={m:>2}  eig {}  proj {}", eig.join(" "), proj.join(" "));
    }
    // '?' marks branches whose gap to the neighbours does not dominate the
    // trace distance, so the eigenvector may not be tracked reliably
    Ok(())
}
