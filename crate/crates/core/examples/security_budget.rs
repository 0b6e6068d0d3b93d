//! Energy-test cutoffs and the composed security budget.

use dmqkd::security::{compose_budget, min_dim_for_eps};

fn main() -> dmqkd::Result<()> {
    for mbar in [0.5, 1.0, 2.5, 5.0] {
        let dims: Vec<String> = [1e-6, 1e-10, 2f64.powi(-40)]
            .iter()
            .map(|&eps| min_dim_for_eps(mbar, eps).map(|d| format!("{d:>4}")))
            .collect::<Result<_, _>>()?;
        println!("mbar {mbar:>4}: d for eps 1e-6 / 1e-10 / 2^-40 = {}", dims.join(" "));
    }
    let b = compose_budget(1e-10, 1.0, 40)?;
    println!("{}", serde_json::to_string_pretty(&b).expect("serialises"));
    Ok(())
}
