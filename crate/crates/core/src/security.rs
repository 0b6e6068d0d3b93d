//! Energy-test security arithmetic.
//!
//! `ε_test = (m̄/(m̄+1))^d` bounds the weight outside the `d`-level subspace
//! that survives the energy test; it is known only up to a constant, so it
//! is published as the bare tail and labelled accordingly. The composed
//! bound is `‖E − F‖_⋄ ≤ ε̃ + 2·ε_test`, where `ε̃` bounds the projected
//! protocol's diamond distance and is supplied by the caller.

use serde::{Deserialize, Serialize};

use crate::fock;
use crate::{Error, Result};

/// Label attached to every published `ε_test`.
pub const EPS_TEST_NOTE: &str = "up-to-constant";

/// `(m̄/(m̄+1))^d`.
pub fn eps_test(mbar: f64, d: usize) -> Result<f64> {
    fock::check_mbar(mbar)?;
    if d < 1 {
        return Err(Error::NonPhysicalInput("subspace dimension must be >= 1".into()));
    }
    Ok(fock::geometric_tail(mbar, d))
}

/// Smallest `d` with `(m̄/(m̄+1))^d ≤ eps_target`, checked by direct
/// evaluation at `d` and `d − 1`.
pub fn min_dim_for_eps(mbar: f64, eps_target: f64) -> Result<usize> {
    if !(eps_target > 0.0 && eps_target < 1.0) {
        return Err(Error::InvalidTarget(format!("eps must lie in (0, 1), got {eps_target}")));
    }
    if !(mbar > 0.0) || !mbar.is_finite() {
        return Err(Error::InvalidTarget(format!("mbar must be finite and > 0, got {mbar}")));
    }
    let q = mbar / (mbar + 1.0);
    let guess = (eps_target.ln() / q.ln()).ceil();
    if !guess.is_finite() || guess > u32::MAX as f64 {
        return Err(Error::InvalidTarget(format!(
            "no representable dimension reaches {eps_target} at mbar {mbar}"
        )));
    }
    let mut d = (guess as usize).max(1);
    while fock::geometric_tail(mbar, d) > eps_target {
        d += 1;
    }
    while d > 1 && fock::geometric_tail(mbar, d - 1) <= eps_target {
        d -= 1;
    }
    Ok(d)
}

/// Composed diamond-norm budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityBudget {
    pub eps_test: f64,
    pub dim: usize,
    pub mbar: f64,
    pub eps_tilde: f64,
    pub eps_total: f64,
    pub eps_test_note: String,
}

/// `eps_total = eps_tilde + 2·ε_test(m̄, d)`.
pub fn compose_budget(eps_tilde: f64, mbar: f64, d: usize) -> Result<SecurityBudget> {
    if !(eps_tilde >= 0.0) || !eps_tilde.is_finite() {
        return Err(Error::NonPhysicalInput(format!(
            "eps_tilde must be finite and >= 0, got {eps_tilde}"
        )));
    }
    let eps = eps_test(mbar, d)?;
    Ok(SecurityBudget {
        eps_test: eps,
        dim: d,
        mbar,
        eps_tilde,
        eps_total: eps_tilde + 2.0 * eps,
        eps_test_note: EPS_TEST_NOTE.into(),
    })
}
