//! Distance between a constellation state `Σ p(x)|x⟩⟨x|` and the thermal
//! state with the same mean photon number.
//!
//! Reports the trace distance, the thermal tail `ε = (m̄/(m̄+1))^d`, the
//! `6ε` approximation bound, the eigenvalue matching distance and per-branch
//! eigenvalue / eigenprojector gaps.

use serde::{Deserialize, Serialize};

use crate::constellation::{self, Constellation};
use crate::fock::{self, coherent_fock, thermal_state, DensityMatrix};
use crate::linalg::{self, Spectrum};
use crate::{Error, Result};

/// Largest truncation deficit accepted when building a constellation state.
pub const DEFICIT_GATE: f64 = 1e-6;
/// Thermal deficit targeted by [`reference_dim`].
pub const REFERENCE_DEFICIT: f64 = 1e-8;
/// Default number of tracked eigenbranches.
pub const DEFAULT_BRANCHES: usize = 6;
/// Reference eigenvalues closer than this are treated as degenerate.
const DEGENERACY_TOL: f64 = 1e-12;

/// `Σ_k p_k |x_k⟩⟨x_k|` over truncated coherent states.
pub fn constellation_density(c: &Constellation, dim: usize) -> Result<DensityMatrix> {
    let states = c
        .points()
        .iter()
        .zip(c.probs())
        .map(|(x, p)| Ok((*p, coherent_fock(*x, dim)?)))
        .collect::<Result<Vec<_>>>()?;
    let rho = DensityMatrix::mixture(&states)?;
    if rho.deficit() >= DEFICIT_GATE {
        return Err(Error::TruncationTooSevere {
            deficit: rho.deficit(),
            dim,
            limit: DEFICIT_GATE,
        });
    }
    Ok(rho)
}

/// `(m̄/(m̄+1))^d`, the thermal mass outside the first `d` Fock levels.
pub fn tail_mass(mbar: f64, d: usize) -> f64 {
    fock::geometric_tail(mbar, d)
}

/// `6·(m̄/(m̄+1))^d`.
pub fn approximation_bound(mbar: f64, d: usize) -> f64 {
    6.0 * tail_mass(mbar, d)
}

/// The bound says nothing once it exceeds the largest possible trace
/// distance, 2.
pub fn bound_is_informative(mbar: f64, d: usize) -> bool {
    approximation_bound(mbar, d) < 2.0
}

/// Smallest cutoff whose thermal deficit is below [`REFERENCE_DEFICIT`].
pub fn reference_dim(mbar: f64) -> usize {
    let mut d = 1;
    while tail_mass(mbar, d) >= REFERENCE_DEFICIT {
        d += 1;
    }
    d
}

fn sorted_matching(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Matching distance between the spectra of two Hermitian matrices: the
/// largest gap under the descending-order pairing, which is optimal for
/// real spectra.
pub fn spectral_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let ea = linalg::hermitian_eigenvalues(a.entries())?;
    let eb = linalg::hermitian_eigenvalues(b.entries())?;
    Ok(sorted_matching(&ea, &eb))
}

/// Per-branch comparison of a constellation spectrum with the thermal one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenConvergence {
    /// `|λ_{k,n} − λ_k|`, descending-order pairing.
    pub eig_gap: Vec<f64>,
    /// `‖|φ_{k,n}⟩⟨φ_{k,n}| − |k⟩⟨k|‖₁`; `None` where the thermal eigenvalue
    /// is degenerate and the branch has no unique projector.
    pub proj_gap: Vec<Option<f64>>,
    /// Whether the thermal eigenvalue is separated from its neighbours by
    /// more than ten times the trace distance, so the descending pairing is
    /// guaranteed to follow the same branch.
    pub identifiable: Vec<bool>,
}

fn separation(lambda: &[f64], k: usize) -> f64 {
    let mut gap = f64::INFINITY;
    if k > 0 {
        gap = gap.min(lambda[k - 1] - lambda[k]);
    }
    if k + 1 < lambda.len() {
        gap = gap.min(lambda[k] - lambda[k + 1]);
    }
    gap
}

/// Number of leading thermal branches with non-degenerate eigenvalues.
pub fn resolvable_branches(mbar: f64, dim: usize, k: usize) -> usize {
    let lambda = fock::thermal_eigenvalues(mbar, dim);
    (0..k.min(dim))
        .take_while(|&i| separation(&lambda, i) > DEGENERACY_TOL)
        .count()
}

fn branch_gaps(
    spectrum: &Spectrum,
    mbar: f64,
    branches: usize,
    trace_dist: f64,
    strict: bool,
) -> Result<EigenConvergence> {
    let dim = spectrum.dim();
    if branches > dim {
        return Err(Error::DimensionMismatch(branches, dim));
    }
    let lambda = fock::thermal_eigenvalues(mbar, dim);
    let mut out = EigenConvergence {
        eig_gap: Vec::with_capacity(branches),
        proj_gap: Vec::with_capacity(branches),
        identifiable: Vec::with_capacity(branches),
    };
    for k in 0..branches {
        out.eig_gap.push((spectrum.eigenvalues[k] - lambda[k]).abs());
        let sep = separation(&lambda, k);
        if sep <= DEGENERACY_TOL {
            if strict {
                return Err(Error::DegenerateSpectrum(k));
            }
            out.proj_gap.push(None);
        } else {
            // both projectors are rank one: ‖P − Q‖₁ = 2√(1 − |⟨φ|k⟩|²)
            let overlap = spectrum.eigenvectors[k].amps()[k].norm_sqr();
            out.proj_gap.push(Some(2.0 * (1.0 - overlap).max(0.0).sqrt()));
        }
        out.identifiable.push(sep > 10.0 * trace_dist);
    }
    Ok(out)
}

/// Eigenvalue and eigenprojector gaps for the first `branches` branches.
///
/// Errors with [`Error::DegenerateSpectrum`] when a requested thermal branch
/// has a degenerate eigenvalue (e.g. `m̄ = 0`, where every level above the
/// vacuum has weight zero).
pub fn eigen_convergence(
    c: &Constellation,
    mbar: f64,
    dim: usize,
    branches: usize,
) -> Result<EigenConvergence> {
    let rho = constellation_density(c, dim)?;
    let thermal = thermal_state(mbar, dim)?;
    let trace_dist = linalg::trace_norm_distance(&rho, &thermal)?;
    let spectrum = linalg::hermitian_eig(rho.entries())?;
    branch_gaps(&spectrum, mbar, branches, trace_dist, true)
}

/// How to choose the grid spacing of a shaped QAM.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpacingRule {
    /// Use this spacing as given.
    Fixed(f64),
    /// Choose the spacing minimising the trace distance to the thermal
    /// state on the working cutoff.
    #[default]
    MatchThermal,
}

const SPACING_SCAN_POINTS: usize = 40;
const GOLDEN_ITERATIONS: usize = 48;

fn trace_distance_at_spacing(m: usize, spacing: f64, mbar: f64, dim: usize) -> f64 {
    let attempt = || -> Result<f64> {
        let c = constellation::shaped_qam(m, spacing, mbar)?;
        let rho = constellation_density(&c, dim)?;
        linalg::trace_norm_distance(&rho, &thermal_state(mbar, dim)?)
    };
    attempt().unwrap_or(f64::INFINITY)
}

/// MB-shaped `m`-QAM with mean energy `mbar` whose spacing minimises the
/// trace distance to the thermal state on a `dim`-level cutoff.
///
/// `m = 1` only reaches `m̄ = 0` and `m = 2` has a single magnitude, so its
/// spacing is forced to `√(2m̄)`. For `m ≥ 3` the feasible spacing interval
/// is scanned on a uniform grid and the best cell refined by golden-section
/// search.
pub fn thermal_matched_qam(m: usize, mbar: f64, dim: usize) -> Result<Constellation> {
    fock::check_mbar(mbar)?;
    match m {
        0 => return Err(Error::InvalidOrder(0)),
        1 => {
            if mbar != 0.0 {
                return Err(Error::Unreachable {
                    target: mbar,
                    min: 0.0,
                    max: 0.0,
                });
            }
            return Constellation::uniform(vec![crate::C64::new(0.0, 0.0)]);
        }
        2 => {
            if mbar == 0.0 {
                return Err(Error::Unreachable {
                    target: mbar,
                    min: f64::MIN_POSITIVE,
                    max: f64::INFINITY,
                });
            }
            return constellation::shaped_qam(2, (2.0 * mbar).sqrt(), mbar);
        }
        _ => {}
    }
    let (lo, hi) = constellation::feasible_spacing(m, mbar).ok_or(Error::Unreachable {
        target: mbar,
        min: 0.0,
        max: 0.0,
    })?;
    // stay strictly inside the open interval
    let lo = lo * (1.0 + 1e-9);
    let hi = hi * (1.0 - 1e-9);
    let step = (hi - lo) / (SPACING_SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SPACING_SCAN_POINTS).map(|i| lo + step * i as f64).collect();
    let values: Vec<f64> = grid
        .iter()
        .map(|&s| trace_distance_at_spacing(m, s, mbar, dim))
        .collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty scan");
    if !values[best].is_finite() {
        // every spacing failed; surface the error of the central one
        let c = constellation::shaped_qam(m, grid[SPACING_SCAN_POINTS / 2], mbar)?;
        constellation_density(&c, dim)?;
        return Err(Error::TruncationTooSevere {
            deficit: f64::NAN,
            dim,
            limit: DEFICIT_GATE,
        });
    }

    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(SPACING_SCAN_POINTS - 1)];
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = trace_distance_at_spacing(m, x1, mbar, dim);
    let mut f2 = trace_distance_at_spacing(m, x2, mbar, dim);
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = trace_distance_at_spacing(m, x1, mbar, dim);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = trace_distance_at_spacing(m, x2, mbar, dim);
        }
    }
    let (mut spacing, mut value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if values[best] < value {
        spacing = grid[best];
        value = values[best];
    }
    debug_assert!(value.is_finite());
    constellation::shaped_qam(m, spacing, mbar)
}

/// Builds the shaped QAM for one sweep point.
pub fn build_qam(m: usize, mbar: f64, rule: SpacingRule, dim: usize) -> Result<Constellation> {
    match rule {
        SpacingRule::MatchThermal => thermal_matched_qam(m, mbar, dim),
        SpacingRule::Fixed(s) => {
            if m == 1 {
                thermal_matched_qam(1, mbar, dim)
            } else {
                constellation::shaped_qam(m, s, mbar)
            }
        }
    }
}

/// One row of a convergence sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub m: usize,
    pub mbar: f64,
    pub dim: usize,
    pub spacing: Option<f64>,
    pub nu: Option<f64>,
    /// Truncation deficit of the constellation state.
    pub deficit: f64,
    pub trace_dist: f64,
    pub tail_eps: f64,
    pub bound_6eps: f64,
    pub bound_informative: bool,
    pub spectral_dist: f64,
    pub eig_gap: Vec<f64>,
    pub proj_gap: Vec<Option<f64>>,
    pub identifiable: Vec<bool>,
}

/// Compares `c` with `thermal(mbar)` on a `dim`-level cutoff. Branches whose
/// thermal eigenvalue is degenerate get no projector gap.
pub fn convergence_report(
    c: &Constellation,
    mbar: f64,
    dim: usize,
    branches: usize,
) -> Result<ConvergenceReport> {
    fock::check_mbar(mbar)?;
    let rho = constellation_density(c, dim)?;
    let thermal = thermal_state(mbar, dim)?;
    let trace_dist = linalg::trace_norm_distance(&rho, &thermal)?;
    let spectrum = linalg::hermitian_eig(rho.entries())?;
    let reference = fock::thermal_eigenvalues(mbar, dim);
    let spectral_dist = sorted_matching(&spectrum.eigenvalues, &reference);
    let gaps = branch_gaps(&spectrum, mbar, branches.min(dim), trace_dist, false)?;
    Ok(ConvergenceReport {
        m: c.order(),
        mbar,
        dim,
        spacing: c.meta.spacing,
        nu: c.meta.nu,
        deficit: rho.deficit(),
        trace_dist,
        tail_eps: tail_mass(mbar, dim),
        bound_6eps: approximation_bound(mbar, dim),
        bound_informative: bound_is_informative(mbar, dim),
        spectral_dist,
        eig_gap: gaps.eig_gap,
        proj_gap: gaps.proj_gap,
        identifiable: gaps.identifiable,
    })
}

/// Runs [`convergence_report`] for each order with MB shaping solved to hit
/// `mbar`.
pub fn convergence_sweep(
    orders: &[usize],
    mbar: f64,
    dim: usize,
    branches: usize,
    rule: SpacingRule,
) -> Result<Vec<ConvergenceReport>> {
    orders
        .iter()
        .map(|&m| {
            let c = build_qam(m, mbar, rule, dim)?;
            convergence_report(&c, mbar, dim, branches)
        })
        .collect()
}
