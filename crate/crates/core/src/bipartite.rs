//! Purifications of constellation states and the covariance-matrix gap to
//! the two-mode squeezed (EPR) reference.
//!
//! A purification `|Φ⟩ = (𝟙 ⊗ ρ^{1/2}) Σ_n |n⟩|n⟩` is stored as its
//! amplitude vector on the `d²` two-mode basis (A-major):
//! `Φ[l·d + k] = (ρ^{1/2})_{k,l}`. Dense `d² × d²` matrices are only
//! materialised on request; at `d = 64` one such matrix takes 256 MiB and
//! an eigendecomposition of it is out of reach, so distances between pure
//! states go through overlaps.

use serde::{Deserialize, Serialize};

use crate::constellation::Constellation;
use crate::convergence::{self, SpacingRule, DEFICIT_GATE};
use crate::fock::{self, DensityMatrix, Subsystem};
use crate::linalg;
use crate::{CMatrix, Error, Result, C64};

/// Lossy, noisy bosonic channel: transmittance `tau ∈ (0, 1]` and excess
/// noise `xi ≥ 0` in shot-noise units referred to the channel input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelModel {
    pub tau: f64,
    pub xi: f64,
}

impl ChannelModel {
    pub fn new(tau: f64, xi: f64) -> Result<Self> {
        let ch = Self { tau, xi };
        ch.validate()?;
        Ok(ch)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::NonPhysicalInput(format!(
                "transmittance must lie in (0, 1], got {}",
                self.tau
            )));
        }
        if !(self.xi >= 0.0) || !self.xi.is_finite() {
            return Err(Error::NonPhysicalInput(format!(
                "excess noise must be finite and >= 0, got {}",
                self.xi
            )));
        }
        Ok(())
    }
}

/// Pure two-mode state on a `d × d` Fock cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    mode_dim: usize,
    amplitudes: Vec<C64>,
    deficit: f64,
    source: String,
}

impl BipartiteState {
    pub fn mode_dim(&self) -> usize {
        self.mode_dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Truncation deficit of the single-mode state this was built from.
    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// `⟨Φ|Φ⟩`, the trace of the two-mode density matrix.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &BipartiteState) -> Result<C64> {
        if self.mode_dim != other.mode_dim {
            return Err(Error::DimensionMismatch(self.mode_dim, other.mode_dim));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Dense `|Φ⟩⟨Φ|`. Cost `O(d⁴)` memory.
    pub fn to_matrix(&self) -> CMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        &v * v.adjoint()
    }

    /// Reduced state after tracing out `traced`, computed from the amplitudes.
    pub fn reduced(&self, traced: Subsystem) -> CMatrix {
        let d = self.mode_dim;
        let phi = &self.amplitudes;
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..d {
                    s += match traced {
                        Subsystem::B => phi[i * d + k] * phi[j * d + k].conj(),
                        Subsystem::A => phi[k * d + i] * phi[k * d + j].conj(),
                    };
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    /// Upper bound on `tr ρ − λ_max(ρ)` for the dense two-mode matrix, from
    /// `λ_max ≥ tr(ρ²)/tr(ρ)`; zero exactly when the matrix has rank one.
    pub fn rank_one_defect(&self) -> f64 {
        let rho = self.to_matrix();
        let trace = rho.trace().re;
        if trace == 0.0 {
            return 0.0;
        }
        let purity: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
        (trace - purity / trace).max(0.0)
    }

    /// `tr[ρ (a⊗b + a†⊗b†)] = 2 Re⟨Φ|a⊗b|Φ⟩` with truncated ladder operators.
    pub fn ab_correlation(&self) -> Result<f64> {
        let d = self.mode_dim;
        if d < 2 {
            return Err(Error::DimensionMismatch(d, 2));
        }
        let phi = &self.amplitudes;
        let mut s = C64::new(0.0, 0.0);
        for l in 0..d - 1 {
            for k in 0..d - 1 {
                let lowered = phi[(l + 1) * d + (k + 1)] * (((l + 1) * (k + 1)) as f64).sqrt();
                s += phi[l * d + k].conj() * lowered;
            }
        }
        Ok(2.0 * s.re)
    }
}

/// Purification `(𝟙 ⊗ ρ^{1/2}) Σ|n⟩|n⟩`. Tracing out A returns `ρ`;
/// tracing out B returns `ρᵀ`.
pub fn purify(rho: &DensityMatrix) -> Result<BipartiteState> {
    if rho.deficit() >= DEFICIT_GATE {
        return Err(Error::TruncationTooSevere {
            deficit: rho.deficit(),
            dim: rho.dim(),
            limit: DEFICIT_GATE,
        });
    }
    let d = rho.dim();
    let sqrt = linalg::matrix_sqrt_psd(rho.entries())?;
    let mut amplitudes = vec![C64::new(0.0, 0.0); d * d];
    for l in 0..d {
        for k in 0..d {
            amplitudes[l * d + k] = sqrt[(k, l)];
        }
    }
    Ok(BipartiteState {
        mode_dim: d,
        amplitudes,
        deficit: rho.deficit(),
        source: "purification".into(),
    })
}

/// Purification of the state of a constellation.
pub fn purify_constellation(c: &Constellation, dim: usize) -> Result<BipartiteState> {
    let mut s = purify(&convergence::constellation_density(c, dim)?)?;
    s.source = format!("constellation(m={})", c.order());
    Ok(s)
}

/// Two-mode squeezed vacuum `Σ_n √((1−λ²)) λⁿ |n⟩|n⟩` with `λ² = m̄/(m̄+1)`,
/// truncated to `dim` levels per mode.
pub fn epr_state(mbar: f64, dim: usize) -> Result<BipartiteState> {
    fock::check_mbar(mbar)?;
    if dim < 1 {
        return Err(Error::NonPhysicalInput("dim must be >= 1".into()));
    }
    let mut amplitudes = vec![C64::new(0.0, 0.0); dim * dim];
    for (n, p) in fock::thermal_eigenvalues(mbar, dim).into_iter().enumerate() {
        amplitudes[n * dim + n] = C64::new(p.sqrt(), 0.0);
    }
    Ok(BipartiteState {
        mode_dim: dim,
        amplitudes,
        deficit: fock::geometric_tail(mbar, dim),
        source: format!("EPR({mbar})"),
    })
}

/// Closed-form parameters of the EPR reference for mean photon number `m̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EprReference {
    /// Quadrature variance `ν = 2m̄ + 1`.
    pub nu: f64,
    /// Off-diagonal covariance `Z = 2√(m̄² + m̄)`.
    pub z: f64,
    /// Squeezing `r` with `m̄ = sinh²r`.
    pub squeeze_r: f64,
    /// `λ = tanh r = √(m̄/(m̄+1))`.
    pub lambda: f64,
}

pub fn epr_reference(mbar: f64) -> Result<EprReference> {
    fock::check_mbar(mbar)?;
    Ok(EprReference {
        nu: 2.0 * mbar + 1.0,
        z: 2.0 * (mbar * mbar + mbar).sqrt(),
        squeeze_r: mbar.sqrt().asinh(),
        lambda: (mbar / (mbar + 1.0)).sqrt(),
    })
}

/// `Z*_n = √τ·tr[ρ_AB (a⊗b + a†⊗b†)] − √(2τξw)`.
///
/// `w` is a caller-supplied non-negative weight on the excess-noise
/// correction; it vanishes in the Gaussian limit.
pub fn z_star(state: &BipartiteState, ch: &ChannelModel, w: f64) -> Result<f64> {
    ch.validate()?;
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::NonPhysicalInput(format!("w must be finite and >= 0, got {w}")));
    }
    if state.deficit >= DEFICIT_GATE {
        return Err(Error::TruncationTooSevere {
            deficit: state.deficit,
            dim: state.mode_dim,
            limit: DEFICIT_GATE,
        });
    }
    let corr = state.ab_correlation()?;
    Ok(ch.tau.sqrt() * corr - (2.0 * ch.tau * ch.xi * w).sqrt())
}

/// Channel-scaled EPR covariance `Z_ch = 2√τ √(m̄² + m̄)`.
pub fn z_channel(mbar: f64, tau: f64) -> f64 {
    2.0 * tau.sqrt() * (mbar * mbar + mbar).sqrt()
}

/// Hilbert–Schmidt distance `2|Z_ch − Z*|` between the reference and the
/// constellation covariance matrices; the diagonal blocks cancel.
pub fn cm_distance(mbar: f64, zstar: f64, ch: &ChannelModel) -> Result<f64> {
    fock::check_mbar(mbar)?;
    ch.validate()?;
    if !zstar.is_finite() {
        return Err(Error::NonPhysicalInput(format!("Z* = {zstar}")));
    }
    Ok(2.0 * (z_channel(mbar, ch.tau) - zstar).abs())
}

/// Two-mode covariance matrix `[[V_A·I, Z·σ_z], [Z·σ_z, V_B·I]]` in SNU.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix {
    pub va: f64,
    pub vb: f64,
    pub z: f64,
}

impl CovarianceMatrix {
    /// `V_A = 2m̄ + 1`; `V_B = 2τm̄ + 1 + τξ` (thermal-loss bookkeeping, a
    /// convention: it never enters the off-diagonal gap).
    pub fn for_channel(mbar: f64, ch: &ChannelModel, z: f64) -> Self {
        let cm = Self {
            va: 2.0 * mbar + 1.0,
            vb: 2.0 * ch.tau * mbar + 1.0 + ch.tau * ch.xi,
            z,
        };
        if !cm.within_physical_bound() {
            log::warn!(
                "covariance Z = {} exceeds sqrt((V_A-1)(V_B+1)) for V_A = {}, V_B = {}",
                cm.z,
                cm.va,
                cm.vb
            );
        }
        cm
    }

    /// `|Z| ≤ √((V_A − 1)(V_B + 1))`. Estimated matrices may violate it.
    pub fn within_physical_bound(&self) -> bool {
        self.z.abs() <= ((self.va - 1.0) * (self.vb + 1.0)).sqrt() + 1e-12
    }

    pub fn to_array(&self) -> [[f64; 4]; 4] {
        let (a, b, z) = (self.va, self.vb, self.z);
        [
            [a, 0.0, z, 0.0],
            [0.0, a, 0.0, -z],
            [z, 0.0, b, 0.0],
            [0.0, -z, 0.0, b],
        ]
    }

    /// Frobenius (Hilbert–Schmidt) distance between the 4×4 matrices.
    pub fn hs_distance(&self, other: &CovarianceMatrix) -> f64 {
        let (x, y) = (self.to_array(), other.to_array());
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += (x[i][j] - y[i][j]).powi(2);
            }
        }
        s.sqrt()
    }
}

/// Trace-norm distance between two pure two-mode states:
/// `√((‖a‖² + ‖b‖²)² − 4|⟨a|b⟩|²)`, which reduces to `2√(1 − |⟨a|b⟩|²)` for
/// normalised vectors and stays exact for truncated (sub-normalised) ones.
pub fn bipartite_trace_distance(a: &BipartiteState, b: &BipartiteState) -> Result<f64> {
    let ov = a.overlap(b)?.norm_sqr();
    let s = a.norm_sqr() + b.norm_sqr();
    Ok((s * s - 4.0 * ov).max(0.0).sqrt())
}

/// Same distance through a dense eigendecomposition of the `d² × d²`
/// difference. Only practical for small cutoffs.
pub fn bipartite_trace_distance_dense(a: &BipartiteState, b: &BipartiteState) -> Result<f64> {
    if a.mode_dim != b.mode_dim {
        return Err(Error::DimensionMismatch(a.mode_dim, b.mode_dim));
    }
    linalg::trace_norm(&(a.to_matrix() - b.to_matrix()))
}

/// One row of the covariance sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariancePoint {
    pub m: usize,
    pub mbar: f64,
    pub dim: usize,
    pub tau: f64,
    pub xi: f64,
    pub w: f64,
    pub z_ch: f64,
    pub z_star: f64,
    pub cm_distance: f64,
    pub purification_trace_dist: f64,
    pub covariance: CovarianceMatrix,
    pub reference: CovarianceMatrix,
}

/// Purifies each shaped QAM and compares its covariance entry and its
/// purification with the thermal (EPR) reference on the same cutoff.
pub fn covariance_sweep(
    orders: &[usize],
    mbar: f64,
    dim: usize,
    ch: &ChannelModel,
    w: f64,
    rule: SpacingRule,
) -> Result<Vec<CovariancePoint>> {
    ch.validate()?;
    let reference_state = purify(&fock::thermal_state(mbar, dim)?)?;
    let z_ch = z_channel(mbar, ch.tau);
    orders
        .iter()
        .map(|&m| {
            let c = convergence::build_qam(m, mbar, rule, dim)?;
            let state = purify_constellation(&c, dim)?;
            let zs = z_star(&state, ch, w)?;
            Ok(CovariancePoint {
                m,
                mbar,
                dim,
                tau: ch.tau,
                xi: ch.xi,
                w,
                z_ch,
                z_star: zs,
                cm_distance: cm_distance(mbar, zs, ch)?,
                purification_trace_dist: bipartite_trace_distance(&state, &reference_state)?,
                covariance: CovarianceMatrix::for_channel(mbar, ch, zs),
                reference: CovarianceMatrix::for_channel(mbar, ch, z_ch),
            })
        })
        .collect()
}
