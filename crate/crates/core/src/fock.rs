//! Truncated Fock-space states and operators.
//!
//! Basis ordering is Fock index ascending. On the two-mode space the A mode
//! is major: `|l⟩_A|k⟩_B` sits at row `l·d + k`.
//!
//! Truncated states are never renormalized. The probability mass lost above
//! the cutoff is carried as a `deficit` so callers can bound it explicitly.

use crate::linalg::{self, hermitian_defect};
use crate::{CMatrix, Error, Result, C64};

/// Upper bound on `|α|²` accepted by [`coherent_fock`].
pub const MAX_COHERENT_ENERGY: f64 = 50.0;

/// Amplitudes of a single-mode state over the first `dim` Fock levels.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<C64>,
}

impl FockVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::NonPhysicalInput("Fock vector needs dim >= 1".into()));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonPhysicalInput("non-finite amplitude".into()));
        }
        Ok(Self { amps })
    }

    pub(crate) fn from_amps_unchecked(amps: Vec<C64>) -> Self {
        Self { amps }
    }

    /// Number state `|n⟩` in a cutoff of `dim`.
    pub fn number(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::DimensionMismatch(n, dim));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[n] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> CMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        &v * v.adjoint()
    }
}

/// First `dim` Fock coefficients of the coherent state `|α⟩`,
/// `⟨n|α⟩ = e^{−|α|²/2} αⁿ/√(n!)`, built by the recurrence
/// `c_{n+1} = c_n · α/√(n+1)`.
pub fn coherent_fock(alpha: C64, dim: usize) -> Result<FockVector> {
    if dim < 1 {
        return Err(Error::NonPhysicalInput("dim must be >= 1".into()));
    }
    let energy = alpha.norm_sqr();
    if !energy.is_finite() || energy > MAX_COHERENT_ENERGY {
        return Err(Error::NonPhysicalInput(format!(
            "|alpha|^2 = {energy} exceeds the supported bound {MAX_COHERENT_ENERGY}"
        )));
    }
    let mut amps = Vec::with_capacity(dim);
    let mut c = C64::new((-0.5 * energy).exp(), 0.0);
    amps.push(c);
    for n in 1..dim {
        c = c * alpha / (n as f64).sqrt();
        amps.push(c);
    }
    Ok(FockVector { amps })
}

/// Thermal tail `(m̄/(m̄+1))^d`: the mass of a thermal state with mean
/// photon number `m̄` above the first `d` levels.
pub fn geometric_tail(mbar: f64, d: usize) -> f64 {
    if d == 0 {
        return 1.0;
    }
    let q = mbar / (mbar + 1.0);
    q.powf(d as f64)
}

pub(crate) fn check_mbar(mbar: f64) -> Result<()> {
    if !(mbar >= 0.0) || !mbar.is_finite() {
        return Err(Error::NonPhysicalInput(format!(
            "mean photon number must be finite and >= 0, got {mbar}"
        )));
    }
    Ok(())
}

/// Density operator on a Fock cutoff, with the truncated trace mass.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    entries: CMatrix,
    deficit: f64,
}

/// Tolerance on `trace + deficit = 1`.
pub const TRACE_TOL: f64 = 1e-10;

impl DensityMatrix {
    /// Validating constructor: Hermitian within 1e-12, PSD within 1e-10 and
    /// `trace + deficit = 1` within 1e-10.
    pub fn new(entries: CMatrix, deficit: f64) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::DimensionMismatch(entries.nrows(), entries.ncols()));
        }
        let defect = hermitian_defect(&entries);
        if defect > 1e-12 {
            return Err(Error::NotHermitian(defect));
        }
        if !(0.0..=1.0).contains(&deficit) {
            return Err(Error::NonPhysicalInput(format!("deficit {deficit} outside [0, 1]")));
        }
        let trace = entries.trace().re;
        if (trace + deficit - 1.0).abs() > TRACE_TOL {
            return Err(Error::NonPhysicalInput(format!(
                "trace {trace} + deficit {deficit} != 1"
            )));
        }
        let min = linalg::hermitian_eigenvalues(&entries)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -linalg::PSD_CLAMP {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { entries, deficit })
    }

    /// For matrices that are PSD by construction.
    pub(crate) fn from_parts(entries: CMatrix, deficit: f64) -> Self {
        Self { entries, deficit }
    }

    /// `|ψ⟩⟨ψ|` with deficit `1 − ‖ψ‖²`.
    pub fn pure(v: &FockVector) -> Self {
        Self {
            entries: v.projector(),
            deficit: (1.0 - v.norm_sqr()).max(0.0),
        }
    }

    /// `Σ p_k |ψ_k⟩⟨ψ_k|`.
    pub fn mixture(states: &[(f64, FockVector)]) -> Result<Self> {
        let dim = states
            .first()
            .map(|(_, v)| v.dim())
            .ok_or_else(|| Error::NonPhysicalInput("empty mixture".into()))?;
        let mut entries = CMatrix::zeros(dim, dim);
        let mut deficit = 0.0;
        let mut weight = 0.0;
        for (p, v) in states {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch(v.dim(), dim));
            }
            if !(*p >= 0.0) {
                return Err(Error::NonPhysicalInput(format!("negative weight {p}")));
            }
            let a = v.amps();
            for j in 0..dim {
                let cj = a[j].conj() * *p;
                for i in 0..dim {
                    entries[(i, j)] += a[i] * cj;
                }
            }
            deficit += p * (1.0 - v.norm_sqr()).max(0.0);
            weight += p;
        }
        if (weight - 1.0).abs() > 1e-12 {
            return Err(Error::NonPhysicalInput(format!("weights sum to {weight}")));
        }
        Ok(Self { entries, deficit })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }
}

/// Thermal state `Σ_k m̄^k/(m̄+1)^{k+1} |k⟩⟨k|` on the first `dim` levels.
pub fn thermal_state(mbar: f64, dim: usize) -> Result<DensityMatrix> {
    check_mbar(mbar)?;
    if dim < 1 {
        return Err(Error::NonPhysicalInput("dim must be >= 1".into()));
    }
    let diag = thermal_eigenvalues(mbar, dim);
    let entries = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        dim,
        diag.iter().map(|&x| C64::new(x, 0.0)),
    ));
    Ok(DensityMatrix::from_parts(entries, geometric_tail(mbar, dim)))
}

/// `m̄^k/(m̄+1)^{k+1}` for `k < count`, descending.
pub fn thermal_eigenvalues(mbar: f64, count: usize) -> Vec<f64> {
    let q = mbar / (mbar + 1.0);
    let mut x = 1.0 / (mbar + 1.0);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(x);
        x *= q;
    }
    out
}

/// Truncated annihilation operator: `√k` at `(k−1, k)`.
pub fn annihilation_op(dim: usize) -> Result<CMatrix> {
    if dim < 2 {
        return Err(Error::NonPhysicalInput("ladder operators need dim >= 2".into()));
    }
    let mut a = CMatrix::zeros(dim, dim);
    for k in 1..dim {
        a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    Ok(a)
}

/// Kronecker product `a ⊗ b` (A-major indexing).
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(a.nrows(), a.ncols()));
    }
    if !b.is_square() {
        return Err(Error::DimensionMismatch(b.nrows(), b.ncols()));
    }
    Ok(a.kronecker(b))
}

/// Which mode of a two-mode operator is traced out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Integer square root of a two-mode dimension.
pub fn mode_dim_of(total: usize) -> Result<usize> {
    let d = (total as f64).sqrt().round() as usize;
    if d * d != total {
        return Err(Error::DimensionMismatch(total, d * d));
    }
    Ok(d)
}

/// Traces out `traced` from an operator on `d² = d·d` with equal mode cutoffs.
pub fn partial_trace(m: &CMatrix, traced: Subsystem) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
    }
    let d = mode_dim_of(m.nrows())?;
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..d {
                s += match traced {
                    Subsystem::B => m[(i * d + k, j * d + k)],
                    Subsystem::A => m[(k * d + i, k * d + j)],
                };
            }
            out[(i, j)] = s;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_first_basis_vector() {
        let v = coherent_fock(C64::new(0.0, 0.0), 4).unwrap();
        assert_eq!(v.amps()[0], C64::new(1.0, 0.0));
        assert!(v.amps()[1..].iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn single_level_coherent_state() {
        let v = coherent_fock(C64::new(0.0, 2.0), 1).unwrap();
        assert!((v.amps()[0].re - (-2.0f64).exp()).abs() < 1e-16);
        assert!((v.norm_sqr() - (-4.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn coherent_guards() {
        assert!(coherent_fock(C64::new(1.0, 0.0), 0).is_err());
        assert!(coherent_fock(C64::new(7.1, 0.0), 8).is_err());
        assert!(coherent_fock(C64::new(7.0, 0.0), 8).is_ok());
    }

    #[test]
    fn thermal_examples() {
        let t = thermal_state(0.0, 3).unwrap();
        assert_eq!(t.entries()[(0, 0)].re, 1.0);
        assert_eq!(t.deficit(), 0.0);

        let t = thermal_state(1.0, 2).unwrap();
        assert_eq!(t.entries()[(0, 0)].re, 0.5);
        assert_eq!(t.entries()[(1, 1)].re, 0.25);
        assert_eq!(t.deficit(), 0.25);

        assert!(thermal_state(-0.1, 3).is_err());
    }

    #[test]
    fn thermal_deficit_closed_form() {
        // (2.5/3.5)^40, evaluated independently through logarithms
        let expect = (40.0 * (2.5f64 / 3.5).ln()).exp();
        let t = thermal_state(2.5, 40).unwrap();
        assert!((t.deficit() - expect).abs() / expect < 1e-12);
        assert!((t.deficit() - 1.428_494_500_895_648_6e-6).abs() < 1e-18);
        assert!((t.trace() + t.deficit() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ladder_operator() {
        let a = annihilation_op(2).unwrap();
        assert_eq!(a[(0, 1)].re, 1.0);
        assert_eq!(a[(0, 0)].re + a[(1, 0)].re + a[(1, 1)].re, 0.0);

        let a = annihilation_op(4).unwrap();
        let n = a.adjoint() * &a;
        for k in 0..4 {
            assert!((n[(k, k)].re - k as f64).abs() < 1e-14);
        }
        assert!(annihilation_op(1).is_err());
    }

    #[test]
    fn commutator_on_truncated_space() {
        let d = 7;
        let a = annihilation_op(d).unwrap();
        let comm = &a * a.adjoint() - a.adjoint() * &a;
        for i in 0..d - 1 {
            for j in 0..d - 1 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((comm[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-13);
            }
        }
        assert!((comm[(d - 1, d - 1)].re + (d as f64 - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn partial_trace_of_vacuum_pair() {
        let v0 = FockVector::number(0, 3).unwrap().projector();
        let joint = tensor_product(&v0, &v0).unwrap();
        assert_eq!(partial_trace(&joint, Subsystem::B).unwrap(), v0);
        assert_eq!(partial_trace(&joint, Subsystem::A).unwrap(), v0);
    }

    #[test]
    fn partial_trace_of_product() {
        let rho = thermal_state(0.7, 4).unwrap().entries().clone();
        let sigma = coherent_fock(C64::new(0.3, -0.2), 4).unwrap().projector();
        let joint = tensor_product(&rho, &sigma).unwrap();
        let tr_sigma = sigma.trace();
        let reduced = partial_trace(&joint, Subsystem::B).unwrap();
        assert!(linalg::frobenius(&(reduced - &rho * tr_sigma)) < 1e-14);
        let reduced = partial_trace(&joint, Subsystem::A).unwrap();
        assert!(linalg::frobenius(&(reduced - &sigma * rho.trace())) < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_non_square_dims() {
        assert!(partial_trace(&CMatrix::zeros(5, 5), Subsystem::A).is_err());
    }

    #[test]
    fn density_validation() {
        let v = FockVector::number(1, 3).unwrap();
        assert!(DensityMatrix::new(v.projector(), 0.0).is_ok());
        assert!(DensityMatrix::new(v.projector(), 0.2).is_err());
        let mut bad = v.projector();
        bad[(0, 0)] = C64::new(-0.5, 0.0);
        bad[(2, 2)] = C64::new(0.5, 0.0);
        assert!(matches!(DensityMatrix::new(bad, 0.0), Err(Error::NotPsd(_))));
    }
}
