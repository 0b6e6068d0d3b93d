//! Dense Hermitian linear algebra: cyclic Jacobi eigensolver, PSD square
//! roots and trace norms.
//!
//! Matrices are small (Fock cutoffs up to a few hundred), so a plain cyclic
//! Jacobi sweep is accurate and fast enough. Each rotation is the product of
//! a diagonal phase that makes the pivot real and a real Givens rotation.

use crate::fock::{DensityMatrix, FockVector};
use crate::{CMatrix, Error, Result, C64};

/// Off-diagonal Frobenius mass, relative to the full norm, at which the
/// Jacobi iteration stops.
pub const JACOBI_TOL: f64 = 1e-12;
/// Maximum number of cyclic sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Hermiticity tolerance accepted on input, relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as numerical zero.
pub const PSD_CLAMP: f64 = 1e-10;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<FockVector>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Rebuilds `Σ λ_k |v_k⟩⟨v_k|`.
    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|x| x)
    }

    /// Rebuilds `Σ f(λ_k) |v_k⟩⟨v_k|`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lambda);
            if w == 0.0 {
                continue;
            }
            let amps = v.amps();
            for j in 0..n {
                let cj = amps[j].conj() * w;
                for i in 0..n {
                    out[(i, j)] += amps[i] * cj;
                }
            }
        }
        out
    }
}

/// Largest `|m_ij - conj(m_ji)|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
    }
    let scale = m.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL * scale || !defect.is_finite() {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Row-major working copy with the Hermitian part taken explicitly.
fn hermitian_part(m: &CMatrix) -> Vec<C64> {
    let n = m.nrows();
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }
    a
}

fn off_diagonal_mass(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Runs cyclic Jacobi in place. Returns the eigenvector matrix (row-major,
/// eigenvectors in columns) when `vectors` is set.
fn jacobi(a: &mut [C64], n: usize, vectors: bool) -> Result<Option<Vec<C64>>> {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let mut v = if vectors {
        let mut v = vec![zero; n * n];
        for i in 0..n {
            v[i * n + i] = one;
        }
        Some(v)
    } else {
        None
    };

    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if total == 0.0 || n < 2 {
        return Ok(v);
    }

    let mut off = off_diagonal_mass(a, n);
    let mut sweeps = 0;
    while off > JACOBI_TOL * total {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::ConvergenceFailure {
                sweeps,
                residual: off / total,
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                // e^{-i phi} with apq = r e^{i phi}
                let phase = apq.conj() / r;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = phase * (-s);
                let g_qq = phase * c;

                // A <- A G
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * g_pp + akq * g_qp;
                    a[k * n + q] = akp * g_pq + akq * g_qq;
                }
                // A <- G^dagger A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[q * n + k] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[p * n + q] = zero;
                a[q * n + p] = zero;
                a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = C64::new(a[q * n + q].re, 0.0);

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * g_pp + vkq * g_qp;
                        v[k * n + q] = vkp * g_pq + vkq * g_qq;
                    }
                }
            }
        }
        off = off_diagonal_mass(a, n);
    }
    Ok(v)
}

fn sorted_order(a: &[C64], n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].re.total_cmp(&a[i * n + i].re));
    order
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(m: &CMatrix) -> Result<Spectrum> {
    check_hermitian(m)?;
    let n = m.nrows();
    let mut a = hermitian_part(m);
    let v = jacobi(&mut a, n, true)?.expect("vectors requested");
    let order = sorted_order(&a, n);
    let eigenvalues = order.iter().map(|&i| a[i * n + i].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&col| FockVector::from_amps_unchecked((0..n).map(|row| v[row * n + col]).collect()))
        .collect();
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, sorted descending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let n = m.nrows();
    let mut a = hermitian_part(m);
    jacobi(&mut a, n, false)?;
    Ok(sorted_order(&a, n).iter().map(|&i| a[i * n + i].re).collect())
}

/// Positive semidefinite square root. Eigenvalues in `[-1e-10, 0)` are
/// clamped to zero; anything more negative is rejected.
pub fn matrix_sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    let spectrum = hermitian_eig(m)?;
    let min = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -PSD_CLAMP {
        return Err(Error::NotPsd(min));
    }
    Ok(spectrum.reconstruct_with(|x| x.max(0.0).sqrt()))
}

/// Schatten-1 norm of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.iter().map(|x| x.abs()).sum())
}

/// `‖a − b‖₁` for density matrices on the same cutoff.
pub fn trace_norm_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    trace_norm(&(a.entries() - b.entries()))
}

/// Frobenius norm of a complex matrix.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_input() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.25, 0.0), c(0.5, 0.0)]));
        let s = hermitian_eig(&m).unwrap();
        assert_eq!(s.eigenvalues, vec![0.5, 0.25]);
        assert!((s.eigenvectors[0].amps()[1].norm() - 1.0).abs() < 1e-15);
        assert!((s.eigenvectors[1].amps()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rank_one_plus_projector() {
        let m = CMatrix::from_element(2, 2, c(0.5, 0.0));
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14);
        assert!(ev[1].abs() < 1e-14);
    }

    #[test]
    fn complex_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1.
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let s = hermitian_eig(&m).unwrap();
        assert!((s.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(frobenius(&(s.reconstruct() - &m)) < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn sqrt_of_diagonal() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.8, 0.0), c(0.2, 0.0)]));
        let s = matrix_sqrt_psd(&m).unwrap();
        let k = 1.0 / 5f64.sqrt();
        assert!((s[(0, 0)].re - 2.0 * k).abs() < 1e-14);
        assert!((s[(1, 1)].re - k).abs() < 1e-14);
        assert!(s[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn sqrt_of_maximally_mixed() {
        let d = 5;
        let m = CMatrix::identity(d, d) / c(d as f64, 0.0);
        let s = matrix_sqrt_psd(&m).unwrap();
        let expect = CMatrix::identity(d, d) / c((d as f64).sqrt(), 0.0);
        assert!(frobenius(&(s - expect)) < 1e-14);
    }

    #[test]
    fn sqrt_clamps_noise_and_rejects_negative() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-5e-11, 0.0)]));
        let s = matrix_sqrt_psd(&m).unwrap();
        assert_eq!(s[(1, 1)].re, 0.0);
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-1e-6, 0.0)]));
        assert!(matches!(matrix_sqrt_psd(&m), Err(Error::NotPsd(_))));
    }

    #[test]
    fn zero_matrix() {
        let s = hermitian_eig(&CMatrix::zeros(3, 3)).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0; 3]);
    }
}
