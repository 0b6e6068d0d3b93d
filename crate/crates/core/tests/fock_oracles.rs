use dmqkd::bipartite::{bipartite_trace_distance, bipartite_trace_distance_dense, purify};
use dmqkd::fock::{
    coherent_fock, partial_trace, tensor_product, thermal_state, DensityMatrix, FockVector,
    Subsystem,
};
use dmqkd::linalg::{
    frobenius, hermitian_eig, matrix_sqrt_psd, trace_norm, trace_norm_distance,
};
use dmqkd::{CMatrix, C64};
use proptest::prelude::*;
use statrs::function::gamma::gamma_ur;

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[test]
fn coherent_amplitudes_match_factorial_form() {
    let alpha = C64::new(0.6, -0.8); // |α|² = 1
    let v = coherent_fock(alpha, 20).unwrap();
    for (n, c) in v.amps().iter().enumerate() {
        let exact = (-0.5f64).exp() * alpha.powu(n as u32) / factorial(n as u32).sqrt();
        assert!((c - exact).norm() < 1e-15, "n={n}");
    }
}

#[test]
fn truncated_norm_is_poisson_cdf() {
    for (energy, dim) in [(0.5, 4), (2.0, 10), (9.0, 15), (20.0, 40)] {
        let v = coherent_fock(C64::new(f64::sqrt(energy), 0.0), dim).unwrap();
        // P(N ≤ dim − 1) for N ~ Poisson(energy)
        let cdf = gamma_ur(dim as f64, energy);
        assert!((v.norm_sqr() - cdf).abs() < 1e-12, "energy={energy} dim={dim}");
    }
}

#[test]
fn thermal_deficit_is_geometric_tail() {
    for (mbar, dim) in [(0.3, 5), (1.0, 10), (4.0, 60)] {
        let t = thermal_state(mbar, dim).unwrap();
        let q: f64 = mbar / (mbar + 1.0);
        assert!((t.deficit() - q.powi(dim as i32)).abs() < 1e-15);
        assert!((t.trace() + t.deficit() - 1.0).abs() < 1e-13);
    }
}

#[test]
fn vacuum_vs_coherent_trace_distance() {
    let dim = 24;
    let vac = DensityMatrix::pure(&FockVector::number(0, dim).unwrap());
    let coh = DensityMatrix::pure(&coherent_fock(C64::new(1.0, 0.0), dim).unwrap());
    let td = trace_norm_distance(&vac, &coh).unwrap();
    let expect = 2.0 * (1.0 - (-1.0f64).exp()).sqrt();
    assert!((td - expect).abs() < 1e-9, "{td} vs {expect}");
}

#[test]
fn purification_distance_paths_agree() {
    let a = purify(&thermal_state(0.5, 16).unwrap()).unwrap();
    let mix = DensityMatrix::mixture(&[
        (0.5, coherent_fock(C64::new(0.7, 0.2), 16).unwrap()),
        (0.5, coherent_fock(C64::new(-0.7, -0.2), 16).unwrap()),
    ])
    .unwrap();
    let b = purify(&mix).unwrap();
    let fast = bipartite_trace_distance(&a, &b).unwrap();
    let dense = bipartite_trace_distance_dense(&a, &b).unwrap();
    assert!((fast - dense).abs() < 1e-9, "{fast} vs {dense}");
}

fn hermitian(dim: usize, vals: &[f64]) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    let mut it = vals.iter().cycle();
    for i in 0..dim {
        m[(i, i)] = C64::new(*it.next().unwrap(), 0.0);
        for j in i + 1..dim {
            let z = C64::new(*it.next().unwrap(), *it.next().unwrap());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn random_state(dim: usize, vals: &[f64]) -> DensityMatrix {
    let h = hermitian(dim, vals);
    let g = &h * h.adjoint();
    let tr = g.trace().re;
    DensityMatrix::new(g / C64::new(tr, 0.0), 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn eigendecomposition_reconstructs(dim in 1usize..=64, vals in prop::collection::vec(-1.0f64..1.0, 8..40)) {
        let m = hermitian(dim, &vals);
        let s = hermitian_eig(&m).unwrap();
        let err = frobenius(&(s.reconstruct() - &m)) / frobenius(&m).max(1.0);
        prop_assert!(err < 1e-10, "relative reconstruction error {err}");
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn sqrt_squares_back(dim in 1usize..=24, vals in prop::collection::vec(-1.0f64..1.0, 8..40)) {
        let rho = random_state(dim, &vals);
        let r = matrix_sqrt_psd(rho.entries()).unwrap();
        prop_assert!(frobenius(&(&r * &r - rho.entries())) < 1e-8);
    }

    #[test]
    fn trace_distance_is_a_bounded_metric(
        dim in 2usize..=10,
        a in prop::collection::vec(-1.0f64..1.0, 8..30),
        b in prop::collection::vec(-1.0f64..1.0, 8..30),
        c in prop::collection::vec(-1.0f64..1.0, 8..30),
    ) {
        let (x, y, z) = (random_state(dim, &a), random_state(dim, &b), random_state(dim, &c));
        let xy = trace_norm_distance(&x, &y).unwrap();
        let yx = trace_norm_distance(&y, &x).unwrap();
        let xz = trace_norm_distance(&x, &z).unwrap();
        let zy = trace_norm_distance(&z, &y).unwrap();
        prop_assert!((xy - yx).abs() < 1e-10);
        prop_assert!(xy <= xz + zy + 1e-10);
        prop_assert!((0.0..=2.0 + 1e-10).contains(&xy));
        prop_assert!(trace_norm_distance(&x, &x).unwrap() < 1e-10);
    }

    #[test]
    fn partial_trace_of_product(
        dim in 1usize..=6,
        a in prop::collection::vec(-1.0f64..1.0, 8..20),
        b in prop::collection::vec(-1.0f64..1.0, 8..20),
    ) {
        let (x, y) = (random_state(dim, &a), random_state(dim, &b));
        let xy = tensor_product(x.entries(), y.entries()).unwrap();
        let keep_a = partial_trace(&xy, Subsystem::B).unwrap();
        let keep_b = partial_trace(&xy, Subsystem::A).unwrap();
        prop_assert!(frobenius(&(keep_a - x.entries())) < 1e-12);
        prop_assert!(frobenius(&(keep_b - y.entries())) < 1e-12);
        prop_assert!((trace_norm(&xy).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn coherent_inner_product(re1 in -2.0f64..2.0, im1 in -2.0f64..2.0, re2 in -2.0f64..2.0, im2 in -2.0f64..2.0) {
        let (a, b) = (C64::new(re1, im1), C64::new(re2, im2));
        let dim = 80;
        let va = coherent_fock(a, dim).unwrap();
        let vb = coherent_fock(b, dim).unwrap();
        // ⟨α|β⟩ = exp(−|α|²/2 − |β|²/2 + ᾱβ)
        let exact = (-(a.norm_sqr() + b.norm_sqr()) / 2.0 + a.conj() * b).exp();
        prop_assert!((va.inner(&vb).unwrap() - exact).norm() < 1e-12);
    }
}
