use dmqkd::constellation::{
    feasible_spacing, mb_shaped, qam_grid, shaped_qam, solve_nu_for_energy, Constellation,
};
use dmqkd::C64;
use proptest::prelude::*;

#[test]
fn empirical_frequencies_within_four_sigma() {
    let c = shaped_qam(4, 0.8, 1.0).unwrap();
    let n = 1_000_000;
    let mut counts = vec![0usize; c.len()];
    for k in c.sample_indices(11, n) {
        counts[k] += 1;
    }
    for (k, (&got, &p)) in counts.iter().zip(c.probs()).enumerate() {
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        let dev = (got as f64 - n as f64 * p).abs();
        assert!(dev <= 4.0 * sigma, "point {k}: {got} vs {}", n as f64 * p);
    }
}

#[test]
fn sample_energy_matches_target() {
    let c = shaped_qam(8, 0.5, 1.0).unwrap();
    let n = 1_000_000;
    let xs = c.sample(5, n);
    let mean: f64 = xs.iter().map(|x| x.norm_sqr()).sum::<f64>() / n as f64;
    let second: f64 = c
        .points()
        .iter()
        .zip(c.probs())
        .map(|(x, p)| p * x.norm_sqr().powi(2))
        .sum();
    let sigma = ((second - 1.0) / n as f64).sqrt();
    assert!((mean - 1.0).abs() <= 4.0 * sigma, "{mean}");
    let centroid: C64 = xs.iter().sum::<C64>() / n as f64;
    assert!(centroid.norm() < 4.0 * (2.0 / n as f64).sqrt());
}

#[test]
fn sampling_is_seed_deterministic() {
    let c = shaped_qam(4, 0.8, 1.0).unwrap();
    assert_eq!(c.sample_indices(3, 1000), c.sample_indices(3, 1000));
    assert_ne!(c.sample_indices(3, 1000), c.sample_indices(4, 1000));
}

#[test]
fn json_round_trip() {
    let c = shaped_qam(4, 0.9, 1.2).unwrap();
    let back = Constellation::from_json(&c.to_json()).unwrap();
    assert_eq!(back, c);
    assert!(Constellation::from_json(r#"{"points":[[1,0]],"probs":[1],"meta":{},"x":1}"#).is_err());
    // not mirror-symmetric
    assert!(Constellation::from_json(r#"{"points":[[1,0],[2,0]],"probs":[0.5,0.5],"meta":{}}"#).is_err());
}

#[test]
fn grid_layout() {
    let g = qam_grid(3, 2.0).unwrap();
    let expect: Vec<C64> = [-2.0, 0.0, 2.0]
        .iter()
        .flat_map(|&re| [-2.0, 0.0, 2.0].map(|im| C64::new(re, im)))
        .collect();
    assert_eq!(g, expect);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn shaped_energy_hits_target(m in 3usize..=16, mbar in 0.2f64..3.0, frac in 0.05f64..0.95) {
        let (lo, hi) = feasible_spacing(m, mbar).unwrap();
        let s = lo + frac * (hi - lo);
        let c = shaped_qam(m, s, mbar).unwrap();
        prop_assert!((c.mean_energy() - mbar).abs() < 1e-9 * mbar.max(1.0));
        prop_assert!(c.first_moment().norm() < 1e-12);
    }

    #[test]
    fn energy_decreases_with_nu(m in 2usize..=8, nu1 in 0.0f64..3.0, step in 0.01f64..1.0) {
        let g = qam_grid(m, 1.0).unwrap();
        let a = mb_shaped(g.clone(), nu1).unwrap().mean_energy();
        let b = mb_shaped(g, nu1 + step).unwrap().mean_energy();
        prop_assert!(b <= a + 1e-12);
    }

    #[test]
    fn solved_nu_reproduces_energy(m in 3usize..=10, t in 0.05f64..0.95) {
        let g = qam_grid(m, 1.0).unwrap();
        let uniform = Constellation::uniform(g.clone()).unwrap().mean_energy();
        let floor = g.iter().map(|x| x.norm_sqr()).fold(f64::INFINITY, f64::min);
        let target = floor + t * (uniform - floor);
        let p = solve_nu_for_energy(&g, target).unwrap();
        let e = mb_shaped(g, p.nu).unwrap().mean_energy();
        prop_assert!((e - target).abs() < 1e-9);
    }
}
