use std::f64::consts::SQRT_2;

use proptest::prelude::*;
use qho_core::nodal_exact::{
    exact_nodal_count_u64, mu_lower_bound, mu_max, mu_upper_bound, ratio_experiment, u_constant_f64,
};
use qho_core::oscillator::{counting_function, enumerate_spectrum, Enumerator, OscillatorConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn brute_mu_max(config: &OscillatorConfig, lambda: f64) -> u64 {
    enumerate_spectrum(config, lambda)
        .unwrap()
        .iter()
        .map(|e| exact_nodal_count_u64(&e.index).unwrap())
        .max()
        .unwrap()
}

#[test]
fn mu_max_matches_brute_force_on_random_configs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..3.0)).collect();
        let config = OscillatorConfig::new(a).unwrap();
        let lambda = rng.gen_range(config.a_sum()..30.0_f64.max(config.a_sum() + 1.0));
        assert_eq!(mu_max(&config, lambda).unwrap(), brute_mu_max(&config, lambda));
    }
}

#[test]
fn courant_for_simple_spectrum() {
    let config = OscillatorConfig::new(vec![1.0, SQRT_2]).unwrap();
    let list = Enumerator::new(&config).first(10_000).unwrap();
    for (i, e) in list.iter().enumerate() {
        assert!(e.nodal_count <= i as u64 + 1, "k = {}: μ = {}", i + 1, e.nodal_count);
    }
}

#[test]
fn sandwich_tends_to_u() {
    let config = OscillatorConfig::new(vec![1.0, SQRT_2]).unwrap();
    let u = u_constant_f64(2).unwrap();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for lambda in [50.0, 100.0, 200.0, 400.0] {
        let count = counting_function(&config, lambda).unwrap() as f64;
        let mu = mu_max(&config, lambda).unwrap() as f64;
        let lo = mu_lower_bound(&config, lambda) / count;
        let hi = mu / count;
        assert!(lo <= hi, "λ = {lambda}: {lo} > {hi}");
        assert!(mu <= mu_upper_bound(&config, lambda));
        lower.push(lo);
        upper.push(hi);
    }
    for series in [&lower, &upper] {
        let first = (series[0] - u).abs();
        let last = (series[series.len() - 1] - u).abs();
        assert!(last < first, "{series:?}");
    }
}

#[test]
fn tail_maxima_stay_in_unit_interval() {
    let config = OscillatorConfig::new(vec![1.0, SQRT_2, 3f64.sqrt()]).unwrap();
    let series = ratio_experiment(&config, 2000).unwrap();
    assert!(!series.degenerate);
    for t in &series.tail_maxima {
        assert!(t.max_ratio > 0.0 && t.max_ratio <= 1.0);
    }
    for e in &series.entries {
        assert_eq!(e.ratio, e.nodal_count as f64 / e.k as f64);
    }
    assert!(series.entries.windows(2).all(|w| w[0].k < w[1].k));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mu_max_within_bounds(a in prop::collection::vec(0.5f64..3.0, 1..=3), extra in 0.0f64..25.0) {
        let config = OscillatorConfig::new(a).unwrap();
        let lambda = config.a_sum() + extra;
        let mu = mu_max(&config, lambda).unwrap() as f64;
        prop_assert!(mu <= mu_upper_bound(&config, lambda) * (1.0 + 1e-12));
        prop_assert!(mu >= mu_lower_bound(&config, lambda) * (1.0 - 1e-12));
    }
}
