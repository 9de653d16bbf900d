use std::collections::BTreeSet;

use proptest::prelude::*;
use qho_core::oscillator::{eigenvalue, enumerate_spectrum, nearly_equal, MultiIndex, OscillatorConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Plain nested loops over a box that contains the simplex.
fn brute_force(config: &OscillatorConfig, lambda: f64) -> BTreeSet<MultiIndex> {
    let a = config.coefficients();
    let bounds: Vec<u32> = a.iter().map(|ai| (lambda / (2.0 * ai)).ceil() as u32 + 1).collect();
    let mut out = BTreeSet::new();
    let mut k = vec![0u32; a.len()];
    loop {
        let idx = MultiIndex::new(k.clone());
        if eigenvalue(config, &idx).unwrap() <= lambda {
            out.insert(idx);
        }
        let mut axis = 0;
        loop {
            if axis == k.len() {
                return out;
            }
            k[axis] += 1;
            if k[axis] <= bounds[axis] {
                break;
            }
            k[axis] = 0;
            axis += 1;
        }
    }
}

fn enumerated(config: &OscillatorConfig, lambda: f64) -> BTreeSet<MultiIndex> {
    enumerate_spectrum(config, lambda)
        .unwrap()
        .into_iter()
        .map(|e| e.index)
        .collect()
}

#[test]
fn fifty_random_configs_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..3.0)).collect();
        let config = OscillatorConfig::new(a).unwrap();
        let lambda = rng.gen_range(config.a_sum()..40.0);
        assert_eq!(enumerated(&config, lambda), brute_force(&config, lambda));
    }
}

#[test]
fn spectrum_is_sorted_and_complete_in_count() {
    let config = OscillatorConfig::new(vec![0.9, 1.7, 2.3]).unwrap();
    let list = enumerate_spectrum(&config, 35.0).unwrap();
    assert!(list
        .windows(2)
        .all(|w| w[0].eigenvalue <= w[1].eigenvalue || nearly_equal(w[0].eigenvalue, w[1].eigenvalue)));
    assert_eq!(list.len(), brute_force(&config, 35.0).len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_equals_brute_force(
        a in prop::collection::vec(0.5f64..3.0, 1..=3),
        frac in 0.0f64..1.0,
    ) {
        let config = OscillatorConfig::new(a).unwrap();
        let lambda = config.a_sum() + frac * (30.0 - config.a_sum()).max(0.0);
        prop_assert_eq!(enumerated(&config, lambda), brute_force(&config, lambda));
    }
}
