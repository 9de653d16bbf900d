use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive, Zero};
use qho_core::special_fn::{hermite_eval, HermitePoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exact `Σ c_j x^j` with `x` taken as the rational it represents.
fn exact_value(coeffs: &[i128], x: f64) -> (f64, f64) {
    let xr = BigRational::from_f64(x).unwrap();
    let mut acc = BigRational::zero();
    let mut scale = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * &xr + BigRational::from_integer(BigInt::from(c));
    }
    for (j, &c) in coeffs.iter().enumerate() {
        scale += (c as f64).abs() * x.abs().powi(j as i32);
    }
    (acc.to_f64().unwrap(), scale)
}

#[test]
fn recurrence_matches_exact_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for order in 0..=30u32 {
        let coeffs = HermitePoly::new(order).coefficients().unwrap();
        for _ in 0..100 {
            let x: f64 = rng.gen_range(-6.0..6.0);
            let (exact, scale) = exact_value(&coeffs, x);
            let got = hermite_eval(order, x);
            assert!(
                (got - exact).abs() <= 1e-10 * scale.max(exact.abs()),
                "H_{order}({x}) = {got}, exact {exact}"
            );
        }
    }
}

#[test]
fn zeros_are_roots_of_the_exact_polynomial() {
    for order in [4u32, 11, 23, 30] {
        let coeffs = HermitePoly::new(order).coefficients().unwrap();
        for z in HermitePoly::new(order).zeros() {
            let (value, scale) = exact_value(&coeffs, z);
            assert!(value.abs() <= 1e-12 * scale, "H_{order}({z}) = {value}");
        }
    }
}
