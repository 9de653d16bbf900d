//! Physicists' Hermite polynomials `H_m`, with `H_0 = 1`, `H_1 = 2x` and
//! `H_{m+1}(x) = 2x H_m(x) - 2m H_{m-1}(x)`.

use super::scaled::Scaled;

/// Largest order for which [`HermitePoly::coefficients`] is available.
pub const MAX_COEFFICIENT_ORDER: u32 = 30;

/// Magnitude at which the recurrence pair is renormalised.
const RESCALE_LOG2: i32 = 600;

/// Beyond this |x| the plain-float recurrence could overflow in a single step.
const LARGE_ARGUMENT: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HermitePoly {
    order: u32,
}

impl HermitePoly {
    pub fn new(order: u32) -> Self {
        HermitePoly { order }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn eval(&self, x: f64) -> f64 {
        hermite_eval(self.order, x)
    }

    pub fn eval_scaled(&self, x: f64) -> Scaled {
        hermite_scaled(self.order, x)
    }

    /// Integer coefficients `c[j]` of `x^j`, for orders up to 30.
    pub fn coefficients(&self) -> Option<Vec<i128>> {
        if self.order > MAX_COEFFICIENT_ORDER {
            return None;
        }
        let n = self.order as usize;
        let mut prev = vec![0i128; n + 1];
        let mut cur = vec![0i128; n + 1];
        prev[0] = 1;
        if n == 0 {
            return Some(prev);
        }
        cur[1] = 2;
        for m in 1..n {
            let mut next = vec![0i128; n + 1];
            for j in 0..=n {
                let shifted = if j > 0 { 2 * cur[j - 1] } else { 0 };
                next[j] = shifted - 2 * (m as i128) * prev[j];
            }
            prev = cur;
            cur = next;
        }
        Some(cur)
    }

    pub fn zeros(&self) -> Vec<f64> {
        hermite_zeros(self.order)
    }
}

/// `H_order(x)` as a float. Values beyond the `f64` range saturate to `±inf`
/// with the correct sign; use [`hermite_scaled`] to keep the magnitude.
pub fn hermite_eval(order: u32, x: f64) -> f64 {
    hermite_scaled(order, x).to_f64()
}

/// `H_order(x)` in scaled form.
pub fn hermite_scaled(order: u32, x: f64) -> Scaled {
    hermite_pair(order, x).0
}

/// Returns `(H_order(x), H_{order-1}(x))`; the second entry is zero for order 0.
pub fn hermite_pair(order: u32, x: f64) -> (Scaled, Scaled) {
    if order == 0 {
        return (Scaled::ONE, Scaled::ZERO);
    }
    if x.abs() > LARGE_ARGUMENT {
        return hermite_pair_large(order, x);
    }
    let limit = f64::powi(2.0, RESCALE_LOG2);
    let down = f64::powi(2.0, -RESCALE_LOG2);
    let two_x = 2.0 * x;
    let mut prev = 1.0;
    let mut cur = two_x;
    let mut exponent: i64 = 0;
    for m in 1..order {
        let next = two_x * cur - 2.0 * m as f64 * prev;
        prev = cur;
        cur = next;
        if cur.abs() > limit {
            cur *= down;
            prev *= down;
            exponent += RESCALE_LOG2 as i64;
        }
    }
    (
        Scaled::from_parts(cur, exponent),
        Scaled::from_parts(prev, exponent),
    )
}

fn hermite_pair_large(order: u32, x: f64) -> (Scaled, Scaled) {
    let two_x = Scaled::from_f64(x) * Scaled::from_f64(2.0);
    let mut prev = Scaled::ONE;
    let mut cur = two_x;
    for m in 1..order {
        let next = (two_x * cur).add(&-(Scaled::from_f64(2.0 * m as f64) * prev));
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Number of zeros of `H_order` strictly below `x`, by a Sturm count on the
/// symmetric Jacobi matrix (zero diagonal, off-diagonal `sqrt(i/2)`).
fn zeros_below(order: u32, x: f64) -> usize {
    let mut count = 0;
    let mut q = -x;
    for i in 0..order {
        if i > 0 {
            q = -x - (i as f64 / 2.0) / q;
        }
        if q == 0.0 {
            q = -f64::EPSILON * (1.0 + x.abs());
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All real zeros of `H_order`, strictly increasing and exactly symmetric
/// about the origin. Accurate to about 1e-14 for orders up to a few hundred.
pub fn hermite_zeros(order: u32) -> Vec<f64> {
    if order == 0 {
        return Vec::new();
    }
    let n = order as usize;
    let bound = (2.0 * order as f64 + 1.0).sqrt() + 1.0;
    let mut zeros = vec![0.0; n];
    // nonnegative half, then mirror
    for i in n / 2..n {
        if n % 2 == 1 && i == n / 2 {
            continue;
        }
        let (mut lo, mut hi) = (0.0, bound);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
                break;
            }
            if zeros_below(order, mid) > i {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let z = 0.5 * (lo + hi);
        zeros[i] = z;
        zeros[n - 1 - i] = -z;
    }
    zeros
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn low_orders() {
        assert_eq!(hermite_eval(0, 7.3), 1.0);
        assert_eq!(hermite_eval(1, 0.5), 1.0);
        assert_eq!(hermite_eval(3, 2.0), 40.0);
        assert!(hermite_eval(2, std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn coefficient_expansion_small_orders() {
        assert_eq!(HermitePoly::new(0).coefficients().unwrap(), vec![1]);
        assert_eq!(HermitePoly::new(3).coefficients().unwrap(), vec![0, -12, 0, 8]);
        assert_eq!(
            HermitePoly::new(4).coefficients().unwrap(),
            vec![12, 0, -48, 0, 16]
        );
        assert!(HermitePoly::new(31).coefficients().is_none());
        // leading coefficient 2^m
        let c30 = HermitePoly::new(30).coefficients().unwrap();
        assert_eq!(c30[30], 1i128 << 30);
    }

    #[test]
    fn closed_form_zeros() {
        assert!(hermite_zeros(0).is_empty());
        assert_eq!(hermite_zeros(1), vec![0.0]);
        let z2 = hermite_zeros(2);
        assert!((z2[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert_eq!(z2[0], -z2[1]);
        let z3 = hermite_zeros(3);
        assert_eq!(z3[1], 0.0);
        assert!((z3[2] - 1.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn zeros_bracket_sign_changes() {
        for order in [5u32, 17, 40, 99, 200] {
            let zeros = hermite_zeros(order);
            assert_eq!(zeros.len(), order as usize);
            for w in zeros.windows(2) {
                assert!(w[0] < w[1]);
            }
            for &z in &zeros {
                let left = hermite_scaled(order, z - 1e-9).signum();
                let right = hermite_scaled(order, z + 1e-9).signum();
                assert_eq!(left * right, -1, "order {order} zero {z}");
            }
        }
    }

    #[test]
    fn zeros_interlace() {
        for order in 2u32..=60 {
            let outer = hermite_zeros(order);
            let inner = hermite_zeros(order - 1);
            for (i, z) in inner.iter().enumerate() {
                assert!(outer[i] < *z && *z < outer[i + 1]);
            }
        }
    }

    #[test]
    fn scaled_evaluation_keeps_sign_for_huge_orders() {
        let v = hermite_scaled(100_000, 3.7);
        assert!(v.exponent() > 1024);
        assert_ne!(v.signum(), 0);
        assert!(hermite_eval(100_000, 3.7).is_infinite());
        // H_m(0) = (-1)^(m/2) m!/(m/2)! for even m
        assert_eq!(hermite_scaled(4000, 0.0).signum(), 1);
        assert_eq!(hermite_scaled(4002, 0.0).signum(), -1);
        assert!(hermite_scaled(4001, 0.0).is_zero());
    }

    #[test]
    fn large_argument_path_matches_leading_term() {
        let x = 1e200;
        let v = hermite_scaled(5, x);
        // H_5(x) ~ 32 x^5
        let expected = 5.0 * (x.log2()) + 5.0;
        assert!((v.log2_abs() - expected).abs() < 1e-9);
        assert_eq!(hermite_scaled(5, -x).signum(), -1);
    }

    proptest! {
        #[test]
        fn parity(order in 0u32..=30, x in -10.0f64..10.0) {
            let a = hermite_eval(order, x);
            let b = hermite_eval(order, -x);
            let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((a - sign * b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
