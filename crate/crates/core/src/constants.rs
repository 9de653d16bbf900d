//! Closed-form constants of the Pleijel-type estimate: `γ(n)`, the unit-ball
//! volume, Faber-Krahn and annulus volumes, the Milnor-type component
//! bounds, and the comparison of `γ(n)` with `U(n) = n!/nⁿ`.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::nodal_exact::u_constant;
use crate::oscillator::OscillatorConfig;
use crate::special_fn::{bessel_first_zero, gamma_fn, ln_gamma, BesselOrder};

pub const MAX_CONSTANT_DIMENSION: u32 = 50;

fn check_dimension(n: u32, min: u32) -> Result<()> {
    if n < min || n > MAX_CONSTANT_DIMENSION {
        return Err(Error::Domain(format!(
            "dimension must lie in [{min}, {MAX_CONSTANT_DIMENSION}], got {n}"
        )));
    }
    Ok(())
}

/// `j_{n/2-1}`, the first zero of the Bessel function attached to dimension `n`.
pub fn bessel_zero_for_dimension(n: u32) -> Result<f64> {
    Ok(BesselOrder::for_dimension(n)?.first_zero())
}

/// `γ(n) = 2^{n-2} n² Γ(n/2)² / j_{n/2-1}ⁿ`.
pub fn gamma_pleijel(n: u32) -> Result<f64> {
    check_dimension(n, 2)?;
    let j = bessel_zero_for_dimension(n)?;
    Ok(gamma_from_zero(n, j))
}

fn gamma_from_zero(n: u32, j: f64) -> f64 {
    let nf = n as f64;
    let g = gamma_fn(nf / 2.0).expect("n/2 <= 25");
    2f64.powi(n as i32 - 2) * nf * nf * g * g / j.powi(n as i32)
}

/// `σ_n = π^{n/2} / Γ(n/2 + 1)`.
pub fn unit_ball_volume(n: u32) -> Result<f64> {
    check_dimension(n, 1)?;
    let nf = n as f64;
    Ok(PI.powf(nf / 2.0) / gamma_fn(nf / 2.0 + 1.0)?)
}

/// Faber-Krahn lower bound `(σ_n / |Ω|)^{2/n} j_{n/2-1}²` for the first
/// Dirichlet eigenvalue of a domain of the given volume.
pub fn faber_krahn_lower(n: u32, volume: f64) -> Result<f64> {
    check_dimension(n, 2)?;
    if !(volume.is_finite() && volume > 0.0) {
        return Err(Error::Domain(format!("volume must be finite and positive, got {volume}")));
    }
    let j = bessel_zero_for_dimension(n)?;
    let sigma = unit_ball_volume(n)?;
    Ok((sigma / volume).powf(2.0 / n as f64) * j * j)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("λ must be finite and positive, got {lambda}")));
    }
    Ok(())
}

fn check_shells(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain("the number of shells M must be at least 1".into()));
    }
    Ok(())
}

/// Minimum volume `σ_n jⁿ / (λ - (i/M)^{2/n} λ)^{n/2}` of a nodal domain
/// lying in the shell `A_i`. `i = 0` means no inner cutoff.
///
/// On `A_i` the potential is at least `(i/M)^{2/n} λ`, so the Dirichlet
/// eigenvalue of the domain is at most `λ` minus that, and Faber-Krahn
/// turns this into a volume bound.
pub fn nodal_volume_lower(config: &OscillatorConfig, lambda: f64, i: u64, m: u64) -> Result<f64> {
    check_lambda(lambda)?;
    check_shells(m)?;
    if i >= m {
        return Err(Error::UnboundedVolume { i, m });
    }
    let n = config.dim() as u32;
    check_dimension(n, 2)?;
    let nf = n as f64;
    let j = bessel_zero_for_dimension(n)?;
    let sigma = unit_ball_volume(n)?;
    let reduced = lambda - shell_fraction(i, m, n) * lambda;
    Ok(sigma * j.powi(n as i32) / reduced.powf(nf / 2.0))
}

/// `(i/M)^{2/n}`.
pub(crate) fn shell_fraction(i: u64, m: u64, n: u32) -> f64 {
    if i == m {
        return 1.0;
    }
    (i as f64 / m as f64).powf(2.0 / n as f64)
}

/// Volume `σ_n λ^{n/2} / (M ∏ a_i)` of each of the `M` equal shells of the
/// ellipsoid `{V <= λ}`.
pub fn annulus_volume(config: &OscillatorConfig, lambda: f64, m: u64) -> Result<f64> {
    check_lambda(lambda)?;
    check_shells(m)?;
    let n = config.dim() as u32;
    let sigma = unit_ball_volume(n)?;
    Ok(sigma * lambda.powf(n as f64 / 2.0) / (m as f64 * config.a_prod()))
}

/// Closed form `n² Γ(n/2)² / (4 n!)` of `∫₀¹ (1 - x^{2/n})^{n/2} dx`.
pub fn pleijel_integral(n: u32) -> Result<f64> {
    check_dimension(n, 2)?;
    let nf = n as f64;
    let ln = 2.0 * nf.ln() + 2.0 * ln_gamma(nf / 2.0)? - 4f64.ln() - ln_gamma(nf + 1.0)?;
    Ok(ln.exp())
}

/// Tanh-sinh quadrature of `∫₀¹ (1 - x^{2/n})^{n/2} dx`.
pub fn pleijel_integral_quadrature(n: u32) -> Result<f64> {
    check_dimension(n, 2)?;
    let p = 2.0 / n as f64;
    let q = n as f64 / 2.0;
    Ok(tanh_sinh_unit(|x, one_minus_x| {
        // 1 - x^p, accurate near both ends
        let inner = if x < 0.5 {
            1.0 - x.powf(p)
        } else {
            -(p * (-one_minus_x).ln_1p()).exp_m1()
        };
        inner.max(0.0).powf(q)
    }))
}

/// `∫₀¹ f`, where `f` receives both `x` and `1 - x` computed without cancellation.
fn tanh_sinh_unit(f: impl Fn(f64, f64) -> f64) -> f64 {
    let half_pi = PI / 2.0;
    let eval = |t: f64| -> f64 {
        let u = half_pi * t.sinh();
        let e = (2.0 * u).exp();
        // x = 1/(1 + e^{-2u}), 1 - x = 1/(1 + e^{2u})
        let one_minus_x = 1.0 / (1.0 + e);
        let x = 1.0 / (1.0 + 1.0 / e);
        if x <= 0.0 || one_minus_x <= 0.0 {
            return 0.0;
        }
        let cosh_u = u.cosh();
        let weight = half_pi * t.cosh() / (2.0 * cosh_u * cosh_u);
        if !weight.is_finite() || weight == 0.0 {
            return 0.0;
        }
        weight * f(x, one_minus_x)
    };
    let t_max = 4.0;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = h * sum;
    for _ in 0..10 {
        h /= 2.0;
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let next = h * sum;
        let converged = (next - estimate).abs() <= 1e-15 * next.abs();
        estimate = next;
        if converged {
            break;
        }
    }
    estimate
}

/// `G(n, d) = (2 + d)(1 + d)^{n-1}`.
pub fn milnor_bound(n: u32, d: u64) -> Result<BigUint> {
    if n == 0 || d == 0 {
        return Err(Error::Domain("Milnor bound needs n, d >= 1".into()));
    }
    Ok(BigUint::from(d + 2) * BigUint::from(d + 1).pow(n - 1))
}

/// `2 G(n, d)`: sign components of a degree-`d` polynomial in the unit ball.
pub fn milnor_ball_bound(n: u32, d: u64) -> Result<BigUint> {
    Ok(milnor_bound(n, d)? * 2u32)
}

/// `2^{2n-1} d^{n-1}`: components of the restriction to the unit sphere.
pub fn milnor_sphere_bound(n: u32, d: u64) -> Result<BigUint> {
    if n == 0 || d == 0 {
        return Err(Error::Domain("sphere bound needs n, d >= 1".into()));
    }
    Ok((BigUint::one() << (2 * n as usize - 1)) * BigUint::from(d).pow(n - 1))
}

/// `2^{n-5/2} sqrt(π n) e^{-2 sqrt n}`, the leading behaviour of `γ(n)/U(n)`.
pub fn asymptotic_lower(n: u32) -> f64 {
    let nf = n as f64;
    (nf - 2.5).exp2() * (PI * nf).sqrt() * (-2.0 * nf.sqrt()).exp()
}

fn rational_as_string<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

/// One row of the `γ(n)` versus `U(n)` comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PleijelReport {
    pub n: u32,
    pub gamma: f64,
    #[serde(serialize_with = "rational_as_string")]
    pub u: BigRational,
    pub u_value: f64,
    pub ratio: f64,
    pub asymptotic_lower: f64,
    pub bessel_zero: f64,
}

impl PleijelReport {
    /// `γ(n)` recomputed from the stored Bessel zero.
    pub fn gamma_from_zero(&self) -> f64 {
        gamma_from_zero(self.n, self.bessel_zero)
    }
}

pub fn gamma_u_report(n: u32) -> Result<PleijelReport> {
    check_dimension(n, 2)?;
    let bessel_zero = bessel_first_zero(n as f64 / 2.0 - 1.0)?;
    let gamma = gamma_from_zero(n, bessel_zero);
    let u = u_constant(n)?;
    let u_value = u.to_f64().unwrap_or(f64::NAN);
    Ok(PleijelReport {
        n,
        gamma,
        u,
        u_value,
        ratio: gamma / u_value,
        asymptotic_lower: asymptotic_lower(n),
        bessel_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(a: &[f64]) -> OscillatorConfig {
        OscillatorConfig::new(a.to_vec()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_table() {
        assert!(rel(gamma_pleijel(2).unwrap(), 0.69166) < 1e-4);
        assert!(rel(gamma_pleijel(3).unwrap(), 0.455945) < 1e-5);
        assert!(rel(gamma_pleijel(4).unwrap(), 0.296901) < 1e-5);
        assert!(rel(gamma_pleijel(5).unwrap(), 0.19294) < 1e-4);
        assert!(rel(gamma_pleijel(3).unwrap(), 4.5 / (PI * PI)) < 1e-10);
        assert!(gamma_pleijel(1).is_err());
        assert!(gamma_pleijel(51).is_err());
    }

    #[test]
    fn gamma_decreasing_and_below_one() {
        let values: Vec<f64> = (2..=30).map(|n| gamma_pleijel(n).unwrap()).collect();
        assert!(values.iter().all(|&g| g < 1.0));
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        assert!(gamma_pleijel(50).unwrap() < 1.0);
    }

    #[test]
    fn ball_volumes() {
        assert!(rel(unit_ball_volume(1).unwrap(), 2.0) < 1e-12);
        assert!(rel(unit_ball_volume(2).unwrap(), PI) < 1e-12);
        assert!(rel(unit_ball_volume(3).unwrap(), 4.0 * PI / 3.0) < 1e-12);
        // σ_n = 2π σ_{n-2} / n
        for n in 3..=50 {
            let lhs = unit_ball_volume(n).unwrap();
            let rhs = 2.0 * PI * unit_ball_volume(n - 2).unwrap() / n as f64;
            assert!(rel(lhs, rhs) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn faber_krahn_examples() {
        let j0 = bessel_zero_for_dimension(2).unwrap();
        assert!(rel(faber_krahn_lower(2, PI).unwrap(), j0 * j0) < 1e-12);
        assert!(rel(faber_krahn_lower(3, 4.0 * PI / 3.0).unwrap(), PI * PI) < 1e-10);
        for n in [2, 3, 7] {
            let ratio = faber_krahn_lower(n, 6.0).unwrap() / faber_krahn_lower(n, 3.0).unwrap();
            assert!(rel(ratio, 2f64.powf(-2.0 / n as f64)) < 1e-12);
        }
        assert!(faber_krahn_lower(2, 0.0).is_err());
    }

    #[test]
    fn nodal_volume_examples() {
        let c = cfg(&[1.0, 1.0]);
        let v = nodal_volume_lower(&c, 10.0, 0, 1).unwrap();
        assert!((v - 1.8168).abs() < 1e-3);
        let j0 = bessel_zero_for_dimension(2).unwrap();
        assert!(rel(v, PI * j0 * j0 / 10.0) < 1e-12);
        assert!(matches!(
            nodal_volume_lower(&c, 10.0, 4, 4),
            Err(Error::UnboundedVolume { i: 4, m: 4 })
        ));
        let bounds: Vec<f64> = (0..8).map(|i| nodal_volume_lower(&c, 10.0, i, 8).unwrap()).collect();
        assert!(bounds.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn annulus_volume_examples() {
        let c = cfg(&[1.0, 1.0]);
        assert!(rel(annulus_volume(&c, 4.0, 4).unwrap(), PI) < 1e-12);
        let c = cfg(&[0.5, 1.5, 2.0]);
        let whole = annulus_volume(&c, 9.0, 1).unwrap();
        assert!(rel(whole, 4.0 * PI / 3.0 * 27.0 / 1.5) < 1e-12);
        let shells = 7;
        let total = annulus_volume(&c, 9.0, shells).unwrap() * shells as f64;
        assert!(rel(total, whole) < 1e-12);
    }

    #[test]
    fn integral_closed_form_and_quadrature() {
        assert!((pleijel_integral(2).unwrap() - 0.5).abs() < 1e-12);
        assert!((pleijel_integral(4).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        for n in 2..=20 {
            let closed = pleijel_integral(n).unwrap();
            let quad = pleijel_integral_quadrature(n).unwrap();
            assert!((closed - quad).abs() < 1e-8, "n = {n}: {closed} vs {quad}");
        }
    }

    #[test]
    fn gamma_is_integral_times_constant() {
        // γ(n) = 2ⁿ n! I(n) / jⁿ
        for n in 2..=12u32 {
            let factorial: f64 = (1..=n).map(|i| i as f64).product();
            let j = bessel_zero_for_dimension(n).unwrap();
            let via_integral =
                2f64.powi(n as i32) * factorial * pleijel_integral(n).unwrap() / j.powi(n as i32);
            assert!(rel(via_integral, gamma_pleijel(n).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn milnor_examples() {
        assert_eq!(milnor_bound(1, 7).unwrap(), BigUint::from(9u32));
        assert_eq!(milnor_bound(2, 3).unwrap(), BigUint::from(20u32));
        assert_eq!(milnor_ball_bound(2, 3).unwrap(), BigUint::from(40u32));
        assert_eq!(milnor_sphere_bound(2, 3).unwrap(), BigUint::from(24u32));
        assert_eq!(milnor_sphere_bound(1, 9).unwrap(), BigUint::from(2u32));
        let big = milnor_bound(10, u64::MAX - 2).unwrap();
        assert_eq!(big, BigUint::from(u64::MAX) * BigUint::from(u64::MAX - 1).pow(9));
        assert!(milnor_bound(2, 0).is_err());
    }

    #[test]
    fn report_examples() {
        let r2 = gamma_u_report(2).unwrap();
        assert!(rel(r2.ratio, 1.3833) < 1e-4);
        assert!(rel(r2.gamma_from_zero(), r2.gamma) < 1e-15);
        let r3 = gamma_u_report(3).unwrap();
        assert_eq!(r3.u, BigRational::new(2.into(), 9.into()));
        assert!(rel(r3.ratio, 2.0518) < 1e-4);
        for n in 2..=21 {
            assert!(gamma_u_report(n).unwrap().ratio > 1.0, "n = {n}");
        }
        let json = serde_json::to_string(&r3).unwrap();
        assert!(json.contains("\"u\":\"2/9\""));
    }

    #[test]
    fn asymptotic_window() {
        for n in 30..=50 {
            let r = gamma_u_report(n).unwrap();
            assert!(r.ratio > r.asymptotic_lower, "n = {n}");
        }
    }
}
