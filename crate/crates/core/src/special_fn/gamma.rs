use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest argument whose Gamma value is finite in `f64`.
pub const GAMMA_OVERFLOW: f64 = 171.624_376_956_302_7;

fn check_positive(x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("Gamma requires a finite x > 0, got {x}")));
    }
    Ok(())
}

/// `(ln of Lanczos prefactor exponent, series)` for `z >= 0.5`, such that
/// `Gamma(z) = sqrt(2 pi) * exp(log_part) * series`.
fn lanczos_parts(z: f64) -> (f64, f64) {
    let z = z - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    ((z + 0.5) * t.ln() - t, series)
}

/// Gamma function on the positive reals.
pub fn gamma_fn(x: f64) -> Result<f64> {
    check_positive(x)?;
    if x > GAMMA_OVERFLOW {
        return Err(Error::Domain(format!(
            "Gamma({x}) exceeds the f64 range (x > {GAMMA_OVERFLOW})"
        )));
    }
    if x < 0.5 {
        // reflection
        let (log_part, series) = lanczos_parts(1.0 - x);
        let g1 = (2.0 * PI).sqrt() * log_part.exp() * series;
        return Ok(PI / ((PI * x).sin() * g1));
    }
    let (log_part, series) = lanczos_parts(x);
    Ok((2.0 * PI).sqrt() * log_part.exp() * series)
}

/// `ln Gamma(x)` for `x > 0`; finite well past the overflow point of [`gamma_fn`].
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_positive(x)?;
    if x < 0.5 {
        let (log_part, series) = lanczos_parts(1.0 - x);
        let ln_g1 = 0.5 * (2.0 * PI).ln() + log_part + series.ln();
        return Ok(PI.ln() - (PI * x).sin().ln() - ln_g1);
    }
    let (log_part, series) = lanczos_parts(x);
    Ok(0.5 * (2.0 * PI).ln() + log_part + series.ln())
}
