use std::cmp::Ordering;
use std::ops::{Mul, Neg};

/// A real number stored as `mantissa * 2^exponent`.
///
/// Used wherever polynomial values overflow `f64` (high-order Hermite
/// polynomials, products of several of them). The mantissa is either zero or
/// has magnitude in `[0.5, 1)`, so the sign is always carried exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    mantissa: f64,
    exponent: i64,
}

/// Splits a finite nonzero `x` into `(m, e)` with `x = m * 2^e`, `0.5 <= |m| < 1`.
fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    if raw_exp == 0 {
        // subnormal: normalise first
        let (m, e) = frexp(x * f64::powi(2.0, 64));
        return (m, e - 64);
    }
    let e = raw_exp - 1022;
    let m_bits = (bits & !(0x7ffu64 << 52)) | (1022u64 << 52);
    (f64::from_bits(m_bits), e)
}

/// `m * 2^e` without intermediate overflow for moderate `e`.
fn ldexp(m: f64, e: i64) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    if e > 2100 {
        return m.signum() * f64::INFINITY;
    }
    if e < -2200 {
        return 0.0 * m.signum();
    }
    let mut out = m;
    let mut e = e;
    while e > 1000 {
        out *= f64::powi(2.0, 1000);
        e -= 1000;
    }
    while e < -1000 {
        out *= f64::powi(2.0, -1000);
        e += 1000;
    }
    out * f64::powi(2.0, e as i32)
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mantissa: 0.0,
        exponent: 0,
    };
    pub const ONE: Scaled = Scaled {
        mantissa: 0.5,
        exponent: 1,
    };

    pub fn from_f64(x: f64) -> Scaled {
        let (mantissa, exponent) = frexp(x);
        Scaled { mantissa, exponent }
    }

    /// Builds `m * 2^e` from an unnormalised pair.
    pub fn from_parts(m: f64, e: i64) -> Scaled {
        let (mantissa, shift) = frexp(m);
        if mantissa == 0.0 {
            return Scaled::ZERO;
        }
        Scaled {
            mantissa,
            exponent: e + shift,
        }
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// Value as `f64`; saturates to `±inf` or flushes to zero outside range.
    pub fn to_f64(&self) -> f64 {
        ldexp(self.mantissa, self.exponent)
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i8 {
        match self.mantissa.partial_cmp(&0.0) {
            Some(Ordering::Greater) => 1,
            Some(Ordering::Less) => -1,
            _ => 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    /// `log2 |self|`, `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.mantissa == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.mantissa.abs().log2() + self.exponent as f64
        }
    }

    /// Natural log of `|self|`, `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        self.log2_abs() * std::f64::consts::LN_2
    }

    /// True when `|self| < bound` (bound > 0).
    pub fn abs_below(&self, bound: f64) -> bool {
        self.log2_abs() < bound.log2()
    }

    /// Multiplies by a plain float.
    pub fn scale(&self, factor: f64) -> Scaled {
        Scaled::from_parts(self.mantissa * factor, self.exponent)
    }

    /// Exact-sign sum. The smaller operand is shifted onto the larger one's
    /// exponent; contributions below 2^-1100 relative are dropped.
    pub fn add(&self, other: &Scaled) -> Scaled {
        if self.mantissa == 0.0 {
            return *other;
        }
        if other.mantissa == 0.0 {
            return *self;
        }
        let (big, small) = if self.exponent >= other.exponent {
            (self, other)
        } else {
            (other, self)
        };
        let shift = small.exponent - big.exponent;
        let m = big.mantissa + ldexp(small.mantissa, shift);
        Scaled::from_parts(m, big.exponent)
    }
}

impl Mul for Scaled {
    type Output = Scaled;

    fn mul(self, rhs: Scaled) -> Scaled {
        if self.mantissa == 0.0 || rhs.mantissa == 0.0 {
            return Scaled::ZERO;
        }
        // |m1*m2| lies in [0.25, 1), one renormalising step suffices
        Scaled::from_parts(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Neg for Scaled {
    type Output = Scaled;

    fn neg(self) -> Scaled {
        Scaled {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl From<f64> for Scaled {
    fn from(x: f64) -> Self {
        Scaled::from_f64(x)
    }
}
