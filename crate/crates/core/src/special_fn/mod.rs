//! Special functions needed by the oscillator and the nodal bounds:
//! Hermite polynomials, Gamma, Bessel functions of the first kind and
//! their first zeros.

mod bessel;
mod gamma;
mod hermite;
mod scaled;

pub use bessel::{bessel_first_zero, bessel_j, first_zero_bracket, BesselOrder};
pub use gamma::{gamma_fn, ln_gamma, GAMMA_OVERFLOW};
pub use hermite::{
    hermite_eval, hermite_pair, hermite_scaled, hermite_zeros, HermitePoly, MAX_COEFFICIENT_ORDER,
};
pub use scaled::Scaled;
