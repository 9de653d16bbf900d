//! Spectra, eigenfunctions and nodal-domain counts of the n-dimensional
//! anisotropic quantum harmonic oscillator `-Δ + Σ a_i² x_i²`, together with
//! the constants and counting bounds of its Pleijel-type nodal estimate.

pub mod annuli;
pub mod constants;
pub mod error;
pub mod grid_nodal;
pub mod nodal_exact;
pub mod oscillator;
pub mod special_fn;

pub use error::{Error, Result};
