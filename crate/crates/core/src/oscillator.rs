//! The oscillator `-Δ + V`, `V(x) = Σ a_i² x_i²`: configuration, product
//! eigenfunctions, and the spectrum as lattice points of a simplex.
//!
//! The eigenfunction with multi-index `k` is
//! `∏ exp(-a_i x_i² / 2) H_{k_i}(sqrt(a_i) x_i)` with eigenvalue
//! `Σ a_i (2 k_i + 1)`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_fn::{hermite_scaled, Scaled};

pub const MAX_DIMENSION: usize = 10;

/// Default cap on the number of enumerated eigenvalues.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 100_000_000;

/// Two eigenvalues are treated as equal when within this relative distance.
pub const EIGEN_REL_TOL: f64 = 1e-9;

pub fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= EIGEN_REL_TOL * a.abs().max(b.abs())
}

/// Dimension and frequency coefficients `a_1..a_n` of the potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct OscillatorConfig {
    a: Vec<f64>,
    a_min: f64,
    a_sum: f64,
    a_prod: f64,
}

impl OscillatorConfig {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() > MAX_DIMENSION {
            return Err(Error::InvalidConfig(format!(
                "dimension must be between 1 and {MAX_DIMENSION}, got {}",
                a.len()
            )));
        }
        if let Some(bad) = a.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "coefficients must be finite and positive, got {bad}"
            )));
        }
        let a_min = a.iter().copied().fold(f64::INFINITY, f64::min);
        let a_sum = a.iter().sum();
        let a_prod = a.iter().product();
        Ok(OscillatorConfig {
            a,
            a_min,
            a_sum,
            a_prod,
        })
    }

    /// All coefficients equal to one.
    pub fn isotropic(n: usize) -> Result<Self> {
        OscillatorConfig::new(vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.a
    }

    pub fn a_min(&self) -> f64 {
        self.a_min
    }

    pub fn a_sum(&self) -> f64 {
        self.a_sum
    }

    pub fn a_prod(&self) -> f64 {
        self.a_prod
    }

    pub fn is_isotropic(&self) -> bool {
        self.a.iter().all(|&c| c == self.a[0])
    }

    /// `V(x) = Σ a_i² x_i²`.
    pub fn potential(&self, x: &[f64]) -> f64 {
        self.a.iter().zip(x).map(|(a, x)| a * a * x * x).sum()
    }

    /// Ground-state eigenvalue `Σ a_i`.
    pub fn ground_energy(&self) -> f64 {
        self.a_sum
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for OscillatorConfig {
    type Error = Error;

    fn try_from(a: Vec<f64>) -> Result<Self> {
        OscillatorConfig::new(a)
    }
}

impl From<OscillatorConfig> for Vec<f64> {
    fn from(c: OscillatorConfig) -> Vec<f64> {
        c.a
    }
}

/// Nonnegative integer tuple `(k_1..k_n)` labelling a basis eigenfunction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(k: Vec<u32>) -> Self {
        MultiIndex(k)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Degree of the polynomial part, `Σ k_i`.
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&k| k as u64).sum()
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(k: Vec<u32>) -> Self {
        MultiIndex(k)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

/// One eigenfunction of the spectrum enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub index: MultiIndex,
    pub eigenvalue: f64,
    pub degree: u64,
    pub nodal_count: u64,
}

impl SpectrumEntry {
    pub fn new(config: &OscillatorConfig, index: MultiIndex) -> Result<Self> {
        let eigenvalue = eigenvalue(config, &index)?;
        let nodal_count = crate::nodal_exact::exact_nodal_count_u64(&index)
            .ok_or_else(|| Error::Domain(format!("nodal count of ({index}) exceeds u64")))?;
        Ok(SpectrumEntry {
            degree: index.degree(),
            index,
            eigenvalue,
            nodal_count,
        })
    }
}

/// Eigenvalue as a left-to-right float sum; every enumeration routine uses
/// this exact summation order so membership tests agree bit for bit.
fn eigenvalue_of(a: &[f64], k: &[u32]) -> f64 {
    a.iter()
        .zip(k)
        .fold(0.0, |acc, (a, &k)| acc + a * (2.0 * k as f64 + 1.0))
}

/// `λ = Σ a_i (2 k_i + 1)`.
pub fn eigenvalue(config: &OscillatorConfig, index: &MultiIndex) -> Result<f64> {
    config.check_dim(index.dim())?;
    Ok(eigenvalue_of(&config.a, &index.0))
}

/// Polynomial part `g(x) = ∏ H_{k_i}(sqrt(a_i) x_i)` in scaled form.
pub fn polynomial_part(config: &OscillatorConfig, index: &MultiIndex, x: &[f64]) -> Result<Scaled> {
    config.check_dim(index.dim())?;
    config.check_dim(x.len())?;
    Ok(polynomial_part_unchecked(&config.a, &index.0, x))
}

pub(crate) fn polynomial_part_unchecked(a: &[f64], k: &[u32], x: &[f64]) -> Scaled {
    a.iter()
        .zip(k)
        .zip(x)
        .fold(Scaled::ONE, |acc, ((a, &k), x)| acc * hermite_scaled(k, a.sqrt() * x))
}

/// `f_k(x) = ∏ exp(-a_i x_i²/2) H_{k_i}(sqrt(a_i) x_i)`. The sign is exact;
/// the magnitude under- or overflows gracefully.
pub fn eigenfunction_eval(config: &OscillatorConfig, index: &MultiIndex, x: &[f64]) -> Result<f64> {
    let g = polynomial_part(config, index, x)?;
    Ok(with_gaussian(&config.a, x, g))
}

pub(crate) fn with_gaussian(a: &[f64], x: &[f64], g: Scaled) -> f64 {
    if g.is_zero() {
        return 0.0;
    }
    let gauss: f64 = a.iter().zip(x).map(|(a, x)| a * x * x).sum::<f64>() / 2.0;
    g.signum() as f64 * (g.ln_abs() - gauss).exp()
}

/// Bounded depth-first walk over the simplex `Σ a_i (2 k_i + 1) <= λ`.
///
/// Rounding is monotone in every term, so a partial sum whose cheapest
/// completion exceeds `λ` can be cut without losing points.
pub(crate) struct SimplexWalk<'a> {
    pub(crate) a: &'a [f64],
    pub(crate) lambda: f64,
}

impl<'a> SimplexWalk<'a> {
    pub(crate) fn cheapest_completion(&self, level: usize, partial: f64) -> f64 {
        self.a[level + 1..].iter().fold(partial, |acc, a| acc + a)
    }

    /// Number of `k` for the last coordinate with `partial + a(2k+1) <= λ`.
    pub(crate) fn last_axis_count(&self, partial: f64) -> u64 {
        let a = *self.a.last().expect("nonempty");
        let fits = |k: u64| partial + a * (2.0 * k as f64 + 1.0) <= self.lambda;
        if !fits(0) {
            return 0;
        }
        let guess = (((self.lambda - partial) / a - 1.0) / 2.0).floor().max(0.0) as u64;
        let mut k = guess;
        while k > 0 && !fits(k) {
            k -= 1;
        }
        while fits(k + 1) {
            k += 1;
        }
        k + 1
    }

    fn count(&self, level: usize, partial: f64, total: &mut u64, budget: u64) -> Result<()> {
        if level + 1 == self.a.len() {
            *total += self.last_axis_count(partial);
            if *total > budget {
                return Err(Error::CapacityExceeded {
                    limit: budget,
                    partial: *total,
                });
            }
            return Ok(());
        }
        let a = self.a[level];
        for k in 0u64.. {
            let next = partial + a * (2.0 * k as f64 + 1.0);
            if self.cheapest_completion(level, next) > self.lambda {
                break;
            }
            self.count(level + 1, next, total, budget)?;
        }
        Ok(())
    }

    fn collect(&self, level: usize, partial: f64, k: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let a = self.a[level];
        let last = level + 1 == self.a.len();
        for ki in 0u32.. {
            let next = partial + a * (2.0 * ki as f64 + 1.0);
            if self.cheapest_completion(level, next) > self.lambda {
                break;
            }
            k.push(ki);
            if last {
                out.push(k.clone());
            } else {
                self.collect(level + 1, next, k, out);
            }
            k.pop();
        }
    }

    /// Values of the first coordinate that admit a completion.
    fn first_axis_range(&self) -> u32 {
        let a = self.a[0];
        let mut n = 0u32;
        while self.cheapest_completion(0, a * (2.0 * n as f64 + 1.0)) <= self.lambda {
            n += 1;
        }
        n
    }
}

/// Spectrum enumeration with an explicit entry budget.
#[derive(Debug, Clone)]
pub struct Enumerator<'a> {
    config: &'a OscillatorConfig,
    budget: u64,
}

impl<'a> Enumerator<'a> {
    pub fn new(config: &'a OscillatorConfig) -> Self {
        Enumerator {
            config,
            budget: DEFAULT_ENUMERATION_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// `N(λ)`: number of multi-indices with eigenvalue `<= λ`, counted
    /// without materialising them.
    pub fn count(&self, lambda: f64) -> Result<u64> {
        if !lambda.is_finite() {
            return Err(Error::Domain(format!("λ must be finite, got {lambda}")));
        }
        let walk = SimplexWalk {
            a: &self.config.a,
            lambda,
        };
        let mut total = 0;
        walk.count(0, 0.0, &mut total, self.budget)?;
        Ok(total)
    }

    /// All entries with eigenvalue `<= λ`, sorted by eigenvalue; eigenvalues
    /// within [`EIGEN_REL_TOL`] of each other are ordered lexicographically
    /// by multi-index.
    pub fn enumerate(&self, lambda: f64) -> Result<Vec<SpectrumEntry>> {
        self.count(lambda)?;
        let walk = SimplexWalk {
            a: &self.config.a,
            lambda,
        };
        let first = walk.first_axis_range();
        let a0 = self.config.a[0];
        let chunks: Vec<Vec<Vec<u32>>> = (0..first)
            .into_par_iter()
            .map(|k0| {
                let mut out = Vec::new();
                let mut k = vec![k0];
                let partial = a0 * (2.0 * k0 as f64 + 1.0);
                if self.config.dim() == 1 {
                    out.push(k);
                } else {
                    walk.collect(1, partial, &mut k, &mut out);
                }
                out
            })
            .collect();
        let mut entries = chunks
            .into_iter()
            .flatten()
            .map(|k| SpectrumEntry::new(self.config, MultiIndex(k)))
            .collect::<Result<Vec<_>>>()?;
        sort_spectrum(&mut entries);
        Ok(entries)
    }

    /// The first `k` entries of the sorted spectrum.
    pub fn first(&self, k: u64) -> Result<Vec<SpectrumEntry>> {
        if k == 0 {
            return Ok(Vec::new());
        }
        if k > self.budget {
            return Err(Error::CapacityExceeded {
                limit: self.budget,
                partial: 0,
            });
        }
        let mut lambda = lambda_k_bound(self.config, k).max(self.config.a_sum);
        while self.count(lambda)? < k {
            lambda *= 1.1;
        }
        let mut entries = self.enumerate(lambda)?;
        entries.truncate(k as usize);
        Ok(entries)
    }
}

/// Deterministic spectral order; see [`Enumerator::enumerate`].
pub fn sort_spectrum(entries: &mut [SpectrumEntry]) {
    entries.par_sort_unstable_by(|x, y| {
        x.eigenvalue
            .total_cmp(&y.eigenvalue)
            .then_with(|| x.index.cmp(&y.index))
    });
    let mut start = 0;
    while start < entries.len() {
        let mut end = start + 1;
        while end < entries.len() && nearly_equal(entries[end - 1].eigenvalue, entries[end].eigenvalue) {
            end += 1;
        }
        if end - start > 1 {
            entries[start..end].sort_by(|x, y| x.index.cmp(&y.index));
        }
        start = end;
    }
}

pub fn enumerate_spectrum(config: &OscillatorConfig, lambda_max: f64) -> Result<Vec<SpectrumEntry>> {
    Enumerator::new(config).enumerate(lambda_max)
}

pub fn counting_function(config: &OscillatorConfig, lambda: f64) -> Result<u64> {
    Enumerator::new(config).count(lambda)
}

/// Leading Weyl term `λⁿ / (2ⁿ n! ∏ a_i)`.
pub fn weyl_estimate(config: &OscillatorConfig, lambda: f64) -> f64 {
    let n = config.dim() as i32;
    let factorial: f64 = (1..=n).map(|i| i as f64).product();
    lambda.powi(n) / (2f64.powi(n) * factorial * config.a_prod)
}

/// Degree bounds at a spectral level `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeBounds {
    /// Largest `Σ k_i` over the lattice simplex.
    pub exact: u64,
    /// `(λ - Σ a_j) / (2 a_min)`.
    pub continuous: f64,
    /// `(λ - n/2) / (2 a_min)`, the form printed alongside the original estimate.
    pub printed: f64,
}

pub fn degree_bounds(config: &OscillatorConfig, lambda: f64) -> Result<DegreeBounds> {
    let slack = lambda * (1.0 + EIGEN_REL_TOL);
    if slack.is_nan() || slack < config.a_sum {
        return Err(Error::Domain(format!(
            "λ = {lambda} lies below the ground state {}",
            config.a_sum
        )));
    }
    let continuous = (lambda - config.a_sum) / (2.0 * config.a_min);
    // each unit of any k_j costs 2 a_j >= 2 a_min
    let exact = ((slack - config.a_sum) / (2.0 * config.a_min)).floor().max(0.0) as u64;
    let printed = (lambda - config.dim() as f64 / 2.0) / (2.0 * config.a_min);
    Ok(DegreeBounds {
        exact,
        continuous,
        printed,
    })
}

/// Largest polynomial degree of an eigenfunction with eigenvalue `<= λ`.
pub fn max_degree(config: &OscillatorConfig, lambda: f64) -> Result<u64> {
    Ok(degree_bounds(config, lambda)?.exact)
}

/// Leading term `k^{1/n} (2ⁿ n! ∏ a_i)^{1/n}` of the `k`-th eigenvalue.
pub fn lambda_k_bound(config: &OscillatorConfig, k: u64) -> f64 {
    let n = config.dim() as i32;
    let factorial: f64 = (1..=n).map(|i| i as f64).product();
    let scale = (2f64.powi(n) * factorial * config.a_prod).powf(1.0 / n as f64);
    (k as f64).powf(1.0 / n as f64) * scale
}
