//! Exact nodal counts for product eigenfunctions.
//!
//! The zero set of `∏ H_{k_i}(sqrt(a_i) x_i)` is a grid of hyperplanes, one
//! per Hermite zero, so the eigenfunction with index `k` has exactly
//! `∏ (k_i + 1)` nodal domains. When the coefficients are rationally
//! independent every eigenvalue is simple and the `k`-th eigenfunction is a
//! single product, which makes `μ(f_k) / k` directly computable.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oscillator::{nearly_equal, Enumerator, MultiIndex, OscillatorConfig, SimplexWalk};

/// `∏ (k_i + 1)` in arbitrary precision.
pub fn exact_nodal_count(index: &MultiIndex) -> BigUint {
    index
        .as_slice()
        .iter()
        .fold(BigUint::one(), |acc, &k| acc * BigUint::from(k as u64 + 1))
}

/// `∏ (k_i + 1)`, or `None` when it does not fit in a `u64`.
pub fn exact_nodal_count_u64(index: &MultiIndex) -> Option<u64> {
    index
        .as_slice()
        .iter()
        .try_fold(1u64, |acc, &k| acc.checked_mul(k as u64 + 1))
}

/// `sup ∏ k_i` over real `k_i >= 0` with `Σ a_i k_i <= λ`, which is
/// `λⁿ / (nⁿ ∏ a_i)`.
pub fn continuous_sup(config: &OscillatorConfig, lambda: f64) -> f64 {
    let n = config.dim() as i32;
    lambda.powi(n) / ((n as f64).powi(n) * config.a_prod())
}

/// Upper bound on `mu_max(λ)`: with `m_i = k_i + 1` the constraint reads
/// `Σ 2 a_i m_i <= λ + Σ a_i`, hence `(λ + Σ a_i)ⁿ / (2ⁿ nⁿ ∏ a_i)`.
pub fn mu_upper_bound(config: &OscillatorConfig, lambda: f64) -> f64 {
    continuous_sup(config, (lambda + config.a_sum()) / 2.0)
}

/// Lower bound on `mu_max(λ)`: rounding the real maximiser of `∏ k_i` under
/// `Σ 2 a_i k_i <= λ - Σ a_i` down to integers keeps it feasible, and
/// `⌊t⌋ + 1 > t`.
pub fn mu_lower_bound(config: &OscillatorConfig, lambda: f64) -> f64 {
    let budget = (lambda - config.a_sum()).max(0.0);
    continuous_sup(config, budget / 2.0)
}

struct MaxSearch<'a> {
    walk: SimplexWalk<'a>,
    best: u64,
}

impl MaxSearch<'_> {
    /// `sup ∏_{j >= level} (k_j + 1)` over reals, given the partial sum.
    fn tail_bound(&self, level: usize, partial: f64) -> f64 {
        let rest = &self.walk.a[level..];
        let r = rest.len() as i32;
        let room: f64 = self.walk.lambda - partial + rest.iter().sum::<f64>();
        if room <= 0.0 {
            return 0.0;
        }
        (room / (2.0 * r as f64)).powi(r) / rest.iter().product::<f64>()
    }

    fn visit(&mut self, level: usize, partial: f64, product: u64) {
        let a = self.walk.a;
        if level + 1 == a.len() {
            let count = self.walk.last_axis_count(partial);
            if count > 0 {
                self.best = self.best.max(product.saturating_mul(count));
            }
            return;
        }
        let bound = product as f64 * self.tail_bound(level, partial) * (1.0 + 1e-9) + 1e-9;
        if bound < self.best as f64 + 1.0 {
            return;
        }
        for k in 0u64.. {
            let next = partial + a[level] * (2.0 * k as f64 + 1.0);
            if self.walk.cheapest_completion(level, next) > self.walk.lambda {
                break;
            }
            self.visit(level + 1, next, product.saturating_mul(k + 1));
        }
    }
}

/// Largest `∏ (k_i + 1)` over all indices with eigenvalue `<= λ`.
///
/// Branch and bound over the simplex, pruned with the real-variable
/// supremum of the remaining coordinates.
pub fn mu_max(config: &OscillatorConfig, lambda: f64) -> Result<u64> {
    mu_max_with_budget(config, lambda, crate::oscillator::DEFAULT_ENUMERATION_BUDGET)
}

pub fn mu_max_with_budget(config: &OscillatorConfig, lambda: f64, budget: u64) -> Result<u64> {
    let total = Enumerator::new(config).with_budget(budget).count(lambda)?;
    if total == 0 {
        return Err(Error::Domain(format!(
            "λ = {lambda} lies below the ground state {}",
            config.a_sum()
        )));
    }
    let mut search = MaxSearch {
        walk: SimplexWalk {
            a: config.coefficients(),
            lambda,
        },
        best: 1,
    };
    search.visit(0, 0.0, 1);
    Ok(search.best)
}

/// `U(n) = n! / nⁿ` as an exact rational.
pub fn u_constant(n: u32) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Domain("U(n) needs n >= 1".into()));
    }
    let factorial = (1..=n as u64).fold(BigUint::one(), |acc, i| acc * BigUint::from(i));
    let power = BigUint::from(n).pow(n);
    Ok(BigRational::new(factorial.into(), power.into()))
}

pub fn u_constant_f64(n: u32) -> Result<f64> {
    let u = u_constant(n)?;
    Ok(u.to_f64().unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioEntry {
    pub k: u64,
    pub eigenvalue: f64,
    pub index: MultiIndex,
    pub nodal_count: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailMax {
    /// Window is `[ceil(window_end / 2), window_end]`.
    pub window_end: u64,
    pub max_ratio: f64,
}

/// `μ(f_k)/k` along the first `k_max` eigenfunctions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSeries {
    pub entries: Vec<RatioEntry>,
    /// Tail maxima for `K = k_max, k_max/2, k_max/4, …, 1`.
    pub tail_maxima: Vec<TailMax>,
    /// Set when two of the eigenvalues coincide within the tie tolerance.
    pub degenerate: bool,
    pub degenerate_pairs: u64,
}

impl RatioSeries {
    /// `max μ(f_k)/k` over `k ∈ [ceil(K/2), K]`; `None` when `K` exceeds the series.
    pub fn tail_max(&self, window_end: u64) -> Option<f64> {
        if window_end == 0 || window_end as usize > self.entries.len() {
            return None;
        }
        let lo = window_end.div_ceil(2);
        self.entries[(lo - 1) as usize..window_end as usize]
            .iter()
            .map(|e| e.ratio)
            .reduce(f64::max)
    }
}

/// Nodal-count ratios for the first `k_max` eigenfunctions in spectral order.
///
/// Rational independence of the coefficients cannot be checked on floats;
/// near-coincident eigenvalues only raise the `degenerate` flag, and such
/// ties keep the lexicographic order of the enumeration.
pub fn ratio_experiment(config: &OscillatorConfig, k_max: u64) -> Result<RatioSeries> {
    ratio_experiment_with(&Enumerator::new(config), k_max)
}

pub fn ratio_experiment_with(enumerator: &Enumerator<'_>, k_max: u64) -> Result<RatioSeries> {
    if k_max == 0 {
        return Err(Error::Domain("k_max must be at least 1".into()));
    }
    let spectrum = enumerator.first(k_max)?;
    let degenerate_pairs = spectrum
        .windows(2)
        .filter(|w| nearly_equal(w[0].eigenvalue, w[1].eigenvalue))
        .count() as u64;
    let entries: Vec<RatioEntry> = spectrum
        .into_par_iter()
        .enumerate()
        .map(|(i, e)| {
            let k = i as u64 + 1;
            RatioEntry {
                k,
                eigenvalue: e.eigenvalue,
                ratio: e.nodal_count as f64 / k as f64,
                nodal_count: e.nodal_count,
                index: e.index,
            }
        })
        .collect();
    let mut series = RatioSeries {
        entries,
        tail_maxima: Vec::new(),
        degenerate: degenerate_pairs > 0,
        degenerate_pairs,
    };
    let mut window_end = k_max;
    while window_end >= 1 {
        let max_ratio = series.tail_max(window_end).expect("window inside series");
        series.tail_maxima.push(TailMax {
            window_end,
            max_ratio,
        });
        window_end /= 2;
    }
    Ok(series)
}
