//! Shells of the classically allowed ellipsoid and the counting bounds
//! built on them.
//!
//! The ellipsoid `{V <= λ}` is cut by the level sets `V = v_i`,
//! `v_i = (i/M)^{2/n} λ`, into `M` shells of equal volume. A nodal domain
//! either lies inside one open shell (class `A_i`) or meets at least one of
//! the level sets (class `B_j`). Interior domains are few by Faber-Krahn;
//! crossers are few because each level set is cut by the zero set of a
//! polynomial of bounded degree.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{bessel_zero_for_dimension, gamma_pleijel, pleijel_integral, shell_fraction, unit_ball_volume};
use crate::error::{Error, Result};
use crate::grid_nodal::{Combination, NodalCountResult};
use crate::oscillator::{max_degree, Enumerator, MultiIndex, OscillatorConfig};

/// Smallest `M` with `M^{2n} >= k`, i.e. `ceil(k^{1/(2n)})`.
pub fn choose_m(k: u64, n: usize) -> u64 {
    let exp = 2 * n as u32;
    let reaches = |m: u64| (m as u128).checked_pow(exp).is_none_or(|p| p >= k as u128);
    let mut m = ((k.max(1) as f64).powf(1.0 / exp as f64).ceil() as u64).max(1);
    while m > 1 && reaches(m - 1) {
        m -= 1;
    }
    while !reaches(m) {
        m += 1;
    }
    m
}

/// Level values `v_0 = 0 < v_1 < … < v_M = λ` of the potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusPartition {
    pub lambda: f64,
    pub shells: u64,
    pub values: Vec<f64>,
    n: u32,
    a_prod: f64,
}

impl AnnulusPartition {
    pub fn dim(&self) -> u32 {
        self.n
    }

    /// Volumes `σ_n (v_i^{n/2} - v_{i-1}^{n/2}) / ∏ a` of the shells `i = 1..=M`.
    pub fn shell_volumes(&self) -> Vec<f64> {
        let sigma = unit_ball_volume(self.n).expect("dimension checked at construction");
        let half = self.n as f64 / 2.0;
        self.values
            .windows(2)
            .map(|w| sigma * (w[1].powf(half) - w[0].powf(half)) / self.a_prod)
            .collect()
    }

    /// The shell `i` in `1..=M` whose open interval `(v_{i-1}, v_i)` holds `v`.
    pub fn shell_of(&self, v: f64) -> Option<u64> {
        let i = self.values.partition_point(|&b| b < v);
        (i >= 1 && i <= self.shells as usize && v < self.values[i]).then_some(i as u64)
    }
}

pub fn build_partition(config: &OscillatorConfig, lambda: f64, m: u64) -> Result<AnnulusPartition> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("λ must be finite and positive, got {lambda}")));
    }
    if m == 0 {
        return Err(Error::Domain("the number of shells M must be at least 1".into()));
    }
    let n = config.dim() as u32;
    let values = (0..=m).map(|i| shell_fraction(i, m, n) * lambda).collect();
    Ok(AnnulusPartition {
        lambda,
        shells: m,
        values,
        n,
        a_prod: config.a_prod(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "class")]
pub enum ComponentClass {
    /// Lies strictly inside shell `i` (`1..=M`).
    Interior { shell: u64 },
    /// Meets the level sets `V = v_j` for the listed `j` (`1..=M`).
    Crosser { boundaries: Vec<u64> },
    /// Sampled entirely beyond `V = λ`; cannot happen for a true nodal
    /// domain, so it signals a box or resolution artefact.
    Outside,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    /// Grid resolution the classification was read from.
    pub resolution: usize,
    pub shells: u64,
    /// One per component, ordered by label.
    pub classes: Vec<ComponentClass>,
    /// `(min V, max V)` over the sampled cells of each component.
    pub potential_ranges: Vec<(f64, f64)>,
}

impl Classification {
    pub fn total(&self) -> u64 {
        self.classes.len() as u64
    }

    /// Interior components per shell, index `i - 1`.
    pub fn interior_counts(&self) -> Vec<u64> {
        let mut counts = vec![0; self.shells as usize];
        for c in &self.classes {
            if let ComponentClass::Interior { shell } = c {
                counts[*shell as usize - 1] += 1;
            }
        }
        counts
    }

    pub fn interior_count(&self) -> u64 {
        self.interior_counts().iter().sum()
    }

    pub fn crosser_count(&self) -> u64 {
        self.classes
            .iter()
            .filter(|c| matches!(c, ComponentClass::Crosser { .. }))
            .count() as u64
    }

    pub fn outside_count(&self) -> u64 {
        self.classes
            .iter()
            .filter(|c| matches!(c, ComponentClass::Outside))
            .count() as u64
    }

    /// Crossers per level set `V = v_j`, index `j - 1`.
    pub fn crossers_per_boundary(&self) -> Vec<u64> {
        let mut counts = vec![0; self.shells as usize];
        for c in &self.classes {
            if let ComponentClass::Crosser { boundaries } = c {
                for &j in boundaries {
                    counts[j as usize - 1] += 1;
                }
            }
        }
        counts
    }
}

fn classify_range(partition: &AnnulusPartition, lo: f64, hi: f64) -> ComponentClass {
    if let Some(i) = partition.shell_of(lo) {
        if hi < partition.values[i as usize] {
            return ComponentClass::Interior { shell: i };
        }
    }
    let boundaries: Vec<u64> = (1..=partition.shells)
        .filter(|&j| {
            let v = partition.values[j as usize];
            lo <= v && v <= hi
        })
        .collect();
    if boundaries.is_empty() {
        ComponentClass::Outside
    } else {
        ComponentClass::Crosser { boundaries }
    }
}

/// Sorts every component of a grid count into `A_i`, `B_j` or outside,
/// from the range of `V` over its cell centres.
pub fn classify(partition: &AnnulusPartition, result: &NodalCountResult, comb: &Combination) -> Result<Classification> {
    let grid = result.labels.as_ref().ok_or(Error::MissingLabelGrid)?;
    if grid.dim() != comb.dim() || partition.dim() as usize != comb.dim() {
        return Err(Error::DimensionMismatch {
            expected: comb.dim(),
            got: grid.dim(),
        });
    }
    let n = grid.dim();
    let res = grid.resolution();
    let a = comb.config().coefficients();
    let vsq: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..res)
                .map(|j| {
                    let c = crate::grid_nodal::cell_center_coord(grid.half_widths()[i], res, j);
                    a[i] * a[i] * c * c
                })
                .collect()
        })
        .collect();
    let count = grid.component_count() as usize;
    let empty = || vec![(f64::INFINITY, f64::NEG_INFINITY); count];
    let ranges = grid
        .labels()
        .par_chunks(res)
        .enumerate()
        .fold(empty, |mut acc, (row, labels)| {
            let mut rest = row;
            let mut base = 0.0;
            for t in vsq[..n - 1].iter().rev() {
                base += t[rest % res];
                rest /= res;
            }
            for (j, &l) in labels.iter().enumerate() {
                if l > 0 {
                    let v = base + vsq[n - 1][j];
                    let slot = &mut acc[l as usize - 1];
                    slot.0 = slot.0.min(v);
                    slot.1 = slot.1.max(v);
                }
            }
            acc
        })
        .reduce(empty, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                x.0 = x.0.min(y.0);
                x.1 = x.1.max(y.1);
            }
            a
        });
    let classes = ranges
        .par_iter()
        .map(|&(lo, hi)| classify_range(partition, lo, hi))
        .collect();
    Ok(Classification {
        resolution: res,
        shells: partition.shells,
        classes,
        potential_ranges: ranges,
    })
}

/// Copies the crossed boundaries of every component into the count result.
pub fn apply_crossing_flags(result: &mut NodalCountResult, classification: &Classification) {
    result.crossing_flags = classification
        .classes
        .iter()
        .map(|c| match c {
            ComponentClass::Crosser { boundaries } => boundaries.iter().map(|&j| j as u32).collect(),
            _ => Vec::new(),
        })
        .collect();
}

fn check_bound_args(config: &OscillatorConfig, lambda: f64, m: u64, i: u64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!("λ must be finite and positive, got {lambda}")));
    }
    if m == 0 || i > m {
        return Err(Error::Domain(format!("shell index {i} out of range for M = {m}")));
    }
    if config.dim() < 2 {
        return Err(Error::Domain("shell bounds need dimension >= 2".into()));
    }
    Ok(())
}

fn card_bound_at_fraction(config: &OscillatorConfig, lambda: f64, m: u64, fraction: f64) -> Result<f64> {
    let n = config.dim() as u32;
    let j = bessel_zero_for_dimension(n)?;
    let nf = n as f64;
    Ok(lambda.powi(n as i32) * (1.0 - fraction).max(0.0).powf(nf / 2.0)
        / (j.powi(n as i32) * m as f64 * config.a_prod()))
}

/// `λⁿ (1 - (i/M)^{2/n})^{n/2} / (jⁿ M ∏ a)`: shell volume over the
/// Faber-Krahn volume of a domain with potential at least `v_i`. Zero at `i = M`.
pub fn card_ai_bound(config: &OscillatorConfig, lambda: f64, m: u64, i: u64) -> Result<f64> {
    check_bound_args(config, lambda, m, i)?;
    card_bound_at_fraction(config, lambda, m, shell_fraction(i, m, config.dim() as u32))
}

/// Same bound using the inner edge `v_{i-1}` of shell `i`, which is the
/// smallest potential a domain in `A_i` can see.
pub fn card_ai_bound_inner_edge(config: &OscillatorConfig, lambda: f64, m: u64, i: u64) -> Result<f64> {
    check_bound_args(config, lambda, m, i)?;
    if i == 0 {
        return Err(Error::Domain("shells are numbered from 1".into()));
    }
    card_bound_at_fraction(config, lambda, m, shell_fraction(i - 1, m, config.dim() as u32))
}

/// `(1/M) Σ_{i=1}^{M} (1 - (i/M)^{2/n})^{n/2}`, the right Riemann sum of
/// the Pleijel integral.
pub fn riemann_sum(n: u32, m: u64) -> f64 {
    let half = n as f64 / 2.0;
    (1..=m)
        .map(|i| (1.0 - shell_fraction(i, m, n)).max(0.0).powf(half))
        .sum::<f64>()
        / m as f64
}

/// `|riemann_sum(n, M) - ∫₀¹ (1 - x^{2/n})^{n/2} dx|`.
pub fn riemann_error(n: u32, m: u64) -> Result<f64> {
    Ok((riemann_sum(n, m) - pleijel_integral(n)?).abs())
}

/// `M 2^{2n-1} d^{n-1}` with `d` the largest degree at level `λ`, taken
/// as at least 1: a nonzero constant still leaves one component per level set.
pub fn crossers_bound_at(config: &OscillatorConfig, lambda: f64, m: u64) -> Result<BigUint> {
    let n = config.dim();
    let d = max_degree(config, lambda)?.max(1);
    Ok(BigUint::from(m) * (BigUint::one() << (2 * n - 1)) * BigUint::from(d).pow(n as u32 - 1))
}

/// [`crossers_bound_at`] evaluated at the `k`-th eigenvalue.
pub fn crossers_bound(config: &OscillatorConfig, k: u64, m: u64) -> Result<BigUint> {
    let lambda = kth_entry(config, k)?.1;
    crossers_bound_at(config, lambda, m)
}

fn kth_entry(config: &OscillatorConfig, k: u64) -> Result<(MultiIndex, f64, u64, u64)> {
    if k == 0 {
        return Err(Error::Domain("k starts at 1".into()));
    }
    let spectrum = Enumerator::new(config).first(k)?;
    let max_mu = spectrum.iter().map(|e| e.nodal_count).max().unwrap_or(1);
    let e = spectrum.last().expect("k >= 1 entries");
    Ok((e.index.clone(), e.eigenvalue, e.nodal_count, max_mu))
}

/// Grid-derived counts set against the bounds of the certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCheck {
    pub resolution: usize,
    pub interior_counts: Vec<u64>,
    pub crossers: u64,
    pub crossers_per_boundary: Vec<u64>,
    pub outside: u64,
    /// Every boundary is crossed by at most `crossers_bound` components.
    pub crossers_within_bound: bool,
    /// Every shell holds at most its inner-edge Faber-Krahn bound.
    pub interior_within_inner_edge_bound: bool,
}

/// Assembled counting bound for the `k`-th eigenfunction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub k: u64,
    pub n: usize,
    pub coefficients: Vec<f64>,
    pub index: MultiIndex,
    pub eigenvalue: f64,
    pub mu: u64,
    pub max_mu_first_k: u64,
    pub shells: u64,
    /// `card_ai_bound` for `i = 1..=M`.
    pub interior_bounds: Vec<f64>,
    pub interior_sum: f64,
    pub interior_sum_inner_edge: f64,
    pub max_degree: u64,
    /// Exact decimal digits.
    pub crossers_bound: String,
    pub crossers_bound_value: f64,
    pub total: f64,
    pub mu_over_k: f64,
    pub interior_over_k: f64,
    pub total_over_k: f64,
    pub gamma: f64,
    pub bound_holds: bool,
    pub grid: Option<GridCheck>,
}

/// Counting bound `Σ_i card_ai_bound + crossers_bound` for the `k`-th
/// eigenfunction, against its exact nodal count. `m_override` replaces
/// [`choose_m`].
pub fn pleijel_certificate(config: &OscillatorConfig, k: u64, m_override: Option<u64>) -> Result<CertificateReport> {
    let (index, lambda, mu, max_mu) = kth_entry(config, k)?;
    let n = config.dim();
    let m = m_override.unwrap_or_else(|| choose_m(k, n));
    let interior_bounds: Vec<f64> = (1..=m)
        .map(|i| card_ai_bound(config, lambda, m, i))
        .collect::<Result<_>>()?;
    let interior_sum: f64 = interior_bounds.iter().sum();
    let interior_sum_inner_edge: f64 = (1..=m)
        .map(|i| card_ai_bound_inner_edge(config, lambda, m, i))
        .sum::<Result<f64>>()?;
    let crossers = crossers_bound_at(config, lambda, m)?;
    let crossers_value = crossers.to_f64().unwrap_or(f64::INFINITY);
    let total = interior_sum + crossers_value;
    let kf = k as f64;
    Ok(CertificateReport {
        k,
        n,
        coefficients: config.coefficients().to_vec(),
        index,
        eigenvalue: lambda,
        mu,
        max_mu_first_k: max_mu,
        shells: m,
        interior_bounds,
        interior_sum,
        interior_sum_inner_edge,
        max_degree: max_degree(config, lambda)?,
        crossers_bound: crossers.to_string(),
        crossers_bound_value: crossers_value,
        total,
        mu_over_k: mu as f64 / kf,
        interior_over_k: interior_sum / kf,
        total_over_k: total / kf,
        gamma: gamma_pleijel(n as u32)?,
        bound_holds: mu as f64 <= total,
        grid: None,
    })
}

impl CertificateReport {
    /// Adds the classification of a grid count of the `k`-th eigenfunction.
    pub fn with_grid(mut self, config: &OscillatorConfig, classification: &Classification) -> Result<Self> {
        let per_boundary = classification.crossers_per_boundary();
        let interior = classification.interior_counts();
        let mut interior_ok = true;
        for (i, &c) in interior.iter().enumerate() {
            let bound = card_ai_bound_inner_edge(config, self.eigenvalue, self.shells, i as u64 + 1)?;
            interior_ok &= c as f64 <= bound;
        }
        self.grid = Some(GridCheck {
            resolution: classification.resolution,
            crossers: classification.crosser_count(),
            crossers_within_bound: per_boundary.iter().all(|&c| c as f64 <= self.crossers_bound_value),
            crossers_per_boundary: per_boundary,
            interior_counts: interior,
            outside: classification.outside_count(),
            interior_within_inner_edge_bound: interior_ok,
        });
        Ok(self)
    }
}
