//! Nodal-domain counting for finite linear combinations of eigenfunctions.
//!
//! The sign of the polynomial part `Σ c_t ∏ H_{k_ti}(sqrt(a_i) x_i)` is
//! sampled at the cell centres of a uniform grid on a symmetric box, and
//! face-adjacent cells of equal sign are merged with union-find. The
//! Gaussian factor is common to all terms and positive, so it is dropped.
//!
//! Cell centres sit at `(j + 1/2 - N/2) h`; with an even resolution the
//! origin and every coordinate hyperplane fall on cell faces. Domains that
//! are unbounded are counted through their restriction to the box.

mod dump;
mod union_find;

pub use dump::{read_label_grid, write_label_grid, MAGIC as DUMP_MAGIC, VERSION as DUMP_VERSION};
pub use union_find::DisjointSets;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nodal_exact::exact_nodal_count_u64;
use crate::oscillator::{eigenvalue, polynomial_part_unchecked, with_gaussian, MultiIndex, OscillatorConfig};
use crate::special_fn::{hermite_scaled, Scaled};

pub const DEFAULT_MARGIN: f64 = 1.25;
pub const DEFAULT_CELL_BUDGET: u64 = 1_000_000_000;
pub const MIN_RESOLUTION: usize = 16;
/// Sampled values below this magnitude are treated as zero.
pub const ZERO_THRESHOLD: f64 = 1e-300;

/// Initial cells per axis used when none is given.
pub fn default_resolution(n: usize) -> usize {
    match n {
        1 | 2 => 256,
        3 => 64,
        _ => MIN_RESOLUTION,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub coefficient: f64,
    pub index: MultiIndex,
}

impl Term {
    pub fn new(coefficient: f64, index: impl Into<MultiIndex>) -> Self {
        Term {
            coefficient,
            index: index.into(),
        }
    }
}

/// `Σ c_t f_{k_t}` over a fixed oscillator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Combination {
    config: OscillatorConfig,
    terms: Vec<Term>,
}

impl Combination {
    pub fn new(config: OscillatorConfig, terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Domain("a combination needs at least one term".into()));
        }
        for t in &terms {
            if !(t.coefficient.is_finite() && t.coefficient != 0.0) {
                return Err(Error::Domain(format!(
                    "coefficients must be finite and nonzero, got {}",
                    t.coefficient
                )));
            }
            config.check_dim(t.index.dim())?;
        }
        Ok(Combination { config, terms })
    }

    /// The basis eigenfunction `f_k` alone.
    pub fn single(config: OscillatorConfig, index: impl Into<MultiIndex>) -> Result<Self> {
        Combination::new(config, vec![Term::new(1.0, index)])
    }

    pub fn config(&self) -> &OscillatorConfig {
        &self.config
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.config.dim()
    }

    /// Largest `Σ k_i` over the terms.
    pub fn degree(&self) -> u64 {
        self.terms.iter().map(|t| t.index.degree()).max().unwrap_or(0)
    }

    /// Largest eigenvalue among the terms.
    pub fn max_eigenvalue(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| eigenvalue(&self.config, &t.index).expect("checked at construction"))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Σ c_t ∏ H_{k_ti}(sqrt(a_i) x_i)`; same sign as the combination itself.
    pub fn polynomial_eval(&self, x: &[f64]) -> Result<Scaled> {
        self.config.check_dim(x.len())?;
        let a = self.config.coefficients();
        Ok(self.terms.iter().fold(Scaled::ZERO, |acc, t| {
            acc.add(&polynomial_part_unchecked(a, t.index.as_slice(), x).scale(t.coefficient))
        }))
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let g = self.polynomial_eval(x)?;
        Ok(with_gaussian(self.config.coefficients(), x, g))
    }
}

pub fn combination_eval(comb: &Combination, x: &[f64]) -> Result<f64> {
    comb.eval(x)
}

/// Half-widths `R_i = margin sqrt(λ_max) / a_i` of a box containing the
/// classically allowed ellipsoid `{V <= λ_max}`.
pub fn default_box(comb: &Combination, margin: f64) -> Result<Vec<f64>> {
    if !(margin.is_finite() && margin >= 1.0) {
        return Err(Error::InvalidGrid(format!("margin must be finite and >= 1, got {margin}")));
    }
    let root = comb.max_eigenvalue().sqrt();
    Ok(comb
        .config
        .coefficients()
        .iter()
        .map(|a| margin * root / a)
        .collect())
}

/// Sampling box and initial resolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    /// The box is `∏ [-R_i, R_i]`.
    pub half_widths: Vec<f64>,
    /// Cells per axis at the first level; even and at least 16.
    pub resolution: usize,
    pub cell_budget: u64,
    /// Number of slabs labelled independently; 0 uses the worker count.
    pub tiles: usize,
    /// Keep the finest label grid in the result.
    pub keep_labels: bool,
}

impl GridSpec {
    pub fn new(half_widths: Vec<f64>, resolution: usize) -> Result<Self> {
        if half_widths.is_empty() || half_widths.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidGrid(format!(
                "half-widths must be finite and positive, got {half_widths:?}"
            )));
        }
        if resolution < MIN_RESOLUTION || !resolution.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "resolution must be even and at least {MIN_RESOLUTION}, got {resolution}"
            )));
        }
        Ok(GridSpec {
            half_widths,
            resolution,
            cell_budget: DEFAULT_CELL_BUDGET,
            tiles: 0,
            keep_labels: true,
        })
    }

    /// Default box with margin 1.25 around the combination.
    pub fn for_combination(comb: &Combination, resolution: usize) -> Result<Self> {
        GridSpec::new(default_box(comb, DEFAULT_MARGIN)?, resolution)
    }

    pub fn with_budget(mut self, cell_budget: u64) -> Self {
        self.cell_budget = cell_budget;
        self
    }

    pub fn with_tiles(mut self, tiles: usize) -> Self {
        self.tiles = tiles;
        self
    }

    pub fn with_labels(mut self, keep: bool) -> Self {
        self.keep_labels = keep;
        self
    }

    pub fn dim(&self) -> usize {
        self.half_widths.len()
    }

    fn level_resolution(&self, level: u32) -> Result<usize> {
        let res = 1usize
            .checked_shl(level)
            .and_then(|f| self.resolution.checked_mul(f))
            .ok_or(Error::CellBudgetExceeded {
                cells: u128::MAX,
                limit: self.cell_budget,
            })?;
        let cells = (res as u128).checked_pow(self.dim() as u32).unwrap_or(u128::MAX);
        if cells > self.cell_budget as u128 || cells > u32::MAX as u128 {
            return Err(Error::CellBudgetExceeded {
                cells,
                limit: self.cell_budget,
            });
        }
        Ok(res)
    }
}

/// `(j + 1/2 - N/2) h` with `h = 2R/N`.
pub fn cell_center_coord(half_width: f64, resolution: usize, j: usize) -> f64 {
    let h = 2.0 * half_width / resolution as f64;
    (j as f64 + 0.5 - resolution as f64 / 2.0) * h
}

/// Component labels on a uniform grid, row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelGrid {
    half_widths: Vec<f64>,
    resolution: usize,
    labels: Vec<i32>,
}

impl LabelGrid {
    pub fn new(half_widths: Vec<f64>, resolution: usize, labels: Vec<i32>) -> Result<Self> {
        let cells = (resolution as u128).checked_pow(half_widths.len() as u32);
        if half_widths.is_empty() || cells != Some(labels.len() as u128) {
            return Err(Error::Format(format!(
                "{} labels do not fill a {}-dimensional grid of resolution {resolution}",
                labels.len(),
                half_widths.len()
            )));
        }
        Ok(LabelGrid {
            half_widths,
            resolution,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.half_widths.len()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    pub fn labels(&self) -> &[i32] {
        &self.labels
    }

    pub fn cell_width(&self, axis: usize) -> f64 {
        2.0 * self.half_widths[axis] / self.resolution as f64
    }

    /// Per-axis cell indices of a flat index.
    pub fn cell_coords(&self, mut idx: usize) -> Vec<usize> {
        let mut coords = vec![0; self.dim()];
        for c in coords.iter_mut().rev() {
            *c = idx % self.resolution;
            idx /= self.resolution;
        }
        coords
    }

    pub fn cell_center(&self, idx: usize) -> Vec<f64> {
        self.cell_coords(idx)
            .iter()
            .zip(&self.half_widths)
            .map(|(&j, &r)| cell_center_coord(r, self.resolution, j))
            .collect()
    }

    /// Number of components, i.e. the largest label.
    pub fn component_count(&self) -> u64 {
        self.labels.iter().copied().max().unwrap_or(0).max(0) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Exact,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RefinementLevel {
    pub resolution: usize,
    pub count: u64,
}

/// A sampled point of one component: the cell centre of least potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub label: i32,
    pub point: Vec<f64>,
    pub potential: f64,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalCountResult {
    pub count: u64,
    pub method: CountMethod,
    /// Cells per axis at the level the count was taken from; 0 for exact counts.
    pub resolution: usize,
    pub half_widths: Vec<f64>,
    pub history: Vec<RefinementLevel>,
    /// One per component, ordered by label.
    pub witnesses: Vec<Witness>,
    /// Per component, the shell boundaries it crosses; empty until classified.
    pub crossing_flags: Vec<Vec<u32>>,
    /// The last two levels agree.
    pub converged: bool,
    #[serde(skip)]
    pub labels: Option<LabelGrid>,
}

impl NodalCountResult {
    /// `∏ (k_i + 1)` for a product eigenfunction; `None` on overflow.
    pub fn exact(index: &MultiIndex) -> Option<Self> {
        Some(NodalCountResult {
            count: exact_nodal_count_u64(index)?,
            method: CountMethod::Exact,
            resolution: 0,
            half_widths: Vec::new(),
            history: Vec::new(),
            witnesses: Vec::new(),
            crossing_flags: Vec::new(),
            converged: true,
            labels: None,
        })
    }

    /// Bound on how much `V` can change between a point of a cell and a
    /// neighbouring cell centre: `Σ a_i² h_i (2 R_i - h_i)`.
    pub fn potential_tolerance(&self, config: &OscillatorConfig) -> f64 {
        if self.resolution == 0 {
            return 0.0;
        }
        config
            .coefficients()
            .iter()
            .zip(&self.half_widths)
            .map(|(a, r)| {
                let h = 2.0 * r / self.resolution as f64;
                a * a * h * (2.0 * r - h)
            })
            .sum()
    }
}

struct Level {
    count: u64,
    labels: Vec<i32>,
    witnesses: Vec<Witness>,
}

/// Sign of the polynomial part at every cell centre.
fn sample_signs(comb: &Combination, half_widths: &[f64], resolution: usize) -> Vec<i8> {
    let n = comb.dim();
    let a = comb.config.coefficients();
    // table[t][i][j] = H_{k_ti}(sqrt(a_i) c_j), coefficient folded into axis 0
    let table: Vec<Vec<Vec<Scaled>>> = comb
        .terms
        .iter()
        .map(|t| {
            (0..n)
                .map(|i| {
                    let k = t.index.as_slice()[i];
                    let s = a[i].sqrt();
                    (0..resolution)
                        .map(|j| {
                            let v = hermite_scaled(k, s * cell_center_coord(half_widths[i], resolution, j));
                            if i == 0 {
                                v.scale(t.coefficient)
                            } else {
                                v
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let cells = resolution.pow(n as u32);
    let mut signs = vec![0i8; cells];
    signs
        .par_chunks_mut(resolution)
        .enumerate()
        .for_each(|(row, out)| {
            let mut prefix_coords = vec![0usize; n - 1];
            let mut r = row;
            for c in prefix_coords.iter_mut().rev() {
                *c = r % resolution;
                r /= resolution;
            }
            let mut acc = vec![Scaled::ZERO; resolution];
            for axes in &table {
                let prefix = prefix_coords
                    .iter()
                    .zip(axes)
                    .fold(Scaled::ONE, |p, (&j, vals)| p * vals[j]);
                if prefix.is_zero() {
                    continue;
                }
                for (slot, v) in acc.iter_mut().zip(&axes[n - 1]) {
                    *slot = slot.add(&(prefix * *v));
                }
            }
            for (o, v) in out.iter_mut().zip(&acc) {
                *o = if v.is_zero() || v.abs_below(ZERO_THRESHOLD) {
                    0
                } else {
                    v.signum()
                };
            }
        });
    signs
}

/// Canonical component labels: 0 for zero cells, otherwise `1..=count` in
/// order of first appearance in row-major order.
///
/// The first axis is cut into `tiles` slabs which are labelled in parallel;
/// seams are merged afterwards. Roots are minimal indices, so the labels do
/// not depend on the slab layout.
pub fn label_components(signs: &[i8], n: usize, resolution: usize, tiles: usize) -> (Vec<i32>, u64) {
    let plane = resolution.pow(n as u32 - 1);
    let strides: Vec<usize> = (0..n).map(|i| resolution.pow((n - 1 - i) as u32)).collect();
    let tiles = tiles.clamp(1, resolution);
    let ranges: Vec<(usize, usize)> = (0..tiles)
        .map(|t| (t * resolution / tiles, (t + 1) * resolution / tiles))
        .filter(|(a, b)| b > a)
        .collect();
    let parts: Vec<DisjointSets> = ranges
        .par_iter()
        .map(|&(a0, b0)| {
            let (lo, hi) = (a0 * plane, b0 * plane);
            let mut ds = DisjointSets::new(lo as u32, hi - lo);
            for idx in lo..hi {
                let s = signs[idx];
                if s == 0 {
                    continue;
                }
                for &stride in &strides {
                    let nb = idx + stride;
                    if (idx / stride) % resolution + 1 == resolution || nb >= hi {
                        continue;
                    }
                    if signs[nb] == s {
                        ds.union(idx as u32, nb as u32);
                    }
                }
            }
            ds
        })
        .collect();
    let mut ds = DisjointSets::concat(parts);
    for &(_, b0) in &ranges[..ranges.len() - 1] {
        let seam = b0 * plane;
        for idx in seam - plane..seam {
            let s = signs[idx];
            if s != 0 && signs[idx + plane] == s {
                ds.union(idx as u32, (idx + plane) as u32);
            }
        }
    }
    let mut labels = vec![0i32; signs.len()];
    let mut count = 0i32;
    for idx in 0..signs.len() {
        if signs[idx] == 0 {
            continue;
        }
        let root = ds.find(idx as u32) as usize;
        if root == idx {
            count += 1;
            labels[idx] = count;
        } else {
            labels[idx] = labels[root];
        }
    }
    (labels, count as u64)
}

fn find_witnesses(
    config: &OscillatorConfig,
    half_widths: &[f64],
    resolution: usize,
    labels: &[i32],
    signs: &[i8],
    count: u64,
) -> Vec<Witness> {
    let n = half_widths.len();
    let a = config.coefficients();
    let centers: Vec<Vec<f64>> = half_widths
        .iter()
        .map(|&r| (0..resolution).map(|j| cell_center_coord(r, resolution, j)).collect())
        .collect();
    let vsq: Vec<Vec<f64>> = centers
        .iter()
        .zip(a)
        .map(|(cs, a)| cs.iter().map(|c| a * a * c * c).collect())
        .collect();
    let mut best: Vec<(f64, usize)> = vec![(f64::INFINITY, 0); count as usize];
    let mut coords = vec![0usize; n];
    for (idx, &label) in labels.iter().enumerate() {
        if idx > 0 {
            // advance the odometer
            for c in coords.iter_mut().rev() {
                *c += 1;
                if *c < resolution {
                    break;
                }
                *c = 0;
            }
        }
        if label == 0 {
            continue;
        }
        let v: f64 = coords.iter().zip(&vsq).map(|(&j, t)| t[j]).sum();
        let slot = &mut best[label as usize - 1];
        if v < slot.0 {
            *slot = (v, idx);
        }
    }
    best.iter()
        .enumerate()
        .map(|(l, &(potential, idx))| {
            let mut point = vec![0.0; n];
            let mut rest = idx;
            for i in (0..n).rev() {
                point[i] = centers[i][rest % resolution];
                rest /= resolution;
            }
            Witness {
                label: l as i32 + 1,
                point,
                potential,
                sign: signs[idx],
            }
        })
        .collect()
}

fn count_level(comb: &Combination, spec: &GridSpec, resolution: usize) -> Result<Level> {
    let signs = sample_signs(comb, &spec.half_widths, resolution);
    if signs.iter().all(|&s| s == 0) {
        return Err(Error::DegenerateField);
    }
    let tiles = if spec.tiles == 0 {
        rayon::current_num_threads()
    } else {
        spec.tiles
    };
    let (labels, count) = label_components(&signs, comb.dim(), resolution, tiles);
    let witnesses = find_witnesses(&comb.config, &spec.half_widths, resolution, &labels, &signs, count);
    Ok(Level {
        count,
        labels,
        witnesses,
    })
}

fn check_spec(comb: &Combination, spec: &GridSpec) -> Result<()> {
    if spec.dim() != comb.dim() {
        return Err(Error::DimensionMismatch {
            expected: comb.dim(),
            got: spec.dim(),
        });
    }
    Ok(())
}

fn finish(spec: &GridSpec, resolution: usize, history: Vec<RefinementLevel>, level: Level) -> NodalCountResult {
    let converged = history.len() >= 2 && history[history.len() - 1].count == history[history.len() - 2].count;
    let count = level.count;
    NodalCountResult {
        count,
        method: CountMethod::Grid,
        resolution,
        half_widths: spec.half_widths.clone(),
        history,
        witnesses: level.witnesses,
        crossing_flags: vec![Vec::new(); count as usize],
        converged,
        labels: spec.keep_labels.then(|| LabelGrid {
            half_widths: spec.half_widths.clone(),
            resolution,
            labels: level.labels,
        }),
    }
}

/// Counts sign components at `refinements` levels of resolution
/// `spec.resolution · 2^r`, `r = 0..refinements`, and reports the finest.
pub fn count_nodal_domains(comb: &Combination, spec: &GridSpec, refinements: u32) -> Result<NodalCountResult> {
    check_spec(comb, spec)?;
    if refinements == 0 {
        return Err(Error::InvalidGrid("at least one refinement level is needed".into()));
    }
    spec.level_resolution(refinements - 1)?;
    let mut history = Vec::with_capacity(refinements as usize);
    let mut last = None;
    for r in 0..refinements {
        let resolution = spec.level_resolution(r)?;
        let level = count_level(comb, spec, resolution)?;
        history.push(RefinementLevel {
            resolution,
            count: level.count,
        });
        last = Some((resolution, level));
    }
    let (resolution, level) = last.expect("refinements >= 1");
    Ok(finish(spec, resolution, history, level))
}

/// Doubles the resolution until two consecutive levels agree, at most
/// `max_refinements` times. A run that never agrees is returned with
/// `converged = false`.
pub fn stabilized_count(comb: &Combination, spec: &GridSpec, max_refinements: u32) -> Result<NodalCountResult> {
    check_spec(comb, spec)?;
    let mut history = Vec::new();
    let mut r = 0;
    loop {
        let resolution = spec.level_resolution(r)?;
        let level = count_level(comb, spec, resolution)?;
        history.push(RefinementLevel {
            resolution,
            count: level.count,
        });
        let agree = history.len() >= 2 && history[history.len() - 2].count == level.count;
        if agree || r >= max_refinements {
            return Ok(finish(spec, resolution, history, level));
        }
        r += 1;
    }
}

/// All multi-indices of total degree `<= degree`, in lexicographic order.
pub fn indices_up_to_degree(n: usize, degree: u32) -> Vec<MultiIndex> {
    fn walk(n: usize, left: u32, k: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if k.len() == n {
            out.push(MultiIndex::new(k.clone()));
            return;
        }
        for ki in 0..=left {
            k.push(ki);
            walk(n, left - ki, k, out);
            k.pop();
        }
    }
    let mut out = Vec::new();
    walk(n, degree, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Combination of every basis function of degree `<= degree` with
/// coefficients drawn uniformly from `[-1, 1]`.
pub fn random_combination<R: Rng + ?Sized>(config: &OscillatorConfig, degree: u32, rng: &mut R) -> Result<Combination> {
    let terms = indices_up_to_degree(config.dim(), degree)
        .into_iter()
        .map(|index| {
            let mut c = 0.0;
            while c == 0.0 {
                c = rng.gen_range(-1.0..=1.0);
            }
            Term::new(c, index)
        })
        .collect();
    Combination::new(config.clone(), terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::eigenfunction_eval;
    use std::f64::consts::SQRT_2;

    fn cfg(a: &[f64]) -> OscillatorConfig {
        OscillatorConfig::new(a.to_vec()).unwrap()
    }

    fn single(a: &[f64], k: &[u32]) -> Combination {
        Combination::single(cfg(a), k.to_vec()).unwrap()
    }

    fn saddle() -> Combination {
        Combination::new(
            cfg(&[1.0, 1.0]),
            vec![Term::new(1.0, vec![2, 0]), Term::new(-1.0, vec![0, 2])],
        )
        .unwrap()
    }

    #[test]
    fn combination_examples() {
        let c = single(&[1.0, SQRT_2], &[2, 1]);
        let x = [0.3, -0.7];
        let direct = eigenfunction_eval(c.config(), &vec![2, 1].into(), &x).unwrap();
        assert!((c.eval(&x).unwrap() - direct).abs() <= 1e-15 * direct.abs());
        for t in [-3.0, -0.4, 0.0, 1.1, 2.5] {
            assert_eq!(saddle().eval(&[t, t]).unwrap(), 0.0);
        }
        let ground = single(&[1.0, 1.0], &[0, 0]);
        assert!(ground.eval(&[4.0, -2.0]).unwrap() > 0.0);
        assert!(ground.eval(&[1.0]).is_err());
        assert!(Combination::new(cfg(&[1.0]), vec![]).is_err());
        assert!(Combination::new(cfg(&[1.0]), vec![Term::new(0.0, vec![1])]).is_err());
        assert!(Combination::new(cfg(&[1.0]), vec![Term::new(1.0, vec![1, 1])]).is_err());
        assert_eq!(saddle().degree(), 2);
    }

    #[test]
    fn default_box_examples() {
        let b = default_box(&single(&[1.0, 1.0], &[0, 0]), 1.25).unwrap();
        assert_eq!(b, vec![1.25 * 2f64.sqrt(); 2]);
        let tight = default_box(&single(&[1.0, 2.0], &[1, 0]), 1.0).unwrap();
        let lambda: f64 = 3.0 + 2.0;
        assert_eq!(tight, vec![lambda.sqrt(), lambda.sqrt() / 2.0]);
        assert!(default_box(&saddle(), 0.9).is_err());
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(vec![1.0], 15).is_err());
        assert!(GridSpec::new(vec![1.0], 17).is_err());
        assert!(GridSpec::new(vec![0.0], 16).is_err());
        let spec = GridSpec::new(vec![1.0, 1.0], 64).unwrap().with_budget(10_000);
        let err = count_nodal_domains(&saddle(), &spec, 2).unwrap_err();
        assert!(matches!(err, Error::CellBudgetExceeded { cells: 16384, limit: 10_000 }));
        let spec3 = GridSpec::new(vec![1.0; 3], 16).unwrap();
        assert!(matches!(
            count_nodal_domains(&saddle(), &spec3, 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn centres_are_symmetric() {
        for j in 0..32 {
            assert_eq!(cell_center_coord(3.7, 32, j), -cell_center_coord(3.7, 32, 31 - j));
        }
    }

    #[test]
    fn product_counts() {
        let c = single(&[1.0, 1.0], &[2, 3]);
        let spec = GridSpec::for_combination(&c, 512).unwrap();
        let r = count_nodal_domains(&c, &spec, 2).unwrap();
        assert_eq!(r.count, 12);
        assert_eq!(r.resolution, 1024);
        assert_eq!(
            r.history.iter().map(|l| (l.resolution, l.count)).collect::<Vec<_>>(),
            vec![(512, 12), (1024, 12)]
        );
        assert!(r.converged);
        let c = single(&[1.0, 1.0], &[1, 0]);
        let spec = GridSpec::for_combination(&c, 64).unwrap();
        assert_eq!(count_nodal_domains(&c, &spec, 1).unwrap().count, 2);
    }

    #[test]
    fn saddle_has_four_domains() {
        let spec = GridSpec::for_combination(&saddle(), 128).unwrap();
        let r = stabilized_count(&saddle(), &spec, 3).unwrap();
        assert_eq!(r.count, 4);
        assert!(r.converged);
    }

    #[test]
    fn witnesses_carry_component_sign() {
        let c = Combination::new(
            cfg(&[1.0, SQRT_2]),
            vec![Term::new(0.8, vec![3, 1]), Term::new(-0.5, vec![1, 2]), Term::new(0.3, vec![0, 0])],
        )
        .unwrap();
        let spec = GridSpec::for_combination(&c, 128).unwrap();
        let r = count_nodal_domains(&c, &spec, 2).unwrap();
        assert_eq!(r.witnesses.len() as u64, r.count);
        let grid = r.labels.as_ref().unwrap();
        assert_eq!(grid.component_count(), r.count);
        for (i, w) in r.witnesses.iter().enumerate() {
            assert_eq!(w.label, i as i32 + 1);
            let v = c.eval(&w.point).unwrap();
            assert_eq!(v.signum() as i8, w.sign);
            assert!((w.potential - c.config().potential(&w.point)).abs() < 1e-12 * w.potential.max(1.0));
        }
    }

    #[test]
    fn labels_do_not_depend_on_tiles() {
        let c = Combination::new(
            cfg(&[1.0, 1.0]),
            vec![Term::new(1.0, vec![4, 1]), Term::new(0.7, vec![1, 4]), Term::new(-0.2, vec![2, 2])],
        )
        .unwrap();
        let base = GridSpec::for_combination(&c, 96).unwrap();
        let reference = count_nodal_domains(&c, &base.clone().with_tiles(1), 1).unwrap();
        for tiles in [2, 3, 7, 96, 500] {
            let r = count_nodal_domains(&c, &base.clone().with_tiles(tiles), 1).unwrap();
            assert_eq!(r, reference, "tiles = {tiles}");
        }
    }

    #[test]
    fn one_and_three_dimensions() {
        let c = single(&[1.3], &[5]);
        let spec = GridSpec::for_combination(&c, 64).unwrap();
        assert_eq!(count_nodal_domains(&c, &spec, 1).unwrap().count, 6);
        let c = single(&[1.0, SQRT_2, 0.8], &[1, 2, 1]);
        let spec = GridSpec::for_combination(&c, 32).unwrap();
        assert_eq!(count_nodal_domains(&c, &spec, 1).unwrap().count, 12);
    }

    #[test]
    fn ground_state_converges_immediately() {
        let c = single(&[1.0, 1.0], &[0, 0]);
        let spec = GridSpec::for_combination(&c, 16).unwrap();
        let r = stabilized_count(&c, &spec, 4).unwrap();
        assert_eq!(r.count, 1);
        assert_eq!(r.history.len(), 2);
        assert!(r.converged);
    }

    #[test]
    fn vanishing_combination_is_rejected() {
        let c = Combination::new(
            cfg(&[1.0, 1.0]),
            vec![Term::new(1.0, vec![1, 0]), Term::new(-1.0, vec![1, 0])],
        )
        .unwrap();
        let spec = GridSpec::for_combination(&c, 16).unwrap();
        assert_eq!(count_nodal_domains(&c, &spec, 1).unwrap_err(), Error::DegenerateField);
    }

    #[test]
    fn exact_result() {
        let r = NodalCountResult::exact(&vec![2, 3].into()).unwrap();
        assert_eq!(r.count, 12);
        assert_eq!(r.method, CountMethod::Exact);
    }

    #[test]
    fn degree_enumeration() {
        let all = indices_up_to_degree(2, 3);
        assert_eq!(all.len(), 10);
        assert!(all.iter().all(|k| k.degree() <= 3));
        assert_eq!(indices_up_to_degree(3, 0), vec![MultiIndex::zero(3)]);
    }
}
