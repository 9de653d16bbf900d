//! The five subcommands. Each one turns a [`RunConfig`] into output bytes
//! without touching the filesystem, so reruns can be compared directly.

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use qho_core::annuli::{apply_crossing_flags, build_partition, classify, pleijel_certificate, Classification};
use qho_core::constants::{gamma_u_report, MAX_CONSTANT_DIMENSION};
use qho_core::grid_nodal::{
    default_box, default_resolution, random_combination, stabilized_count, write_label_grid, Combination, GridSpec,
    Term, DEFAULT_CELL_BUDGET, DEFAULT_MARGIN,
};
use qho_core::nodal_exact::{ratio_experiment, u_constant};
use qho_core::oscillator::{counting_function, weyl_estimate, Enumerator, SpectrumEntry};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{CommandKind, Format, RunConfig};
use crate::error::RunError;

pub const SCHEMA_VERSION: u32 = 1;
pub const CONSTANTS_HEADER: &str = "n,gamma,u,ratio,bessel_zero,asymptotic_lower";
pub const RATIO_HEADER: &str = "k,eigenvalue,mu,ratio";
pub const SPECTRUM_HEADER: &str = "k,eigenvalue,index,degree,mu";

pub const DEFAULT_N_MAX: u32 = 10;
pub const DEFAULT_K_MAX: u64 = 1000;
pub const DEFAULT_REFINEMENTS: u32 = 3;

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    /// Main table or report, written to `--out` or stdout.
    pub primary: String,
    /// Companion summary of the ratio table.
    pub summary: Option<String>,
    /// Binary label grid for `--dump-grid`.
    pub dump: Option<Vec<u8>>,
    /// Near-degenerate spectrum detected (exit code 3).
    pub degenerate: bool,
}

impl Outputs {
    fn text(primary: String) -> Self {
        Outputs {
            primary,
            summary: None,
            dump: None,
            degenerate: false,
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn to_json<T: Serialize>(command: CommandKind, body: T) -> Result<String, RunError> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command: command.name(),
        body,
    };
    let mut s = serde_json::to_string_pretty(&env).map_err(|e| RunError::Usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn execute(cfg: &RunConfig) -> Result<Outputs, RunError> {
    match cfg.command {
        CommandKind::Constants => cmd_constants(cfg),
        CommandKind::Spectrum => cmd_spectrum(cfg),
        CommandKind::Ratio => cmd_ratio(cfg),
        CommandKind::GridCount => cmd_grid_count(cfg),
        CommandKind::Certificate => cmd_certificate(cfg),
    }
}

fn table_format(cfg: &RunConfig) -> Format {
    cfg.format.unwrap_or(Format::Csv)
}

fn json_only(cfg: &RunConfig) -> Result<(), RunError> {
    if cfg.format == Some(Format::Csv) {
        return Err(RunError::Usage(format!("{} writes JSON only", cfg.command.name())));
    }
    Ok(())
}

fn cmd_constants(cfg: &RunConfig) -> Result<Outputs, RunError> {
    let n_max = cfg.n_max.unwrap_or(DEFAULT_N_MAX);
    if !(2..=MAX_CONSTANT_DIMENSION).contains(&n_max) {
        return Err(RunError::Usage(format!(
            "n_max must lie in [2, {MAX_CONSTANT_DIMENSION}], got {n_max}"
        )));
    }
    let rows = (2..=n_max).map(gamma_u_report).collect::<Result<Vec<_>, _>>()?;
    match table_format(cfg) {
        Format::Csv => {
            let mut out = format!("{CONSTANTS_HEADER}\n");
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.n, r.gamma, r.u_value, r.ratio, r.bessel_zero, r.asymptotic_lower
                )
                .expect("string write");
            }
            Ok(Outputs::text(out))
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Body<T> {
                n_max: u32,
                rows: T,
            }
            Ok(Outputs::text(to_json(cfg.command, Body { n_max, rows })?))
        }
    }
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<Outputs, RunError> {
    let osc = cfg.oscillator()?;
    let enumerator = Enumerator::new(&osc);
    let entries: Vec<SpectrumEntry> = match (cfg.lambda_max, cfg.k_max) {
        (Some(lambda), _) => enumerator.enumerate(lambda)?,
        (None, Some(k)) => enumerator.first(k)?,
        (None, None) => return Err(RunError::Usage("spectrum needs --lambda-max or --k-max".into())),
    };
    match table_format(cfg) {
        Format::Csv => {
            let mut out = format!("{SPECTRUM_HEADER}\n");
            for (i, e) in entries.iter().enumerate() {
                writeln!(out, "{},{},{},{},{}", i + 1, e.eigenvalue, e.index, e.degree, e.nodal_count)
                    .expect("string write");
            }
            Ok(Outputs::text(out))
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                coefficients: &'a [f64],
                lambda_max: Option<f64>,
                k_max: Option<u64>,
                count: usize,
                counting_function: Option<u64>,
                weyl_estimate: Option<f64>,
                entries: &'a [SpectrumEntry],
            }
            let (counting, weyl) = match cfg.lambda_max {
                Some(l) => (Some(counting_function(&osc, l)?), Some(weyl_estimate(&osc, l))),
                None => (None, None),
            };
            Ok(Outputs::text(to_json(
                cfg.command,
                Body {
                    coefficients: osc.coefficients(),
                    lambda_max: cfg.lambda_max,
                    k_max: cfg.k_max,
                    count: entries.len(),
                    counting_function: counting,
                    weyl_estimate: weyl,
                    entries: &entries,
                },
            )?))
        }
    }
}

fn cmd_ratio(cfg: &RunConfig) -> Result<Outputs, RunError> {
    let osc = cfg.oscillator()?;
    let k_max = cfg.k_max.unwrap_or(DEFAULT_K_MAX);
    let series = ratio_experiment(&osc, k_max)?;
    let u = u_constant(osc.dim() as u32)?;
    let u_value = u.to_f64().unwrap_or(f64::NAN);
    let final_tail = series.tail_maxima.first().map_or(f64::NAN, |t| t.max_ratio);

    #[derive(Serialize)]
    struct Summary<'a> {
        coefficients: &'a [f64],
        k_max: u64,
        u: String,
        u_value: f64,
        degenerate: bool,
        degenerate_pairs: u64,
        tail_maxima: &'a [qho_core::nodal_exact::TailMax],
        final_tail_max: f64,
        relative_error: f64,
    }
    let summary = Summary {
        coefficients: osc.coefficients(),
        k_max,
        u: format!("{}/{}", u.numer(), u.denom()),
        u_value,
        degenerate: series.degenerate,
        degenerate_pairs: series.degenerate_pairs,
        tail_maxima: &series.tail_maxima,
        final_tail_max: final_tail,
        relative_error: (final_tail - u_value) / u_value,
    };
    let mut outputs = match table_format(cfg) {
        Format::Csv => {
            let mut out = format!("{RATIO_HEADER}\n");
            for e in &series.entries {
                writeln!(out, "{},{},{},{}", e.k, e.eigenvalue, e.nodal_count, e.ratio).expect("string write");
            }
            let mut o = Outputs::text(out);
            o.summary = Some(to_json(cfg.command, &summary)?);
            o
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a, S: Serialize> {
                #[serde(flatten)]
                summary: S,
                entries: &'a [qho_core::nodal_exact::RatioEntry],
            }
            Outputs::text(to_json(
                cfg.command,
                Body {
                    summary: &summary,
                    entries: &series.entries,
                },
            )?)
        }
    };
    outputs.degenerate = series.degenerate;
    Ok(outputs)
}

fn build_combination(cfg: &RunConfig) -> Result<Combination, RunError> {
    let osc = cfg.oscillator()?;
    if !cfg.terms.is_empty() {
        let terms = cfg.terms.iter().map(|t| Term::new(t.coefficient, t.index.clone())).collect();
        return Ok(Combination::new(osc, terms)?);
    }
    if let Some(index) = &cfg.index {
        return Ok(Combination::single(osc, index.clone())?);
    }
    if let Some(degree) = cfg.random_degree {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        return Ok(random_combination(&osc, degree, &mut rng)?);
    }
    Err(RunError::Usage(
        "grid-count needs --term, --index or --random-degree".into(),
    ))
}

fn grid_spec(cfg: &RunConfig, comb: &Combination) -> Result<GridSpec, RunError> {
    let margin = cfg.margin.unwrap_or(DEFAULT_MARGIN);
    let resolution = cfg.resolution.unwrap_or_else(|| default_resolution(comb.dim()));
    Ok(GridSpec::new(default_box(comb, margin)?, resolution)?.with_budget(cfg.cell_budget.unwrap_or(DEFAULT_CELL_BUDGET)))
}

fn cmd_grid_count(cfg: &RunConfig) -> Result<Outputs, RunError> {
    json_only(cfg)?;
    let comb = build_combination(cfg)?;
    let spec = grid_spec(cfg, &comb)?;
    let mut result = stabilized_count(&comb, &spec, cfg.refinements.unwrap_or(DEFAULT_REFINEMENTS))?;
    let lambda_max = comb.max_eigenvalue();
    let classification = match cfg.m_override {
        Some(m) => {
            let partition = build_partition(comb.config(), lambda_max, m)?;
            let c = classify(&partition, &result, &comb)?;
            apply_crossing_flags(&mut result, &c);
            Some(c)
        }
        None => None,
    };
    let dump = match (&cfg.dump_grid, &result.labels) {
        (Some(_), Some(grid)) => {
            let mut bytes = Vec::new();
            write_label_grid(&mut bytes, grid)?;
            Some(bytes)
        }
        _ => None,
    };

    #[derive(Serialize)]
    struct Body<'a> {
        combination: &'a Combination,
        degree: u64,
        lambda_max: f64,
        margin: f64,
        /// Unbounded domains are counted through their restriction to the box.
        box_convention: &'static str,
        #[serde(flatten)]
        result: &'a qho_core::grid_nodal::NodalCountResult,
        classification: Option<Classification>,
    }
    let primary = to_json(
        cfg.command,
        Body {
            combination: &comb,
            degree: comb.degree(),
            lambda_max,
            margin: cfg.margin.unwrap_or(DEFAULT_MARGIN),
            box_convention: "restricted-to-box",
            result: &result,
            classification,
        },
    )?;
    Ok(Outputs {
        primary,
        summary: None,
        dump,
        degenerate: false,
    })
}

fn cmd_certificate(cfg: &RunConfig) -> Result<Outputs, RunError> {
    json_only(cfg)?;
    let osc = cfg.oscillator()?;
    let k = cfg
        .k
        .or(cfg.k_max)
        .ok_or_else(|| RunError::Usage("certificate needs --k".into()))?;
    let mut report = pleijel_certificate(&osc, k, cfg.m_override)?;
    if let Some(resolution) = cfg.resolution {
        let comb = Combination::single(osc.clone(), report.index.clone())?;
        let margin = cfg.margin.unwrap_or(DEFAULT_MARGIN);
        let spec = GridSpec::new(default_box(&comb, margin)?, resolution)?
            .with_budget(cfg.cell_budget.unwrap_or(DEFAULT_CELL_BUDGET));
        let result = stabilized_count(&comb, &spec, cfg.refinements.unwrap_or(DEFAULT_REFINEMENTS))?;
        let partition = build_partition(&osc, report.eigenvalue, report.shells)?;
        let classification = classify(&partition, &result, &comb)?;
        report = report.with_grid(&osc, &classification)?;
    }
    Ok(Outputs::text(to_json(cfg.command, &report)?))
}
