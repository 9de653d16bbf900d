//! Command-line flags and their translation into a settings layer.

use std::path::{Path, PathBuf};

use clap::Parser;

use crate::config::{merge_settings, parse_config_text, CommandKind, Format, RunConfig, Settings, CELL_BUDGET_ENV};
use crate::error::RunError;

#[derive(Debug, Parser)]
#[command(name = "qho", version, about = "Spectra and nodal domains of the anisotropic harmonic oscillator")]
pub struct Args {
    /// Subcommand; may instead come from the config file.
    #[arg(value_enum)]
    pub command: Option<CommandKind>,
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Potential coefficients, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    #[arg(long)]
    pub n_max: Option<String>,
    #[arg(long)]
    pub lambda_max: Option<String>,
    #[arg(long)]
    pub k_max: Option<String>,
    /// Eigenvalue position for `certificate`.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub resolution: Option<String>,
    #[arg(long)]
    pub refinements: Option<String>,
    #[arg(long)]
    pub m_override: Option<String>,
    #[arg(long)]
    pub margin: Option<String>,
    /// Combination term `COEF:K1,K2,...`; repeatable.
    #[arg(long = "term", allow_hyphen_values = true)]
    pub terms: Vec<String>,
    /// Single product eigenfunction `K1,K2,...`.
    #[arg(long)]
    pub index: Option<String>,
    /// Seeded random combination of all indices up to this degree.
    #[arg(long)]
    pub random_degree: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub dump_grid: Option<PathBuf>,
    #[arg(long)]
    pub cell_budget: Option<String>,
}

impl Args {
    /// Flags that were given, as a settings layer.
    pub fn flag_settings(&self) -> Settings {
        let mut s = Settings::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                s.insert(k.to_string(), v);
            }
        };
        put("command", self.command.map(|c| c.name().to_string()));
        put("coeffs", self.coeffs.clone());
        put("n_max", self.n_max.clone());
        put("lambda_max", self.lambda_max.clone());
        put("k_max", self.k_max.clone());
        put("k", self.k.clone());
        put("resolution", self.resolution.clone());
        put("refinements", self.refinements.clone());
        put("m_override", self.m_override.clone());
        put("margin", self.margin.clone());
        put("terms", (!self.terms.is_empty()).then(|| self.terms.join(";")));
        put("index", self.index.clone());
        put("random_degree", self.random_degree.clone());
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("format", self.format.map(|f| f.name().to_string()));
        put("seed", self.seed.clone());
        put("dump_grid", self.dump_grid.as_ref().map(|p| p.display().to_string()));
        put("cell_budget", self.cell_budget.clone());
        s
    }

    /// Resolves the config file, the environment and the flags into one
    /// validated configuration.
    pub fn resolve(&self, env_budget: Option<String>) -> Result<RunConfig, RunError> {
        let file = match &self.config {
            Some(path) => Some(parse_config_text(&read_config(path)?)?),
            None => None,
        };
        RunConfig::from_settings(&merge_settings(file, env_budget, self.flag_settings()))
    }
}

fn read_config(path: &Path) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|e| RunError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Reads the budget override from the environment.
pub fn env_budget() -> Option<String> {
    std::env::var(CELL_BUDGET_ENV).ok()
}
