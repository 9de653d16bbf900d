//! Run configuration: a flat `key = value` file, overlaid by the
//! `QHO_CELL_BUDGET` environment variable and then by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use qho_core::oscillator::OscillatorConfig;
use serde::{Deserialize, Serialize};

use crate::error::RunError;

pub const CELL_BUDGET_ENV: &str = "QHO_CELL_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Constants,
    Spectrum,
    Ratio,
    GridCount,
    Certificate,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Constants => "constants",
            CommandKind::Spectrum => "spectrum",
            CommandKind::Ratio => "ratio",
            CommandKind::GridCount => "grid-count",
            CommandKind::Certificate => "certificate",
        }
    }
}

impl FromStr for CommandKind {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        [
            CommandKind::Constants,
            CommandKind::Spectrum,
            CommandKind::Ratio,
            CommandKind::GridCount,
            CommandKind::Certificate,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| RunError::Usage(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// One term `coefficient · f_index` of a combination, written `COEF:K1,K2,…`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub coefficient: f64,
    pub index: Vec<u32>,
}

impl fmt::Display for TermSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.coefficient, join(&self.index))
    }
}

impl FromStr for TermSpec {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        let (c, k) = s
            .split_once(':')
            .ok_or_else(|| RunError::Usage(format!("term {s:?} is not COEF:K1,K2,...")))?;
        Ok(TermSpec {
            coefficient: parse_value("term coefficient", c)?,
            index: parse_list("term index", k)?,
        })
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T, RunError> {
    raw.trim()
        .parse()
        .map_err(|_| RunError::Usage(format!("invalid value {raw:?} for {key}")))
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>, RunError> {
    raw.split(',').map(|x| parse_value(key, x)).collect()
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub coefficients: Vec<f64>,
    pub n_max: Option<u32>,
    pub lambda_max: Option<f64>,
    pub k_max: Option<u64>,
    pub k: Option<u64>,
    pub resolution: Option<usize>,
    pub refinements: Option<u32>,
    pub m_override: Option<u64>,
    pub margin: Option<f64>,
    pub terms: Vec<TermSpec>,
    pub index: Option<Vec<u32>>,
    pub random_degree: Option<u32>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: u64,
    pub dump_grid: Option<PathBuf>,
    pub cell_budget: Option<u64>,
}

const KEYS: &[&str] = &[
    "command",
    "coeffs",
    "n_max",
    "lambda_max",
    "k_max",
    "k",
    "resolution",
    "refinements",
    "m_override",
    "margin",
    "terms",
    "index",
    "random_degree",
    "out",
    "format",
    "seed",
    "dump_grid",
    "cell_budget",
];

/// Raw `key -> value` settings before validation.
pub type Settings = BTreeMap<String, String>;

fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config_text(text: &str) -> Result<Settings, RunError> {
    let mut settings = Settings::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split_once('#').map_or(line, |(before, _)| before).trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| RunError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = normalize_key(key);
        if !KEYS.contains(&key.as_str()) {
            return Err(RunError::Usage(format!("config line {}: unknown key {key:?}", lineno + 1)));
        }
        settings.insert(key, value.trim().to_string());
    }
    Ok(settings)
}

impl RunConfig {
    pub fn from_settings(settings: &Settings) -> Result<Self, RunError> {
        let get = |key: &str| settings.get(key).map(String::as_str).filter(|v| !v.is_empty());
        fn opt<T: FromStr>(key: &str, v: Option<&str>) -> Result<Option<T>, RunError> {
            v.map(|raw| parse_value(key, raw)).transpose()
        }
        for key in settings.keys() {
            if !KEYS.contains(&key.as_str()) {
                return Err(RunError::Usage(format!("unknown setting {key:?}")));
            }
        }
        let command = get("command")
            .ok_or_else(|| RunError::Usage("no command given".into()))?
            .parse()?;
        let coefficients = match get("coeffs") {
            Some(raw) => {
                let a: Vec<f64> = parse_list("coeffs", raw)?;
                OscillatorConfig::new(a.clone()).map_err(|e| RunError::Usage(e.to_string()))?;
                a
            }
            None => Vec::new(),
        };
        let terms = match get("terms") {
            Some(raw) => raw.split(';').map(str::parse).collect::<Result<_, _>>()?,
            None => Vec::new(),
        };
        let format = match get("format") {
            Some("csv") => Some(Format::Csv),
            Some("json") => Some(Format::Json),
            Some(other) => return Err(RunError::Usage(format!("unknown format {other:?}"))),
            None => None,
        };
        Ok(RunConfig {
            command,
            coefficients,
            n_max: opt("n_max", get("n_max"))?,
            lambda_max: opt("lambda_max", get("lambda_max"))?,
            k_max: opt("k_max", get("k_max"))?,
            k: opt("k", get("k"))?,
            resolution: opt("resolution", get("resolution"))?,
            refinements: opt("refinements", get("refinements"))?,
            m_override: opt("m_override", get("m_override"))?,
            margin: opt("margin", get("margin"))?,
            terms,
            index: get("index").map(|raw| parse_list("index", raw)).transpose()?,
            random_degree: opt("random_degree", get("random_degree"))?,
            out: get("out").map(PathBuf::from),
            format,
            seed: opt("seed", get("seed"))?.unwrap_or(0),
            dump_grid: get("dump_grid").map(PathBuf::from),
            cell_budget: opt("cell_budget", get("cell_budget"))?,
        })
    }

    pub fn to_settings(&self) -> Settings {
        let mut s = Settings::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                s.insert(k.to_string(), v);
            }
        };
        put("command", Some(self.command.name().to_string()));
        put("coeffs", (!self.coefficients.is_empty()).then(|| join(&self.coefficients)));
        put("n_max", self.n_max.map(|v| v.to_string()));
        put("lambda_max", self.lambda_max.map(|v| v.to_string()));
        put("k_max", self.k_max.map(|v| v.to_string()));
        put("k", self.k.map(|v| v.to_string()));
        put("resolution", self.resolution.map(|v| v.to_string()));
        put("refinements", self.refinements.map(|v| v.to_string()));
        put("m_override", self.m_override.map(|v| v.to_string()));
        put("margin", self.margin.map(|v| v.to_string()));
        put(
            "terms",
            (!self.terms.is_empty()).then(|| self.terms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";")),
        );
        put("index", self.index.as_ref().map(|k| join(k)));
        put("random_degree", self.random_degree.map(|v| v.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("format", self.format.map(|f| f.name().to_string()));
        put("seed", Some(self.seed.to_string()));
        put("dump_grid", self.dump_grid.as_ref().map(|p| p.display().to_string()));
        put("cell_budget", self.cell_budget.map(|v| v.to_string()));
        s
    }

    /// The `key = value` text that parses back to this configuration.
    pub fn to_config_text(&self) -> String {
        let settings = self.to_settings();
        KEYS.iter()
            .filter_map(|k| settings.get(*k).map(|v| format!("{k} = {v}\n")))
            .collect()
    }

    pub fn from_config_text(text: &str) -> Result<Self, RunError> {
        RunConfig::from_settings(&parse_config_text(text)?)
    }

    pub fn oscillator(&self) -> Result<OscillatorConfig, RunError> {
        if self.coefficients.is_empty() {
            return Err(RunError::Usage(format!("{} needs --coeffs", self.command.name())));
        }
        OscillatorConfig::new(self.coefficients.clone()).map_err(|e| RunError::Usage(e.to_string()))
    }
}

/// Layers file settings, the environment budget and flag settings, later
/// layers winning.
pub fn merge_settings(file: Option<Settings>, env_budget: Option<String>, flags: Settings) -> Settings {
    let mut merged = file.unwrap_or_default();
    if let Some(b) = env_budget {
        merged.insert("cell_budget".into(), b);
    }
    merged.extend(flags);
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunConfig {
        RunConfig {
            command: CommandKind::GridCount,
            coefficients: vec![1.0, std::f64::consts::SQRT_2],
            n_max: None,
            lambda_max: Some(12.5),
            k_max: None,
            k: Some(7),
            resolution: Some(128),
            refinements: Some(2),
            m_override: Some(3),
            margin: Some(1.25),
            terms: vec![
                TermSpec {
                    coefficient: 1.0,
                    index: vec![2, 0],
                },
                TermSpec {
                    coefficient: -0.1,
                    index: vec![0, 2],
                },
            ],
            index: Some(vec![1, 4]),
            random_degree: Some(3),
            out: Some(PathBuf::from("out/run.json")),
            format: Some(Format::Json),
            seed: 42,
            dump_grid: Some(PathBuf::from("grid.qhog")),
            cell_budget: Some(1_000_000),
        }
    }

    #[test]
    fn text_roundtrip() {
        let cfg = sample();
        let text = cfg.to_config_text();
        assert_eq!(RunConfig::from_config_text(&text).unwrap(), cfg);
        assert!(text.contains("coeffs = 1,1.4142135623730951\n"));
    }

    #[test]
    fn json_roundtrip() {
        let cfg = sample();
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), cfg);
    }

    #[test]
    fn comments_hyphens_and_overrides() {
        let file = parse_config_text("# experiment\ncommand = ratio\nk-max = 100 # small\n\ncoeffs=1,2\n").unwrap();
        let mut flags = Settings::new();
        flags.insert("k_max".into(), "5".into());
        let merged = merge_settings(Some(file), Some("77".into()), flags);
        let cfg = RunConfig::from_settings(&merged).unwrap();
        assert_eq!(cfg.command, CommandKind::Ratio);
        assert_eq!(cfg.k_max, Some(5));
        assert_eq!(cfg.coefficients, vec![1.0, 2.0]);
        assert_eq!(cfg.cell_budget, Some(77));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_config_text("nonsense").is_err());
        assert!(parse_config_text("colour = red").is_err());
        for bad in ["1,-2", "1,0", "1,inf", "1,NaN", "x"] {
            let text = format!("command = spectrum\ncoeffs = {bad}\n");
            assert!(RunConfig::from_config_text(&text).is_err(), "{bad}");
        }
        assert!("1.0:2,x".parse::<TermSpec>().is_err());
        assert!("1.0".parse::<TermSpec>().is_err());
        assert!(RunConfig::from_config_text("command = plot\n").is_err());
    }
}
