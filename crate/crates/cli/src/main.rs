use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use qho_cli::args::{env_budget, Args};
use qho_cli::error::{EXIT_DEGENERATE, EXIT_OK, EXIT_USAGE};
use qho_cli::{execute, Outputs, RunConfig, RunError};

fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".summary.json");
    PathBuf::from(name)
}

fn write_outputs(cfg: &RunConfig, outputs: &Outputs) -> Result<(), RunError> {
    match &cfg.out {
        Some(path) => {
            fs::write(path, &outputs.primary)?;
            if let Some(summary) = &outputs.summary {
                fs::write(summary_path(path), summary)?;
            }
        }
        None => {
            io::stdout().lock().write_all(outputs.primary.as_bytes())?;
            if let Some(summary) = &outputs.summary {
                io::stderr().lock().write_all(summary.as_bytes())?;
            }
        }
    }
    if let (Some(path), Some(bytes)) = (&cfg.dump_grid, &outputs.dump) {
        fs::write(path, bytes)?;
    }
    Ok(())
}

fn run(args: &Args) -> Result<u8, RunError> {
    let cfg = args.resolve(env_budget())?;
    let outputs = execute(&cfg)?;
    write_outputs(&cfg, &outputs)?;
    if outputs.degenerate {
        eprintln!("warning: near-degenerate spectrum detected");
        return Ok(EXIT_DEGENERATE);
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
