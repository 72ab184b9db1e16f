use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ltdesk::harness::{emit, run, ExperimentConfig, Format, Report, EXPERIMENTS};
use ltdesk::Error;

#[derive(Parser)]
#[command(name = "ltdesk", about = "Seeded experiments for the Lubin-Tate workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its report.
    Run {
        /// Experiment name; may instead come from the config file.
        experiment: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// List experiment names.
    List,
    /// Re-render a saved JSON report.
    Emit {
        report: PathBuf,
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::ConfigInvalid(_)
            | Error::UnknownExperiment(_)
            | Error::InvalidContext(_)
            | Error::PrecisionTooLarge { .. } => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn write_out(bytes: &[u8], out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(bytes).map_err(|e| Failure::Runtime(e.to_string())),
    }
}

fn load_config(experiment: Option<&str>, path: Option<&PathBuf>, seed: Option<u64>) -> Result<ExperimentConfig, Failure> {
    let mut value = match path {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => serde_json::json!({}),
    };
    let obj = value.as_object_mut().ok_or_else(|| Failure::Config("config must be a JSON object".into()))?;
    if let Some(name) = experiment {
        obj.insert("experiment".into(), name.into());
    }
    if let Some(seed) = seed {
        obj.insert("seed".into(), seed.into());
    }
    Ok(ExperimentConfig::from_json(&value)?)
}

fn main_inner(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::List => {
            let mut text = String::new();
            for (name, about) in EXPERIMENTS {
                text += &format!("{name:<24}{about}\n");
            }
            write_out(text.as_bytes(), None)?;
            Ok(true)
        }
        Command::Run { experiment, config, seed, out, format } => {
            let format: Format = format.parse()?;
            let cfg = load_config(experiment.as_deref(), config.as_ref(), seed)?;
            let out = out.or_else(|| cfg.out.as_ref().map(PathBuf::from));
            let report = run(&cfg.experiment, &cfg)?;
            write_out(&emit(&report, format), out.as_ref())?;
            Ok(report.pass)
        }
        Command::Emit { report, format, out } => {
            let format: Format = format.parse()?;
            let text = fs::read_to_string(&report).map_err(|e| Failure::Config(format!("{}: {e}", report.display())))?;
            let parsed: Report = serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", report.display())))?;
            write_out(&emit(&parsed, format), out.as_ref())?;
            Ok(parsed.pass)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
