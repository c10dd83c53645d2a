use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gamow_cli::{run_scenario, seed_examples, validate_config, ConfigError};
use serde_json::json;

const CONFIG_ERROR: u8 = 1;
const NUMERICAL_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(
    version,
    about = "Resonance poles, Loschmidt echoes and decoherence traces from a JSON scenario"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file
    Run {
        /// Scenario configuration (JSON)
        config: Option<PathBuf>,
        /// Output directory
        #[arg(long, env = "GAMOW_OUT_DIR", default_value = "gamow-out")]
        out: PathBuf,
        /// Write the shipped example scenarios into the output directory
        #[arg(long)]
        seed_examples: bool,
    },
}

fn report_config_errors(errors: &[ConfigError]) -> ExitCode {
    let list: Vec<_> = errors
        .iter()
        .map(|e| json!({"path": e.path, "message": e.message}))
        .collect();
    let report = json!({"status": "invalid_config", "errors": list});
    eprintln!(
        "{}",
        serde_json::to_string_pretty(&report).expect("serializable")
    );
    ExitCode::from(CONFIG_ERROR)
}

fn fail(path: &str, message: impl Into<String>) -> ExitCode {
    report_config_errors(&[ConfigError {
        path: path.into(),
        message: message.into(),
    }])
}

fn run(config: Option<&Path>, out: &Path, seed: bool) -> ExitCode {
    if seed {
        match seed_examples(out) {
            Ok(paths) => {
                for p in paths {
                    println!("{}", p.display());
                }
            }
            Err(e) => {
                eprintln!("cannot write examples to {}: {e}", out.display());
                return ExitCode::from(NUMERICAL_FAILURE);
            }
        }
    }
    let Some(config) = config else {
        return if seed {
            ExitCode::SUCCESS
        } else {
            fail("", "no configuration file given")
        };
    };
    let text = match std::fs::read_to_string(config) {
        Ok(t) => t,
        Err(e) => return fail("", format!("cannot read {}: {e}", config.display())),
    };
    let raw: serde_json::Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => return fail("", format!("not valid JSON: {e}")),
    };
    let cfg = match validate_config(&raw) {
        Ok(c) => c,
        Err(errors) => return report_config_errors(&errors),
    };
    let report = run_scenario(&cfg, out);
    for p in &report.written {
        println!("{}", p.display());
    }
    match report.failure {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(NUMERICAL_FAILURE)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            seed_examples,
        } => run(config.as_deref(), &out, seed_examples),
    }
}
