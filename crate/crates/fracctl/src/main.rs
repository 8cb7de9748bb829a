use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use fracctl::config::{parse_config, read_config};
use fracctl::report::sidecar_path;
use fracctl::{config_hash, Command};
use fracctl_core::scenario::Scenario;
use toml::{Table, Value};

/// Environment variable naming the default output directory.
const OUTPUT_DIR_VAR: &str = "FRACCTL_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "fracctl", version, about = "Approximate controllability experiments for fractional wave systems")]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    command: Command,
    /// Scenario file (TOML); defaults apply to every absent key.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output CSV path [default: $FRACCTL_OUTPUT_DIR/<command>.csv, else results/<command>.csv].
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn default_out(cmd: Command) -> PathBuf {
    let dir = std::env::var_os(OUTPUT_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("results"));
    dir.join(format!("{}.csv", cmd.name()))
}

fn run(cli: Cli) -> anyhow::Result<PathBuf> {
    let text = match &cli.config {
        Some(p) => read_config(p)?,
        None => String::new(),
    };
    let scenario = Scenario::build(&parse_config(&text)?).map_err(fracctl::ConfigError::from)?;
    eprintln!("scenario: {}", scenario.describe());

    let mut meta = Table::new();
    meta.insert("command".into(), Value::String(cli.command.name().into()));
    meta.insert("config_hash".into(), Value::String(config_hash(text.as_bytes())));
    let table = cli.command.run(&scenario, &mut meta)?;

    let out = cli.out.unwrap_or_else(|| default_out(cli.command));
    table.write(&out).with_context(|| format!("writing {}", out.display()))?;
    let side = sidecar_path(&out);
    std::fs::write(&side, toml::to_string(&meta)?).with_context(|| format!("writing {}", side.display()))?;
    if let Some(Value::Array(f)) = meta.get("failures") {
        for v in f {
            eprintln!("warning: {}", v.as_str().unwrap_or_default());
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            println!("{}", Path::new(&out).display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
