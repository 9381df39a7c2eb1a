use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use excite_id::experiment::{preset, run, ExperimentConfig, PRESET_NAMES};
use excite_id::Error;

/// Run identification experiments and write their CSV artifacts.
#[derive(Parser)]
#[command(name = "excite-id", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config file.
    Run { config: PathBuf },
    /// Run a named preset.
    Preset {
        name: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Print the preset names.
    ListPresets,
}

fn execute(mut config: ExperimentConfig) -> Result<(), Error> {
    if let Ok(dir) = std::env::var("EXCITE_ID_OUT") {
        config.output_dir = dir;
    }
    let summary = run(&config)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    eprintln!("wrote artifacts to {}", config.output_dir);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ListPresets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
        Command::Run { config } => std::fs::read_to_string(&config)
            .map_err(Error::from)
            .and_then(|text| ExperimentConfig::from_json(&text).map_err(|e| match e {
                Error::Json(j) => Error::Validation(vec![format!("{}: {j}", config.display())]),
                other => other,
            }))
            .and_then(execute),
        Command::Preset { name, seed, out } => match preset(&name) {
            None => Err(Error::Validation(vec![format!(
                "unknown preset {name:?}; available: {}",
                PRESET_NAMES.join(", ")
            )])),
            Some(mut config) => {
                if let Some(s) = seed {
                    config.seed = s;
                }
                if let Some(o) = out {
                    config.output_dir = o;
                }
                execute(config)
            }
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Validation(msgs)) => {
            eprintln!("invalid configuration:");
            for m in msgs {
                eprintln!("  - {m}");
            }
            ExitCode::from(2)
        }
        Err(Error::InvalidArgument(m)) => {
            eprintln!("invalid configuration: {m}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
