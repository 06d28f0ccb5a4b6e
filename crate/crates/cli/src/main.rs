use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use arakelov_cli::{run, CliError, Command, Overrides, ResultBundle};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "arakelov", version, about = "Exact intersection theory for metrised divisors on genus-0 curves")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Scenario JSON file.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Write the result into this directory instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Comma-separated list of n values.
    #[arg(long, global = true, value_delimiter = ',')]
    n: Option<Vec<u64>>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Positivity classes, λ_ess with its optimal slopes, and μ_inf.
    Classify,
    /// Intersection number of the first two divisors.
    Pair,
    /// χ-volume and volume.
    Volumes,
    /// Degree profile t ↦ deg(D_{g,t}).
    DgtProfile,
    /// Arakelov degrees of H⁰(nD) against the self-intersection.
    HsConverge,
    /// Randomized exact inequality checks.
    CheckInequalities,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Classify => Command::Classify,
            Cmd::Pair => Command::Pair,
            Cmd::Volumes => Command::Volumes,
            Cmd::DgtProfile => Command::DgtProfile,
            Cmd::HsConverge => Command::HsConverge,
            Cmd::CheckInequalities => Command::CheckInequalities,
        }
    }
}

fn render(bundle: &ResultBundle, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => serde_json::to_string_pretty(bundle)
            .map(|s| s + "\n")
            .map_err(|e| CliError::Internal(e.to_string())),
        Format::Csv => Ok(bundle.csv.clone()),
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let text = cli
        .scenario
        .as_ref()
        .map(|p| fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))))
        .transpose()?;
    let overrides = Overrides {
        seed: cli.seed,
        trials: cli.trials,
        n_list: cli.n.clone(),
    };
    let command = Command::from(cli.command);
    let bundle = run(command, text.as_deref(), &overrides)?;
    let body = render(&bundle, cli.format)?;
    match &cli.out {
        Some(dir) => {
            let ext = if cli.format == Format::Csv { "csv" } else { "json" };
            let path = dir.join(format!("{}.{ext}", command.name()));
            fs::create_dir_all(dir)
                .and_then(|_| fs::write(&path, body))
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            println!("{}", e.to_json());
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
