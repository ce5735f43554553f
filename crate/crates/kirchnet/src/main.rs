use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kirchnet::commands;
use kirchnet::report;
use kirchnet::{CliError, RunConfig};
use kirchnet_core::scenarios::{by_name, BUILTIN};

#[derive(Parser)]
#[command(
    name = "kirchnet",
    version,
    about = "Hyperbolic 2x2 systems on metric graphs"
)]
struct Cli {
    /// Cells per edge.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Final time; output times beyond it are dropped.
    #[arg(long, global = true)]
    tend: Option<f64>,
    /// Resolvent parameter (repeatable); replaces the config list.
    #[arg(long = "lambda", global = true, allow_negative_numbers = true)]
    lambdas: Vec<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// TOML run configuration.
    config: Option<PathBuf>,
    /// Use a built-in scenario instead of a file.
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Vertex table, global verdict and |B| column sums.
    Check {
        #[command(flatten)]
        source: Source,
    },
    /// Trajectory and norms CSV files.
    Simulate {
        #[command(flatten)]
        source: Source,
        /// Output directory (default: [output] directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resolvent sweep over the lambda list.
    Resolvent {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in scenarios.
    #[command(subcommand)]
    Scenario(ScenarioCommand),
}

#[derive(Subcommand)]
enum ScenarioCommand {
    List,
    /// Prints (or writes) the scenario as a run configuration.
    Export {
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn load(source: &Source, cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match (&source.config, &source.builtin) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(name)) => RunConfig::from_scenario(
            &by_name(name).map_err(|e| CliError::Validation(e.to_string()))?,
        ),
        (None, None) => unreachable!("clap requires a source"),
    };
    cfg.apply_overrides(cli.grid, cli.tend, &cli.lambdas);
    Ok(cfg)
}

fn stdout(text: &str) -> Result<(), CliError> {
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::io("writing to stdout", e))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Check { source } => {
            let scenario = load(source, cli)?.to_scenario()?;
            let r = commands::check(&scenario)?;
            stdout(&report::check_text(&r))?;
            match r.global {
                Ok(_) => Ok(()),
                Err(e) => Err(e.into()),
            }
        }
        Command::Simulate { source, out } => {
            let cfg = load(source, cli)?;
            let scenario = cfg.to_scenario()?;
            let sim = commands::simulate(&scenario)?;
            let dir = out.clone().unwrap_or_else(|| cfg.output.directory.clone());
            let paths =
                commands::write_simulation(&sim, &scenario.solver.p_exponents, &dir, &cfg.output)?;
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Resolvent { source, out } => {
            let cfg = load(source, cli)?;
            let scenario = cfg.to_scenario()?;
            let rows = commands::resolvent_sweep(&scenario)?;
            let dir = out.clone().unwrap_or_else(|| cfg.output.directory.clone());
            let path = commands::write_resolvent(&rows, &dir, &cfg.output)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        Command::Scenario(ScenarioCommand::List) => stdout(&(BUILTIN.join("\n") + "\n")),
        Command::Scenario(ScenarioCommand::Export { name, output }) => {
            let s = by_name(name).map_err(|e| CliError::Validation(e.to_string()))?;
            let text = RunConfig::from_scenario(&s).to_toml();
            match output {
                Some(p) => std::fs::write(p, text)
                    .map_err(|e| CliError::io(format!("writing {}", p.display()), e)),
                None => stdout(&text),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
