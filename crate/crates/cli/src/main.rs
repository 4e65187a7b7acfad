use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use planpace::{cmd_oracle, cmd_report, cmd_run, CliError, ReportOptions, RunOverrides};

#[derive(Parser)]
#[command(name = "planpace", version, about = "Spending-plan guided online learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configured runs and write summary and trace CSVs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Run only this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fail on clamped learner payoffs.
        #[arg(long)]
        strict: bool,
    },
    /// Print the offline baselines for the configured instance.
    Oracle {
        #[arg(long)]
        config: PathBuf,
    },
    /// Aggregate summary CSVs in a directory.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        svg: bool,
        /// Exit nonzero if any summary row is malformed.
        #[arg(long)]
        strict: bool,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            strict,
        } => {
            let dir = cmd_run(&config, &RunOverrides { seed, out, strict })?;
            println!("{}", dir.join("summary.csv").display());
        }
        Command::Oracle { config } => cmd_oracle(&config, std::io::stdout().lock())?,
        Command::Report { input, svg, strict } => {
            let rows = cmd_report(&input, ReportOptions { svg, strict })?;
            println!("{} groups -> {}", rows.len(), input.join("report.csv").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { planpace::EXIT_CONFIG_ERROR as u8 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
