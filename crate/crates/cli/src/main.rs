use clap::{Parser, Subcommand, ValueEnum};
use qage_cli::config::TableFormat;
use qage_cli::report::Outcome;
use qage_cli::{cmd_age_spectrum, cmd_evolve, cmd_lyapunov, run_verify, CliError, Invocation};
use std::path::PathBuf;
use std::process::ExitCode;

/// Age (internal-time) spectral analysis on a discretized energy continuum.
#[derive(Parser)]
#[command(name = "qage", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario config (JSON); the built-in demo scenario when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Table format (overrides the config).
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Also write SVG plots.
    #[arg(long, global = true)]
    plot: bool,

    /// Seed for the randomized checks in `verify`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Multiplies every tolerance in `verify`.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite and write checks.csv + report.json.
    Verify,
    /// Mean-value trajectory of the configured observable.
    Evolve,
    /// Cumulative age-mass distribution of the configured state.
    AgeSpectrum,
    /// Lyapunov variable along the configured times.
    Lyapunov,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let invocation = Invocation {
        config_path: cli.config.clone(),
        out_dir: cli.out_dir.clone(),
        format: cli.format.map(|f| match f {
            FormatArg::Csv => TableFormat::Csv,
            FormatArg::Json => TableFormat::Json,
        }),
        plot: cli.plot,
        seed: cli.seed,
        tolerance_scale: cli.tolerance_scale,
    };
    let (config, dir) = invocation.resolve()?;
    let report = match cli.command {
        Command::Verify => {
            let report = run_verify(&config, cli.seed, cli.tolerance_scale, &dir)?;
            for check in &report.checks {
                println!("{}", check.line());
            }
            let (passed, failed, skipped) = report.checks.iter().fold((0, 0, 0), |acc, c| match c
                .outcome
            {
                Outcome::Pass => (acc.0 + 1, acc.1, acc.2),
                Outcome::Fail => (acc.0, acc.1 + 1, acc.2),
                Outcome::Skip => (acc.0, acc.1, acc.2 + 1),
            });
            println!("verify: {passed} passed, {failed} failed, {skipped} skipped");
            report
        }
        Command::Evolve => cmd_evolve(&config, cli.seed, cli.tolerance_scale, &dir)?,
        Command::AgeSpectrum => cmd_age_spectrum(&config, cli.seed, cli.tolerance_scale, &dir)?,
        Command::Lyapunov => cmd_lyapunov(&config, cli.seed, cli.tolerance_scale, &dir)?,
    };
    for entry in &report.manifest {
        println!(
            "wrote {} ({} bytes, fnv1a64 {})",
            entry.file, entry.bytes, entry.fnv1a64
        );
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
