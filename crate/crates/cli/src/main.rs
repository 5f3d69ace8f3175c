use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lindbladlab_cli::config::TolOverride;
use lindbladlab_cli::{run_scenario, CliError, Scenario, ScenarioConfig};

/// Run a Lindbladian analysis scenario and emit a JSON report.
#[derive(Parser, Debug)]
#[command(name = "analyze", version)]
struct Args {
    scenario: Scenario,

    /// Scenario configuration (TOML).
    #[arg(long)]
    config: PathBuf,

    /// Report path; overrides `output` in the config. Defaults to stdout.
    #[arg(long)]
    output: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Tolerance override, e.g. `--tol stationary=1e-9`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<TolOverride>,

    /// Exit with status 2 if any test was inapplicable.
    #[arg(long)]
    strict: bool,

    /// Also print a plain-text summary.
    #[arg(long)]
    summary: bool,
}

fn run(args: Args) -> Result<ExitCode, CliError> {
    let mut config = ScenarioConfig::load(&args.config, args.scenario)?;
    config.apply_overrides(&args.tol)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.output.is_some() {
        config.output = args.output;
    }
    let report = run_scenario(&config)?;
    let json = report.to_json();
    match &config.output {
        Some(path) => {
            std::fs::write(path, &json).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            if args.summary {
                print!("{}", report.summary());
            }
        }
        None => {
            print!("{json}");
            if args.summary {
                eprint!("{}", report.summary());
            }
        }
    }
    if args.strict && report.has_inapplicable() {
        eprintln!("error: a test was inapplicable and --strict is set");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
