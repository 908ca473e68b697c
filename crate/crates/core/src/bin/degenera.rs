use clap::Parser;
use degenera::experiments::{resolve_out_dir, run, Command, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Weighted Sobolev space experiments.
///
/// Exit status: 0 when every check passes, 2 when a hypothesis or check
/// fails, 1 on an execution error. DEGENERA_THREADS sets the worker count.
#[derive(Parser)]
#[command(name = "degenera", version)]
struct Cli {
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for test-function batteries and random samples; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn threads() -> Result<(), String> {
    let Ok(s) = std::env::var("DEGENERA_THREADS") else { return Ok(()) };
    let n: usize = s.trim().parse().map_err(|_| format!("DEGENERA_THREADS must be a positive integer, got '{s}'"))?;
    if n == 0 {
        return Err("DEGENERA_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(1);
        }
    };
    let config = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let seed = cli.seed.unwrap_or(config.seed);
    let out = resolve_out_dir(cli.out.as_deref(), &config);
    match run(cli.command, &config, &text, &out, seed) {
        Ok(report) => {
            print!("{}", report.to_text());
            ExitCode::from(report.outcome().exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
