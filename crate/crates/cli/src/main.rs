use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use crossmod_cli::{exit_code, run, InputError, Options, EXIT_INPUT};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Output {
    Json,
    Text,
}

/// Runs a crossmod scenario and prints a report.
#[derive(Parser, Debug)]
#[command(name = "crossmod", version)]
struct Cli {
    /// Scenario file; reads stdin when absent or `-`.
    scenario: Option<String>,
    /// Tolerance for algebraic identities.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for randomized decompositions.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    output: Output,
    /// Largest algebra dimension any construction may produce.
    #[arg(long, default_value_t = 1024)]
    max_dim: usize,
    /// Include per-task wall time (makes reports non-reproducible).
    #[arg(long)]
    timings: bool,
}

fn read(path: Option<&str>) -> Result<String, InputError> {
    let mut text = String::new();
    match path {
        None | Some("-") => std::io::stdin().read_to_string(&mut text).map(|_| text),
        Some(p) => std::fs::read_to_string(p),
    }
    .map_err(|e| InputError::Io(format!("{}: {e}", path.unwrap_or("stdin"))))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        tol: cli.tol,
        seed: cli.seed,
        max_dim: cli.max_dim,
        timings: cli.timings,
    };
    let result = read(cli.scenario.as_deref()).and_then(|text| run(&text, &opts));
    match &result {
        Ok(report) => match cli.output {
            Output::Json => println!("{}", report.to_json()),
            Output::Text => print!("{}", report.to_text()),
        },
        Err(e) => {
            match cli.output {
                Output::Json => println!(
                    "{}",
                    serde_json::json!({"passed": false, "input_error": {"kind": e.kind(), "message": e.to_string()}})
                ),
                Output::Text => eprintln!("input error: {e}"),
            }
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    ExitCode::from(exit_code(&result) as u8)
}
