use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use slitlab::commands::{run_command, Command};
use slitlab::config::{load_config, Config};
use slitlab::output::now_timestamp;
use slitlab::SlitError;

#[derive(Parser)]
#[command(name = "slitlab", version, about = "Two-slit wave fields, current lines and duality diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Intensity slices of the one-slit, two-slit and weighted fields
    Pattern(CommonArgs),
    /// Current lines of the two-slit field
    Trajectories(CommonArgs),
    /// Half-plane split: norms, additivity and fluxes
    Decompose(CommonArgs),
    /// Neumann and Dirichlet image comparisons
    Mirror(CommonArgs),
    /// Mirror-paired ensemble and tangent swap
    Swap(CommonArgs),
    /// Visibility, predictability and the duality sum
    Duality(CommonArgs),
    /// Run the acceptance suite; exit 0 iff every criterion passes
    Verify(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `outputDir`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the resolved configuration with defaults and exit
    #[arg(long)]
    print_defaults: bool,
}

fn exit_code(e: &SlitError) -> u8 {
    match e {
        SlitError::Config { .. } => 2,
        _ => 3,
    }
}

fn report_error(e: &SlitError) -> ExitCode {
    let mut body = json!({ "kind": e.kind(), "message": e.to_string() });
    if let SlitError::Config { path, .. } = e {
        body["path"] = json!(path);
    }
    eprintln!("{}", json!({ "error": body }));
    ExitCode::from(exit_code(e))
}

fn load(args: &CommonArgs, command: Command) -> Result<Config, SlitError> {
    match &args.config {
        Some(path) => {
            let text = std::fs::read(path).map_err(|e| SlitError::Config {
                path: String::new(),
                reason: format!("cannot read {}: {e}", path.display()),
            })?;
            load_config(&text)
        }
        None if args.print_defaults || command == Command::Verify => Ok(Config::desk_default()),
        None => Err(SlitError::Config { path: String::new(), reason: "--config <path> is required".into() }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Pattern(a) => (Command::Pattern, a),
        Sub::Trajectories(a) => (Command::Trajectories, a),
        Sub::Decompose(a) => (Command::Decompose, a),
        Sub::Mirror(a) => (Command::Mirror, a),
        Sub::Swap(a) => (Command::Swap, a),
        Sub::Duality(a) => (Command::Duality, a),
        Sub::Verify(a) => (Command::Verify, a),
    };
    let config = match load(&args, command) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    if args.print_defaults {
        println!("{}", config.canonical_json());
        return ExitCode::SUCCESS;
    }
    let out = args.out.clone().unwrap_or_else(|| config.output_dir.clone());
    match run_command(command, &config, &out, &now_timestamp()) {
        Ok(outcome) => {
            if let Some(report) = &outcome.verify {
                for c in &report.criteria {
                    let mark = if c.passed { "PASS" } else { "FAIL" };
                    println!("{mark} {:>2} {} (measured {:e}, tolerance {:e})", c.id, c.name, c.measured, c.tolerance);
                }
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => report_error(&e),
    }
}
