//! `toda-toric`: reproducible verification experiments for the periodic
//! lattice and its toric-domain geometry.
//!
//! Exit codes: 0 pass, 1 usage error, 2 verdict failure, 3 numerical abort.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use toda_toric_cli::config::{self, ConfigFile, EXPERIMENTS};
use toda_toric_cli::experiments::{self, RunError};

#[derive(Parser)]
#[command(name = "toda-toric", version, about = "Periodic Toda lattice experiments")]
struct Cli {
    /// List the available experiments and exit
    #[arg(long)]
    list: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue and Casimir conservation along the integrated flow
    Isospectral(RunArgs),
    /// Forward/inverse spectral round trip
    Roundtrip(RunArgs),
    /// Stiff-limit ladders for the scaled spectral maps
    Limits(RunArgs),
    /// Moment images of Lagrangian products against toric bases
    Embed(RunArgs),
    /// Billiard limit of the stiff flows
    Billiard(RunArgs),
    /// Exact and Monte-Carlo volume identities
    Volume(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed override (mandatory here or in the config)
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for report.json and CSV tables
    #[arg(long)]
    out: Option<PathBuf>,
    /// Validate the configuration and exit without running
    #[arg(long)]
    check: bool,
}

fn usage_exit(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn run_command(name: &str, args: RunArgs) -> ExitCode {
    let file = match args.config.as_deref().map(ConfigFile::load).transpose() {
        Ok(f) => f,
        Err(e) => return usage_exit(&e),
    };
    let cfg = match config::resolve(name, file, args.seed, args.out) {
        Ok(cfg) => cfg,
        Err(e) => return usage_exit(&e),
    };
    if args.check {
        println!("config OK: {}", serde_json::to_string(&cfg).expect("config serializes"));
        return ExitCode::SUCCESS;
    }
    match experiments::run(&cfg) {
        Ok(output) => {
            for v in &output.report.verdicts {
                println!("{}", v.line());
            }
            println!(
                "RESULT {}: {} ({:.2} s)",
                cfg.experiment,
                if output.report.pass { "PASS" } else { "FAIL" },
                output.report.wall_clock_s
            );
            if let Some(dir) = &cfg.out {
                if let Err(e) = write_outputs(dir, &output) {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
                println!("wrote {}", dir.join("report.json").display());
            }
            if output.report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(RunError::Usage(msg)) => usage_exit(&msg),
        Err(RunError::Numerical(msg)) => {
            eprintln!("numerical abort: {msg}");
            ExitCode::from(3)
        }
    }
}

fn write_outputs(
    dir: &std::path::Path,
    output: &toda_toric_cli::report::RunOutput,
) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let report_path = dir.join("report.json");
    std::fs::write(&report_path, output.report.to_json())
        .map_err(|e| format!("cannot write {}: {e}", report_path.display()))?;
    for table in &output.tables {
        let path = dir.join(format!("{}.csv", table.name));
        std::fs::write(&path, table.to_csv())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not usage errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    if cli.list {
        for name in EXPERIMENTS {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    match cli.command {
        Some(Command::Isospectral(a)) => run_command("isospectral", a),
        Some(Command::Roundtrip(a)) => run_command("roundtrip", a),
        Some(Command::Limits(a)) => run_command("limits", a),
        Some(Command::Embed(a)) => run_command("embed", a),
        Some(Command::Billiard(a)) => run_command("billiard", a),
        Some(Command::Volume(a)) => run_command("volume", a),
        None => usage_exit("missing experiment subcommand (try --list)"),
    }
}
