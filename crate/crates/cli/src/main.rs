use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thermomi::{EnergyModel, InputDistribution};
use thermomi_cli::{run_sweep, run_verify, CliError, RunConfig, Routes, SweepOptions};

#[derive(Parser)]
#[command(name = "thermomi", version, about = "Mutual information of the Gaussian channel, computed thermodynamically")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every route on the configured β grid and write a JSON report.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated subset of thermo,gsv,classical.
        #[arg(long, default_value = "thermo,gsv,classical")]
        routes: Routes,
        /// Worker threads for the β fan-out (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Also write the records as CSV to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Record wall-clock time per β (makes the report non-reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Run the invariant suite and print a per-check table.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn warn_classical(prior: &InputDistribution) {
    if EnergyModel::new(prior).is_temperature_dependent() {
        log::warn!("energy depends on beta for this prior: the classical route will disagree with the others");
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Sweep { config, out, routes, jobs, csv, timings } => {
            let cfg = RunConfig::load(&config)?.validate()?;
            if routes.classical {
                warn_classical(&cfg.prior);
            }
            let report = run_sweep(&cfg, SweepOptions { routes, jobs, timings })?;
            write_file(&out, report.to_json().as_bytes())?;
            if let Some(path) = csv {
                let file = File::create(&path)
                    .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
                report
                    .write_csv(BufWriter::new(file))
                    .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
            }
            print!("{}", report.summary());
            println!("wrote {} records to {}", report.records.len(), out.display());
            Ok(true)
        }
        Command::Verify { config, jobs } => {
            let cfg = RunConfig::load(&config)?.validate()?;
            warn_classical(&cfg.prior);
            let v = run_verify(&cfg, jobs)?;
            print!("{}", v.table());
            if v.passed() {
                println!("all checks passed");
            } else {
                println!("failed: {}", v.failed().join(", "));
            }
            Ok(v.passed())
        }
    }
}

fn main() -> ExitCode {
    // The library warns on every classical evaluation; one warning per run is enough.
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn,thermomi::thermo=error")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
