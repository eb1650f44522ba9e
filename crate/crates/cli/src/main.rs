use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kernelcomp::experiments::{self, ExperimentConfig, Report};

#[derive(Parser)]
#[command(
    name = "kernelcomp",
    version,
    about = "Reproducible reproducing-kernel and composition-operator experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Report path; standard output when absent from both flag and config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Print every command with its default parameters.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

const EXIT_FAILED_CHECK: u8 = 1;
const EXIT_ERROR: u8 = 2;

fn load_config(path: &Path, seed: Option<u64>) -> kernelcomp::Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| kernelcomp::Error::Io(format!("{}: {e}", path.display())))?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn write_report(report: &Report, format: Format, out: Option<&Path>) -> kernelcomp::Result<()> {
    let mut buf = Vec::new();
    match format {
        Format::Json => experiments::emit_json(report, &mut buf)?,
        Format::Csv => experiments::emit_csv(report, &mut buf)?,
    }
    match out {
        Some(path) => fs::write(path, buf)
            .map_err(|e| kernelcomp::Error::Io(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(&buf).map_err(Into::into),
    }
}

fn run(
    config: PathBuf,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Format,
) -> kernelcomp::Result<bool> {
    let config = load_config(&config, seed)?;
    let report = experiments::run(&config)?;
    let out = out.or_else(|| config.output_path.clone());
    write_report(&report, format, out.as_deref())?;
    let failed = report.failures().count();
    eprintln!(
        "{}: {} of {} checks passed in {:.3} s",
        report.command,
        report.records.len() - failed,
        report.records.len(),
        report.wall_time_seconds
    );
    for record in report.failures() {
        eprintln!(
            "FAILED [{}] {}: {} vs {}",
            record.paper_anchor, record.description, record.measured, record.bound
        );
    }
    Ok(report.pass)
}

fn list() -> kernelcomp::Result<()> {
    let text = experiments::to_json_string(&experiments::list_commands())?;
    io::stdout().write_all(text.as_bytes())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            config,
            seed,
            out,
            format,
        } => run(config, seed, out, format),
        Command::List => list().map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED_CHECK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
