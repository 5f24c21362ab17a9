use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use wco_lab::job::{self, Command, JobError, JobSpec};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Classify,
    Adjoint,
    Compose,
    Verify,
    Spectrum,
    Compress,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Classify => Command::Classify,
            Cmd::Adjoint => Command::Adjoint,
            Cmd::Compose => Command::Compose,
            Cmd::Verify => Command::Verify,
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Compress => Command::Compress,
        }
    }
}

/// Weighted composition operators on H_gamma of the unit ball.
#[derive(Debug, Parser)]
#[command(name = "wco-lab", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Job description (JSON).
    #[arg(long)]
    job: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the truncation degree.
    #[arg(long)]
    degree: Option<u32>,
    #[arg(long)]
    tol_symbol: Option<f64>,
    #[arg(long)]
    tol_matrix: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(cli: &Cli) -> Result<String, JobError> {
    let text = std::fs::read_to_string(&cli.job)
        .map_err(|e| JobError::Parse(format!("cannot read {}: {e}", cli.job.display())))?;
    let mut spec = JobSpec::from_json(&text)?;
    if let Some(d) = cli.degree {
        spec.space.degree_cap = d;
    }
    if let Some(t) = cli.tol_symbol {
        spec.tolerances.symbol = Some(t);
    }
    if let Some(t) = cli.tol_matrix {
        spec.tolerances.matrix = Some(t);
    }
    if let Some(s) = cli.seed {
        spec.seed = s;
    }
    let report = job::run(&spec, Some(cli.command.into()))?;
    Ok(serde_json::to_string_pretty(&report).expect("report serializes") + "\n")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(text) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
