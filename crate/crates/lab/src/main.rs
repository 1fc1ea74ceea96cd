use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use transduce_lab::{run, Command, Config, Format, LabError};

/// Parameter sweeps over purifiers, QSP error reduction and majority voting.
///
/// The config file is JSON with any of: p_grid, eps_grid, ell_grid,
/// delta_grid, delta, depth, k, d_w, samples, seed, tol. Missing fields take
/// their defaults; unknown fields are rejected. Exit status is 0 on success,
/// 1 when a simulation violates its contract, 2 on a config error.
#[derive(Parser, Debug)]
#[command(name = "transduce-lab", version)]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// JSON config file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output format; CSV floats carry 17 significant digits.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the config tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

fn execute(args: &Args) -> Result<(), LabError> {
    let mut cfg = match &args.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = args.tol {
        cfg.tol = tol;
    }
    cfg.validate()?;
    let report = run(args.command, &cfg)?;
    match &args.out {
        Some(path) => report.write(args.format, &cfg, BufWriter::new(File::create(path)?)),
        None => report.write(args.format, &cfg, io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("transduce-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
