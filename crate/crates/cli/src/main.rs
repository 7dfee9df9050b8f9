use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use overlap_cli::config::{ConfigError, ExperimentConfig, Format, Mode};
use overlap_cli::run::{run, write_atomic, CoefficientDump, EXIT_FAIL, EXIT_INVALID};
use overlap_core::chebyshev::cheb_coefficients;
use overlap_core::statistics::SmoothFunction;

#[derive(Parser)]
#[command(name = "overlap", version, about = "Identity checks, Monte Carlo covariance runs and predictions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Overrides {
    /// JSON experiment config
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Base matrix size
    #[arg(long)]
    n: Option<usize>,
    /// Report path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the path-counting identities on the configured graph suite
    VerifyIdentities(Overrides),
    /// Run a Monte Carlo experiment (wigner-mc, covariance-mc or c1-mc)
    Mc(Overrides),
    /// Print a table of limiting covariances
    Predict(Overrides),
    /// Dump the Chebyshev coefficients of a registry function as JSON
    Coeffs {
        /// One of x^3, exp, |x|^3
        #[arg(long)]
        function: String,
        /// Fixed truncation degree; adaptive when absent
        #[arg(long)]
        max_k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(o: &Overrides, default_mode: Option<Mode>, allowed: &[Mode]) -> Result<ExperimentConfig, ConfigError> {
    let mut config = match (&o.config, default_mode) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(mode)) => ExperimentConfig::for_mode(mode),
        (None, None) => return Err(ConfigError("--config is required".into())),
    };
    if !allowed.contains(&config.mode) {
        return Err(ConfigError(format!("mode {:?} is not valid for this subcommand", config.mode)));
    }
    if let Some(seed) = o.seed {
        config.seed = seed;
    }
    if let Some(trials) = o.trials {
        config.trials = trials;
    }
    if let Some(n) = o.n {
        config.n = n;
    }
    if let Some(out) = &o.out {
        config.out = Some(out.clone());
    }
    if let Some(format) = o.format {
        config.format = format;
    }
    Ok(config)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => write_atomic(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(o: &Overrides, default_mode: Option<Mode>, allowed: &[Mode]) -> ExitCode {
    let config = match load(o, default_mode, allowed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_INVALID as u8);
        }
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = emit(config.out.as_ref(), &report.render(config.format)) {
        eprintln!("{e}");
        return ExitCode::from(EXIT_FAIL as u8);
    }
    for gate in &report.gates {
        eprintln!("{}", gate.line());
    }
    ExitCode::from(report.exit_code() as u8)
}

fn coeffs(function: &str, max_k: Option<usize>, out: Option<&PathBuf>) -> ExitCode {
    let Some(f) = SmoothFunction::from_id(function) else {
        eprintln!("unknown function {function:?}; expected x^3, exp or |x|^3");
        return ExitCode::from(EXIT_INVALID as u8);
    };
    let series = match max_k {
        Some(k) => cheb_coefficients(|x| f.eval(x), k, 8 * k.max(1)),
        None => f.series(),
    };
    let series = match series {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_FAIL as u8);
        }
    };
    let dump = CoefficientDump { function: f.id().to_string(), series };
    let text = serde_json::to_string_pretty(&dump).expect("series serializes") + "\n";
    match emit(out, &text) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_FAIL as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::VerifyIdentities(o) => execute(o, Some(Mode::Identities), &[Mode::Identities]),
        Command::Mc(o) => execute(o, None, &[Mode::WignerMc, Mode::CovarianceMc, Mode::C1Mc]),
        Command::Predict(o) => execute(o, Some(Mode::Predict), &[Mode::Predict]),
        Command::Coeffs { function, max_k, out } => coeffs(function, *max_k, out.as_ref()),
    }
}
