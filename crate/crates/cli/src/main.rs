use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dilation_cli::commands::{Command, Overrides};
use dilation_cli::{examples, run, Problem, Report, SCHEMA};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "dilate", version, about = "Dilations of positive definite kernels on finite *-semigroups")]
struct Cli {
    #[command(subcommand)]
    action: Action,

    /// Numerical tolerance (default 1e-9).
    #[arg(long, global = true, env = "DILATE_TOL")]
    tol: Option<f64>,
    /// Seed for sampled coefficients (default 0).
    #[arg(long, global = true, env = "DILATE_SEED")]
    seed: Option<u64>,
    /// Highest exponent in the (s*s)^(2^n) sequences (default 6).
    #[arg(long = "nmax", global = true, env = "DILATE_NMAX")]
    n_max: Option<usize>,
    /// Random coefficient matrices per boundedness test (default 4).
    #[arg(long, global = true, env = "DILATE_SAMPLES")]
    samples: Option<usize>,
    /// Window N for contraction, subnormal and moments.
    #[arg(long, global = true, env = "DILATE_WINDOW")]
    window: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, env = "DILATE_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "DILATE_FORMAT", value_enum, default_value = "text")]
    format: Format,
    /// Leave exported matrices out of JSON reports.
    #[arg(long, global = true)]
    no_artifacts: bool,
}

#[derive(Subcommand, Debug)]
enum Action {
    /// Check the *-semigroup axioms of a table.
    ValidateSemigroup { file: PathBuf },
    /// Positive definiteness of a kernel through its block Gram matrix.
    CheckPd { file: PathBuf },
    /// Reduced reproducing kernel module of a kernel.
    BuildRkhm { file: PathBuf },
    /// Dilation triple (E, Φ, V) of an invariant kernel.
    Dilate { file: PathBuf },
    /// Boundedness constants c_a, c_b and the power sequences.
    Bounded { file: PathBuf },
    /// Extension to the unitization and its largest constant.
    Extend { file: PathBuf },
    /// Stinespring dilation of a CP map against the Kraus oracle.
    Stinespring { file: PathBuf },
    /// Naimark dilation of a POVM.
    Naimark { file: PathBuf },
    /// Unitary dilation of a contraction.
    Contraction { file: PathBuf },
    /// Hankel positivity and support radius of moment data.
    Moments { file: PathBuf },
    /// Windowed subnormality kernel.
    Subnormal { file: PathBuf },
    /// Print a built-in problem file.
    Example { name: Option<String> },
    /// Print the JSON schema for problems and reports.
    Schema,
}

fn emit(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, file) = match &cli.action {
        Action::ValidateSemigroup { file } => (Command::ValidateSemigroup, file),
        Action::CheckPd { file } => (Command::CheckPd, file),
        Action::BuildRkhm { file } => (Command::BuildRkhm, file),
        Action::Dilate { file } => (Command::Dilate, file),
        Action::Bounded { file } => (Command::Bounded, file),
        Action::Extend { file } => (Command::Extend, file),
        Action::Stinespring { file } => (Command::Stinespring, file),
        Action::Naimark { file } => (Command::Naimark, file),
        Action::Contraction { file } => (Command::Contraction, file),
        Action::Moments { file } => (Command::Moments, file),
        Action::Subnormal { file } => (Command::Subnormal, file),
        Action::Example { name } => {
            let text = match name.as_deref().map(examples::example) {
                Some(Some(p)) => p.to_json(),
                Some(None) | None => {
                    let mut s = String::from("built-in problems:\n");
                    for n in examples::NAMES {
                        s.push_str("  ");
                        s.push_str(n);
                        s.push('\n');
                    }
                    if name.is_some() {
                        eprint!("unknown example\n{s}");
                        return ExitCode::from(2);
                    }
                    s
                }
            };
            return match emit(&text, cli.out.as_ref()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(_) => ExitCode::from(2),
            };
        }
        Action::Schema => {
            return match emit(SCHEMA, cli.out.as_ref()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(_) => ExitCode::from(2),
            };
        }
    };
    let over = Overrides {
        tol: cli.tol,
        seed: cli.seed,
        n_max: cli.n_max,
        sample_budget: cli.samples,
        window: cli.window,
    };
    let report = match Problem::from_path(file) {
        Ok(problem) => run(command, &problem, &over),
        Err(e) => Report::failure(command.name(), &e),
    };
    let text = match cli.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(!cli.no_artifacts),
    };
    if let Err(e) = emit(&text, cli.out.as_ref()) {
        eprintln!("IoError: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_code() as u8)
}
