use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use formlab_cli::report::validate;
use formlab_cli::{run_scenario, CliError, Format, RunOptions, Scenario};

/// Accretivity, form-boundedness and Riccati-certificate diagnostics driven
/// by scenario files.
#[derive(Parser)]
#[command(name = "formlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hodge decomposition of `b`.
    Decompose(Common),
    /// Trace, BMO, Lipschitz and Morrey norms.
    Norms(Common),
    /// Form-bound constant of (a, b, c).
    Formbound(Common),
    /// Accretivity minimum of (a, b, c).
    Accretivity(Common),
    /// Commutator constant of `d`.
    Commutator(Common),
    /// Subordination profile of `q`.
    Subordination(Common),
    /// Magnetic form comparability.
    Magnetic(Common),
    /// One-dimensional positivity test and certificate construction.
    Riccati1d(Common),
    /// Schrödinger positivity and certificate construction.
    Riccatind(Common),
    /// Checks a given certificate.
    CheckCertificate(Common),
    /// Runs every analysis of the scenario over its refinement levels.
    Sweep(Common),
    /// Checks report files against the report schema.
    Validate {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Both,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Grid as DIMxPOINTS or DIMxPOINTS:SIDE, e.g. 3x32 or 2x64:2.0.
    #[arg(long)]
    grid: Option<String>,
    /// Comma-separated points per axis of the refinement levels.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Relative residual of the eigen-solver.
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    format: FormatArg,
}

fn parse_grid(s: &str) -> Result<(usize, usize, Option<f64>), CliError> {
    let bad = || CliError::scenario(format!("cannot parse grid `{s}`; expected DIMxPOINTS[:SIDE]"));
    let (shape, side) = match s.split_once(':') {
        Some((a, b)) => (a, Some(b.parse::<f64>().map_err(|_| bad())?)),
        None => (s, None),
    };
    let (d, n) = shape.split_once('x').ok_or_else(bad)?;
    Ok((d.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?, side))
}

fn run(only: Option<&str>, args: Common) -> Result<i32, CliError> {
    let scenario = Scenario::load(&args.scenario)?;
    let opts = RunOptions {
        only: only.map(str::to_string),
        out: args.out,
        format: match args.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Both => Format::Both,
        },
        tol: args.tol,
        seed: args.seed,
        grid: args.grid.as_deref().map(parse_grid).transpose()?,
        levels: args.levels,
    };
    let summary = run_scenario(scenario, &opts)?;
    for f in &summary.files {
        println!("{}", f.display());
    }
    for m in &summary.messages {
        eprintln!("formlab: {m}");
    }
    Ok(summary.exit_code)
}

fn validate_files(paths: &[PathBuf]) -> Result<i32, CliError> {
    let mut code = 0;
    for p in paths {
        let text = std::fs::read_to_string(p)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        match validate(&value) {
            Ok(()) => println!("{}: ok", p.display()),
            Err(errs) => {
                code = 1;
                for e in errs {
                    eprintln!("{}: {e}", p.display());
                }
            }
        }
    }
    Ok(code)
}

fn init_threads() {
    if let Some(n) = std::env::var("FORMLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decompose(a) => run(Some("decompose"), a),
        Command::Norms(a) => run(Some("norms"), a),
        Command::Formbound(a) => run(Some("formbound"), a),
        Command::Accretivity(a) => run(Some("accretivity"), a),
        Command::Commutator(a) => run(Some("commutator"), a),
        Command::Subordination(a) => run(Some("subordination"), a),
        Command::Magnetic(a) => run(Some("magnetic"), a),
        Command::Riccati1d(a) => run(Some("riccati1d"), a),
        Command::Riccatind(a) => run(Some("riccatind"), a),
        Command::CheckCertificate(a) => run(Some("check-certificate"), a),
        Command::Sweep(a) => run(None, a),
        Command::Validate { reports } => validate_files(&reports),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("formlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
