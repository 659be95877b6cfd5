use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nsfd_cli::commands::{
    cmd_compare, cmd_convergence, cmd_property_suite, cmd_run, write_compare_csv,
};
use nsfd_cli::config::{ExperimentConfig, MethodId, PhiId, ProblemConfig, WeightRecipe};
use nsfd_cli::CliError;

/// Structure-preserving NSFD integrators and the classical baselines:
/// run experiments, compare methods, measure convergence orders, and
/// stress the scheme's guarantees on random inputs.
#[derive(Parser)]
#[command(name = "nsfd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write the time series as CSV.
    Run(RunArgs),
    /// Run all four methods on identical initial data and tabulate
    /// Lyapunov monotonicity and final norms.
    Compare(CompareArgs),
    /// Measure global-error convergence orders against an RK4 reference.
    Convergence(ConvergenceArgs),
    /// Randomized checks of the Lyapunov-decrease and positivity
    /// guarantees; exits 3 on any violation.
    PropertySuite(PropertyArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON manifest; field-level flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in problem: ghaffari | linear-decay | coupled-decay.
    #[arg(long)]
    problem: Option<String>,
    /// nsfd | euler | rk2 | rk4.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long, value_name = "T")]
    final_time: Option<f64>,
    /// Initial state, comma separated, e.g. "0.5,0.01".
    #[arg(long)]
    y0: Option<String>,
    /// Weight recipe: lyapunov | positivity | combined | constant:<v>.
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    margin: Option<f64>,
    /// Denominator function: identity | exponential.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Optional CSV path for the comparison table.
    #[arg(long)]
    table_out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Step sizes, comma separated, each an integer multiple of the
    /// reference step size.
    #[arg(long, default_value = "0.02,0.01,0.005")]
    dts: String,
    #[arg(long, default_value_t = 1e-4)]
    reference_dt: f64,
}

#[derive(Args)]
struct PropertyArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
}

fn default_y0(problem: &ProblemConfig) -> Vec<f64> {
    match problem {
        ProblemConfig::Ghaffari { .. } => vec![0.5, 0.01],
        ProblemConfig::LinearDecay { .. } => vec![1.0],
        ProblemConfig::CoupledDecay { .. } => vec![1.0, 1.0],
    }
}

fn merge(args: &ConfigArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::section3_default(),
    };
    if let Some(p) = &args.problem {
        cfg.problem = match p.as_str() {
            "ghaffari" => ProblemConfig::section3(),
            "linear-decay" => ProblemConfig::LinearDecay { rate: 1.0 },
            "coupled-decay" => ProblemConfig::CoupledDecay { coupling: 0.5 },
            other => {
                return Err(CliError::Config(format!(
                    "unknown problem `{other}` (expected ghaffari|linear-decay|coupled-decay)"
                )))
            }
        };
        if args.y0.is_none() && args.config.is_none() {
            cfg.y0 = default_y0(&cfg.problem);
        }
    }
    if let Some(m) = &args.method {
        cfg.method = MethodId::parse(m)?;
        if cfg.method != MethodId::Nsfd {
            cfg.weight = None;
        }
    }
    if let Some(dt) = args.dt {
        cfg.dt = dt;
    }
    match (args.steps, args.final_time) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "give at most one of --steps and --final-time".into(),
            ))
        }
        (Some(s), None) => {
            cfg.steps = Some(s);
            cfg.final_time = None;
        }
        (None, Some(t)) => {
            cfg.final_time = Some(t);
            cfg.steps = None;
        }
        (None, None) => {}
    }
    if let Some(y0) = &args.y0 {
        cfg.y0 = y0
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad y0 component `{s}`")))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(w) = &args.weight {
        cfg.weight = Some(WeightRecipe::parse(w)?);
    }
    if let Some(m) = args.margin {
        cfg.margin = m;
    }
    if let Some(p) = &args.phi {
        cfg.phi = PhiId::parse(p)?;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Run(args) => {
            let cfg = merge(&args.config)?;
            let summary = cmd_run(&cfg)?;
            eprintln!("{}", summary.render());
            Ok(if summary.truncated_at.is_some() { 2 } else { 0 })
        }
        Command::Compare(args) => {
            let cfg = merge(&args.config)?;
            let rows = cmd_compare(&cfg)?;
            for row in &rows {
                println!("{}", row.render());
            }
            if let Some(path) = &args.table_out {
                write_compare_csv(&rows, path)?;
            }
            Ok(0)
        }
        Command::Convergence(args) => {
            let cfg = merge(&args.config)?;
            let dts: Vec<f64> = args
                .dts
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| CliError::Config(format!("bad step size `{s}`")))
                })
                .collect::<Result<_, _>>()?;
            let rows = cmd_convergence(&cfg, &dts, args.reference_dt)?;
            for row in &rows {
                println!("{}", row.render());
            }
            Ok(0)
        }
        Command::PropertySuite(args) => {
            let cfg = merge(&args.config)?;
            let report = cmd_property_suite(&cfg, args.samples)?;
            for line in &report.lines {
                println!("{line}");
            }
            Ok(if report.passed { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    // exit 2 is reserved for non-finite trajectories, so argument-parse
    // errors are remapped from clap's usual 2 to the config exit code 1
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
