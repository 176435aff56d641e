use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use permcast::config::{parse_field, ScenarioConfig};
use permcast::error::CliError;
use permcast::{matfile, output, scenario};
use permcast_core::{estimator, exact};

#[derive(Parser)]
#[command(
    name = "permcast",
    version,
    about = "Gaussian determinant estimation of matrix permanents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario and write <prefix>.summary.json / <prefix>.trials.csv
    Run(RunArgs),
    /// Compute an exact permanent of a matrix file
    Exact(ExactArgs),
    /// Monte Carlo permanent estimate of a matrix file
    Estimate(EstimateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file (a bare config, or a previous run's summary)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output path prefix
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Entry bounds as "a,b"
    #[arg(long)]
    bounds: Option<String>,
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    samples_per_estimate: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    concurrency: Option<usize>,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// naive | ryser | rect
    #[arg(long, default_value = "rect")]
    method: String,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// real | complex
    #[arg(long, default_value = "real")]
    field: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Exact(args) => cmd_exact(args),
        Command::Estimate(args) => cmd_estimate(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let mut config = match &args.config {
        Some(path) => ScenarioConfig::from_json_file(path)?,
        None => {
            let scenario = args
                .scenario
                .clone()
                .ok_or_else(|| CliError::validation("--scenario required without --config"))?;
            let seed = args
                .seed
                .ok_or_else(|| CliError::validation("--seed required without --config"))?;
            let trials = args
                .trials
                .ok_or_else(|| CliError::validation("--trials required without --config"))?;
            ScenarioConfig::new(&scenario, seed, trials)
        }
    };
    // flags override file fields
    if let Some(v) = args.scenario {
        config.scenario = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.trials {
        config.trials = v;
    }
    match (args.n, args.m) {
        (Some(n), Some(m)) => config.shape = Some([n, m]),
        (Some(n), None) => config.shape = Some([n, n]),
        (None, Some(_)) => return Err(CliError::validation("--m given without --n")),
        (None, None) => {}
    }
    if let Some(b) = args.bounds {
        let parts: Vec<&str> = b.split(',').collect();
        if parts.len() != 2 {
            return Err(CliError::validation("--bounds must be 'a,b'"));
        }
        let lo: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| CliError::validation("bad lower bound"))?;
        let hi: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| CliError::validation("bad upper bound"))?;
        config.bounds = Some([lo, hi]);
    }
    if let Some(v) = args.field {
        parse_field(&v)?;
        config.field = Some(v);
    }
    if let Some(v) = args.epsilon {
        config.epsilon = Some(v);
    }
    if let Some(v) = args.s {
        config.s = Some(v);
    }
    if let Some(v) = args.delta {
        config.delta = Some(v);
    }
    if let Some(v) = args.alpha {
        config.alpha = Some(v);
    }
    if let Some(v) = args.rho {
        config.rho = Some(v);
    }
    if let Some(v) = args.gamma {
        config.gamma = Some(v);
    }
    if let Some(v) = args.theta {
        config.theta = Some(v);
    }
    if let Some(v) = args.samples_per_estimate {
        config.samples_per_estimate = Some(v);
    }
    if let Some(v) = args.budget {
        config.budget = Some(v);
    }
    if let Some(v) = args.matrix {
        config.matrix_file = Some(v);
    }
    if let Some(v) = args.concurrency {
        config.concurrency = Some(v);
    }
    if let Some(v) = args.out {
        config.output = Some(v);
    }

    let result = scenario::run_scenario(&config)?;
    let prefix = config
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.scenario));
    let (summary, csv) = output::write_results(&result, &prefix)?;
    println!("wrote {}", summary.display());
    println!("wrote {}", csv.display());
    Ok(())
}

fn cmd_exact(args: ExactArgs) -> Result<(), CliError> {
    let a = matfile::read_matrix(&args.matrix)?;
    let p = match args.method.as_str() {
        "naive" => exact::perm_naive(&a),
        "ryser" => exact::perm_ryser(&a),
        "rect" => exact::perm_rect(&a),
        other => {
            return Err(CliError::validation(format!(
                "unknown method '{other}': expected naive, ryser, or rect"
            )))
        }
    }?;
    println!("log_permanent {:.16e}", p.log_value);
    match p.value {
        Some(v) => println!("permanent {:.16e}", v),
        None => println!("permanent overflow"),
    }
    Ok(())
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let a = matfile::read_matrix(&args.matrix)?;
    let field = parse_field(&args.field)?;
    let (mean, se) = estimator::averaged_estimate(&a, args.trials, field, args.seed)?;
    println!("estimate {:.16e}", mean);
    println!("standard_error {:.16e}", se);
    println!("relative_se {:.6}", se / mean.abs().max(f64::MIN_POSITIVE));
    println!("trials {}", args.trials);
    Ok(())
}
