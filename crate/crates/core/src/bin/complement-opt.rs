use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use complement_opt::run_config::{execute, RunConfig, RunError};
use complement_opt::verify::{self, VerifyOptions};

const THREADS_ENV: &str = "COMPLEMENT_OPT_THREADS";

/// Post-selected complementarity in a qubit collision model.
#[derive(Parser)]
#[command(name = "complement-opt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV file and manifest.
    Run(Box<RunArgs>),
    /// Run the built-in invariant suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// quantity-vs-n, uniform-sweep, distinguishability, delta-d, table, continuous-limit
    #[arg(long)]
    experiment: Option<String>,
    /// strong (g=4, T=2pi, N=20) or weak (g=1/4, T=2pi, N=20)
    #[arg(long)]
    preset: Option<String>,
    /// Coupling strength
    #[arg(long)]
    g: Option<String>,
    /// Total interaction time
    #[arg(long = "T")]
    total_time: Option<String>,
    /// Number of ancillas
    #[arg(long = "N")]
    n_total: Option<String>,
    /// visibility, predictability or concurrence
    #[arg(long)]
    objective: Option<String>,
    #[arg(long)]
    n_min: Option<String>,
    #[arg(long)]
    n_max: Option<String>,
    #[arg(long)]
    restarts: Option<String>,
    /// Objective evaluations per restart
    #[arg(long)]
    max_evals: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<String>,
    /// Theta grid steps over [0, pi] for the uniform sweep
    #[arg(long)]
    theta_steps: Option<String>,
    /// Fixed phi for the uniform sweep
    #[arg(long)]
    phi: Option<String>,
    /// Rate constant for the reservoir column and the limit study
    #[arg(long)]
    k: Option<String>,
    /// Seed each n with the solution for n - 1
    #[arg(long)]
    warm_start: bool,
    /// joint or greedy
    #[arg(long)]
    mode: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(String, String)> {
        let fields = [
            ("experiment", &self.experiment),
            ("preset", &self.preset),
            ("g", &self.g),
            ("T", &self.total_time),
            ("N", &self.n_total),
            ("objective", &self.objective),
            ("n-min", &self.n_min),
            ("n-max", &self.n_max),
            ("restarts", &self.restarts),
            ("max-evals", &self.max_evals),
            ("tol", &self.tol),
            ("seed", &self.seed),
            ("out", &self.out),
            ("theta-steps", &self.theta_steps),
            ("phi", &self.phi),
            ("k", &self.k),
            ("mode", &self.mode),
        ];
        let mut pairs: Vec<(String, String)> = fields
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect();
        if self.warm_start {
            pairs.push(("warm-start".into(), "true".into()));
        }
        pairs
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Random cases for the closure check
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, hide = true)]
    inject_sign_flip: bool,
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| format!("{THREADS_ENV} must be a positive integer, got '{value}'"))?;
    if threads == 0 {
        return Err(format!(
            "{THREADS_ENV} must be a positive integer, got '{value}'"
        ));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(args: &RunArgs) -> Result<PathBuf, RunError> {
    let overrides = args.overrides();
    let config = match &args.config {
        Some(path) => RunConfig::load(path, &overrides)?,
        None => RunConfig::from_pairs(overrides)?,
    };
    execute(&config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(message) = configure_threads() {
        eprintln!("error: {message}");
        return ExitCode::from(2);
    }
    match cli.command {
        Command::Run(args) => match run(&args) {
            Ok(path) => {
                println!("{}", path.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Verify(args) => {
            let report = verify::run(&VerifyOptions {
                samples: args.samples,
                seed: args.seed,
                inject_sign_flip: args.inject_sign_flip,
            });
            print!("{report}");
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
