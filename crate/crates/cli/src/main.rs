use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use icslab_cli::{
    run_ellipse, run_histproj, run_popcurves, run_sweep, CliError, ExperimentConfig, RunOutcome, ScatterPair,
    DEFAULT_ANGLES, DEFAULT_PAIRS, EXIT_ESTIMATOR,
};

#[derive(Parser)]
#[command(name = "icslab", version, about = "ICS / projection pursuit clustering-direction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Population kmat:var criteria against θ and φ.
    Popcurves(Common),
    /// ICS and PP criterion curves for every method on one dataset.
    Sweep(Common),
    /// Projections and truncated variances at selected angles.
    Histproj {
        #[command(flatten)]
        common: Common,
        /// Projection angles in degrees.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ANGLES)]
        angles: Vec<f64>,
    },
    /// MCD ellipses, free and about the sample mean.
    Ellipse(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, default_value_t = 3.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of angles over [-90°, 90°].
    #[arg(long, default_value_t = 721)]
    grid: usize,
    /// Random starts for mve / mcd.
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value = "out")]
    outdir: PathBuf,
    /// Comma-separated scatter pairs, e.g. var:mcd,t2:mve.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
}

impl Common {
    fn config(self) -> Result<ExperimentConfig, CliError> {
        let methods = if self.methods.is_empty() {
            DEFAULT_PAIRS.to_vec()
        } else {
            self.methods.iter().map(|m| m.parse::<ScatterPair>()).collect::<Result<_, _>>()?
        };
        Ok(ExperimentConfig {
            n: self.n,
            q: self.q,
            alpha: self.alpha,
            seed: self.seed,
            methods,
            grid_size: self.grid,
            trials: self.trials,
            outdir: self.outdir,
        })
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("ICSLAB_THREADS") else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Config(format!("ICSLAB_THREADS={raw} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<RunOutcome, CliError> {
    init_threads()?;
    match cli.command {
        Command::Popcurves(c) => run_popcurves(&c.config()?),
        Command::Sweep(c) => run_sweep(&c.config()?),
        Command::Histproj { common, angles } => run_histproj(&common.config()?, &angles),
        Command::Ellipse(c) => run_ellipse(&c.config()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if outcome.failures > 0 {
                eprintln!("error: {} estimator failure(s) recorded in the output", outcome.failures);
                return ExitCode::from(EXIT_ESTIMATOR as u8);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            ExitCode::from(code as u8)
        }
    }
}
