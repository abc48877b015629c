use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use volterra_sde::config::RunConfig;
use volterra_sde::experiments::{run_all, run_experiment};

/// Resolvent families for linear stochastic Volterra equations:
/// builds resolvent tables, checks complete positivity, and verifies the
/// strong, weak and mild solution identities on sampled noise.
#[derive(Parser)]
#[command(name = "volterra-sde", version, about)]
struct Cli {
    /// TOML run configuration; defaults apply for every omitted field.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Base RNG seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads, 0 for automatic (overrides the config).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print per-experiment detail lines.
    #[arg(long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the resolvent table and check its defining identities.
    Resolvent,
    /// Check complete positivity of the kernel across shifts mu.
    CpCheck,
    /// Sample the stochastic convolution and check its second moment.
    Convolve,
    /// Monte Carlo checks of the Ito isometry and cross-orthogonality.
    ItoCheck,
    /// Residual of the strong solution identity, with a refinement study.
    VerifyStrong,
    /// Residual of the weak solution identity against basis test vectors.
    VerifyWeak,
    /// Weak residual of the mild process plus the interchange identity.
    VerifyMild,
    /// Yosida approximation convergence with its decomposition bound.
    YosidaSuite,
    /// Cauchy problem reformulation of the convolution equation.
    Cauchy,
    /// Pathwise regularity probe of the stochastic convolution.
    Regularity,
}

impl Command {
    fn experiment_name(&self) -> &'static str {
        match self {
            Command::Resolvent => "resolvent",
            Command::CpCheck => "cp-check",
            Command::Convolve => "convolve",
            Command::ItoCheck => "ito-check",
            Command::VerifyStrong => "verify-strong",
            Command::VerifyWeak => "verify-weak",
            Command::VerifyMild => "verify-mild",
            Command::YosidaSuite => "yosida-suite",
            Command::Cauchy => "cauchy",
            Command::Regularity => "regularity",
        }
    }
}

fn run(cli: Cli) -> Result<bool, volterra_sde::Error> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = cli.out {
        config.out_dir = out;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(threads) = cli.threads {
        config.threads = threads;
    }
    if config.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build_global()
            .map_err(|e| volterra_sde::Error::Config {
                field: "threads".into(),
                message: e.to_string(),
            })?;
    }
    match cli.command {
        Some(command) => {
            let name = command.experiment_name();
            config.experiments = vec![name.to_string()];
            config.validate()?;
            Ok(run_experiment(name, &config, cli.verbose)?.pass)
        }
        None => run_all(&config, cli.verbose),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
