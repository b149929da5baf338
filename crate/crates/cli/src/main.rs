use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sepq::config::{ModelChoice, Scenario, ScenarioConfig, TwoQubitState, SEED_ENV};
use sepq::{emit, CliError, Format};

/// Separated quantum entities, Bell inequalities and the product test.
#[derive(Parser)]
#[command(name = "sepq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML scenario configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed (falls back to the file, then SEPQ_SEED, then 42).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build and verify a state that makes a commuting joint measurement non-separated.
    Aerts {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dim_a: Option<usize>,
        #[arg(long)]
        dim_b: Option<usize>,
        /// Measure in Haar-random local bases.
        #[arg(long)]
        random_basis: bool,
    },
    /// Quantum CHSH value for a two-qubit state.
    Chsh {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        state: Option<TwoQubitState>,
    },
    /// CHSH values of the classical coincidence models.
    Models {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        model: Option<ModelChoice>,
    },
    /// Product-test certification on the built-in entities.
    ProductTest {
        #[command(flatten)]
        common: Common,
    },
    /// Perfect-prediction protocol on a two-qubit state.
    Epr {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        state: Option<TwoQubitState>,
    },
    /// Inner-product obstruction to cloning two qubit states.
    NoCloning {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        psi: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<String>,
    },
}

fn load(scenario: Scenario, common: &Common) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => ScenarioConfig::load(path, scenario)?,
        None => ScenarioConfig::new(scenario),
    };
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    if common.samples.is_some() {
        cfg.samples = common.samples;
    }
    Ok(cfg)
}

fn build(command: &Command) -> Result<(ScenarioConfig, &Common), CliError> {
    Ok(match command {
        Command::Aerts { common, dim_a, dim_b, random_basis } => {
            let mut cfg = load(Scenario::Aerts, common)?;
            if let Some(d) = dim_a {
                cfg.aerts.dim_a = *d;
            }
            if let Some(d) = dim_b {
                cfg.aerts.dim_b = *d;
            }
            cfg.aerts.random_basis |= random_basis;
            (cfg, common)
        }
        Command::Chsh { common, state } => {
            let mut cfg = load(Scenario::Chsh, common)?;
            if let Some(s) = state {
                cfg.chsh.state = *s;
            }
            (cfg, common)
        }
        Command::Models { common, model } => {
            let mut cfg = load(Scenario::Models, common)?;
            if let Some(m) = model {
                cfg.models.model = *m;
            }
            (cfg, common)
        }
        Command::ProductTest { common } => (load(Scenario::ProductTest, common)?, common),
        Command::Epr { common, state } => {
            let mut cfg = load(Scenario::Epr, common)?;
            if let Some(s) = state {
                cfg.epr.state = *s;
            }
            (cfg, common)
        }
        Command::NoCloning { common, psi, phi } => {
            let mut cfg = load(Scenario::NoCloning, common)?;
            if let Some(s) = psi {
                cfg.no_cloning.psi = s.clone();
            }
            if let Some(s) = phi {
                cfg.no_cloning.phi = s.clone();
            }
            (cfg, common)
        }
    })
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let (cfg, common) = build(&cli.command)?;
    let env_seed = std::env::var(SEED_ENV).ok();
    let cfg = cfg.resolve(env_seed.as_deref())?;
    let mut out: Box<dyn Write> = match &common.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    if common.print_config {
        out.write_all(cfg.to_toml().as_bytes())?;
        out.flush()?;
        return Ok(());
    }
    let report = sepq::run(&cfg)?;
    emit(&report, common.format, &mut out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sepq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
