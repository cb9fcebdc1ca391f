use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use onedatom::config::{ConfigError, Experiment, OutputFormat, RunConfig};
use onedatom::experiments;
use onedatom::output::{write_table, Table};

/// Simulator of stimulated emission at the single-photon level in 1D atoms.
#[derive(Parser)]
#[command(name = "onedatom", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Total two-level decay rate γ (exciton rate Γ_X for qd-sweep)
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// 1D coupling fraction β ∈ [0, 1]
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Pure dephasing rate γ* in units of γ
    #[arg(long, allow_negative_numbers = true)]
    gamma_star: Option<f64>,
    /// Incoherent pump rate ξ in units of γ
    #[arg(long, allow_negative_numbers = true)]
    xi: Option<f64>,
    /// Resonant probe power in photons per lifetime
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    /// Laser-atom detuning δ_L in units of γ
    #[arg(long, allow_negative_numbers = true)]
    delta_l: Option<f64>,
    /// Effective two-photon pump rate Λ²/Δ in units of Γ_X
    #[arg(long, allow_negative_numbers = true)]
    g2: Option<f64>,
    /// Biexciton decay rate Γ_XX in units of Γ_X
    #[arg(long, allow_negative_numbers = true)]
    gamma_xx: Option<f64>,
    /// Lowest nonzero probe power of a sweep
    #[arg(long, allow_negative_numbers = true)]
    p_min: Option<f64>,
    /// Highest probe power of a sweep
    #[arg(long, allow_negative_numbers = true)]
    p_max: Option<f64>,
    /// Number of log-spaced sweep points
    #[arg(long)]
    points: Option<usize>,
    /// Transient duration in units of 1/γ
    #[arg(long, allow_negative_numbers = true)]
    t_max: Option<f64>,
    /// Number of integration steps
    #[arg(long)]
    steps: Option<usize>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Emission from an initially excited atom under a cw probe
    Transient(CommonFlags),
    /// Steady-state sweep of the incoherently pumped two-level atom
    SteadySweep(CommonFlags),
    /// Steady-state sweep of the exciton/biexciton cascade
    QdSweep(CommonFlags),
    /// Probe power separating the incoherent and coherent regimes
    Threshold(CommonFlags),
    /// Check a parameter set against the model invariants
    Validate(CommonFlags),
}

#[derive(Debug)]
enum RunError {
    Config(String),
    Io(std::io::Error),
    Solver(String),
}

impl RunError {
    fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Io(_) => 3,
            RunError::Solver(_) => 4,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(msg) => write!(f, "config error: {msg}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
            RunError::Solver(msg) => write!(f, "solver error: {msg}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.to_string())
    }
}

fn resolve(experiment: Experiment, flags: &CommonFlags) -> Result<RunConfig, RunError> {
    let mut from_flags = RunConfig::new(experiment);
    from_flags.gamma = flags.gamma;
    from_flags.beta = flags.beta;
    from_flags.gamma_star = flags.gamma_star;
    from_flags.xi = flags.xi;
    from_flags.p = flags.p;
    from_flags.delta_l = flags.delta_l;
    from_flags.g2 = flags.g2;
    from_flags.gamma_xx = flags.gamma_xx;
    from_flags.p_min = flags.p_min;
    from_flags.p_max = flags.p_max;
    from_flags.points = flags.points;
    from_flags.t_max = flags.t_max;
    from_flags.steps = flags.steps;
    from_flags.out = flags.out.clone();
    from_flags.format = flags.format.unwrap_or_default();

    match &flags.config {
        Some(path) => {
            let mut file = RunConfig::from_file(path)?;
            file.experiment = experiment;
            if flags.format.is_none() {
                from_flags.format = file.format;
            }
            Ok(from_flags.overlay(file))
        }
        None => Ok(from_flags),
    }
}

fn emit(cfg: &RunConfig, table: &Table) -> Result<(), RunError> {
    write_table(table, cfg.format, cfg.out.as_deref()).map_err(RunError::Io)
}

fn run(experiment: Experiment, flags: &CommonFlags) -> Result<(), RunError> {
    let cfg = resolve(experiment, flags)?;
    match experiment {
        Experiment::Transient => {
            let params = cfg.two_level_params()?;
            let grid = cfg.time_grid(&params)?;
            let res = experiments::run_transient(&params, &grid)
                .map_err(|e| RunError::Solver(e.to_string()))?;
            emit(&cfg, &Table::from_transient(&res))
        }
        Experiment::SteadySweep => {
            let params = cfg.two_level_params()?;
            let grid = cfg.power_grid()?;
            let res = experiments::run_steady_sweep(&params, &grid)
                .map_err(|e| RunError::Solver(e.to_string()))?;
            emit(&cfg, &Table::from_sweep(&res))
        }
        Experiment::QdSweep => {
            let params = cfg.three_level_params()?;
            let grid = cfg.power_grid()?;
            let res = experiments::run_qd_sweep(&params, &grid)
                .map_err(|e| RunError::Solver(e.to_string()))?;
            emit(&cfg, &Table::from_sweep(&res))
        }
        Experiment::Threshold => {
            let params = cfg.two_level_params()?;
            let p_th = params
                .threshold_power()
                .map_err(|e| RunError::Solver(e.to_string()))?;
            emit(&cfg, &Table::scalar("p_th", p_th))
        }
        Experiment::Validate => {
            cfg.two_level_params()?;
            if cfg.g2.is_some() || cfg.gamma_xx.is_some() {
                cfg.three_level_params()?;
            }
            println!("ok");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let (experiment, flags) = match &cli.command {
        Command::Transient(f) => (Experiment::Transient, f),
        Command::SteadySweep(f) => (Experiment::SteadySweep, f),
        Command::QdSweep(f) => (Experiment::QdSweep, f),
        Command::Threshold(f) => (Experiment::Threshold, f),
        Command::Validate(f) => (Experiment::Validate, f),
    };
    match run(experiment, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
