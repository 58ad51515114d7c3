//! `bistab` — command-line front end for the optomechanical bistability
//! toolkit. Parses flags and an optional JSON config (flags win), dispatches
//! to the computation crate, and emits deterministic CSV/JSON artifacts.

mod commands;
mod config;
mod emit;

use std::process::ExitCode;

use bistab_core::dynamics::DynamicsError;
use bistab_core::ode::OdeError;
use bistab_core::quantum::QuantumError;
use bistab_core::steady::SteadyError;
use clap::{Args, Parser, Subcommand};

use config::RunConfig;

/// Exit codes: 0 ok, 2 usage/config error, 3 numerical failure,
/// 4 truncation breach.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Truncation(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Truncation(_) => 4,
            CliError::Internal(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m)
            | CliError::Numerical(m)
            | CliError::Truncation(m)
            | CliError::Internal(m) => write!(f, "{m}"),
        }
    }
}

impl From<SteadyError> for CliError {
    fn from(e: SteadyError) -> Self {
        match e {
            SteadyError::NegativeIntensity => CliError::Usage(e.to_string()),
            SteadyError::NumericalFailure(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Ode(OdeError::InvalidInput(m)) => CliError::Usage(m.to_string()),
            DynamicsError::Ode(OdeError::StepUnderflow) => CliError::Numerical(e.to_string()),
            DynamicsError::NotAFixedPoint => CliError::Numerical(e.to_string()),
            DynamicsError::Steady(inner) => inner.into(),
        }
    }
}

impl From<QuantumError> for CliError {
    fn from(e: QuantumError) -> Self {
        match e {
            QuantumError::TruncationBreach { .. } => CliError::Truncation(e.to_string()),
            QuantumError::DimensionOverflow { .. }
            | QuantumError::CutoffTooSmall { .. }
            | QuantumError::InvalidInput(_) => CliError::Usage(e.to_string()),
            QuantumError::ShapeMismatch | QuantumError::InvariantViolated(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

#[derive(Parser)]
#[command(
    name = "bistab",
    about = "Radiation-pressure optical bistability: steady states, hysteresis, dynamics, and a quantum oracle",
    after_help = "Config: a flat JSON object whose keys are the long flag names with dashes\n\
                  replaced by underscores; flags always override the file. The config path\n\
                  comes from --config or else the BISTAB_CONFIG environment variable."
)]
struct Cli {
    /// JSON config file supplying defaults for any flag
    #[arg(long, global = true)]
    config: Option<String>,
    /// Write the merged configuration as JSON to this path ("-" for stdout)
    #[arg(long, global = true, value_name = "PATH")]
    dump_config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Sign convention: paper | derived
    #[arg(long)]
    mode: Option<String>,
    /// Artifact path (stdout for data commands when omitted)
    #[arg(long, short = 'o')]
    output: Option<String>,
    /// Artifact format: csv | json
    #[arg(long)]
    format: Option<String>,
}

impl CommonArgs {
    fn fill(&self, cfg: &mut RunConfig) {
        cfg.mode = self.mode.clone();
        cfg.output = self.output.clone();
        cfg.format = self.format.clone();
    }
}

#[derive(Args, Default)]
struct StateEqArgs {
    /// State-equation damping field (γ² in physical units)
    #[arg(long, allow_negative_numbers = true)]
    gamma2: Option<f64>,
    /// Amplitude damping γ (state-equation commands need --consistent too)
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Marks --gamma as the derived/consistent convention value
    #[arg(long)]
    consistent: bool,
    /// Effective detuning Δ
    #[arg(long, allow_negative_numbers = true)]
    delta_eff: Option<f64>,
    /// Nonlinear coefficient 2χ
    #[arg(long, allow_negative_numbers = true)]
    two_chi: Option<f64>,
}

impl StateEqArgs {
    fn fill(&self, cfg: &mut RunConfig) {
        cfg.gamma2 = self.gamma2;
        cfg.gamma = self.gamma;
        cfg.consistent = if self.consistent { Some(true) } else { None };
        cfg.delta_eff = self.delta_eff;
        cfg.two_chi = self.two_chi;
    }
}

#[derive(Args, Default)]
struct RawParamArgs {
    /// Cavity frequency ω_C
    #[arg(long, allow_negative_numbers = true)]
    omega_c: Option<f64>,
    /// Mirror frequency ω_M
    #[arg(long, allow_negative_numbers = true)]
    omega_m: Option<f64>,
    /// Drive frequency ω_L
    #[arg(long, allow_negative_numbers = true)]
    omega_l: Option<f64>,
    /// Detuning δ = ω_C − ω_L (shorthand for --omega-c δ --omega-l 0)
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Field–mirror coupling G
    #[arg(long = "G", allow_negative_numbers = true)]
    coupling: Option<f64>,
    /// Input-coupling prefactor g
    #[arg(long = "g", allow_negative_numbers = true)]
    g: Option<f64>,
    /// Drive amplitude E (real part)
    #[arg(long = "E", allow_negative_numbers = true)]
    e_re: Option<f64>,
    /// Drive amplitude E (imaginary part)
    #[arg(long = "E-im", allow_negative_numbers = true)]
    e_im: Option<f64>,
    /// Cavity damping rate γ
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Mirror thermal occupation n̄
    #[arg(long, allow_negative_numbers = true)]
    nbar: Option<f64>,
    /// Displacement-parameter override κ (defaults to G/ω_M)
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
}

impl RawParamArgs {
    fn fill(&self, cfg: &mut RunConfig) {
        cfg.omega_c = self.omega_c;
        cfg.omega_m = self.omega_m;
        cfg.omega_l = self.omega_l;
        cfg.delta = self.delta;
        cfg.coupling = self.coupling;
        cfg.g = self.g;
        cfg.e_re = self.e_re;
        cfg.e_im = self.e_im;
        cfg.gamma = cfg.gamma.or(self.gamma);
        cfg.nbar = self.nbar;
        cfg.kappa = self.kappa;
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve the steady-state cubic at one input intensity
    Steady {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        eq: StateEqArgs,
        /// Scaled input intensity S
        #[arg(long, allow_negative_numbers = true)]
        input: Option<f64>,
    },
    /// Hysteresis sweep of the input intensity, up and down
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        eq: StateEqArgs,
        /// Sweep start S
        #[arg(long, allow_negative_numbers = true)]
        smin: Option<f64>,
        /// Sweep end S
        #[arg(long, allow_negative_numbers = true)]
        smax: Option<f64>,
        /// Number of sweep points
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Critical detuning for bistability
    Threshold {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        eq: StateEqArgs,
    },
    /// Integrate the mean-field equations of motion
    Evolve {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        raw: RawParamArgs,
        /// Effective detuning Δ (with --two-chi and --gamma, bypasses the
        /// raw parameters)
        #[arg(long, allow_negative_numbers = true)]
        delta_eff: Option<f64>,
        /// Nonlinear coefficient 2χ for the effective path
        #[arg(long, allow_negative_numbers = true)]
        two_chi: Option<f64>,
        /// Drive as a scaled input intensity S (drive amplitude √S)
        #[arg(long, allow_negative_numbers = true)]
        input: Option<f64>,
        /// Complex drive amplitude, real part
        #[arg(long, allow_negative_numbers = true)]
        drive_re: Option<f64>,
        /// Complex drive amplitude, imaginary part
        #[arg(long, allow_negative_numbers = true)]
        drive_im: Option<f64>,
        /// Initial mean field, real part
        #[arg(long, allow_negative_numbers = true)]
        u0_re: Option<f64>,
        /// Initial mean field, imaginary part
        #[arg(long, allow_negative_numbers = true)]
        u0_im: Option<f64>,
        /// Integration horizon
        #[arg(long, allow_negative_numbers = true)]
        t_end: Option<f64>,
        /// Local error tolerance
        #[arg(long, allow_negative_numbers = true)]
        tol: Option<f64>,
    },
    /// Input–output curves for the scaled-detuning family
    Fig1 {
        #[command(flatten)]
        common: CommonArgs,
        /// χ_eff/Γ ratio of the curve family
        #[arg(long, allow_negative_numbers = true)]
        chi_ratio: Option<f64>,
        /// Scaled detunings, comma separated
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        detunings: Option<Vec<f64>>,
        /// Damping field Γ
        #[arg(long, allow_negative_numbers = true)]
        gamma2: Option<f64>,
        /// Samples per curve
        #[arg(long)]
        points: Option<usize>,
        /// Largest scaled output intensity sampled
        #[arg(long, allow_negative_numbers = true)]
        a_max: Option<f64>,
    },
    /// Kerr-medium equivalent of the optomechanical parameters
    Kerr {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        raw: RawParamArgs,
        /// Effective detuning Δ (with --chi-eff, bypasses the raw parameters)
        #[arg(long, allow_negative_numbers = true)]
        delta_eff: Option<f64>,
        /// Effective Kerr constant χ_eff
        #[arg(long, allow_negative_numbers = true)]
        chi_eff: Option<f64>,
        /// Damping field for the effective path
        #[arg(long, allow_negative_numbers = true)]
        gamma2: Option<f64>,
        /// Scaled input intensity for the effective path
        #[arg(long, allow_negative_numbers = true)]
        input: Option<f64>,
    },
    /// Classical interferometer input–output curve
    Classical {
        #[command(flatten)]
        common: CommonArgs,
        /// Mirror reflectivity R
        #[arg(long = "R", allow_negative_numbers = true)]
        reflectivity: Option<f64>,
        /// Transmissivity T
        #[arg(long = "T", allow_negative_numbers = true)]
        transmissivity: Option<f64>,
        /// Linear phase offset β₀
        #[arg(long, allow_negative_numbers = true)]
        beta0: Option<f64>,
        /// Intensity-phase coefficient β₂
        #[arg(long, allow_negative_numbers = true)]
        beta2: Option<f64>,
        /// Largest output intensity sampled
        #[arg(long, allow_negative_numbers = true)]
        io_max: Option<f64>,
        /// Samples along the curve
        #[arg(long)]
        points: Option<usize>,
    },
    /// Master-equation oracle vs mean field
    QuantumCompare {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        raw: RawParamArgs,
        /// Cavity Fock cutoff
        #[arg(long)]
        n_cavity: Option<usize>,
        /// Mirror Fock cutoff
        #[arg(long)]
        n_mirror: Option<usize>,
        /// Comparison horizon
        #[arg(long, allow_negative_numbers = true)]
        t_end: Option<f64>,
    },
}

fn flags_config(command: &Command) -> RunConfig {
    let mut cfg = RunConfig::default();
    match command {
        Command::Steady { common, eq, input } => {
            common.fill(&mut cfg);
            eq.fill(&mut cfg);
            cfg.input = *input;
        }
        Command::Sweep { common, eq, smin, smax, steps } => {
            common.fill(&mut cfg);
            eq.fill(&mut cfg);
            cfg.smin = *smin;
            cfg.smax = *smax;
            cfg.steps = *steps;
        }
        Command::Threshold { common, eq } => {
            common.fill(&mut cfg);
            eq.fill(&mut cfg);
        }
        Command::Evolve {
            common,
            raw,
            delta_eff,
            two_chi,
            input,
            drive_re,
            drive_im,
            u0_re,
            u0_im,
            t_end,
            tol,
        } => {
            common.fill(&mut cfg);
            raw.fill(&mut cfg);
            cfg.delta_eff = *delta_eff;
            cfg.two_chi = *two_chi;
            cfg.input = *input;
            cfg.drive_re = *drive_re;
            cfg.drive_im = *drive_im;
            cfg.u0_re = *u0_re;
            cfg.u0_im = *u0_im;
            cfg.t_end = *t_end;
            cfg.tol = *tol;
        }
        Command::Fig1 { common, chi_ratio, detunings, gamma2, points, a_max } => {
            common.fill(&mut cfg);
            cfg.chi_ratio = *chi_ratio;
            cfg.detunings = detunings.clone();
            cfg.gamma2 = *gamma2;
            cfg.points = *points;
            cfg.a_max = *a_max;
        }
        Command::Kerr { common, raw, delta_eff, chi_eff, gamma2, input } => {
            common.fill(&mut cfg);
            raw.fill(&mut cfg);
            cfg.delta_eff = *delta_eff;
            cfg.chi_eff = *chi_eff;
            cfg.gamma2 = cfg.gamma2.or(*gamma2);
            cfg.input = *input;
        }
        Command::Classical { common, reflectivity, transmissivity, beta0, beta2, io_max, points } => {
            common.fill(&mut cfg);
            cfg.reflectivity = *reflectivity;
            cfg.transmissivity = *transmissivity;
            cfg.beta0 = *beta0;
            cfg.beta2 = *beta2;
            cfg.io_max = *io_max;
            cfg.points = *points;
        }
        Command::QuantumCompare { common, raw, n_cavity, n_mirror, t_end } => {
            common.fill(&mut cfg);
            raw.fill(&mut cfg);
            cfg.n_cavity = *n_cavity;
            cfg.n_mirror = *n_mirror;
            cfg.t_end = *t_end;
        }
    }
    cfg
}

fn run(cli: Cli) -> Result<(), CliError> {
    let from_flags = flags_config(&cli.command);
    let merged = match config::config_path(cli.config.as_deref()) {
        Some(path) => from_flags.overlay(RunConfig::load(&path)?),
        None => from_flags,
    };
    if let Some(target) = &cli.dump_config {
        merged.dump(target)?;
    }

    match &cli.command {
        Command::Steady { .. } => commands::cmd_steady(&merged),
        Command::Sweep { .. } => commands::cmd_sweep(&merged),
        Command::Threshold { .. } => commands::cmd_threshold(&merged),
        Command::Evolve { .. } => commands::cmd_evolve(&merged),
        Command::Fig1 { .. } => commands::cmd_fig1(&merged),
        Command::Kerr { .. } => commands::cmd_kerr(&merged),
        Command::Classical { .. } => commands::cmd_classical(&merged),
        Command::QuantumCompare { .. } => commands::cmd_quantum_compare(&merged),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}
