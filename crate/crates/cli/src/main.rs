//! `eprod`: entanglement production of state families, operator files,
//! thermal sweeps, evolution trajectories and phase-transition regimes.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad input, 3 solver did not
//! converge or a cross-check mismatched, 4 trace too small to normalize.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eprod_core::dnorm::SolverConfig;
use eprod_core::measure::LogBase;
use eprod_core::states::{Family, Sign, Statistics};
use eprod_core::transitions::Transition;
use eprod_core::Error;

mod commands;
mod table;

use table::Format;

#[derive(Parser, Debug)]
#[command(name = "eprod", version, about = "Entanglement production by operators on multipartite spaces")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Logarithm base: `e` (natural) or `2`.
    #[arg(long, global = true, default_value = "e")]
    pub base: LogBase,
    /// Random solver starts besides the deterministic one.
    #[arg(long, global = true, default_value_t = 32)]
    pub restarts: usize,
    /// Solver seed; the EPROD_SEED environment variable takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl Common {
    pub fn solver(&self) -> Result<SolverConfig, Error> {
        let seed = match std::env::var("EPROD_SEED") {
            Ok(s) => s.trim().parse().map_err(|_| Error::Parse(format!("EPROD_SEED={s:?} is not an unsigned integer")))?,
            Err(_) => self.seed,
        };
        let cfg = SolverConfig::default().with_restarts(self.restarts).with_seed(seed);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ε of a state family, against its closed form.
    Compute(FamilyArgs),
    /// ε of an operator or ket stored in the JSON interchange format.
    MeasureFile {
        path: PathBuf,
    },
    /// Two-site Ising sweep over (g, b), closed form against pipeline, plus the limit table.
    Thermal(ThermalArgs),
    /// ε(t) of a mixed multimode operator along a population trajectory.
    Evolve(EvolveArgs),
    /// Regime values of ε at phase transitions.
    Transitions(TransitionArgs),
    /// Runs the full table of closed-form checks.
    Reproduce {
        /// Restrict to one section or equation tag, e.g. `eq75`.
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[arg(long)]
    pub family: Family,
    /// Number of parts (particles).
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Reduction order for `hf-reduced` and `mixed-multimode`.
    #[arg(long)]
    pub p: Option<usize>,
    /// Multicat coefficient of |1…1⟩, as `re` or `re:im`.
    #[arg(long)]
    pub c1: Option<String>,
    /// Multicat coefficient of |2…2⟩; defaults to sqrt(1 − |c1|²).
    #[arg(long)]
    pub c2: Option<String>,
    /// Comma-separated multimode coefficients (`re` or `re:im`) or mixed multimode populations.
    #[arg(long)]
    pub coeffs: Option<String>,
    #[arg(long, default_value = "fermi")]
    pub statistics: Statistics,
    #[arg(long, value_enum, default_value_t = SignArg::Plus)]
    pub sign: SignArg,
    /// Normalize mixed multimode operators to unit trace.
    #[arg(long)]
    pub unit_trace: bool,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Args, Debug)]
pub struct ThermalArgs {
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub g_min: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub g_max: f64,
    #[arg(long, default_value_t = 21)]
    pub g_steps: usize,
    #[arg(long, default_value_t = 0.0)]
    pub b_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub b_max: f64,
    #[arg(long, default_value_t = 21)]
    pub b_steps: usize,
    /// Leave out the low-temperature limit table.
    #[arg(long)]
    pub no_limits: bool,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    /// CSV rows `t,w_1,…,w_m`; a header line and `#` comments are skipped.
    #[arg(long, conflicts_with = "rabi", required_unless_present = "rabi")]
    pub trajectory: Option<PathBuf>,
    /// Built-in two-mode trajectory w₁ = cos²(Ωt/2), w₂ = 1 − w₁ with this Ω.
    #[arg(long)]
    pub rabi: Option<f64>,
    /// End time of the built-in trajectory; defaults to one period 2π/Ω.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub t_steps: usize,
    /// Reduction order.
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    /// Number of particles; defaults to `p`.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct TransitionArgs {
    /// `bec`, `sc` or `magnetic`; all three when absent.
    #[arg(long)]
    pub transition: Option<Transition>,
    /// Comma-separated particle numbers.
    #[arg(long, default_value = "1000,1000000")]
    pub n: String,
    /// Comma-separated reduction orders.
    #[arg(long, default_value = "1,2,3,4")]
    pub p: String,
    /// Spin.
    #[arg(long, default_value_t = 0.5)]
    pub spin: f64,
    /// Magnetization per site below T_c.
    #[arg(long, default_value_t = 0.25)]
    pub magnetization: f64,
    /// Prefactor c_p of ‖ρ_p‖ below the superconducting transition.
    #[arg(long, default_value_t = 1.0)]
    pub cp: f64,
    /// Prefactor c_1 of ‖ρ_1‖ below the superconducting transition.
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Convergence(_) => 3,
        Error::NormalizationUndefined(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute(a) => commands::compute(&cli.common, a),
        Command::MeasureFile { path } => commands::measure_file(&cli.common, path),
        Command::Thermal(a) => commands::thermal(&cli.common, a),
        Command::Evolve(a) => commands::evolve(&cli.common, a),
        Command::Transitions(a) => commands::transitions(&cli.common, a),
        Command::Reproduce { only } => commands::reproduce(&cli.common, only.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("eprod: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
