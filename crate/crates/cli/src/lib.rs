//! Command-line front-end for `birqi`.

pub mod commands;
pub mod config;
mod error;
pub mod format;

use std::io::Write;
use std::path::PathBuf;

use birqi::numkernel::ComplexMatrix;
use birqi::{AncillaState, BipartiteModel, DensityMatrix};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::CliError;

pub const TOL_ENV: &str = "BIRQI_TOL";
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "birqi", version, about = "Repeated interactions of a bipartite system with a chain of ancillas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Concurrence and entanglement of formation along e^{tL}(ρ0) for a two-qubit system.
    EntanglementCurve(CurveArgs),
    /// Trace distance between the discrete dynamics and e^{tL} for a list of step sizes.
    Convergence(ConvergenceArgs),
    /// Effective Hamiltonian of the limit generator and its interaction part.
    EffectiveHamiltonian(HamiltonianArgs),
    /// Return to equilibrium for a Gibbs ancilla: verdict and decay towards the Gibbs state.
    Thermal(ThermalArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// TOML model file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Built-in model: `emission` or `thermal:N`.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Print the resolved model as a config file and exit.
    #[arg(long)]
    pub emit_config: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AncillaKind {
    Ground,
    Gibbs,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// `e0e0`, `e0e1`, `e1e0`, `e1e1` or a TOML file with a `rho` matrix.
    #[arg(long, value_name = "NAME|PATH")]
    pub initial: String,
    #[arg(long, value_name = "F")]
    pub t_max: f64,
    #[arg(long, value_name = "F")]
    pub dt: f64,
    #[arg(long, value_enum)]
    pub ancilla: Option<AncillaKind>,
    #[arg(long, value_name = "F")]
    pub beta: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_name = "NAME|PATH")]
    pub initial: String,
    /// Final time.
    #[arg(long = "t-max", visible_alias = "t", value_name = "F")]
    pub t: f64,
    /// Comma-separated decreasing step sizes.
    #[arg(long, value_name = "LIST", value_delimiter = ',', num_args = 1..)]
    pub h: Vec<f64>,
    #[arg(long, value_enum)]
    pub ancilla: Option<AncillaKind>,
    #[arg(long, value_name = "F")]
    pub beta: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct HamiltonianArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Gibbs ancilla at this inverse temperature; ground ancilla when absent.
    #[arg(long, value_name = "F")]
    pub beta: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ThermalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_name = "F")]
    pub beta: f64,
    #[arg(long, value_name = "NAME|PATH", default_value = "e0e0")]
    pub initial: String,
    #[arg(long, value_name = "F")]
    pub t_max: f64,
    #[arg(long, value_name = "F")]
    pub dt: f64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Print the verdict as JSON.
    #[arg(long)]
    pub json: bool,
}

/// Validation tolerance from the value of `BIRQI_TOL`, if set.
pub fn tolerance(value: Option<&str>) -> Result<f64, CliError> {
    match value {
        None => Ok(DEFAULT_TOL),
        Some(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t > 0.0)
            .ok_or_else(|| CliError::Config(format!("{TOL_ENV}=`{s}` is not a positive number"))),
    }
}

pub fn resolve_model(args: &ModelArgs) -> Result<BipartiteModel, CliError> {
    match (&args.config, &args.preset) {
        (Some(_), Some(_)) => Err(CliError::Usage("--config and --preset are mutually exclusive".into())),
        (Some(path), None) => config::load(path),
        (None, Some(name)) => config::preset(name),
        (None, None) => Err(CliError::Usage("a model is required: --config PATH or --preset NAME".into())),
    }
}

pub fn resolve_ancilla(kind: Option<AncillaKind>, beta: Option<f64>) -> Result<AncillaState, CliError> {
    match (kind, beta) {
        (None | Some(AncillaKind::Ground), None) => Ok(AncillaState::Ground),
        (None | Some(AncillaKind::Gibbs), Some(beta)) => Ok(AncillaState::Gibbs { beta }),
        (Some(AncillaKind::Ground), Some(_)) => Err(CliError::Usage("--beta needs --ancilla gibbs".into())),
        (Some(AncillaKind::Gibbs), None) => Err(CliError::Usage("--ancilla gibbs needs --beta".into())),
    }
}

/// `eIeJ` is the product basis state `e_I ⊗ e_J`; anything else is read as
/// a TOML file holding `rho`.
pub fn resolve_initial(spec: &str, m: &BipartiteModel, tol: f64) -> Result<DensityMatrix, CliError> {
    if let Some((i, j)) = parse_basis_name(spec) {
        if i >= m.dim_a() || j >= m.dim_b() {
            return Err(CliError::Config(format!(
                "initial state {spec} is outside a {}x{} system",
                m.dim_a(),
                m.dim_b()
            )));
        }
        return Ok(DensityMatrix::basis_state(m.system_dim(), i * m.dim_b() + j)?);
    }
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct StateFile {
        rho: config::RawMatrix,
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| CliError::Config(format!("initial state `{spec}`: not a basis name and not readable: {e}")))?;
    let file: StateFile = toml::from_str(&text)
        .map_err(|e| CliError::Config(format!("initial state {spec}: {}", e.message())))?;
    let rho: ComplexMatrix = config::matrix(&file.rho, m.system_dim(), "rho")?;
    DensityMatrix::new(rho, tol).map_err(|e| CliError::Config(format!("initial state {spec}: {e}")))
}

fn parse_basis_name(spec: &str) -> Option<(usize, usize)> {
    let rest = spec.strip_prefix('e')?;
    let (i, j) = rest.split_once('e')?;
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !(digits(i) && digits(j)) {
        return None;
    }
    Some((i.parse().ok()?, j.parse().ok()?))
}

/// Uniform grid `0, dt, ..., t_max`; `t_max` must be a whole number of steps.
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>, CliError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(CliError::Usage(format!("--dt must be positive, got {dt}")));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(CliError::Usage(format!("--t-max must be non-negative, got {t_max}")));
    }
    let n = (t_max / dt).round();
    if (n * dt - t_max).abs() > 1e-9 * t_max.max(1.0) {
        return Err(CliError::Usage(format!("--t-max {t_max} is not a multiple of --dt {dt}")));
    }
    Ok((0..=n as usize).map(|k| k as f64 * dt).collect())
}

/// Runs one command. CSV goes to `--out` when given and to `stdout`
/// otherwise; side remarks go to `stderr`.
pub fn run(cli: &Cli, tol: f64, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let model_args = match &cli.command {
        Command::EntanglementCurve(a) => &a.model,
        Command::Convergence(a) => &a.model,
        Command::EffectiveHamiltonian(a) => &a.model,
        Command::Thermal(a) => &a.model,
    };
    let model = resolve_model(model_args)?;
    for w in model.warnings() {
        writeln!(stderr, "warning: {w}")?;
    }
    if model_args.emit_config {
        stdout.write_all(config::ModelConfig::from_model(&model).to_toml().as_bytes())?;
        return Ok(());
    }
    match &cli.command {
        Command::EntanglementCurve(a) => {
            let rho0 = resolve_initial(&a.initial, &model, tol)?;
            let ancilla = resolve_ancilla(a.ancilla, a.beta)?;
            let times = time_grid(a.t_max, a.dt)?;
            let csv = commands::entanglement_curve(&model, &ancilla, &rho0, &times, tol)?;
            emit(&a.out, &csv, stdout)
        }
        Command::Convergence(a) => {
            let rho0 = resolve_initial(&a.initial, &model, tol)?;
            let ancilla = resolve_ancilla(a.ancilla, a.beta)?;
            let csv = commands::convergence(&model, &ancilla, &rho0, a.t, &a.h, tol)?;
            emit(&a.out, &csv, stdout)
        }
        Command::EffectiveHamiltonian(a) => {
            let text = commands::effective_hamiltonian(&model, a.beta, a.json)?;
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
        Command::Thermal(a) => {
            let rho0 = resolve_initial(&a.initial, &model, tol)?;
            let times = time_grid(a.t_max, a.dt)?;
            let out = commands::thermal(&model, a.beta, &rho0, &times, a.json)?;
            emit(&a.out, &out.csv, stdout)?;
            if a.out.is_some() {
                stdout.write_all(out.verdict.as_bytes())?;
            } else {
                stderr.write_all(out.verdict.as_bytes())?;
            }
            Ok(())
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}
