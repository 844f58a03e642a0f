//! `nlmetro`: bound tables, sensitivity and scaling scans, simulations and
//! oracle self-checks for nonlinear collective-spin metrology.
//!
//! Every subcommand takes its parameters from flags, from a JSON `--config`
//! file whose keys mirror the flag names, or both (flags win). The fully
//! resolved configuration is echoed into the output header.
//!
//! Exit codes: 0 success, 1 usage error, 2 oracle tolerance breach,
//! 3 degenerate numeric input (degenerate spectrum, zero-signal operating point).

mod commands;
pub mod report;
pub mod values;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use nonlinear_metrology::exact_moments::Axis;
use nonlinear_metrology::protocol_sim::SamplingMode;
pub use report::{Cell, Format, Report};
use values::{Angle, Grid, Real, RealList, Rule, SpinPairs};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BREACH: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Degenerate(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Degenerate(_) => EXIT_DEGENERATE,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Degenerate(m) => write!(f, "degenerate input: {m}"),
        }
    }
}

impl From<nonlinear_metrology::Error> for Failure {
    fn from(e: nonlinear_metrology::Error) -> Self {
        use nonlinear_metrology::Error as E;
        match e {
            E::DegenerateSpectrum | E::NoInformation(_) => Failure::Degenerate(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(m: String) -> Self {
        Failure::Usage(m)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nlmetro",
    version,
    about = "Precision bounds and sensitivities for nonlinear collective-spin metrology"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entangled and product-state precision bounds for a k-body coupling.
    Bound(BoundArgs),
    /// delta_phi versus phi: exact, uniform-fringe and Gaussian-envelope models.
    Sensitivity(SensitivityArgs),
    /// Scaling exponent xi of delta_phi ~ J^-xi versus beta.
    Scaling(ScalingArgs),
    /// First and second moments of J_x, J_y, J_z after J_z^2 evolution.
    Moments(MomentsArgs),
    /// Monte Carlo of the scaled-mean estimator or the cat-state protocol.
    Simulate(SimulateArgs),
    /// Adaptive bit-by-bit phase estimation.
    Feedback(FeedbackArgs),
    /// Dephasing: delta_gamma versus per-shot time at fixed total time.
    Decohere(DecohereArgs),
    /// Closed forms against the dense Dicke-basis simulator.
    OracleCheck(OracleCheckArgs),
}

/// Flags that steer where output goes; never echoed.
#[derive(Debug, Clone, Default, Args)]
pub struct Io {
    /// JSON file with default values for any flag (keys are flag names).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct BoundArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    /// Interaction order k.
    #[arg(long)]
    pub k: Option<u32>,
    /// Number of constituents.
    #[arg(long)]
    pub n: Option<u64>,
    /// Single-body eigenvalues, comma separated [default: -0.5,0.5].
    #[arg(long, allow_hyphen_values = true)]
    pub levels: Option<RealList>,
    /// Evolution time per trial [default: 1].
    #[arg(long)]
    pub t: Option<Real>,
    /// Number of trials [default: 1].
    #[arg(long)]
    pub nu: Option<u64>,
    /// Sum over distinct k-tuples only.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub no_self_interaction: Option<bool>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SensitivityArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    /// Total spin J (rounded to the nearest half-integer).
    #[arg(long = "J")]
    #[serde(rename = "J")]
    pub j: Option<Real>,
    /// Preparation angle [default: pi/4].
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<Angle>,
    /// Measured component, x or y [default: y].
    #[arg(long)]
    pub axis: Option<Axis>,
    /// Phase value or range a:b / a:b:step [default: -pi/8:pi/8].
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<Grid>,
    /// Samples for an a:b range [default: 801].
    #[arg(long)]
    pub points: Option<usize>,
    /// Trials per estimate [default: 1].
    #[arg(long)]
    pub nu: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ScalingArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    /// Measured component, x or y [default: y].
    #[arg(long)]
    pub axis: Option<Axis>,
    /// beta value or range [default: pi/180:179pi/180:pi/180]. Ranges skip
    /// beta = pi/2 for y, where there is no signal.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<Grid>,
    /// Samples for an a:b beta range [default: 179].
    #[arg(long)]
    pub points: Option<usize>,
    /// J_lo:J_hi pairs [default: 1e3:1e5,1e5:1e7].
    #[arg(long)]
    pub pairs: Option<SpinPairs>,
    /// Operating phase: phi-zero, inverse-sqrt-2j or scaled-inverse-j:<c>
    /// [default: phi-zero for y, inverse-sqrt-2j for x].
    #[arg(long)]
    pub rule: Option<Rule>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentModel {
    Exact,
    Fringe,
    Gaussian,
    Oracle,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct MomentsArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    /// Total spin J.
    #[arg(long = "J")]
    #[serde(rename = "J")]
    pub j: Option<Real>,
    /// Preparation angle [default: pi/4].
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<Angle>,
    /// Phase value or range [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<Grid>,
    /// Samples for an a:b range [default: 101].
    #[arg(long)]
    pub points: Option<usize>,
    /// exact, fringe, gaussian or oracle [default: exact].
    #[arg(long, value_enum)]
    pub model: Option<MomentModel>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// Coherent state, J_z^2 evolution, J_x or J_y measurement.
    Spin,
    /// Superposition of extreme eigenvectors, two-outcome measurement.
    Cat,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    /// spin or cat [default: spin].
    #[arg(long, value_enum)]
    pub protocol: Option<Protocol>,
    /// Total spin J (spin protocol).
    #[arg(long = "J")]
    #[serde(rename = "J")]
    pub j: Option<Real>,
    /// Preparation angle [default: pi/4].
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<Angle>,
    /// True phase gamma t [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub phi_true: Option<Angle>,
    /// Phase at which the response is linearized [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub phi_operating: Option<Angle>,
    /// Measured component [default: y].
    #[arg(long)]
    pub axis: Option<Axis>,
    /// Dephasing strength Gamma t [default: 0].
    #[arg(long)]
    pub gamma_t: Option<Real>,
    /// exact, gaussian or auto [default: auto].
    #[arg(long)]
    pub sampling: Option<SamplingMode>,
    /// Semi-norm ||H|| (cat protocol).
    #[arg(long)]
    pub seminorm: Option<Real>,
    /// Coupling constant gamma (cat protocol).
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<Real>,
    /// Evolution time (cat protocol) [default: 1].
    #[arg(long)]
    pub t: Option<Real>,
    /// Measurements per batch [default: 1000].
    #[arg(long)]
    pub nu: Option<u64>,
    /// Independent batches [default: 100].
    #[arg(long)]
    pub batches: Option<u64>,
    /// RNG seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FeedbackArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    /// Safety factor [default: 8].
    #[arg(long)]
    pub f: Option<Real>,
    /// Measurements per step [default: 100].
    #[arg(long)]
    pub nu: Option<u64>,
    /// Number of bits [default: 10].
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub bits: Option<u32>,
    /// True phase [default: uniform on [-0.25, 0.25] drawn from the seed].
    #[arg(long, allow_hyphen_values = true)]
    pub phi_true: Option<Angle>,
    /// RNG seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Preparation angle [default: pi/4].
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<Angle>,
    /// exact, gaussian or auto [default: auto].
    #[arg(long)]
    pub sampling: Option<SamplingMode>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct DecohereArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    /// Total spin J.
    #[arg(long = "J")]
    #[serde(rename = "J")]
    pub j: Option<Real>,
    /// Preparation angle [default: pi/4].
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<Angle>,
    /// Dephasing time 1/Gamma [default: 1].
    #[arg(long, conflicts_with = "gamma_rate")]
    pub tau2: Option<Real>,
    /// Dephasing rate Gamma.
    #[arg(long)]
    pub gamma_rate: Option<Real>,
    /// Total time budget [default: 100].
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub total_time: Option<Real>,
    /// Per-shot times, value or range [default: 0.05 tau2 : 2 tau2 : 0.05 tau2].
    #[arg(long)]
    pub scan_t: Option<Grid>,
    /// Samples for an a:b range [default: 40].
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct OracleCheckArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
    /// Check every 2J from 1 to this value [default: 50].
    #[arg(long = "max-2J")]
    #[serde(rename = "max-2J")]
    pub max_two_j: Option<u64>,
    /// (beta, phi) grid size per axis [default: 16].
    #[arg(long)]
    pub grid: Option<usize>,
    /// Largest allowed relative deviation [default: 1e-10].
    #[arg(long)]
    pub tolerance: Option<Real>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Overlays the non-null flags on the config file's object.
fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> Result<T, Failure> {
    let mut map = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            match serde_json::from_str(&text) {
                Ok(Value::Object(m)) => m,
                Ok(_) => {
                    return Err(Failure::Usage(format!(
                        "{} must hold a JSON object",
                        path.display()
                    )))
                }
                Err(e) => return Err(Failure::Usage(format!("{}: {e}", path.display()))),
            }
        }
        None => Map::new(),
    };
    if let Value::Object(over) =
        serde_json::to_value(flags).map_err(|e| Failure::Usage(e.to_string()))?
    {
        map.extend(over.into_iter().filter(|(_, v)| !v.is_null()));
    }
    serde_json::from_value(Value::Object(map)).map_err(|e| Failure::Usage(format!("config: {e}")))
}

/// The resolved arguments as a JSON object without unset keys.
fn echo<T: Serialize>(resolved: &T) -> Value {
    match serde_json::to_value(resolved) {
        Ok(Value::Object(m)) => {
            Value::Object(m.into_iter().filter(|(_, v)| !v.is_null()).collect())
        }
        Ok(other) => other,
        Err(e) => Value::String(e.to_string()),
    }
}

/// Result of a subcommand: the report, its format and the exit code.
pub struct Outcome {
    pub report: Report,
    pub format: Format,
    pub exit_code: i32,
    /// Messages for standard error only (not part of the output file).
    pub notices: Vec<String>,
}

fn dispatch(command: Command) -> Result<(Outcome, Option<PathBuf>), Failure> {
    macro_rules! go {
        ($args:expr, $run:path) => {{
            let output = $args.io.output.clone();
            let merged = merge(&$args, $args.io.config.as_deref())?;
            Ok(($run(merged)?, output))
        }};
    }
    match command {
        Command::Bound(a) => go!(a, commands::bound),
        Command::Sensitivity(a) => go!(a, commands::sensitivity),
        Command::Scaling(a) => go!(a, commands::scaling),
        Command::Moments(a) => go!(a, commands::moments),
        Command::Simulate(a) => go!(a, commands::simulate),
        Command::Feedback(a) => go!(a, commands::feedback),
        Command::Decohere(a) => go!(a, commands::decohere),
        Command::OracleCheck(a) => go!(a, commands::oracle_check),
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// writes its output. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok((outcome, path)) => {
            let text = outcome.report.render(outcome.format);
            let written = match path {
                Some(p) => std::fs::write(&p, text)
                    .map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(m) = written {
                let _ = writeln!(stderr, "error: {m}");
                return EXIT_USAGE;
            }
            for n in &outcome.notices {
                let _ = writeln!(stderr, "note: {n}");
            }
            for w in &outcome.report.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            outcome.exit_code
        }
        Err(f) => {
            let _ = writeln!(stderr, "{f}");
            f.code()
        }
    }
}
