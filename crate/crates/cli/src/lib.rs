//! `devbound`: deviation bounds, weight-regime checks, brute-force
//! verification and tightness fuzzing over `value,weight` CSV files.
//!
//! Exit codes: 0 on success, 1 when a verified inequality fails, 2 for bad
//! input or flags.

pub mod input;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use devbound_core::bounds::{self, BoundReport, Chain, ModulusGapReport, ProfilePoint};
use devbound_core::classes::{
    self, GridConfig, ModulusPropertyReport, SuperquadraticCertificate, UniformConvexityReport,
    Verdict,
};
use devbound_core::oracle::{
    self, FuzzConfig, FuzzReport, ValueDistribution, VerificationReport, Witness,
};
use devbound_core::regimes::{self, Regime, RegimeReport, SplitAdmissibility};
use devbound_core::{Error, Tolerances, WeightedSample, Window};
use serde::Serialize;

use crate::input::InputSummary;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOLERANCE_ENV: &str = "DEVBOUND_TOLERANCE";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "devbound",
    version,
    about = "Certified bounds on deviations from a weighted mean"
)]
pub struct Cli {
    #[command(flatten)]
    pub tolerances: ToleranceArgs,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ToleranceArgs {
    /// Allowed |Σt − 1|.
    #[arg(long, global = true)]
    pub eps_sum: Option<f64>,
    /// Relative inequality slack; also read from DEVBOUND_TOLERANCE.
    #[arg(long, global = true)]
    pub eps_rel: Option<f64>,
    /// Absolute inequality slack.
    #[arg(long, global = true)]
    pub eps_abs: Option<f64>,
}

impl ToleranceArgs {
    /// Flags win over the environment, which wins over defaults.
    pub fn resolve(&self, env_rel: Option<&str>) -> Result<Tolerances, CliError> {
        let defaults = Tolerances::default();
        let env_rel = env_rel
            .map(|text| {
                text.trim().parse::<f64>().map_err(|_| {
                    CliError::Input(format!("{TOLERANCE_ENV}=`{text}` is not a number"))
                })
            })
            .transpose()?;
        Ok(Tolerances::new(
            self.eps_sum.unwrap_or(defaults.eps_sum),
            self.eps_rel.or(env_rel).unwrap_or(defaults.eps_ineq_rel),
            self.eps_abs.unwrap_or(defaults.eps_ineq_abs),
        )?)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one family of bounds for a dataset.
    Bound(BoundArgs),
    /// Check every applicable bound against brute-force left-hand sides.
    Verify(VerifyArgs),
    /// Seeded search for near-equality cases and violations.
    Fuzz(FuzzArgs),
    /// Report the weight regime and admissible split indices.
    CheckWeights(CheckWeightsArgs),
    /// Grid-check a registered function or modulus for a class property.
    CheckFunction(CheckFunctionArgs),
}

/// Bound family; the numbers 1 to 7 are accepted as aliases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFamily {
    Samuelson,
    WeightedPower,
    Profile,
    UniformConvex,
    Modulus,
    Window,
    PrefixSplit,
}

impl FromStr for BoundFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "1" | "samuelson" => Self::Samuelson,
            "2" | "weighted-power" => Self::WeightedPower,
            "3" | "profile" => Self::Profile,
            "4" | "uniform-convex" => Self::UniformConvex,
            "5" | "modulus" => Self::Modulus,
            "6" | "window" => Self::Window,
            "7" | "prefix-split" => Self::PrefixSplit,
            other => {
                return Err(format!(
                    "unknown bound `{other}` (expected 1-7 or samuelson, weighted-power, profile, uniform-convex, modulus, window, prefix-split)"
                ))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowSpec {
    All,
    Single { k: usize, j: usize },
}

impl FromStr for WindowSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(Self::All);
        }
        let (k, j) = s
            .split_once(':')
            .ok_or_else(|| format!("window `{s}` is not `k:j` or `all`"))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("window `{s}`: `{t}` is not an index"))
        };
        Ok(Self::Single {
            k: parse(k)?,
            j: parse(j)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitSpec {
    Auto,
    Index(usize),
}

impl FromStr for SplitSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        s.parse()
            .map(Self::Index)
            .map_err(|_| format!("split `{s}` is not an index or `auto`"))
    }
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Bound family, by name or number 1-7.
    #[arg(long, visible_alias = "theorem")]
    pub bound: BoundFamily,
    /// Half-exponents r >= 1 for window, prefix and profile bounds.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub r: Vec<f64>,
    /// Exponent p for the weighted-power and uniformly convex bounds.
    #[arg(long)]
    pub p: Option<f64>,
    /// Window `k:j` (1-based, inclusive) or `all`.
    #[arg(long, default_value = "all")]
    pub window: WindowSpec,
    /// Split index or `auto` for every admissible one.
    #[arg(long, default_value = "auto")]
    pub k: SplitSpec,
    #[arg(long, default_value = "raw_moment")]
    pub chain: Chain,
    /// Registered function, e.g. `power:3` or `example1_exp`.
    #[arg(long)]
    pub function: Option<String>,
    /// Registered modulus, e.g. `power:2`.
    #[arg(long)]
    pub modulus: Option<String>,
    /// Modulus constant m in m·x^p.
    #[arg(long)]
    pub m: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// CSV file, or a witness JSON file written by `fuzz`.
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to 1,2 for CSV input and to the witness's r otherwise.
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Equal,
    Simplex,
    Steffensen,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Equal => Regime::Equal,
            RegimeArg::Simplex => Regime::Simplex,
            RegimeArg::Steffensen => Regime::Steffensen,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistributionArg {
    Uniform,
    #[value(name = "heavy_tail", alias = "heavy-tail")]
    HeavyTail,
    Clustered,
}

impl From<DistributionArg> for ValueDistribution {
    fn from(d: DistributionArg) -> Self {
        match d {
            DistributionArg::Uniform => ValueDistribution::Uniform,
            DistributionArg::HeavyTail => ValueDistribution::HeavyTail,
            DistributionArg::Clustered => ValueDistribution::Clustered,
        }
    }
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, value_enum, default_value = "simplex")]
    pub regime: RegimeArg,
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    pub r: Vec<f64>,
    #[arg(long, value_enum, default_value = "uniform")]
    pub distribution: DistributionArg,
    /// Hill-climbing rounds per trial.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    /// Write the first violation, or the tightest case if none, as a witness file.
    #[arg(long)]
    pub witness_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckWeightsArgs {
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionClass {
    Superquadratic,
    UniformConvex,
    Modulus,
}

#[derive(Debug, Args)]
pub struct CheckFunctionArgs {
    /// Registered function or modulus name.
    pub name: String,
    #[arg(long, value_enum)]
    pub class: FunctionClass,
    /// Modulus for `uniform-convex`; defaults to the function's declared one.
    #[arg(long)]
    pub modulus: Option<String>,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Grid extent for domains unbounded above.
    #[arg(long, default_value_t = 10.0)]
    pub span: f64,
    /// Per-test violation tolerance, scaled by 1 + |value|.
    #[arg(long, default_value_t = 1e-8)]
    pub grid_tolerance: f64,
}

/// A finished command: the JSON document and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub json: String,
    pub exit_code: i32,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum BoundEntry {
    Plain(BoundReport),
    Modulus(ModulusGapReport),
    Profile { r: f64, points: Vec<ProfilePoint> },
}

#[derive(Debug, Serialize)]
struct BoundOutput {
    schema_version: u32,
    command: &'static str,
    input: InputSummary,
    regime: Option<Regime>,
    tolerances: Tolerances,
    bounds: Vec<BoundEntry>,
}

#[derive(Debug, Serialize)]
struct VerifyOutput {
    schema_version: u32,
    command: &'static str,
    input: InputSummary,
    tolerances: Tolerances,
    verification: VerificationReport,
}

#[derive(Debug, Serialize)]
struct FuzzOutput {
    schema_version: u32,
    command: &'static str,
    report: FuzzReport,
}

#[derive(Debug, Serialize)]
struct WeightsOutput {
    schema_version: u32,
    command: &'static str,
    input: InputSummary,
    regime: Option<Regime>,
    equal: bool,
    positive_simplex: bool,
    steffensen: bool,
    admissible_k: Vec<usize>,
    splits: Vec<SplitAdmissibility>,
    steffensen_report: RegimeReport,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum ClassDetail {
    Superquadratic(SuperquadraticCertificate),
    UniformConvex(UniformConvexityReport),
    Modulus(ModulusPropertyReport),
}

#[derive(Debug, Serialize)]
struct FunctionOutput {
    schema_version: u32,
    command: &'static str,
    name: String,
    class: &'static str,
    verdict: Verdict,
    grid: GridConfig,
    detail: ClassDetail,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn check_r_values(r: &[f64]) -> Result<(), CliError> {
    match r.iter().find(|r| !(**r >= 1.0 && r.is_finite())) {
        Some(bad) => Err(CliError::Input(format!(
            "--r values must be at least 1, got {bad}"
        ))),
        None => Ok(()),
    }
}

fn registered(name: &str) -> Result<classes::RegisteredFunction, CliError> {
    Ok(classes::function_from_name(name)?)
}

fn run_bound(args: &BoundArgs, tol: &Tolerances) -> Result<Outcome, CliError> {
    let data = input::load(&args.input)?;
    let sample = data.sample(tol.eps_sum)?;
    check_r_values(&args.r)?;
    let mut entries = Vec::new();

    match args.bound {
        BoundFamily::Samuelson => {
            entries.push(BoundEntry::Plain(bounds::samuelson_bound(&sample, tol)?))
        }
        BoundFamily::WeightedPower => {
            let p = args.p.unwrap_or(2.0);
            entries.push(BoundEntry::Plain(bounds::weighted_power_bound(
                &sample, p, tol,
            )?));
        }
        BoundFamily::Profile => {
            for &r in &args.r {
                let points = bounds::prefix_means_profile(&sample, r, tol)?;
                entries.push(BoundEntry::Profile { r, points });
            }
        }
        BoundFamily::UniformConvex => {
            let default_name = format!("power:{}", args.p.unwrap_or(2.0));
            let reg = registered(args.function.as_deref().unwrap_or(&default_name))?;
            let declared = match reg.declared_modulus.as_ref().map(|m| &m.form) {
                Some(classes::ModulusForm::Power { m, p }) => Some((*m, *p)),
                _ => None,
            };
            let m = args.m.or(declared.map(|d| d.0)).unwrap_or(1.0);
            let p = args.p.or(declared.map(|d| d.1)).unwrap_or(2.0);
            let pair = bounds::uniform_convex_gap_bound(&sample, &reg.function, m, p, tol)?;
            entries.push(BoundEntry::Plain(pair.moment));
            entries.push(BoundEntry::Plain(pair.gap));
        }
        BoundFamily::Modulus => {
            let reg = registered(args.function.as_deref().unwrap_or("power:2"))?;
            let phi = match (&args.modulus, reg.declared_modulus) {
                (Some(name), _) => classes::modulus_from_name(name)?,
                (None, Some(declared)) => declared,
                (None, None) => {
                    return Err(CliError::Input(format!(
                        "{} has no declared modulus; pass --modulus",
                        reg.function.label()
                    )))
                }
            };
            entries.push(BoundEntry::Modulus(bounds::modulus_gap_bound(
                &sample,
                &reg.function,
                &phi,
                tol,
            )?));
        }
        BoundFamily::Window => {
            let reg = match (&args.function, args.chain) {
                (Some(name), _) => Some(registered(name)?),
                (None, Chain::FunctionGap) => {
                    return Err(CliError::Input(
                        "--chain function_gap needs --function".into(),
                    ))
                }
                (None, _) => None,
            };
            let f = reg.as_ref().map(|r| &r.function);
            let windows: Vec<Window> = match args.window {
                WindowSpec::All => Window::all(sample.len()).collect(),
                WindowSpec::Single { k, j } => vec![Window::new(k, j, sample.len())?],
            };
            for &r in &args.r {
                for &w in &windows {
                    entries.push(BoundEntry::Plain(bounds::window_bound(
                        &sample, w, r, args.chain, f, tol,
                    )?));
                }
            }
        }
        BoundFamily::PrefixSplit => {
            let ks = match args.k {
                SplitSpec::Index(k) => vec![k],
                SplitSpec::Auto => {
                    let ks = regimes::admissible_ks(sample.weights(), tol);
                    if ks.is_empty() {
                        return Err(CliError::Input(
                            "no admissible split index for these weights".into(),
                        ));
                    }
                    ks
                }
            };
            for &r in &args.r {
                for &k in &ks {
                    entries.push(BoundEntry::Plain(bounds::js_prefix_bound(
                        &sample, k, r, tol,
                    )?));
                }
            }
        }
    }

    Ok(Outcome {
        json: to_json(&BoundOutput {
            schema_version: SCHEMA_VERSION,
            command: "bound",
            input: data.summary(),
            regime: regimes::detect_regime(sample.weights(), tol),
            tolerances: *tol,
            bounds: entries,
        }),
        exit_code: 0,
    })
}

fn run_verify(args: &VerifyArgs, tol: &Tolerances) -> Result<Outcome, CliError> {
    let data = input::load(&args.input)?;
    let sample = data.sample(tol.eps_sum)?;
    let r_set = match (&args.r, &data.witness) {
        (Some(r), _) => r.clone(),
        (None, Some(w)) => vec![w.r],
        (None, None) => vec![1.0, 2.0],
    };
    check_r_values(&r_set)?;
    let verification = oracle::verify_dataset(&sample, &r_set, tol)?;
    let exit_code = if verification.all_pass { 0 } else { 1 };
    Ok(Outcome {
        json: to_json(&VerifyOutput {
            schema_version: SCHEMA_VERSION,
            command: "verify",
            input: data.summary(),
            tolerances: *tol,
            verification,
        }),
        exit_code,
    })
}

fn write_witness(path: &Path, witness: &Witness) -> Result<(), CliError> {
    fs::write(path, to_json(witness))
        .map_err(|e| CliError::Input(format!("cannot write witness to {}: {e}", path.display())))
}

fn run_fuzz(args: &FuzzArgs, tol: &Tolerances) -> Result<Outcome, CliError> {
    let config = FuzzConfig {
        master_seed: args.seed,
        trials: args.trials,
        n_range: (args.n_min, args.n_max),
        r_set: args.r.clone(),
        regime: args.regime.into(),
        value_distribution: args.distribution.into(),
        hill_climb_steps: args.steps,
        tolerances: *tol,
    };
    let report = oracle::fuzz_tightness(&config)?;
    if let Some(path) = &args.witness_out {
        let chosen = report
            .violations
            .first()
            .map(|v| &v.witness)
            .or(report.tightest_witness.as_ref());
        if let Some(witness) = chosen {
            write_witness(path, witness)?;
        }
    }
    let exit_code = if report.violations.is_empty() { 0 } else { 1 };
    Ok(Outcome {
        json: to_json(&FuzzOutput {
            schema_version: SCHEMA_VERSION,
            command: "fuzz",
            report,
        }),
        exit_code,
    })
}

fn run_check_weights(args: &CheckWeightsArgs, tol: &Tolerances) -> Result<Outcome, CliError> {
    let data = input::load(&args.input)?;
    let sample: WeightedSample = data.sample(tol.eps_sum)?;
    let weights = sample.weights();
    let steffensen_report = regimes::validate_steffensen(weights, tol);
    let splits = regimes::admissible_split_indices(weights, tol);
    Ok(Outcome {
        json: to_json(&WeightsOutput {
            schema_version: SCHEMA_VERSION,
            command: "check-weights",
            input: data.summary(),
            regime: regimes::detect_regime(weights, tol),
            equal: regimes::is_equal_weights(weights, tol),
            positive_simplex: steffensen_report.is_positive_simplex,
            steffensen: steffensen_report.is_steffensen,
            admissible_k: splits.iter().filter(|s| s.holds).map(|s| s.k).collect(),
            splits,
            steffensen_report,
        }),
        exit_code: 0,
    })
}

fn run_check_function(args: &CheckFunctionArgs) -> Result<Outcome, CliError> {
    let grid = GridConfig {
        grid_size: args.grid,
        span: args.span,
        tolerance: args.grid_tolerance,
    };
    let (class, verdict, detail) = match args.class {
        FunctionClass::Superquadratic => {
            let cert = classes::check_superquadratic(&registered(&args.name)?.function, &grid)?;
            (
                "superquadratic",
                cert.verdict,
                ClassDetail::Superquadratic(cert),
            )
        }
        FunctionClass::UniformConvex => {
            let reg = registered(&args.name)?;
            let phi = match (&args.modulus, reg.declared_modulus) {
                (Some(name), _) => classes::modulus_from_name(name)?,
                (None, Some(declared)) => declared,
                (None, None) => {
                    return Err(CliError::Input(format!(
                        "{} has no declared modulus; pass --modulus",
                        args.name
                    )))
                }
            };
            let report = classes::check_uniform_convexity(&reg.function, &phi, &grid)?;
            (
                "uniform_convex",
                report.verdict,
                ClassDetail::UniformConvex(report),
            )
        }
        FunctionClass::Modulus => {
            let phi = classes::modulus_from_name(&args.name)?;
            let report = classes::check_modulus_properties(&phi, &grid)?;
            let verdict = if report.witnesses.is_empty() {
                Verdict::NoViolationFound
            } else {
                Verdict::Violated
            };
            ("modulus", verdict, ClassDetail::Modulus(report))
        }
    };
    Ok(Outcome {
        json: to_json(&FunctionOutput {
            schema_version: SCHEMA_VERSION,
            command: "check-function",
            name: args.name.clone(),
            class,
            verdict,
            grid,
            detail,
        }),
        exit_code: 0,
    })
}

/// Runs a parsed command. `env_tolerance` is the value of `DEVBOUND_TOLERANCE`.
pub fn execute(cli: &Cli, env_tolerance: Option<&str>) -> Result<Outcome, CliError> {
    let tol = cli.tolerances.resolve(env_tolerance)?;
    let outcome = match &cli.command {
        Command::Bound(args) => run_bound(args, &tol)?,
        Command::Verify(args) => run_verify(args, &tol)?,
        Command::Fuzz(args) => run_fuzz(args, &tol)?,
        Command::CheckWeights(args) => run_check_weights(args, &tol)?,
        Command::CheckFunction(args) => run_check_function(args)?,
    };
    if let Some(path) = &cli.output {
        fs::write(path, &outcome.json)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(outcome)
}

/// Parses arguments, runs, prints, and returns the exit code (0, 1 or 2).
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let env_tolerance = std::env::var(TOLERANCE_ENV).ok();
    match execute(&cli, env_tolerance.as_deref()) {
        Ok(outcome) => {
            if cli.output.is_none() {
                print!("{}", outcome.json);
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
