//! Command-line front end.
//!
//! Exit codes: 0 on success or a passed check, 1 when a Monte-Carlo check
//! fails, 2 on usage or validation errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{
    best_bound, closed_form_2_3, closed_form_min, corollary_bound, pin94_bound, theorem_bound, Lambdas,
    Pin94Config,
};
use crate::concentration::find_bt;
use crate::constants::ConstantSet;
use crate::error::Error;
use crate::gaussian::ratio_curve;
use crate::mc::{estimate_and_check, simulate, MartingaleModel, ModelKind, RealDistribution, VerifyConfig};
use crate::numfmt::{format_sig, round_json};
use crate::schedule::PQSchedule;
use crate::types::{BoundReport, MomentProfile, SmoothnessConstant, VarianceEnvelope};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "rosenthal", version, about = "Moment bounds for martingales in smooth Banach spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a bound for a moment profile read from JSON
    Bound {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Best)]
        method: MethodArg,
        /// Use the β-family schedule with this β instead of the file's schedule
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Print c_j, c̃_m, C_A, C_B (unit λ) and the re-centering constant C_t
    Constants {
        #[arg(long)]
        t: f64,
        #[arg(long = "D", default_value_t = 1.0)]
        d: f64,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Tabulate (t, E|Z|^t, (t−1)/E|Z|^t)
    RatioCurve {
        #[arg(long, default_value_t = 2.0)]
        t_min: f64,
        #[arg(long, default_value_t = 4.0)]
        t_max: f64,
        #[arg(long, default_value_t = 201)]
        steps: usize,
    },
    /// Simulate a martingale and check the main bound against it
    Verify {
        #[arg(long, value_enum, default_value_t = ModelArg::Rademacher)]
        model: ModelArg,
        /// Model JSON (overrides --model, --n, --p, --dim)
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        n: usize,
        /// Two-point mass for two_point, exponent for lp
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 3.0)]
        t: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        reps: usize,
        #[arg(long)]
        beta: Option<f64>,
        /// Also write every ‖S_n‖ of the norm stream to this CSV file
        #[arg(long)]
        norms_csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Theorem,
    Corollary,
    Closed,
    Best,
    Pin94,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Rademacher,
    Uniform,
    TwoPoint,
    Hilbert,
    Lp,
    Dependent,
}

/// Input file of the `bound` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundInput {
    pub profile: MomentProfile,
    pub envelope: VarianceEnvelope,
    #[serde(rename = "D")]
    pub d: SmoothnessConstant,
    #[serde(default)]
    pub schedule: PQSchedule,
    #[serde(default)]
    pub pin94: Pin94Config,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    CheckFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::CheckFailed) => EXIT_CHECK_FAILED,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let format = cli.format.unwrap_or(match cli.command {
        Command::RatioCurve { .. } => Format::Csv,
        _ => Format::Json,
    });
    let out = cli.output.as_deref();
    match &cli.command {
        Command::Bound { input, method, beta } => cmd_bound(input, *method, *beta, format, out),
        Command::Constants { t, d, beta } => cmd_constants(*t, *d, *beta, format, out),
        Command::RatioCurve { t_min, t_max, steps } => cmd_ratio_curve(*t_min, *t_max, *steps, format, out),
        Command::Verify { model, input, n, p, dim, t, seed, reps, beta, norms_csv } => {
            let model = match input {
                Some(path) => parse_json(path)?,
                None => builtin_model(*model, *n, *p, *dim)?,
            };
            cmd_verify(&model, *t, *seed, *reps, *beta, norms_csv.as_deref(), format, out)
        }
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn schedule_or(beta: Option<f64>, fallback: PQSchedule) -> CliResult<PQSchedule> {
    Ok(match beta {
        Some(b) => PQSchedule::beta(b)?,
        None => fallback,
    })
}

/// A built-in model with `n` unit steps. Defaults: two-point mass `0.1`,
/// Hilbert dimension 3, `ℓ_3^8`.
pub fn builtin_model(kind: ModelArg, n: usize, p: Option<f64>, dim: Option<usize>) -> crate::Result<MartingaleModel> {
    let kind = match kind {
        ModelArg::Rademacher => ModelKind::RademacherReal,
        ModelArg::Uniform => ModelKind::IidReal { distribution: RealDistribution::UniformSym },
        ModelArg::TwoPoint => {
            ModelKind::IidReal { distribution: RealDistribution::TwoPoint { p: p.unwrap_or(0.1) } }
        }
        ModelArg::Hilbert => ModelKind::HilbertIid { dim: dim.unwrap_or(3) },
        ModelArg::Lp => ModelKind::LpVector { p: p.unwrap_or(3.0), dim: dim.unwrap_or(8) },
        ModelArg::Dependent => ModelKind::DependentScaled,
    };
    if n == 0 {
        return Err(Error::Invalid("n must be >= 1".into()));
    }
    MartingaleModel::new(kind, vec![1.0; n])
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Failure::Usage(e.to_string()))?;
    round_json(&mut v);
    let mut text = serde_json::to_string_pretty(&v).map_err(|e| Failure::Usage(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Usage(e.to_string()))
}

fn report_row(r: &BoundReport) -> Vec<String> {
    vec![
        r.method.to_string(),
        format_sig(r.t),
        format_sig(r.value),
        opt(r.constants.c_a),
        opt(r.constants.c_b),
        opt(r.ratio_r),
    ]
}

fn cmd_bound(input: &Path, method: MethodArg, beta: Option<f64>, format: Format, out: Option<&Path>) -> CliResult<()> {
    let case: BoundInput = parse_json(input)?;
    for w in case.profile.warnings() {
        eprintln!("warning: {w}");
    }
    let schedule = schedule_or(beta, case.schedule.clone())?;
    let (profile, envelope, d) = (&case.profile, &case.envelope, case.d);
    let t = profile.t();
    let report = match method {
        MethodArg::Theorem => theorem_bound(profile, envelope, d, &schedule)?,
        MethodArg::Corollary => corollary_bound(profile, envelope, d, &schedule, &Lambdas::Optimize)?,
        MethodArg::Best => best_bound(profile, envelope, d, &schedule)?,
        MethodArg::Closed | MethodArg::Pin94 => {
            if profile.n() != envelope.n() {
                return Err(Failure::Usage(format!(
                    "profile has n = {} increments but envelope has {}",
                    profile.n(),
                    envelope.n()
                )));
            }
            let a_t = profile.partial_moment_sum(profile.n(), t)?;
            let b = envelope.total();
            match method {
                MethodArg::Pin94 => pin94_bound(t, d, a_t, b, &case.pin94)?,
                _ if t > 2.0 && t <= 3.0 => closed_form_2_3(t, d, a_t, b)?,
                _ if t > 3.0 && t <= 4.0 => closed_form_min(t, d, a_t, b)?,
                _ => return Err(Failure::Usage(format!("closed forms need t in (2, 4], got {t}"))),
            }
        }
    };
    let text = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => to_csv(&["method", "t", "value", "C_A", "C_B", "ratio_r"], [report_row(&report)])?,
    };
    emit(&text, out)
}

#[derive(Serialize)]
struct ConstantsOutput {
    #[serde(flatten)]
    set: ConstantSet,
    #[serde(rename = "C_t")]
    c_t: f64,
    b_t: f64,
}

fn cmd_constants(t: f64, d: f64, beta: Option<f64>, format: Format, out: Option<&Path>) -> CliResult<()> {
    let d = SmoothnessConstant::new(d)?;
    let schedule = schedule_or(beta, PQSchedule::default())?;
    let set = ConstantSet::unit_lambdas(t, d, &schedule)?;
    let recenter = find_bt(t)?;
    let output = ConstantsOutput { set, c_t: recenter.c_t, b_t: recenter.b_t };
    let text = match format {
        Format::Json => to_json(&output)?,
        Format::Csv => {
            let c = output.set.c.iter().map(|x| format_sig(*x)).collect::<Vec<_>>().join(";");
            to_csv(
                &["t", "D", "c", "c_tilde", "C_A", "C_B", "C_t", "b_t"],
                [vec![
                    format_sig(output.set.t),
                    format_sig(output.set.d),
                    c,
                    format_sig(output.set.c_tilde),
                    format_sig(output.set.c_a),
                    format_sig(output.set.c_b),
                    format_sig(output.c_t),
                    format_sig(output.b_t),
                ]],
            )?
        }
    };
    emit(&text, out)
}

fn cmd_ratio_curve(t_min: f64, t_max: f64, steps: usize, format: Format, out: Option<&Path>) -> CliResult<()> {
    let points = ratio_curve(t_min, t_max, steps)?;
    let text = match format {
        Format::Json => to_json(&points)?,
        Format::Csv => to_csv(
            &["t", "ez_t", "ratio"],
            points.iter().map(|p| vec![format_sig(p.t), format_sig(p.ez_t), format_sig(p.ratio)]),
        )?,
    };
    emit(&text, out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    model: &MartingaleModel,
    t: f64,
    seed: u64,
    reps: usize,
    beta: Option<f64>,
    norms_csv: Option<&Path>,
    format: Format,
    out: Option<&Path>,
) -> CliResult<()> {
    let schedule = schedule_or(beta, PQSchedule::default())?;
    let report = estimate_and_check(model, t, &schedule, VerifyConfig { seed, replications: reps })?;
    if let Some(path) = norms_csv {
        let norms = simulate(model, seed, reps)?;
        let text = to_csv(
            &["replication", "norm"],
            norms.iter().enumerate().map(|(r, x)| vec![r.to_string(), format_sig(*x)]),
        )?;
        fs::write(path, text)?;
    }
    let text = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => to_csv(
            &["t", "D", "estimate", "std_error", "bound", "slack", "replications", "seed", "passed"],
            [vec![
                format_sig(report.t),
                format_sig(report.d),
                format_sig(report.estimate),
                format_sig(report.std_error),
                format_sig(report.bound.value),
                opt(report.slack),
                report.replications.to_string(),
                report.seed.to_string(),
                report.passed.to_string(),
            ]],
        )?,
    };
    emit(&text, out)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::CheckFailed)
    }
}
