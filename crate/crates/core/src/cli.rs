//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a simulation disagreed with a closed form, 2 bad
//! usage or configuration (including unwritable output paths).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::channels::ThermalSpec;
use crate::error::{Error, Result};
use crate::sweep::{
    branch_labels, plot_script, run_sweep, write_rows, Axis, Control, Device, Figure, Format, GridSpec, MeterB,
    RunConfig,
};
use crate::verify::{verify_equations, verify_no_work_from_equilibrium, VerifyReport, DEFAULT_GRID_N};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// βε values at which the no-work-from-equilibrium check runs.
const EQUILIBRIUM_BETA_EPS: [f64; 4] = [0.05, 0.45, 1.39, 3.0];

#[derive(Debug, Parser)]
#[command(
    name = "ico-thermal",
    version,
    about = "Measurement-powered qubit thermal devices with indefinite causal order"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one cycle and print its report as JSON.
    Cycle(RunArgs),
    /// Sweep a grid over a and theta, writing one row per point and branch.
    Sweep(RunArgs),
    /// Regenerate the data behind a figure (201x201 grid over a in [0,1], theta in [0,pi]).
    Figure(FigureArgs),
    /// Check every closed form against the brute-force simulation.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Also write a gnuplot script next to the output file.
    #[arg(long)]
    emit_plot_script: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON file with flat RunConfig keys; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cold-bath inverse temperature times the level splitting.
    #[arg(long, allow_negative_numbers = true)]
    beta_eps: Option<f64>,
    /// Level splitting; reported energies scale with it (default 1).
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    /// Default engine-accelerator.
    #[arg(long, value_enum)]
    device: Option<Device>,
    /// Order control; `coherent` runs both branches (default definite).
    #[arg(long, value_enum)]
    control: Option<Control>,
    /// Strength of meter A, in [0, 1].
    #[arg(long, allow_negative_numbers = true, conflicts_with = "grid_a")]
    a: Option<f64>,
    /// A number, or "same-as-a".
    #[arg(long, allow_negative_numbers = true)]
    b: Option<String>,
    /// Controller angle in radians.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["theta_deg", "grid_theta"])]
    theta: Option<f64>,
    /// Controller angle in degrees.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "grid_theta")]
    theta_deg: Option<f64>,
    /// min:max:n
    #[arg(long)]
    grid_a: Option<String>,
    /// min:max:n, radians
    #[arg(long)]
    grid_theta: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct FigureArgs {
    #[arg(value_enum)]
    name: Figure,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of random parameter points.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// `b` as it may appear in a config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum MeterBValue {
    Number(f64),
    Text(String),
}

/// A config file; every key optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    beta_eps: Option<f64>,
    eps: Option<f64>,
    device: Option<Device>,
    control: Option<Control>,
    a: Option<Axis>,
    b: Option<MeterBValue>,
    theta: Option<Axis>,
    output_path: Option<PathBuf>,
    format: Option<Format>,
}

fn load_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("config {}: {e}", path.display())))
}

fn resolve(args: &RunArgs) -> Result<RunConfig> {
    let file = match &args.config {
        Some(p) => load_file(p)?,
        None => FileConfig::default(),
    };
    let beta_eps = args
        .beta_eps
        .or(file.beta_eps)
        .ok_or_else(|| Error::Config("beta_eps is required".into()))?;

    let a = match (&args.grid_a, args.a) {
        (Some(g), _) => Axis::Grid(g.parse::<GridSpec>()?),
        (None, Some(a)) => Axis::Value(a),
        (None, None) => file.a.ok_or_else(|| Error::Config("a is required".into()))?,
    };
    let theta = if let Some(g) = &args.grid_theta {
        Axis::Grid(g.parse::<GridSpec>()?)
    } else if let Some(deg) = args.theta_deg {
        Axis::Value(deg.to_radians())
    } else if let Some(th) = args.theta {
        Axis::Value(th)
    } else {
        file.theta.unwrap_or(Axis::Value(0.0))
    };
    let b = match (&args.b, file.b) {
        (Some(s), _) => s.parse()?,
        (None, Some(MeterBValue::Number(x))) => MeterB::Value(x),
        (None, Some(MeterBValue::Text(s))) => s.parse()?,
        (None, None) => MeterB::SameAsA,
    };

    let cfg = RunConfig {
        beta_eps,
        eps: args.eps.or(file.eps).unwrap_or(1.0),
        device: args.device.or(file.device).unwrap_or(Device::EngineAccelerator),
        control: args.control.or(file.control).unwrap_or(Control::Definite),
        a,
        b,
        theta,
        output_path: args.output.out.clone().or(file.output_path),
        format: args.output.format.or(file.format).unwrap_or_default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Exit code for a failed command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ClosedFormMismatch { .. }
        | Error::Internal(_)
        | Error::InvalidDensity { .. }
        | Error::IncompleteChannel { .. }
        | Error::NoConvergence { .. }
        | Error::NotHermitian { .. }
        | Error::SupportMismatch { .. }
        | Error::ZeroProbability { .. }
        | Error::DimensionMismatch { .. } => EXIT_VERIFY,
        Error::OutOfRange { .. } | Error::OutsideMode(_) | Error::Config(_) | Error::Io(_) | Error::Json(_) => {
            EXIT_USAGE
        }
    }
}

/// Exit code of the verify command.
pub fn verify_exit_code(report: &VerifyReport, equilibrium_ok: bool) -> i32 {
    if report.pass && equilibrium_ok {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}

fn open_output(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

/// Writes via `emit` to `path`, or to `stdout` when there is no path.
fn emit_to(path: Option<&Path>, stdout: &mut dyn Write, emit: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = open_output(p)?;
            emit(&mut f)?;
            f.flush()?;
            Ok(())
        }
        None => emit(stdout),
    }
}

fn cmd_cycle(args: &RunArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = resolve(args)?;
    let (Axis::Value(a), Axis::Value(theta)) = (cfg.a, cfg.theta) else {
        return Err(Error::Config(
            "cycle takes a single a and theta; use sweep for grids".into(),
        ));
    };
    let branch = match cfg.control {
        Control::CoherentPlus => Some(crate::switch::Branch::Plus),
        Control::CoherentMinus => Some(crate::switch::Branch::Minus),
        Control::Coherent => {
            return Err(Error::Config(
                "cycle needs one branch: coherent-plus or coherent-minus".into(),
            ));
        }
        _ => None,
    };
    let report = cfg.run_point(&cfg.thermal()?, a, theta, branch)?;
    emit_to(cfg.output_path.as_deref(), stdout, |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        w.write_all(b"\n")?;
        Ok(())
    })
}

fn script_path(out: &Path) -> PathBuf {
    out.with_extension("gp")
}

fn run_and_write(cfg: &RunConfig, output: &OutputArgs, columns: &[&str], stdout: &mut dyn Write) -> Result<()> {
    if output.emit_plot_script && (cfg.output_path.is_none() || cfg.format != Format::Csv) {
        return Err(Error::Config("--emit-plot-script needs --out with CSV output".into()));
    }
    let rows = run_sweep(cfg, output.jobs)?;
    emit_to(cfg.output_path.as_deref(), stdout, |w| write_rows(&rows, cfg.format, w))?;
    if let (true, Some(out)) = (output.emit_plot_script, &cfg.output_path) {
        let csv_name = out
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let script = plot_script(&csv_name, columns, &branch_labels(cfg));
        let mut f = open_output(&script_path(out))?;
        f.write_all(script.as_bytes())?;
        f.flush()?;
    }
    Ok(())
}

fn cmd_sweep(args: &RunArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = resolve(args)?;
    run_and_write(&cfg, &args.output, &["q_hot", "work", "merit"], stdout)
}

fn cmd_figure(args: &FigureArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut cfg = args.name.config();
    cfg.output_path = args.output.out.clone();
    cfg.format = args.output.format.unwrap_or_default();
    run_and_write(&cfg, &args.output, args.name.columns(), stdout)
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    if args.n == 0 {
        return Err(Error::Config("--n must be at least 1".into()));
    }
    let report = verify_equations(args.seed, args.n, DEFAULT_GRID_N);
    let mut equilibrium_ok = true;
    for be in EQUILIBRIUM_BETA_EPS {
        if !verify_no_work_from_equilibrium(&ThermalSpec::from_beta_eps(be, 1.0)?) {
            writeln!(stderr, "no-work-from-equilibrium check failed at beta_eps = {be}")?;
            equilibrium_ok = false;
        }
    }
    for id in report.failing() {
        writeln!(stderr, "closed form {id} exceeds the deviation threshold")?;
    }
    emit_to(args.out.as_deref(), stdout, |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        w.write_all(b"\n")?;
        Ok(())
    })?;
    Ok(verify_exit_code(&report, equilibrium_ok))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Cycle(a) => cmd_cycle(a, stdout).map(|_| EXIT_OK),
        Command::Sweep(a) => cmd_sweep(a, stdout).map(|_| EXIT_OK),
        Command::Figure(a) => cmd_figure(a, stdout).map(|_| EXIT_OK),
        Command::Verify(a) => cmd_verify(a, stdout, stderr),
    };
    let _ = stdout.flush();
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("ico-thermal").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn definite_engine_cycle() {
        let (code, out, _) = run_capture(&[
            "cycle",
            "--device",
            "definite",
            "--a",
            "0.7",
            "--b",
            "0.7",
            "--beta-eps",
            "1.39",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["mode"], "Engine");
        assert!((v["merit"].as_f64().unwrap() - 0.6234555404201229).abs() < 1e-12);
    }

    #[test]
    fn coherent_minus_cycle() {
        let (code, out, _) = run_capture(&[
            "cycle",
            "--control",
            "coherent-minus",
            "--a",
            "0.5",
            "--theta-deg",
            "90",
            "--beta-eps",
            "1.39",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["merit"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        assert!((v["expected_repeats"].as_f64().unwrap() - 1.0 / 0.375).abs() < 1e-12);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_capture(&["cycle", "--a", "1.5", "--beta-eps", "1.39"]).0, 2);
        assert_eq!(run_capture(&["cycle", "--a", "0.5"]).0, 2);
        assert_eq!(run_capture(&["figure", "fig5"]).0, 2);
        assert_eq!(run_capture(&["bogus"]).0, 2);
        assert_eq!(
            run_capture(&[
                "cycle",
                "--a",
                "0.5",
                "--beta-eps",
                "1",
                "--device",
                "refrigerator",
                "--control",
                "incoherent"
            ])
            .0,
            2
        );
        let (code, _, err) = run_capture(&["sweep", "--grid-a", "0:1:1", "--beta-eps", "1.39"]);
        assert_eq!(code, 2);
        assert!(err.contains("at least 2"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["figure", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("201x201"));
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(
            exit_code(&Error::ClosedFormMismatch {
                quantity: "U2",
                analytic: 0.0,
                simulated: 1.0
            }),
            1
        );
    }
}
