//! Parameter sweeps over `(a, θ)` and the figure presets built on them.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::ThermalSpec;
use crate::cycle::{run_cycle_definite, CycleReport, Mode};
use crate::error::{check_unit_interval, Error, Result};
use crate::switch::{run_ico_cycle_engine, run_ico_cycle_refrigerator, run_incoherent_cycle, Branch};

/// Column header of every sweep CSV.
pub const CSV_HEADER: &str = "a,theta,beta_eps,branch,p,omega,q_hot,work,q_cold,merit,mode";

/// Per-axis resolution of the figure presets.
pub const FIGURE_GRID_N: usize = 201;

/// Which device the meters power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Device {
    EngineAccelerator,
    Refrigerator,
    Definite,
}

/// How the order of the two meters is controlled. `Coherent` runs both
/// post-selected branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Control {
    Definite,
    Incoherent,
    CoherentPlus,
    CoherentMinus,
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `n` evenly spaced points from `min` to `max`, both included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {n}")));
        }
        if !(min.is_finite() && max.is_finite() && min <= max) {
            return Err(Error::Config(format!(
                "grid bounds {min}:{max} are not an increasing range"
            )));
        }
        Ok(Self { min, max, n })
    }

    pub fn values(&self) -> Vec<f64> {
        let last = self.n - 1;
        (0..self.n)
            .map(|i| {
                if i == last {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / last as f64
                }
            })
            .collect()
    }
}

impl std::str::FromStr for GridSpec {
    type Err = Error;

    /// `min:max:n`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("grid '{s}' is not of the form min:max:n"));
        let [min, max, n] = parts.as_slice() else {
            return Err(bad());
        };
        let min: f64 = min.trim().parse().map_err(|_| bad())?;
        let max: f64 = max.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        Self::new(min, max, n)
    }
}

/// A swept parameter: one value or a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Value(f64),
    Grid(GridSpec),
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::Value(x) => vec![*x],
            Self::Grid(g) => g.values(),
        }
    }

    fn check(&self, name: &'static str, max: f64) -> Result<()> {
        let (lo, hi) = match self {
            Self::Value(x) => (*x, *x),
            Self::Grid(g) => {
                GridSpec::new(g.min, g.max, g.n)?;
                (g.min, g.max)
            }
        };
        for v in [lo, hi] {
            if !(v.is_finite() && (0.0..=max).contains(&v)) {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    min: 0.0,
                    max,
                });
            }
        }
        Ok(())
    }
}

/// Strength of meter B.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum MeterB {
    #[default]
    SameAsA,
    Value(f64),
}

impl std::str::FromStr for MeterB {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "same-as-a" {
            return Ok(Self::SameAsA);
        }
        s.parse()
            .map(Self::Value)
            .map_err(|_| Error::Config(format!("b must be a number or 'same-as-a', got '{s}'")))
    }
}

/// A fully resolved run: every field has a value and has been range-checked.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub beta_eps: f64,
    pub eps: f64,
    pub device: Device,
    pub control: Control,
    pub a: Axis,
    pub b: MeterB,
    pub theta: Axis,
    pub output_path: Option<std::path::PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.thermal()?;
        self.a.check("a", 1.0)?;
        self.theta.check("theta", PI)?;
        if let MeterB::Value(b) = self.b {
            check_unit_interval("b", b)?;
        }
        match (self.device, self.control) {
            (Device::Definite, Control::Definite) => Ok(()),
            (Device::Definite, c) => Err(Error::Config(format!(
                "the definite device has no order control (got {c:?})"
            ))),
            (Device::Refrigerator, Control::Incoherent) => Err(Error::Config(
                "the refrigerator is defined for definite or coherent control only".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn thermal(&self) -> Result<ThermalSpec> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::Config(format!("eps must be positive, got {}", self.eps)));
        }
        ThermalSpec::from_beta_eps(self.beta_eps, self.eps)
    }

    /// The post-selected branches one parameter point produces.
    fn branches(&self) -> Vec<Option<Branch>> {
        match self.control {
            Control::CoherentPlus => vec![Some(Branch::Plus)],
            Control::CoherentMinus => vec![Some(Branch::Minus)],
            Control::Coherent => Branch::BOTH.map(Some).to_vec(),
            Control::Definite | Control::Incoherent => vec![None],
        }
    }

    fn meter_b(&self, a: f64) -> f64 {
        match self.b {
            MeterB::SameAsA => a,
            MeterB::Value(b) => b,
        }
    }

    /// Runs the configured device once.
    pub fn run_point(&self, t: &ThermalSpec, a: f64, theta: f64, branch: Option<Branch>) -> Result<CycleReport> {
        match (self.device, self.control, branch) {
            (Device::Definite, ..) => run_cycle_definite(t, a, self.meter_b(a)),
            (Device::EngineAccelerator, Control::Definite, _) => run_cycle_definite(t, a, a),
            (Device::EngineAccelerator, Control::Incoherent, _) => run_incoherent_cycle(t, a, theta),
            (Device::EngineAccelerator, _, Some(br)) => run_ico_cycle_engine(t, a, theta, br),
            (Device::Refrigerator, Control::Definite, _) => run_cycle_definite(t, t.populations().0, self.meter_b(a)),
            (Device::Refrigerator, Control::Incoherent, _) => Err(Error::Config(
                "the refrigerator is defined for definite or coherent control only".into(),
            )),
            (Device::Refrigerator, _, Some(br)) => run_ico_cycle_refrigerator(t, a, theta, br),
            (_, _, None) => Err(Error::Config("coherent control needs a branch".into())),
        }
    }
}

/// One line of sweep output; energies in units of `ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub a: f64,
    pub theta: f64,
    pub beta_eps: f64,
    pub branch: String,
    pub p: Option<f64>,
    pub omega: Option<f64>,
    pub q_hot: f64,
    pub work: f64,
    pub q_cold: f64,
    pub merit: Option<f64>,
    pub mode: Mode,
}

impl SweepRow {
    fn from_report(cfg: &RunConfig, a: f64, theta: f64, branch: Option<Branch>, r: &CycleReport) -> Self {
        let label = match (branch, cfg.control) {
            (Some(b), _) => b.symbol().to_string(),
            (None, Control::Incoherent) => "inc".to_string(),
            (None, _) => "def".to_string(),
        };
        Self {
            a,
            theta,
            beta_eps: cfg.beta_eps,
            branch: label,
            p: r.branch_probability,
            omega: r.omega,
            q_hot: r.q_hot / cfg.eps,
            work: r.work / cfg.eps,
            q_cold: r.q_cold / cfg.eps,
            merit: r.merit,
            mode: r.mode,
        }
    }

    /// One CSV line without the terminator.
    pub fn to_csv(&self) -> String {
        fn opt(x: Option<f64>) -> String {
            x.map(|v| v.to_string()).unwrap_or_default()
        }
        let mut s = String::with_capacity(160);
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.a,
            self.theta,
            self.beta_eps,
            self.branch,
            opt(self.p),
            opt(self.omega),
            self.q_hot,
            self.work,
            self.q_cold,
            opt(self.merit),
            self.mode
        );
        s
    }
}

/// Evaluates every grid point, `a` outermost, then `θ`, then branch, on at
/// most `jobs` worker threads (`0` lets the pool decide).
pub fn run_sweep(cfg: &RunConfig, jobs: usize) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let t = cfg.thermal()?;
    let thetas = cfg.theta.values();
    let branches = cfg.branches();
    let mut points = Vec::new();
    for a in cfg.a.values() {
        for &theta in &thetas {
            for &br in &branches {
                points.push((a, theta, br));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Internal(format!("worker pool: {e}")))?;
    pool.install(|| {
        points
            .par_iter()
            .map(|&(a, theta, br)| {
                let report = cfg.run_point(&t, a, theta, br)?;
                Ok(SweepRow::from_report(cfg, a, theta, br, &report))
            })
            .collect()
    })
}

pub fn write_csv(rows: &[SweepRow], out: &mut dyn Write) -> Result<()> {
    let mut buf = String::with_capacity(rows.len() * 160 + CSV_HEADER.len() + 1);
    buf.push_str(CSV_HEADER);
    buf.push('\n');
    for r in rows {
        buf.push_str(&r.to_csv());
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

pub fn write_json(rows: &[SweepRow], out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, rows)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_rows(rows: &[SweepRow], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => write_json(rows, out),
    }
}

/// Figure presets; each is a 201×201 sweep over `a ∈ [0, 1]`, `θ ∈ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    /// Minus-branch probability surface.
    Fig4,
    /// Coherent heat and work, both branches.
    Fig6,
    /// Coherent efficiency and accelerator COP, both branches.
    Fig7,
    /// Coherent refrigerator COP, both branches, βε = 0.45.
    Fig8,
    /// Incoherent heat, work, efficiency and COP.
    Fig9,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fig4 => "fig4",
            Self::Fig6 => "fig6",
            Self::Fig7 => "fig7",
            Self::Fig8 => "fig8",
            Self::Fig9 => "fig9",
        }
    }

    pub fn config(self) -> RunConfig {
        let (device, control, beta_eps) = match self {
            Self::Fig4 => (Device::EngineAccelerator, Control::CoherentMinus, 1.39),
            Self::Fig6 | Self::Fig7 => (Device::EngineAccelerator, Control::Coherent, 1.39),
            Self::Fig8 => (Device::Refrigerator, Control::Coherent, 0.45),
            Self::Fig9 => (Device::EngineAccelerator, Control::Incoherent, 1.39),
        };
        RunConfig {
            beta_eps,
            eps: 1.0,
            device,
            control,
            a: Axis::Grid(GridSpec {
                min: 0.0,
                max: 1.0,
                n: FIGURE_GRID_N,
            }),
            b: MeterB::SameAsA,
            theta: Axis::Grid(GridSpec {
                min: 0.0,
                max: PI,
                n: FIGURE_GRID_N,
            }),
            output_path: None,
            format: Format::Csv,
        }
    }

    /// Columns the figure plots, by header name.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Self::Fig4 => &["p"],
            Self::Fig6 => &["q_hot", "work"],
            Self::Fig7 | Self::Fig8 => &["merit"],
            Self::Fig9 => &["q_hot", "work", "merit"],
        }
    }
}

/// A gnuplot script drawing `columns` of `csv_path` as `(a, θ)` heat maps,
/// one panel per column and branch.
pub fn plot_script(csv_path: &str, columns: &[&str], branches: &[&str]) -> String {
    let header: Vec<&str> = CSV_HEADER.split(',').collect();
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set view map\nset pm3d at b\nunset surface\n");
    s.push_str("set xlabel 'a'\nset ylabel 'theta'\n");
    let panels = columns.len() * branches.len();
    if panels > 1 {
        let _ = writeln!(s, "set multiplot layout 1,{panels}");
    }
    for col in columns {
        let Some(idx) = header.iter().position(|h| h == col) else {
            continue;
        };
        for br in branches {
            let _ = writeln!(
                s,
                "set title '{col} ({br})'\nsplot '{csv_path}' every ::1 using 1:2:(strcol(4) eq '{br}' ? ${} : 1/0) notitle",
                idx + 1
            );
        }
    }
    if panels > 1 {
        s.push_str("unset multiplot\n");
    }
    s
}

/// Branch labels a configuration writes.
pub fn branch_labels(cfg: &RunConfig) -> Vec<&'static str> {
    match cfg.control {
        Control::CoherentPlus => vec!["+"],
        Control::CoherentMinus => vec!["-"],
        Control::Coherent => vec!["+", "-"],
        Control::Incoherent => vec!["inc"],
        Control::Definite => vec!["def"],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(device: Device, control: Control, a: f64, theta: f64) -> RunConfig {
        RunConfig {
            beta_eps: 1.39,
            eps: 1.0,
            device,
            control,
            a: Axis::Value(a),
            b: MeterB::SameAsA,
            theta: Axis::Value(theta),
            output_path: None,
            format: Format::Csv,
        }
    }

    #[test]
    fn grid_parsing() {
        let g: GridSpec = "0:1:5".parse().unwrap();
        assert_eq!(g.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!("0:1:1".parse::<GridSpec>().is_err());
        assert!("1:0:3".parse::<GridSpec>().is_err());
        assert!("0:1".parse::<GridSpec>().is_err());
        assert_eq!(GridSpec::new(0.0, PI, 201).unwrap().values()[200], PI);
    }

    #[test]
    fn meter_b_parsing() {
        assert_eq!("same-as-a".parse::<MeterB>().unwrap(), MeterB::SameAsA);
        assert_eq!("0.9".parse::<MeterB>().unwrap(), MeterB::Value(0.9));
        assert!("x".parse::<MeterB>().is_err());
    }

    #[test]
    fn validation_rejects_bad_combinations() {
        assert!(scalar(Device::Definite, Control::CoherentMinus, 0.5, 0.0)
            .validate()
            .is_err());
        assert!(scalar(Device::Refrigerator, Control::Incoherent, 0.5, 0.0)
            .validate()
            .is_err());
        assert!(scalar(Device::EngineAccelerator, Control::Definite, 1.5, 0.0)
            .validate()
            .is_err());
        assert!(scalar(Device::EngineAccelerator, Control::Definite, 0.5, 4.0)
            .validate()
            .is_err());
    }

    #[test]
    fn branch_is_innermost() {
        let mut cfg = scalar(Device::EngineAccelerator, Control::Coherent, 0.5, 0.0);
        cfg.a = Axis::Grid(GridSpec::new(0.4, 0.6, 2).unwrap());
        cfg.theta = Axis::Grid(GridSpec::new(0.0, 1.0, 3).unwrap());
        let rows = run_sweep(&cfg, 2).unwrap();
        assert_eq!(rows.len(), 12);
        let keys: Vec<_> = rows.iter().map(|r| (r.a, r.theta, r.branch.as_str())).collect();
        assert_eq!(keys[0], (0.4, 0.0, "+"));
        assert_eq!(keys[1], (0.4, 0.0, "-"));
        assert_eq!(keys[2], (0.4, 0.5, "+"));
        assert_eq!(keys[6], (0.6, 0.0, "+"));
    }

    #[test]
    fn csv_line_leaves_absent_fields_empty() {
        let cfg = scalar(Device::Definite, Control::Definite, 0.2, 0.0);
        let mut cfg = cfg;
        cfg.b = MeterB::Value(0.9);
        let rows = run_sweep(&cfg, 1).unwrap();
        let line = rows[0].to_csv();
        assert!(line.starts_with("0.2,0,1.39,def,,,"), "{line}");
        assert!(line.ends_with(",,OutOfRegime"), "{line}");
    }

    #[test]
    fn energies_in_units_of_eps() {
        let mut cfg = scalar(Device::EngineAccelerator, Control::Definite, 0.7, 0.0);
        let unit = run_sweep(&cfg, 1).unwrap();
        cfg.eps = 2.5;
        let scaled = run_sweep(&cfg, 1).unwrap();
        assert!((unit[0].work - scaled[0].work).abs() < 1e-14);
        assert!((unit[0].q_hot - scaled[0].q_hot).abs() < 1e-14);
    }

    #[test]
    fn plot_script_references_columns() {
        let s = plot_script("fig6.csv", Figure::Fig6.columns(), &["+", "-"]);
        assert!(s.contains("'fig6.csv'"));
        assert!(s.contains("$7"));
        assert!(s.contains("$8"));
        assert!(s.contains("multiplot layout 1,4"));
    }
}
