//! Sweeps a small (a, theta) grid and writes CSV to standard output, then
//! summarizes the fig4 probability surface.

use ico_thermal::sweep::{run_sweep, write_csv, Axis, Control, Device, Figure, Format, GridSpec, MeterB, RunConfig};

fn main() -> ico_thermal::Result<()> {
    let cfg = RunConfig {
        beta_eps: 1.39,
        eps: 1.0,
        device: Device::EngineAccelerator,
        control: Control::Coherent,
        a: Axis::Grid(GridSpec::new(0.3, 0.7, 3)?),
        b: MeterB::SameAsA,
        theta: Axis::Grid(GridSpec::new(0.0, std::f64::consts::PI, 3)?),
        output_path: None,
        format: Format::Csv,
    };
    let rows = run_sweep(&cfg, 0)?;
    write_csv(&rows, &mut std::io::stdout())?;

    let surface = run_sweep(&Figure::Fig4.config(), 0)?;
    let p: Vec<f64> = surface.iter().filter_map(|r| r.p).collect();
    let min = p.iter().copied().fold(f64::INFINITY, f64::min);
    let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("fig4: {} points, p- from {min:.6} to {max:.6}", p.len());
    Ok(())
}
