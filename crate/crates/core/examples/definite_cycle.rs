//! Three-stroke cycle with a fixed order of the two meters, in each of its
//! operating modes.

use ico_thermal::channels::ThermalSpec;
use ico_thermal::cycle::{run_cycle_definite, CycleReport};

fn show(name: &str, r: &CycleReport) {
    println!("{name}: {}", r.mode);
    for s in &r.strokes {
        println!(
            "  {:15} dU = {:+.6}  dS = {:+.6}  {:?}",
            s.label, s.delta_u, s.delta_s, s.exchange_kind
        );
    }
    println!(
        "  Q_hot = {:+.6}  W = {:+.6}  Q_cold = {:+.6}  merit = {:?}  residual = {:.1e}",
        r.q_hot, r.work, r.q_cold, r.merit, r.first_law_residual
    );
}

fn main() -> ico_thermal::Result<()> {
    let t = ThermalSpec::from_beta_eps(1.39, 1.0)?;
    let (p0, _) = t.populations();
    show("a = b = 0.7", &run_cycle_definite(&t, 0.7, 0.7)?);
    show("a = b = 0.3", &run_cycle_definite(&t, 0.3, 0.3)?);
    show("a = p0, b = 0.97", &run_cycle_definite(&t, p0, 0.97)?);
    show("a = 0.2, b = 0.9", &run_cycle_definite(&t, 0.2, 0.9)?);
    Ok(())
}
