//! Incoherent control: the order qubit is never read, so the device runs
//! deterministically on a mixture of both orders.

use std::f64::consts::PI;

use ico_thermal::channels::ThermalSpec;
use ico_thermal::switch::run_incoherent_cycle;

fn main() -> ico_thermal::Result<()> {
    let t = ThermalSpec::from_beta_eps(1.39, 1.0)?;
    println!(
        "{:>5} {:>7} {:>10} {:>10} {:>13} merit",
        "a", "theta", "Q_hot", "W", "mode"
    );
    for a in [0.3, 0.5, 0.7] {
        for theta in [0.0, PI / 4.0, PI / 2.0, PI] {
            let r = run_incoherent_cycle(&t, a, theta)?;
            println!(
                "{a:>5.2} {theta:>7.4} {:>+10.6} {:>+10.6} {:>13} {:?}",
                r.q_hot,
                r.work,
                r.mode.as_str(),
                r.merit
            );
        }
    }
    Ok(())
}
