//! Refrigerator: invest work with channel D, then run the switch; heat leaves
//! the cold bath when the regime function is negative.

use ico_thermal::channels::ThermalSpec;
use ico_thermal::cycle::cop_refrigerator_definite;
use ico_thermal::switch::{run_ico_cycle_refrigerator, Branch};

fn main() -> ico_thermal::Result<()> {
    let t = ThermalSpec::from_beta_eps(0.45, 1.0)?;
    println!(
        "definite order, b = 0.9: COP = {:.6}",
        cop_refrigerator_definite(&t, 0.9)?
    );
    for (a, theta) in [(0.9, 0.0), (0.9, 0.6), (0.95, 1.0), (0.5, 1.0)] {
        for branch in Branch::BOTH {
            let r = run_ico_cycle_refrigerator(&t, a, theta, branch)?;
            println!(
                "a = {a:.2} theta = {theta:.2} {}: W_inv = {:.6}  Q_cold = {:+.6}  Omega = {:+.4}  {} {:?}",
                branch.symbol(),
                r.work,
                r.q_cold,
                r.omega.unwrap_or_default(),
                r.mode,
                r.merit
            );
        }
    }
    Ok(())
}
