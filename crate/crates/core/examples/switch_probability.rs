//! Post-selection statistics of the quantum switch of meters A and B.

use std::f64::consts::PI;

use ico_thermal::channels::{gibbs_state, ThermalSpec};
use ico_thermal::switch::{apply_switch, postselect_branch, reduce_incoherent, switch_kraus, Branch, ControllerState};

fn main() -> ico_thermal::Result<()> {
    let t = ThermalSpec::from_beta_eps(1.39, 1.0)?;
    let rho1 = gibbs_state(&t);
    let sw = switch_kraus(0.5, 0.5)?;
    println!(
        "{} operators, completeness deviation {:.1e}",
        sw.ops().len(),
        sw.completeness_deviation()
    );

    println!(
        "{:>6} {:>6} {:>8} {:>8}  incoherent populations",
        "a", "theta", "p+", "p-"
    );
    for a in [0.1, 0.3, 0.5] {
        for k in 0..=4 {
            let theta = PI * k as f64 / 4.0;
            let c = ControllerState::new(theta)?;
            let joint = apply_switch(&rho1, &c, a, a)?;
            let plus = postselect_branch(&joint, Branch::Plus)?;
            let minus = postselect_branch(&joint, Branch::Minus)?;
            let inc = reduce_incoherent(&joint)?;
            println!(
                "{a:>6.2} {theta:>6.3} {:>8.5} {:>8.5}  {:?}",
                plus.probability,
                minus.probability,
                inc.populations()
            );
        }
    }
    Ok(())
}
