//! The four measurement channels as resets, and how their energy exchange is
//! classified as heat or work.

use ico_thermal::channels::{
    apply_channel, gibbs_state, isentropic_points_a, kraus_meter_a, kraus_work_c, stroke_record, ThermalSpec,
};
use ico_thermal::linalg::von_neumann_entropy;

fn main() -> ico_thermal::Result<()> {
    let t = ThermalSpec::from_beta_eps(1.39, 1.0)?;
    let rho1 = gibbs_state(&t);
    let h = t.hamiltonian();
    println!(
        "Gibbs populations {:?}, entropy {:.6}",
        rho1.populations(),
        von_neumann_entropy(&rho1)?
    );

    for a in [0.3, 0.5, 0.7] {
        let meter = kraus_meter_a(a)?;
        let out = apply_channel(&meter, &rho1)?;
        let s = stroke_record(&h, &rho1, &out, format!("A({a})"))?;
        println!(
            "{:8} completeness {:.1e}  dU = {:+.6}  dS = {:+.6}  -> {:?}",
            s.label,
            meter.completeness_deviation(),
            s.delta_u,
            s.delta_s,
            s.exchange_kind
        );
    }

    // At either isentropic strength the channel only moves work.
    let (lo, hi) = isentropic_points_a(&t);
    for w in [hi, lo] {
        let out = apply_channel(&kraus_work_c(w)?, &rho1)?;
        let s = stroke_record(&h, &rho1, &out, format!("C({w:.4})"))?;
        println!(
            "{:10} dU = {:+.6}  dS = {:+.1e}  -> {:?}",
            s.label, s.delta_u, s.delta_s, s.exchange_kind
        );
    }
    Ok(())
}
