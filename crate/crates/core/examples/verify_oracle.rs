//! Runs the closed-form oracle and prints the worst deviation per equation.
//!
//! `cargo run --release --example verify_oracle -- 7 1000` picks seed and
//! number of random points.

use ico_thermal::channels::ThermalSpec;
use ico_thermal::verify::{verify_equations, verify_no_work_from_equilibrium, DEFAULT_GRID_N, VERIFY_THRESHOLD};

fn main() -> ico_thermal::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(10_000);

    let report = verify_equations(seed, n, DEFAULT_GRID_N);
    for e in &report.equations {
        let flag = if e.max_deviation <= VERIFY_THRESHOLD {
            "ok "
        } else {
            "BAD"
        };
        println!(
            "{flag} {:28} {:>7} cases  max deviation {:.2e}",
            e.id, e.cases, e.max_deviation
        );
    }
    let t = ThermalSpec::from_beta_eps(1.39, 1.0)?;
    println!("no work from equilibrium: {}", verify_no_work_from_equilibrium(&t));
    println!("pass: {}", report.pass);
    Ok(())
}
