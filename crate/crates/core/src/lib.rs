//! Qubit thermal devices fueled by non-selective generalized measurements.
//!
//! A single qubit with `H = −ε σ_z` is thermalized with a cold bath and then
//! driven by measurement channels whose strength sets the operating mode:
//! engine, thermal accelerator, or refrigerator. A quantum switch places the
//! two fueling channels in a superposition of orders; post-selecting the
//! controller gives the coherently controlled device, tracing it out gives
//! the incoherent one.
//!
//! Every cycle runner simulates by explicit Kraus sums and checks the closed
//! forms against the simulation. [`verify`] does the same systematically over
//! seeded random and structured parameter sets.
//!
//! ```
//! use ico_thermal::{channels::ThermalSpec, switch::{run_ico_cycle_engine, Branch}};
//!
//! let t = ThermalSpec::from_beta_eps(1.39, 1.0).unwrap();
//! let r = run_ico_cycle_engine(&t, 0.5, std::f64::consts::FRAC_PI_2, Branch::Minus).unwrap();
//! assert!((r.merit.unwrap() - 0.5).abs() < 1e-12);
//! ```

pub mod channels;
pub mod cli;
pub mod cycle;
pub mod error;
pub mod linalg;
pub mod sweep;
pub mod switch;
pub mod verify;

pub use error::{Error, Result};
