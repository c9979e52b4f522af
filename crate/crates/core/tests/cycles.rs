use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use ico_thermal::channels::{apply_channel, gibbs_state, kraus_meter_a, kraus_meter_b, ThermalSpec};
use ico_thermal::cycle::{cop_refrigerator_definite, run_cycle_definite, Mode};
use ico_thermal::linalg::Mat;
use ico_thermal::switch::{
    apply_switch, coherent_advantage, omega_coherent, omega_incoherent, postselect_branch, reduce_incoherent,
    run_ico_cycle_engine, run_ico_cycle_refrigerator, run_incoherent_cycle, w_isentropic_coherent, Branch,
    ControllerState,
};

fn spec(be: f64) -> ThermalSpec {
    ThermalSpec::from_beta_eps(be, 1.0).unwrap()
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol
}

#[test]
fn switch_at_controller_poles_is_a_definite_order() {
    let t = spec(1.39);
    let rho1 = gibbs_state(&t);
    let (a, b) = (0.3, 0.8);
    let ab = apply_channel(
        &kraus_meter_b(b).unwrap(),
        &apply_channel(&kraus_meter_a(a).unwrap(), &rho1).unwrap(),
    )
    .unwrap();
    let ba = apply_channel(
        &kraus_meter_a(a).unwrap(),
        &apply_channel(&kraus_meter_b(b).unwrap(), &rho1).unwrap(),
    )
    .unwrap();

    let at0 = apply_switch(&rho1, &ControllerState::new(0.0).unwrap(), a, b).unwrap();
    let expect0 = ab.mat().kron(&Mat::basis(2, 0, 0));
    assert!(at0.mat().max_abs_diff(&expect0).unwrap() < 1e-15);

    let at_pi = apply_switch(&rho1, &ControllerState::new(PI).unwrap(), a, b).unwrap();
    let expect_pi = ba.mat().kron(&Mat::basis(2, 1, 1));
    assert!(at_pi.mat().max_abs_diff(&expect_pi).unwrap() < 1e-15);
}

#[test]
fn minus_branch_is_population_inverted() {
    let t = spec(1.39);
    let rho1 = gibbs_state(&t);
    let joint = apply_switch(&rho1, &ControllerState::new(FRAC_PI_2).unwrap(), 0.5, 0.5).unwrap();
    let minus = postselect_branch(&joint, Branch::Minus).unwrap();
    assert!(close(minus.probability, 0.375, 1e-15));
    // (4/3) I/2 − (1/3) ρ⁽¹⁾
    let pops = minus.state.populations();
    assert!(close(pops[0], 0.35280485184746545, 1e-14));
    assert!(close(pops[1], 0.6471951481525345, 1e-14));
    assert!(close(
        w_isentropic_coherent(0.5, FRAC_PI_2, &t, Branch::Minus).unwrap(),
        pops[1],
        1e-14
    ));
}

#[test]
fn incoherent_state_examples() {
    let rho1 = gibbs_state(&spec(1.39));
    for a in [0.0, 0.2, 0.9] {
        let joint = apply_switch(&rho1, &ControllerState::new(FRAC_PI_2).unwrap(), a, a).unwrap();
        let inc = reduce_incoherent(&joint).unwrap();
        assert!(inc.mat().max_abs_diff(&Mat::identity(2).scale(0.5)).unwrap() <= 1e-12);
    }
    let joint = apply_switch(&rho1, &ControllerState::new(0.0).unwrap(), 0.7, 0.7).unwrap();
    let inc = reduce_incoherent(&joint).unwrap();
    assert!(inc.mat().max_abs_diff(&Mat::diag(&[0.7, 0.3])).unwrap() <= 1e-15);
}

#[test]
fn regime_function_examples() {
    let t = spec(1.39);
    let (_, p1) = t.populations();
    assert!(close(omega_coherent(p1, 0.0, &t, Branch::Plus).omega, 1.0, 1e-14));
    assert!(close(
        omega_coherent(0.5, FRAC_PI_2, &t, Branch::Minus).omega,
        2.0 / 3.0,
        1e-15
    ));
    assert!(close(
        omega_coherent(0.5, FRAC_PI_2, &t, Branch::Plus).omega,
        0.4,
        1e-15
    ));
    assert_eq!(omega_incoherent(0.5, 1.0, &t).omega, 0.5);
    assert!(close(omega_incoherent(0.3, FRAC_PI_2, &t).omega, 0.5, 1e-15));
    assert!(close(omega_incoherent(0.7, PI, &t).omega, 0.7264567395848596, 1e-15));
    assert!(close(
        omega_incoherent(0.9, 0.0, &spec(0.45)).omega,
        -0.4480942003240064,
        1e-15
    ));
}

#[test]
fn interference_work_against_incoherent_null() {
    let t = spec(1.39);
    let inc = run_incoherent_cycle(&t, 0.5, FRAC_PI_2).unwrap();
    assert!(inc.work.abs() <= 1e-12);
    assert_eq!(inc.mode, Mode::OutOfRegime);

    let minus = run_ico_cycle_engine(&t, 0.5, FRAC_PI_2, Branch::Minus).unwrap();
    assert_eq!(minus.mode, Mode::Engine);
    assert!(close(minus.q_hot, 1.1775611852202765, 1e-12));
    assert!(close(minus.work, -0.5887805926101383, 1e-12));
    assert!(close(minus.merit.unwrap(), 0.5, 1e-12));
    assert!(close(minus.expected_repeats.unwrap(), 8.0 / 3.0, 1e-12));

    let plus = run_ico_cycle_engine(&t, 0.5, FRAC_PI_2, Branch::Plus).unwrap();
    assert_eq!(plus.mode, Mode::Accelerator);
    assert!(close(plus.work, 0.353268355566083, 1e-12));
    assert!(close(plus.merit.unwrap(), 3.0, 1e-12));
}

#[test]
fn incoherent_examples() {
    let t = spec(1.39);
    let swapped = run_incoherent_cycle(&t, 0.7, PI).unwrap();
    assert_eq!(swapped.mode, Mode::Engine);
    let definite = run_cycle_definite(&t, 0.7, 0.7).unwrap();
    assert!(close(swapped.merit.unwrap(), definite.merit.unwrap(), 1e-12));

    let acc = run_incoherent_cycle(&t, 0.7, FRAC_PI_4).unwrap();
    assert_eq!(acc.mode, Mode::Accelerator);
    assert!(close(acc.work, 0.5656854249492379, 1e-12));
    assert!(close(acc.merit.unwrap(), 2.061240311246236, 1e-12));
    assert!(acc.expected_repeats.is_none());
}

#[test]
fn refrigerator_examples() {
    let t = spec(0.45);
    for br in Branch::BOTH {
        let r = run_ico_cycle_refrigerator(&t, 0.9, 0.0, br).unwrap();
        assert_eq!(r.mode, Mode::Refrigerator);
        assert!(close(r.work, 0.8437980105000158, 1e-13));
        assert!(close(r.q_cold, 0.37810099474999215, 1e-13));
        assert!(close(
            r.merit.unwrap(),
            cop_refrigerator_definite(&t, 0.9).unwrap(),
            1e-12
        ));
    }
    let idle = run_ico_cycle_refrigerator(&t, 0.5, 1.0, Branch::Minus).unwrap();
    assert_eq!(idle.mode, Mode::OutOfRegime);
    assert!(idle.merit.is_none());
}

#[test]
fn advantage_examples() {
    let t = spec(1.39);
    let minus = coherent_advantage(&t, 0.5, FRAC_PI_2, Branch::Minus).unwrap();
    assert!(minus.advantaged);
    assert!(close(minus.eta_coherent.unwrap(), 0.5, 1e-12));
    assert_eq!(minus.eta_incoherent, Some(0.0));

    let flat = coherent_advantage(&t, 0.7, 0.0, Branch::Minus).unwrap();
    assert!(!flat.advantaged);

    let plus = coherent_advantage(&t, 0.5, FRAC_PI_2, Branch::Plus).unwrap();
    assert!(!plus.advantaged);
    assert!(plus.eta_coherent.is_none());
    assert!(close(plus.cop_acc_coherent.unwrap(), 3.0, 1e-12));
}

#[test]
fn advantage_tracks_branch_probability_on_grid() {
    let t = spec(1.39);
    for i in 0..=40 {
        for j in 0..=40 {
            let (a, theta) = (i as f64 / 40.0, PI * j as f64 / 40.0);
            for br in Branch::BOTH {
                // errors out if the two criteria ever disagree
                coherent_advantage(&t, a, theta, br).unwrap();
            }
        }
    }
}
