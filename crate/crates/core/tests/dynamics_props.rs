use okidyn_core::dynamics::{decomposition_residual, simulate, SimConfig, WageMode};
use okidyn_core::regimes;

#[test]
fn decomposition_residual_is_second_order() {
    let base = SimConfig::table1();
    let coarse = decomposition_residual(&simulate(&base).unwrap());
    let fine = decomposition_residual(&simulate(&base.with_dt(0.05)).unwrap());
    assert!(coarse <= 10.0 * 0.1 * 0.1);
    let ratio = coarse / fine;
    assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn residual_bounded_at_beta_equal_inverse_k0() {
    let base = SimConfig::table1();
    let beta = 19.0 / 5.0;
    let traj = simulate(&base.with_beta(beta)).unwrap();
    let p0 = &traj.points[0];
    assert!((p0.g * (1.0 - beta * p0.k)).abs() < 1e-12);
    assert!(decomposition_residual(&traj) <= 10.0 * 0.01);
}

#[test]
fn step_size_robustness() {
    let base = SimConfig::table1();
    let a = simulate(&base).unwrap().last().unwrap().lambda;
    let b = simulate(&base.with_dt(0.05)).unwrap().last().unwrap().lambda;
    assert!((a - b).abs() < 1e-6);
}

#[test]
fn table1_end_state_matches_reference_run() {
    // independent numpy prototype, dt = 0.001
    let last = simulate(&SimConfig::table1()).unwrap().points.pop().unwrap();
    assert!((last.lambda - 0.955_481_985_588).abs() < 1e-9);
    assert!((last.b - 0.880_204_454_043).abs() < 1e-8);
}

#[test]
fn wage_modes_agree_for_small_beta() {
    for beta in [0.1, 0.25, 0.5] {
        let diff = simulate(&SimConfig::table1().with_beta(beta)).unwrap();
        let closed = simulate(&SimConfig {
            wage_mode: WageMode::ClosedForm,
            ..SimConfig::table1().with_beta(beta)
        })
        .unwrap();
        let (bd, bc) = (diff.last().unwrap().b, closed.last().unwrap().b);
        assert!((bd - bc).abs() / bd < 0.02, "beta {beta}: {bd} vs {bc}");
    }
}

#[test]
fn closed_form_law_always_lowers_lambda() {
    // with wages tied to the total change of λ, dλ/dt = G/(1 + βk) < 0
    let traj = simulate(&SimConfig {
        wage_mode: WageMode::ClosedForm,
        ..SimConfig::table1().with_beta(4.5)
    })
    .unwrap();
    assert!(traj.points.iter().all(|p| p.dlambda_dt() < 0.0 && p.dr_dt > 0.0));
}

#[test]
fn effect_signs_hold_for_any_beta() {
    for beta in [0.0, 1.0, 2.0, 3.3, 4.5, 8.0] {
        let traj = simulate(&SimConfig::table1().with_beta(beta)).unwrap();
        for p in traj.points.iter().filter(|p| p.t > 0.0 && p.t < 10.0) {
            assert!(p.g < 0.0, "beta {beta} t {}", p.t);
            assert!(p.w >= 0.0);
            assert!((p.g + p.w - p.g * (1.0 - beta * p.k)).abs() < 1e-14);
            assert_eq!(p.r, 1.0 / p.lambda - 1.0);
        }
    }
}

#[test]
fn turning_point_for_reference_beta() {
    let traj = simulate(&SimConfig::table1()).unwrap();
    let report = regimes::classify(&traj, regimes::DEFAULT_BOUNDARY_TOL).unwrap();
    let t_c = report.t_c.unwrap();
    // dense numpy scan brackets the root in [1.719, 1.720]
    assert!((t_c - 1.7195).abs() < 1e-3, "t_c = {t_c}");
    assert_eq!(report.crossings, 1);
    assert!((report.k_max - 0.361_669_855_24).abs() < 1e-9);
    assert!((report.k_min - 5.0 / 19.0).abs() < 1e-11);
}
