use super::*;
use crate::params::{Couplings, Model};
use approx::assert_relative_eq;

// high-precision bracketing solves of the density maps, beta = lambda = m = Omega = g = 1
const DELTA1_MU0_W2: f64 = 0.17535048674095489388;
const DELTA1_MU0_W1: f64 = 0.10309051116552102296;
const DELTA0_W2: f64 = 0.00098121883819452565477;
const DELTA0_W1: f64 = 0.00025175879401659798033;
const MU0_W2: f64 = 0.32468796134552087784;
const MU0_W1: f64 = 0.16408355512438624786;
const MUC_W2: f64 = 0.33173841862604441174;
const MU1_W2_Q1: f64 = 2.3254713433961591113;
const MU1_W1_Q1: f64 = 2.1642819610764908743;
const MU1_W2_Q003: f64 = 0.3271833266523381473;

fn solver(model: Model, q: f64) -> PhaseSolver<f64> {
    let c = Couplings {
        q,
        ..Couplings::default()
    };
    PhaseSolver::new(ModelParams::new(model, c).unwrap()).unwrap()
}

#[test]
fn s1_root_matches_reference() {
    let s = solver(Model::Raman, 1.0);
    assert_relative_eq!(s.solve_s1(0.0).unwrap().delta, DELTA1_MU0_W2, max_relative = 1e-8);
    let s = solver(Model::Rayleigh, 1.0);
    assert_relative_eq!(s.solve_s1(0.0).unwrap().delta, DELTA1_MU0_W1, max_relative = 1e-8);
}

#[test]
fn s1_limits() {
    let s = solver(Model::Raman, 1.0);
    let mu_c = s.critical().mu_c;
    assert_eq!(s.solve_s1(mu_c).unwrap().delta, 0.0);
    let deep = s.solve_s1(-50.0).unwrap();
    assert_relative_eq!(deep.delta, 50.0, max_relative = 1e-12);
    assert!(matches!(
        s.solve_s1(mu_c + 1e-9),
        Err(Error::BranchNotAdmissible { branch: "S1", .. })
    ));
}

#[test]
fn s1_residual_is_tiny() {
    let s = solver(Model::Raman, 1.0);
    for mu in [-3.0, -0.5, 0.0, 0.2, 0.33] {
        let b = s.solve_s1(mu).unwrap();
        let r = s1_map(s.params(), b.delta).unwrap() - mu;
        assert!(r.abs() <= 1e-10, "mu = {mu}, residual {r}");
    }
}

#[test]
fn critical_points_match_reference() {
    let c = *solver(Model::Raman, 1.0).critical();
    assert_relative_eq!(c.delta0, DELTA0_W2, max_relative = 1e-6);
    assert_relative_eq!(c.mu0, MU0_W2, max_relative = 1e-6);
    assert_relative_eq!(c.mu_c, MUC_W2, max_relative = 1e-12);
    assert_relative_eq!(c.mu1, MU1_W2_Q1, max_relative = 1e-6);
    assert!(c.mu0 < c.mu_c);
    assert!(c.mu1 > c.mu0 + c.alpha);
    assert_eq!(c.subcase, Subcase::Easy);
    assert_eq!(c.mu1_side, Mu1Side::AboveMuC);
    assert!(c.mu1_residual <= 1e-10);

    let c = *solver(Model::Rayleigh, 1.0).critical();
    assert_relative_eq!(c.delta0, DELTA0_W1, max_relative = 1e-6);
    assert_relative_eq!(c.mu0, MU0_W1, max_relative = 1e-6);
    assert_relative_eq!(c.mu1, MU1_W1_Q1, max_relative = 1e-6);
}

#[test]
fn subtle_subcase_resolves_side() {
    let c = *solver(Model::Raman, 0.03).critical();
    assert_eq!(c.subcase, Subcase::Subtle);
    assert_relative_eq!(c.mu1, MU1_W2_Q003, max_relative = 1e-6);
    assert_eq!(c.mu1_side, Mu1Side::BelowMuC);
}

#[test]
fn delta0_shrinks_with_kappa() {
    let mut last = f64::INFINITY;
    for g in [1.0, 0.3, 0.1, 0.03] {
        let c = Couplings {
            g,
            ..Couplings::default()
        };
        let d0 = critical_points(&ModelParams::new(Model::Raman, c).unwrap())
            .unwrap()
            .delta0;
        assert!(d0 < last);
        last = d0;
    }
    assert!(last < 1e-8);
}

#[test]
fn s3_root_structure() {
    let s = solver(Model::Raman, 1.0);
    let c = *s.critical();
    // double root at the minimum
    let r = s.solve_s3(c.mu0 + c.alpha).unwrap();
    assert_relative_eq!(r.lower.unwrap().delta, c.delta0, max_relative = 1e-12);
    assert_relative_eq!(r.upper.unwrap().delta, c.delta0, max_relative = 1e-12);
    // lower root reaches zero at the right edge
    let r = s.solve_s3(c.mu_c + c.alpha).unwrap();
    assert!(r.lower.unwrap().delta <= 1e-8);
    // below the window nothing, above it only the upper root
    let r = s.solve_s3(c.mu0 + c.alpha - 1e-3).unwrap();
    assert!(r.lower.is_none() && r.upper.is_none());
    let r = s.solve_s3(c.mu_c + c.alpha + 0.5).unwrap();
    assert!(r.lower.is_none() && r.upper.is_some());
}

#[test]
fn s3_roots_mid_window_match_reference() {
    let s = solver(Model::Raman, 1.0);
    let c = *s.critical();
    let mu = c.mu0 + c.alpha + (c.mu_c - c.mu0) / 2.0;
    let r = s.solve_s3(mu).unwrap();
    let (lo, up) = (r.lower.unwrap(), r.upper.unwrap());
    assert_relative_eq!(lo.delta, 0.000084175022689764544129, max_relative = 1e-6);
    assert_relative_eq!(up.delta, 0.002859494753884274145, max_relative = 1e-6);
    assert!(lo.delta <= c.delta0 && c.delta0 <= up.delta);
    for b in [lo, up] {
        assert!((s3_map(s.params(), b.delta).unwrap() - mu).abs() <= 1e-10);
    }
    assert!(lo.pressure < up.pressure);
}

#[test]
fn phase_selection_by_region() {
    let s = solver(Model::Raman, 1.0);
    let c = *s.critical();
    assert_eq!(s.select_phase(-5.0).unwrap().kind, BranchKind::S1);
    assert_eq!(s.select_phase(c.mu_c).unwrap().kind, BranchKind::S1);
    assert_eq!(s.select_phase(c.mu_c + 0.5).unwrap().kind, BranchKind::S2);
    assert_eq!(s.select_phase(c.mu1 - 1e-6).unwrap().kind, BranchKind::S2);
    assert_eq!(s.select_phase(c.mu1 + 1e-6).unwrap().kind, BranchKind::S3Upper);
    assert_eq!(s.select_phase(100.0).unwrap().kind, BranchKind::S3Upper);
    // p1 = p2 at mu_c
    let p1c = s.solve_s1(c.mu_c).unwrap().pressure;
    let p2c = s.solve_s2(c.mu_c).unwrap().pressure;
    assert!((p1c - p2c).abs() <= 1e-9);
}

#[test]
fn density_jumps_up_at_mu1() {
    let s = solver(Model::Rayleigh, 1.0);
    let mu1 = s.critical().mu1;
    let below = s.select_phase(mu1 - 1e-9).unwrap();
    let above = s.select_phase(mu1 + 1e-9).unwrap();
    assert_eq!(below.kind, BranchKind::S2);
    assert!(above.delta > 0.0);
    // the two probes sit 2e-9 apart in mu
    assert!((above.rho_total - below.rho_total - above.delta).abs() < 1e-8);
}

#[test]
fn model_two_is_model_one_with_unit_multiplicity() {
    let s = solver(Model::Rayleigh, 1.0);
    let mu_c = s.critical().mu_c;
    let rho_c = s.params().thermo().rho_c();
    assert_relative_eq!(mu_c, rho_c, max_relative = 1e-15);
    let b = s.solve_s1(0.05).unwrap();
    assert!((s.params().thermo().rho0(b.delta).unwrap() - b.delta - 0.05).abs() < 1e-12);
}

#[test]
fn zero_recoil_still_solves() {
    let s = solver(Model::Raman, 0.0);
    let c = *s.critical();
    assert_eq!(c.alpha, 0.0);
    assert!(c.mu1 > c.mu0 && c.mu1 <= c.mu_c);
    assert_eq!(s.select_phase(1.0).unwrap().kind, BranchKind::S3Upper);
}

#[test]
fn grid_scan_brackets_mu1() {
    let s = solver(Model::Raman, 1.0);
    let c = *s.critical();
    let b = s.scan_mu1(400).unwrap();
    assert!(b.lo <= c.mu1 && c.mu1 <= b.hi);
    assert_eq!(b.side, Some(Mu1Side::AboveMuC));
}

#[test]
fn single_precision_solver_agrees() {
    let p = ModelParams::<f32>::defaults(Model::Raman);
    let s = PhaseSolver::new(p).unwrap();
    let c = s.critical();
    let mu1 = c.mu1 as f64;
    let d1 = s.solve_s1(0.0).unwrap().delta as f64;
    assert!((mu1 - MU1_W2_Q1).abs() < 1e-3, "mu1 = {mu1}");
    assert!((d1 - DELTA1_MU0_W2).abs() < 1e-5, "delta1 = {d1}");
}
