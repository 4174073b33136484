//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use bec_cli::{run, Artifact, CommandKind, RunConfig};
use nalgebra::{Matrix2, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recoil_bec::observables::{grating_profile, spectrum};
use recoil_bec::oracle::{fv_limit_scan, FvCase};
use recoil_bec::{BranchKind, Couplings64, LatticeConfig64, Model, ModelParams64, PhaseSolver64};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const MODELS: [Model; 2] = [Model::Raman, Model::Rayleigh];

fn solver(model: Model) -> PhaseSolver64 {
    PhaseSolver64::new(ModelParams64::defaults(model)).expect("default parameters are valid")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

/// 1. dp/dmu equals (delta + mu) / lambda in every phase.
fn thermodynamic_identity() -> Check {
    let start = Instant::now();
    let step = 1e-4;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for m in MODELS {
        let s = solver(m);
        let c = *s.critical();
        let lambda = s.params().lambda();
        // 17 interior points per phase, clear of the transitions
        let mus: Vec<f64> = linspace(c.mu_c - 2.0, c.mu_c - 0.05, 17)
            .chain(linspace(c.mu_c + 0.05, c.mu1 - 0.05, 16))
            .chain(linspace(c.mu1 + 0.05, c.mu1 + 3.0, 17))
            .collect();
        let mut seen = [false; 3];
        for mu in mus {
            let b = s.select_phase(mu).map_err(|e| e.to_string())?;
            seen[match b.kind {
                BranchKind::S1 => 0,
                BranchKind::S2 => 1,
                _ => 2,
            }] = true;
            let up = s.pressure(mu + step).map_err(|e| e.to_string())?;
            let down = s.pressure(mu - step).map_err(|e| e.to_string())?;
            let slope = (up - down) / (2.0 * step);
            let err = rel(slope, (b.delta + mu) / lambda);
            worst = worst.max(err);
            count += 1;
            ensure(err <= 1e-5, || format!("{m} mu = {mu}: relative error {err:e}"))?;
        }
        ensure(seen.iter().all(|&x| x), || format!("{m}: grid does not span all phases"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{count} points, worst relative error {worst:.1e}, {elapsed:.2?}"))
}

/// 2. No pressure jump at the transitions and a convex p(mu).
fn pressure_continuity_and_convexity() -> Check {
    let mut worst_jump: f64 = 0.0;
    let mut worst_curv: f64 = 0.0;
    for m in MODELS {
        let s = solver(m);
        let c = *s.critical();
        let e = |e: recoil_bec::Error| e.to_string();
        let at_c = (s.solve_s1(c.mu_c).map_err(e)?.pressure - s.solve_s2(c.mu_c).map_err(e)?.pressure).abs();
        let up = s.solve_s3(c.mu1).map_err(e)?.upper.ok_or("no S3 upper root at mu1")?;
        let below = if c.mu1 <= c.mu_c {
            s.solve_s1(c.mu1).map_err(e)?
        } else {
            s.solve_s2(c.mu1).map_err(e)?
        };
        let at_1 = (up.pressure - below.pressure).abs();
        worst_jump = worst_jump.max(at_c).max(at_1);
        ensure(at_c <= 1e-9 && at_1 <= 1e-9, || format!("{m}: jumps {at_c:e} at mu_c, {at_1:e} at mu1"))?;

        let p: Vec<f64> = linspace(c.mu_c - 2.0, c.mu1 + 2.0, 500)
            .map(|mu| s.pressure(mu))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        for w in p.windows(3) {
            let d2 = w[2] - 2.0 * w[1] + w[0];
            worst_curv = worst_curv.min(d2);
        }
        ensure(worst_curv >= -1e-8, || format!("{m}: second difference {worst_curv:e}"))?;
    }
    Ok(format!("largest jump {worst_jump:.1e}, smallest second difference {worst_curv:.1e}"))
}

/// 3. Factorization of the coherent correlations on S3.
fn correlation_factorization() -> Check {
    let mut worst: f64 = 0.0;
    for m in MODELS {
        let s = solver(m);
        let c = *s.critical();
        for mu in linspace(c.mu1 + 0.01, c.mu1 + 5.0, 10) {
            let p = s.phase_point(mu).map_err(|e| e.to_string())?;
            ensure(p.branch == BranchKind::S3Upper, || format!("{m} mu = {mu} is {}", p.branch))?;
            let a = rel(p.corr_qb * p.corr_qb, p.nq * p.nb);
            let b = rel(p.corr_0q * p.corr_0q, p.n0 * p.nq);
            worst = worst.max(a).max(b);
        }
    }
    ensure(worst <= 1e-12, || format!("relative error {worst:e}"))?;
    Ok(format!("20 points, worst relative error {worst:.1e}"))
}

/// 4. Quasi-particle spectrum against a 2x2 eigenvalue oracle.
fn spectrum_checks() -> Check {
    let mut worst_zero: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    for m in MODELS {
        let s = solver(m);
        let params = *s.params();
        let c = *s.critical();
        for mu in linspace(c.mu_c - 2.0, c.mu1 + 3.0, 60) {
            let b = s.select_phase(mu).map_err(|e| e.to_string())?;
            let p = s.phase_point(mu).map_err(|e| e.to_string())?;
            let sp = spectrum(b.delta, p.n0.sqrt(), &params).map_err(|e| e.to_string())?;
            if b.kind.is_s3() {
                worst_zero = worst_zero.max(sp.e_minus.abs());
            } else {
                min_gap = min_gap.min(sp.e_minus);
            }
        }
    }
    ensure(worst_zero <= 1e-10, || format!("E_minus = {worst_zero:e} on S3"))?;
    ensure(min_gap > 0.0, || format!("E_minus = {min_gap:e} off S3"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let m = MODELS[i % 2];
        let params = ModelParams64::new(
            m,
            Couplings64 {
                omega: rng.gen_range(0.5..2.0),
                g: rng.gen_range(0.5..1.5),
                q: rng.gen_range(0.1..2.0),
                ..Couplings64::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let delta = rng.gen_range(0.0..3.0);
        let a = delta + params.eps_q();
        let eta_max = 2.0 * (a * params.omega()).sqrt() / params.g();
        let eta = rng.gen_range(0.0..eta_max);
        let off = params.g() * eta / 2.0;
        let eig = SymmetricEigen::new(Matrix2::new(a, off, off, params.omega())).eigenvalues;
        let (lo, hi) = (eig[0].min(eig[1]), eig[0].max(eig[1]));
        let sp = spectrum(delta, eta, &params).map_err(|e| e.to_string())?;
        let err = (sp.e_plus - hi).abs().max((sp.e_minus - lo).abs());
        worst = worst.max(err);
    }
    ensure(worst <= 1e-10, || format!("eigenvalue mismatch {worst:e}"))?;
    Ok(format!(
        "S3 |E_minus| <= {worst_zero:.1e}, min E_minus off S3 {min_gap:.2e}, oracle mismatch {worst:.1e}"
    ))
}

/// 5. Lower and upper S3 roots around delta0, and mu0 < mu_c.
fn root_structure() -> Check {
    let mut lower_at_edge: f64 = 0.0;
    for m in MODELS {
        let s = solver(m);
        let c = *s.critical();
        let roots = s.solve_s3(c.mu_c + c.alpha).map_err(|e| e.to_string())?;
        let lower = roots.lower.ok_or_else(|| format!("{m}: no lower root at mu_c + alpha"))?;
        lower_at_edge = lower_at_edge.max(lower.delta.abs());
        ensure(lower.delta.abs() <= 1e-8, || format!("{m}: lower root {:e} at the window edge", lower.delta))?;
        // 10 points strictly inside the two-root window
        for t in linspace(0.05, 0.95, 10) {
            let mu = c.mu0 + c.alpha + t * (c.mu_c - c.mu0);
            let r = s.solve_s3(mu).map_err(|e| e.to_string())?;
            let (lo, hi) = match (r.lower, r.upper) {
                (Some(l), Some(u)) => (l.delta, u.delta),
                _ => return Err(format!("{m} mu = {mu}: missing root")),
            };
            ensure(lo <= c.delta0 && c.delta0 <= hi, || format!("{m} mu = {mu}: {lo:e} {:e} {hi:e}", c.delta0))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..10 {
        let couplings = Couplings64 {
            beta: rng.gen_range(0.3..3.0),
            lambda: rng.gen_range(0.5..3.0),
            omega: rng.gen_range(0.5..3.0),
            g: rng.gen_range(0.3..1.5),
            mass: rng.gen_range(0.5..2.0),
            q: rng.gen_range(0.05..3.0),
        };
        let params = ModelParams64::new(MODELS[i % 2], couplings).map_err(|e| e.to_string())?;
        let c = *PhaseSolver64::new(params).map_err(|e| e.to_string())?.critical();
        ensure(c.mu0 < c.mu_c, || format!("{couplings:?}: mu0 = {} >= mu_c = {}", c.mu0, c.mu_c))?;
    }
    Ok(format!("lower root at window edge {lower_at_edge:.1e}, 20 window points ordered, 10 random sets with mu0 < mu_c"))
}

/// 6. Polylogarithm path against radial quadrature.
fn bose_cross_validation() -> Check {
    let t = *ModelParams64::defaults(Model::Raman).thermo();
    let mut worst: f64 = 0.0;
    let e = |e: recoil_bec::Error| e.to_string();
    for d in [0.01, 0.1, 1.0, 10.0] {
        for (a, b) in [
            (t.rho0(d).map_err(e)?, t.rho0_quadrature(d).map_err(e)?),
            (t.p0(d).map_err(e)?, t.p0_quadrature(d).map_err(e)?),
            (t.eps0(d).map_err(e)?, t.eps0_quadrature(d).map_err(e)?),
            (t.drho0(d).map_err(e)?, t.drho0_quadrature(d).map_err(e)?),
        ] {
            worst = worst.max(rel(a, b));
        }
    }
    ensure(worst <= 1e-8, || format!("relative error {worst:e}"))?;
    Ok(format!("rho0, p0, eps0, drho0 at 4 gaps, worst relative error {worst:.1e}"))
}

/// 7. Finite-volume solutions converge to the analytic branches.
fn oracle_convergence() -> Check {
    let start = Instant::now();
    let params = ModelParams64::defaults(Model::Raman);
    let sides = [10.0, 20.0, 40.0];
    let sources = [1e-2, 1e-3, 1e-4];
    let base = LatticeConfig64 {
        box_side: 10.0,
        cutoff: 12,
        ..LatticeConfig64::default()
    };
    let mut notes = Vec::new();
    for (mu, kind) in [(0.0, BranchKind::S1), (1.5, BranchKind::S2), (4.0, BranchKind::S3Upper)] {
        let scan = fv_limit_scan(&params, mu, &sides, &sources, &base).map_err(|e| e.to_string())?;
        ensure(scan.analytic.branch == kind, || format!("mu = {mu} is {}", scan.analytic.branch))?;
        ensure(scan.rows.iter().all(|r| r.monotone), || format!("mu = {mu}: non-monotone run"))?;
        let at = |h: f64, l: f64| {
            scan.rows
                .iter()
                .find(|r| r.h == h && r.box_side == l)
                .map(|r| r.discrepancy)
                .unwrap_or(f64::NAN)
        };
        let small_h: Vec<f64> = sides.iter().map(|&l| at(1e-4, l)).collect();
        ensure(small_h.windows(2).all(|w| w[1] < w[0]), || {
            format!("mu = {mu}: not decreasing in V at h = 1e-4: {small_h:?}")
        })?;
        let (coarse, fine) = (at(1e-2, 40.0), at(1e-4, 40.0));
        ensure(fine < coarse, || format!("mu = {mu}: not decreasing in h at L = 40: {coarse:e} -> {fine:e}"))?;
        ensure(scan.final_error <= 2e-2, || format!("mu = {mu}: final error {:e}", scan.final_error))?;
        if kind == BranchKind::S3Upper {
            ensure(scan.case == FvCase::B, || "S3 not classified as case B".into())?;
            let want = scan.predicted_v_e_minus.ok_or("no V E_minus prediction")?;
            for r in &scan.rows {
                let ratio = r.v_e_minus / want;
                ensure((0.5..=2.0).contains(&ratio), || format!("V E_minus ratio {ratio} at L = {}", r.box_side))?;
            }
            notes.push(format!("S3 V*E_minus/prediction {:.3}", scan.rows.last().unwrap().v_e_minus / want));
        } else {
            ensure(scan.case == FvCase::A, || format!("mu = {mu} not classified as case A"))?;
        }
        notes.push(format!("{kind} final {:.3e}", scan.final_error));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("{}, {elapsed:.2?}", notes.join(", ")))
}

/// 8. Grating mean and amplitude.
fn grating() -> Check {
    let params = ModelParams64::defaults(Model::Rayleigh);
    let s = PhaseSolver64::new(params).map_err(|e| e.to_string())?;
    let c = *s.critical();
    let p = s.phase_point(c.mu1 + 1.0).map_err(|e| e.to_string())?;
    ensure(p.branch.is_s3(), || "Rayleigh point not on S3".into())?;
    let g = grating_profile(&p, &params, 64, 0.0).map_err(|e| e.to_string())?;
    let want = 2.0 * (4.0 * params.omega() / params.g().powi(2)) * (p.delta * (p.delta + params.eps_q())).sqrt();
    let (e_mean, e_amp) = (rel(g.mean_density, p.rho_total), rel(g.amplitude, want));
    ensure(e_mean <= 1e-10 && e_amp <= 1e-10, || format!("mean error {e_mean:e}, amplitude error {e_amp:e}"))?;

    let raman = ModelParams64::defaults(Model::Raman);
    let rs = PhaseSolver64::new(raman).map_err(|e| e.to_string())?;
    let rp = rs.phase_point(rs.critical().mu1 + 1.0).map_err(|e| e.to_string())?;
    let ra = grating_profile(&rp, &raman, 64, 0.0).map_err(|e| e.to_string())?.amplitude;
    let s2 = s.phase_point(0.5 * (c.mu_c + c.mu1)).map_err(|e| e.to_string())?;
    ensure(s2.branch == BranchKind::S2, || "Rayleigh midpoint not on S2".into())?;
    let sa = grating_profile(&s2, &params, 64, 0.0).map_err(|e| e.to_string())?.amplitude;
    ensure(ra == 0.0 && sa == 0.0, || format!("flat amplitudes {ra:e}, {sa:e}"))?;
    Ok(format!("mean error {e_mean:.1e}, amplitude error {e_amp:.1e}, Raman-S3 and Rayleigh-S2 flat"))
}

/// 9. Subcase labels and the side of the first-order transition.
fn subcase_classification() -> Check {
    let mut notes = Vec::new();
    for m in ["1", "2"] {
        for q in ["0.1", "3"] {
            let map: BTreeMap<String, String> = [("model", m), ("q", q), ("steps", "200")]
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect();
            let cfg = RunConfig::from_map(CommandKind::Boundaries, &map).map_err(|e| e.to_string())?;
            let Artifact::Boundaries(r) = run(&cfg).map_err(|e| e.to_string())? else {
                return Err("boundaries returned another artifact".into());
            };
            let easy = r.mu0 + r.alpha >= r.mu_c;
            let label_ok = r.subcase == if easy { "easy" } else { "subtle" };
            let side_ok = r.mu1_side == if r.mu1 >= r.mu_c { "above_mu_c" } else { "below_mu_c" };
            ensure(label_ok && side_ok, || format!("model {m}, q = {q}: inconsistent labels {r:?}"))?;
            ensure(r.mu1_residual <= 1e-10, || format!("model {m}, q = {q}: residual {:e}", r.mu1_residual))?;
            ensure(r.side_stable, || format!("model {m}, q = {q}: side changes with resolution {r:?}"))?;
            notes.push(format!("model {m} q={q}: {}/{}", r.subcase, r.mu1_side));
        }
    }
    Ok(notes.join(", "))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("thermodynamic identity", thermodynamic_identity),
        ("pressure continuity and convexity", pressure_continuity_and_convexity),
        ("correlation factorization", correlation_factorization),
        ("spectrum", spectrum_checks),
        ("root structure", root_structure),
        ("Bose function cross-validation", bose_cross_validation),
        ("oracle convergence", oracle_convergence),
        ("grating", grating),
        ("subcase classification", subcase_classification),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
