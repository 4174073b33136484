//! Convergence of the finite-volume solution towards the analytic branch.

use serde::{Deserialize, Serialize};

use super::{fv_iterate, FvState, LatticeConfig};
use crate::branch::PhaseSolver;
use crate::error::{Error, Result};
use crate::observables::PhasePoint;
use crate::params::ModelParams;
use crate::scalar::Real;

/// One `(L, h)` run of a limit scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow<T> {
    pub box_side: T,
    pub h: T,
    pub cutoff: usize,
    pub eta2: T,
    pub zeta: T,
    pub rho: T,
    pub delta_v: T,
    /// Rest-mode occupation per volume, `eta^2 + n(delta)/V`.
    pub n0: T,
    pub nq: T,
    pub nb: T,
    pub e_minus: T,
    pub v_e_minus: T,
    /// Largest relative deviation from the analytic branch (see
    /// [`discrepancy`]).
    pub discrepancy: T,
    pub iterations: usize,
    pub monotone: bool,
}

/// Large-volume behaviour of the lower quasi-particle energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FvCase {
    /// `E-` stays bounded away from zero.
    A,
    /// `E-` closes like `1/V`.
    B,
}

/// Result of [`fv_limit_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitScan<T> {
    pub mu: T,
    pub analytic: PhasePoint<T>,
    /// Rows ordered by decreasing `h`, then increasing `L`.
    pub rows: Vec<ScanRow<T>>,
    pub case: FvCase,
    /// Least-squares slope of `ln E-` against `ln V` at the smallest `h`.
    pub e_minus_slope: T,
    /// `Omega / (beta tau (Omega + eps(q) + delta))` with the analytic
    /// `tau = n_q`, on the S3 branch only.
    pub predicted_v_e_minus: Option<T>,
    /// Discrepancy of the largest box at the smallest source.
    pub final_error: T,
    /// Discrepancy after linear extrapolation in `1/L` through the two
    /// largest boxes at the smallest source.
    pub extrapolated_error: T,
}

/// Largest relative error of a finite-volume row against the analytic
/// point, over `rho` and every quantity that is nonzero analytically
/// (`delta`, `n0`, `nq`, `nb`).
pub fn discrepancy<T: Real>(analytic: &PhasePoint<T>, delta: T, rho: T, n0: T, nq: T, nb: T) -> T {
    let rel = |got: T, want: T| ((got - want) / want).abs();
    let mut worst = rel(rho, analytic.rho_total);
    for (got, want) in [(delta, analytic.delta), (n0, analytic.n0), (nq, analytic.nq), (nb, analytic.nb)] {
        if want > T::zero() {
            worst = worst.max(rel(got, want));
        }
    }
    worst
}

fn slope<T: Real>(xs: &[T], ys: &[T]) -> T {
    let n = T::lit(xs.len() as f64);
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Runs [`fv_iterate`] over every `(L, h)` pair, seeding each run from the
/// analytic equilibrium branch, and compares with it.
///
/// `base` supplies the cutoff at `base.box_side` (scaled with `L` so the
/// momentum range stays fixed), damping, iteration cap and tolerance.
pub fn fv_limit_scan<T: Real>(
    params: &ModelParams<T>,
    mu: T,
    box_sides: &[T],
    sources: &[T],
    base: &LatticeConfig<T>,
) -> Result<LimitScan<T>> {
    if box_sides.len() < 2 || sources.is_empty() {
        return Err(Error::InvalidParameter {
            name: "L",
            value: box_sides.len() as f64,
            reason: "a limit scan needs at least two box sizes and one source",
        });
    }
    if box_sides.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            name: "L",
            value: box_sides[0].as_f64(),
            reason: "box sizes must increase",
        });
    }
    if sources.windows(2).any(|w| !(w[1] < w[0])) || sources.iter().any(|&h| !(h > T::zero())) {
        return Err(Error::InvalidParameter {
            name: "h",
            value: sources[0].as_f64(),
            reason: "sources must be positive and decreasing",
        });
    }
    let solver = PhaseSolver::new(*params)?;
    let branch = solver.select_phase(mu)?;
    let analytic = PhasePoint::from_branch(&branch, params)?;

    let mut rows = Vec::with_capacity(box_sides.len() * sources.len());
    for &h in sources {
        for &side in box_sides {
            let scaled = (T::lit(base.cutoff as f64) * side / base.box_side).ceil();
            let config = LatticeConfig {
                box_side: side,
                cutoff: scaled.to_usize().unwrap_or(base.cutoff).max(1),
                h,
                ..*base
            };
            let seed = FvState::seed(&branch, params, h);
            let run = fv_iterate(params, &config, mu, &seed)?;
            let s = run.state;
            let v = config.volume();
            log::debug!("fv L = {} h = {:e}: {:?}", side, h.as_f64(), s);
            rows.push(ScanRow {
                box_side: side,
                h,
                cutoff: run.cutoff,
                eta2: s.eta * s.eta,
                zeta: s.zeta,
                rho: s.rho,
                delta_v: s.delta_v,
                n0: run.n0,
                nq: run.nq,
                nb: run.nb,
                e_minus: s.e_minus,
                v_e_minus: v * s.e_minus,
                discrepancy: discrepancy(&analytic, s.delta_v, s.rho, run.n0, run.nq, run.nb),
                iterations: s.iterations,
                monotone: run.monotone,
            });
        }
    }

    let last_h: Vec<&ScanRow<T>> = rows.iter().rev().take(box_sides.len()).rev().collect();
    let ln_v: Vec<T> = last_h.iter().map(|r| T::lit(3.0) * r.box_side.ln()).collect();
    let ln_e: Vec<T> = last_h.iter().map(|r| r.e_minus.ln()).collect();
    let e_minus_slope = slope(&ln_v, &ln_e);
    let case = if e_minus_slope < T::lit(-0.5) {
        FvCase::B
    } else {
        FvCase::A
    };
    let predicted_v_e_minus = if analytic.branch.is_s3() && analytic.nq > T::zero() {
        let om = params.omega();
        Some(om / (params.beta() * analytic.nq * (om + params.eps_q() + analytic.delta)))
    } else {
        None
    };
    let last = *last_h[last_h.len() - 1];
    let prev = *last_h[last_h.len() - 2];
    let extrap = |a: T, b: T| {
        let (l1, l2) = (prev.box_side, last.box_side);
        (l2 * b - l1 * a) / (l2 - l1)
    };
    let extrapolated_error = discrepancy(
        &analytic,
        extrap(prev.delta_v, last.delta_v),
        extrap(prev.rho, last.rho),
        extrap(prev.n0, last.n0),
        extrap(prev.nq, last.nq),
        extrap(prev.nb, last.nb),
    );
    Ok(LimitScan {
        mu,
        analytic,
        final_error: last.discrepancy,
        rows,
        case,
        e_minus_slope,
        predicted_v_e_minus,
        extrapolated_error,
    })
}
