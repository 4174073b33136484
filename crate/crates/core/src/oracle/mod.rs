//! Finite-volume self-consistency solver with a gauge-breaking source `h`.
//!
//! All order parameters are real and non-negative. With `delta = lambda rho -
//! mu > 0`, `A = delta + eps(q)`, `B = Omega` and `zeta` the magnitude of the
//! recoil/photon coherence (the signed quantity is `-zeta`), the equations
//! solved are
//!
//! ```text
//! eta  = g (h + zeta) / (2 delta)
//! zeta = g eta (n(E-) - n(E+)) / (2 V (E+ - E-))
//! rho  = eta^2 + n(delta)/V + <a_q* a_q>/V + (lattice sums)/V
//! ```
//!
//! where `n(E) = 1/(e^{beta E} - 1)`. Substituting the second equation into
//! the first gives `eta (1 - Q) = g h / (2 delta)` with
//! `Q = g^2 (n(E-) - n(E+)) / (4 delta V (E+ - E-))`.
//!
//! A plain fixed-point sweep over `(eta, zeta, rho)` is repelling on the
//! coherent branch (the density grows faster than `delta` there), so the
//! solver nests the equations: for a given `delta` the `eta` equation is
//! solved by bracketing on `y = E+ E- = A B - g^2 eta^2 / 4`, and the density
//! equation `D(delta) = lambda rho(delta) - mu - delta = 0` is then driven to
//! zero by a damped Newton iteration in `ln delta`,
//! `x <- (1 - d) x + d N(x)` with `N` the Newton map.

mod lattice;
mod scan;

use serde::{Deserialize, Serialize};

use crate::branch::{Branch, BranchKind};
use crate::error::{Error, Result};
use crate::observables::condensates;
use crate::params::ModelParams;
use crate::roots::{bisect, DEFAULT_BISECTION_STEPS};
use crate::scalar::{bose, Real};

pub use lattice::MomentumLattice;
pub use scan::{fv_limit_scan, FvCase, LimitScan, ScanRow};

/// Box, truncation and iteration settings of one finite-volume run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig<T> {
    /// Side `L` of the periodic box.
    pub box_side: T,
    /// Largest lattice index `K` per axis.
    pub cutoff: usize,
    /// Source amplitude.
    pub h: T,
    /// Newton damping `d` in `(0, 1]`.
    pub damping: T,
    pub max_iter: usize,
    /// Convergence threshold on the largest change of `eta`, `zeta`, `rho`
    /// per step; `|lambda rho - mu - delta|` must also be below `tol` times
    /// the density scale.
    pub tol: T,
}

impl<T: Real> Default for LatticeConfig<T> {
    fn default() -> Self {
        Self {
            box_side: T::lit(20.0),
            cutoff: 24,
            h: T::lit(1e-3),
            damping: T::lit(0.3),
            max_iter: 500,
            tol: T::lit(1e-10),
        }
    }
}

impl<T: Real> LatticeConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, value: T, reason| {
            Err(Error::InvalidParameter {
                name,
                value: value.as_f64(),
                reason,
            })
        };
        if !(self.box_side > T::zero() && self.box_side.is_finite()) {
            return bad("L", self.box_side, "box side must be positive");
        }
        if self.cutoff == 0 {
            return bad("cutoff", T::zero(), "need at least one lattice shell");
        }
        if !(self.h >= T::zero() && self.h.is_finite()) {
            return bad("h", self.h, "source must be non-negative");
        }
        if !(self.damping > T::zero() && self.damping <= T::one()) {
            return bad("damping", self.damping, "must lie in (0, 1]");
        }
        if !(self.tol > T::zero()) {
            return bad("tol", self.tol, "must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter", T::zero(), "must be positive");
        }
        Ok(())
    }

    pub fn volume(&self) -> T {
        self.box_side * self.box_side * self.box_side
    }
}

/// Finite-volume order parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FvState<T> {
    pub eta: T,
    /// Magnitude of the recoil/photon coherence.
    pub zeta: T,
    pub rho: T,
    /// Gap `delta` at which the state was evaluated; equals `lambda rho - mu`
    /// up to `density_eq`.
    pub delta_v: T,
    pub e_plus: T,
    pub e_minus: T,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Real> FvState<T> {
    /// Starting point with everything zero except the density.
    pub fn zero(rho: T) -> Self {
        Self {
            eta: T::zero(),
            zeta: T::zero(),
            rho,
            delta_v: T::nan(),
            e_plus: T::nan(),
            e_minus: T::nan(),
            iterations: 0,
            converged: false,
        }
    }

    /// Seed built from a thermodynamic-limit branch.
    ///
    /// A positive `zeta` selects the coherent (Case B) family in
    /// [`fv_iterate`]; it is set only for S3 branches.
    pub fn seed(branch: &Branch<T>, params: &ModelParams<T>, h: T) -> Self {
        let g = params.g();
        let (n0, _, _) = condensates(branch, params);
        let floor = T::lit(1e-8);
        let (delta, eta, zeta) = match branch.kind {
            BranchKind::S1 => {
                let d = branch.delta.max(floor);
                (d, g * h / (T::lit(2.0) * d), T::zero())
            }
            BranchKind::S2 => {
                let eta = n0.sqrt();
                let d = if eta > T::zero() && h > T::zero() {
                    g * h / (T::lit(2.0) * eta)
                } else {
                    floor
                };
                (d.max(floor), eta, T::zero())
            }
            BranchKind::S3Lower | BranchKind::S3Upper => {
                let d = branch.delta.max(floor);
                let eta = n0.sqrt();
                let zeta = (T::lit(2.0) * d * eta / g - h).max(T::lit(1e-12));
                (d, eta, zeta)
            }
        };
        Self {
            eta,
            zeta,
            rho: (delta + branch.mu) / params.lambda(),
            delta_v: delta,
            e_plus: T::nan(),
            e_minus: T::nan(),
            iterations: 0,
            converged: false,
        }
    }
}

/// Residuals of the three consistency equations at the returned state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FvResiduals<T> {
    /// `eta - g (h + zeta) / (2 delta)`.
    pub eta_eq: T,
    /// `zeta - g eta (n(E-) - n(E+)) / (2 V (E+ - E-))`.
    pub zeta_eq: T,
    /// `rho - (mu + delta) / lambda`, with `rho` the lattice density at `delta`.
    pub density_eq: T,
}

impl<T: Real> FvResiduals<T> {
    pub fn max_abs(&self) -> T {
        self.eta_eq.abs().max(self.zeta_eq.abs()).max(self.density_eq.abs())
    }
}

/// Outcome of [`fv_iterate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FvRun<T> {
    pub state: FvState<T>,
    pub residuals: FvResiduals<T>,
    /// `|D(delta)|` after every accepted step.
    pub history: Vec<T>,
    /// Whether `history` is non-increasing over its last ten entries.
    pub monotone: bool,
    /// Whether the coherent (Case B) root family was followed.
    pub coherent: bool,
    /// Cutoff actually used after the truncation check.
    pub cutoff: usize,
    /// Mode occupations per volume: rest mode (condensate plus fluctuation),
    /// recoil mode, photon mode.
    pub n0: T,
    pub nq: T,
    pub nb: T,
}

/// Everything that follows from `delta` once `eta` is solved.
#[derive(Debug, Clone, Copy)]
struct Solved<T> {
    delta: T,
    eta: T,
    zeta: T,
    rho: T,
    e_plus: T,
    e_minus: T,
    n0: T,
    nq: T,
    nb: T,
}

struct System<'a, T> {
    params: &'a ModelParams<T>,
    lattice: &'a MomentumLattice<T>,
    mu: T,
    h: T,
    coherent: bool,
}

/// Log-spaced grid points per decade for the `eta` bracket scan.
const SCAN_PER_DECADE: usize = 8;
const SCAN_DECADES_Y: i32 = 20;
const SCAN_DECADES_U: i32 = 32;

impl<'a, T: Real> System<'a, T> {
    fn volume(&self) -> T {
        self.lattice.volume()
    }

    /// Spectrum pieces at `y = E+ E-` and `u = A B - y`, both passed so that
    /// neither is formed by cancellation.
    fn modes(&self, delta: T, y: T, u: T) -> (T, T, T, T) {
        let a = delta + self.params.eps_q();
        let b = self.params.omega();
        let gap = ((a - b) * (a - b) + T::lit(4.0) * u).sqrt();
        let e_plus = T::lit(0.5) * (a + b + gap);
        let e_minus = y / e_plus;
        (a, b, gap, e_minus)
    }

    /// `(n(E-) - n(E+)) / (E+ - E-)`, continuous through degeneracy.
    fn occupation_slope(&self, e_plus: T, e_minus: T, gap: T) -> T {
        let beta = self.params.beta();
        if gap > T::lit(1e-9) * (e_plus + e_minus) {
            (bose(beta * e_minus) - bose(beta * e_plus)) / gap
        } else {
            let n = bose(beta * T::lit(0.5) * (e_plus + e_minus));
            beta * n * (T::one() + n)
        }
    }

    fn psi(&self, delta: T, y: T, u: T) -> T {
        let g = self.params.g();
        let (a, b, gap, e_minus) = self.modes(delta, y, u);
        let e_plus = T::lit(0.5) * (a + b + gap);
        let eta = T::lit(2.0) * u.max(T::zero()).sqrt() / g;
        let q = g * g * self.occupation_slope(e_plus, e_minus, gap) / (T::lit(4.0) * delta * self.volume());
        eta * (T::one() - q) - g * self.h / (T::lit(2.0) * delta)
    }

    /// Root of the `eta` equation at fixed `delta`, returned as `(y, u)`.
    fn solve_eta(&self, delta: T) -> Result<(T, T)> {
        let a = delta + self.params.eps_q();
        let p = a * self.params.omega();
        if !self.coherent && self.h == T::zero() {
            return Ok((p, T::zero()));
        }
        // ascending y: geometric in y up to P/2, then geometric in u = P - y
        let mut grid: Vec<(T, T, bool)> = Vec::new();
        let n_y = SCAN_DECADES_Y as usize * SCAN_PER_DECADE;
        for i in 0..=n_y {
            let e = -(SCAN_DECADES_Y as f64) * (1.0 - i as f64 / n_y as f64);
            let y = p * T::lit(0.5) * T::lit(10f64.powf(e));
            grid.push((y, p - y, true));
        }
        let n_u = SCAN_DECADES_U as usize * SCAN_PER_DECADE;
        for i in 1..=n_u {
            let e = -(SCAN_DECADES_U as f64) * (i as f64 / n_u as f64);
            let u = p * T::lit(0.5) * T::lit(10f64.powf(e));
            grid.push((p - u, u, false));
        }
        grid.push((p, T::zero(), false));
        let values: Vec<T> = grid.iter().map(|&(y, u, _)| self.psi(delta, y, u)).collect();
        let crossings: Vec<usize> = (0..grid.len() - 1)
            .filter(|&i| values[i].is_finite() && values[i + 1].is_finite())
            .filter(|&i| (values[i] < T::zero()) != (values[i + 1] < T::zero()))
            .collect();
        let idx = if self.coherent {
            crossings.iter().copied().find(|&i| values[i] < T::zero())
        } else {
            crossings.iter().copied().rev().find(|&i| values[i] >= T::zero())
        };
        let Some(i) = idx else {
            return Err(Error::InvalidRegion(format!(
                "no {} root of the eta equation at delta = {:e}",
                if self.coherent { "coherent" } else { "normal" },
                delta.as_f64()
            )));
        };
        let (lo, hi) = (grid[i], grid[i + 1]);
        if lo.2 && hi.2 {
            let t = bisect(
                |t: T| {
                    let y = t.exp();
                    self.psi(delta, y, p - y)
                },
                lo.0.ln(),
                hi.0.ln(),
                T::zero(),
                DEFAULT_BISECTION_STEPS,
            )?;
            let y = t.exp();
            Ok((y, p - y))
        } else if hi.1 > T::zero() {
            let t = bisect(
                |t: T| {
                    let u = t.exp();
                    self.psi(delta, p - u, u)
                },
                lo.1.ln(),
                hi.1.ln(),
                T::zero(),
                DEFAULT_BISECTION_STEPS,
            )?;
            let u = t.exp();
            Ok((p - u, u))
        } else {
            let u = bisect(|u: T| self.psi(delta, p - u, u), lo.1, hi.1, T::zero(), DEFAULT_BISECTION_STEPS)?;
            Ok((p - u, u))
        }
    }

    fn solve(&self, delta: T) -> Result<Solved<T>> {
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(Error::InvalidRegion(format!(
                "delta_V = {:e} must stay positive",
                delta.as_f64()
            )));
        }
        let params = self.params;
        let beta = params.beta();
        let g = params.g();
        let v = self.volume();
        let (y, u) = self.solve_eta(delta)?;
        let (a, b, gap, e_minus) = self.modes(delta, y, u);
        let e_plus = T::lit(0.5) * (a + b + gap);
        let eta = T::lit(2.0) * u.sqrt() / g;
        let slope = self.occupation_slope(e_plus, e_minus, gap);
        let zeta = g * eta * slope / (T::lit(2.0) * v);
        let cos2 = if gap > T::zero() { (a - b) / gap } else { T::zero() };
        let (n_plus, n_minus) = (bose(beta * e_plus), bose(beta * e_minus));
        let half = T::lit(0.5);
        let occ_q = half * ((T::one() + cos2) * n_plus + (T::one() - cos2) * n_minus);
        let occ_b = half * ((T::one() - cos2) * n_plus + (T::one() + cos2) * n_minus);
        let rest = eta * eta + bose(beta * delta) / v;
        let regular = self.lattice.regular_sum(params.model(), beta, delta) / v;
        Ok(Solved {
            delta,
            eta,
            zeta,
            rho: rest + occ_q / v + regular,
            e_plus,
            e_minus,
            n0: rest,
            nq: occ_q / v,
            nb: occ_b / v,
        })
    }

    fn excess(&self, s: &Solved<T>) -> T {
        self.params.lambda() * s.rho - self.mu - s.delta
    }
}

/// Smallest cutoff (doubling from `start`) whose free lattice density at
/// `delta` changes by less than `tol` when the cutoff doubles.
pub fn resolve_cutoff<T: Real>(
    params: &ModelParams<T>,
    side: T,
    start: usize,
    delta: T,
    tol: T,
) -> MomentumLattice<T> {
    const MAX_CUTOFF: usize = 384;
    let beta = params.beta();
    let v = side * side * side;
    let mut lat = MomentumLattice::new(side, start.max(1), params.mass(), params.q());
    loop {
        if lat.cutoff() * 2 > MAX_CUTOFF {
            log::warn!("lattice cutoff capped at {}", lat.cutoff());
            return lat;
        }
        let next = MomentumLattice::new(side, lat.cutoff() * 2, params.mass(), params.q());
        let change = (next.nonzero_sum(beta, delta) - lat.nonzero_sum(beta, delta)).abs() / v;
        if change < tol {
            return lat;
        }
        lat = next;
    }
}

/// Solves the finite-volume consistency equations at `mu` from `initial`.
///
/// The root family follows the seed: `initial.zeta > 0` tracks the coherent
/// solution (recoil and photon modes macroscopically occupied), otherwise the
/// normal one.
pub fn fv_iterate<T: Real>(
    params: &ModelParams<T>,
    lattice: &LatticeConfig<T>,
    mu: T,
    initial: &FvState<T>,
) -> Result<FvRun<T>> {
    lattice.validate()?;
    if params.degenerate_recoil() {
        return Err(Error::InvalidParameter {
            name: "q",
            value: 0.0,
            reason: "the finite-volume oracle needs a nonzero recoil mode",
        });
    }
    if !mu.is_finite() {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu.as_f64(),
            reason: "must be finite",
        });
    }
    let delta0 = params.lambda() * initial.rho - mu;
    if !(delta0 > T::zero()) {
        return Err(Error::InvalidRegion(format!(
            "initial delta_V = {:e} is not positive",
            delta0.as_f64()
        )));
    }
    let coherent = initial.zeta > T::zero();
    let lat = resolve_cutoff(params, lattice.box_side, lattice.cutoff, delta0, lattice.tol);
    let sys = System {
        params,
        lattice: &lat,
        mu,
        h: lattice.h,
        coherent,
    };

    // move the seed until the eta equation has a root of the chosen family
    let mut x = delta0.ln();
    let mut cur = None;
    for _ in 0..crate::roots::MAX_EXPANSIONS {
        match sys.solve(x.exp()) {
            Ok(s) => {
                cur = Some(s);
                break;
            }
            Err(Error::InvalidRegion(_)) => x = x + T::LN_2(),
            Err(e) => return Err(e),
        }
    }
    let mut cur = cur.ok_or_else(|| Error::InvalidRegion("no admissible starting delta".into()))?;

    let d = lattice.damping;
    let step = T::lit(1e-6);
    let noise = T::lit(64.0) * T::epsilon() * (mu.abs() + x.exp() + params.lambda() * cur.rho);
    let scale = T::one() + mu.abs() + params.lambda() * cur.rho;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < lattice.max_iter {
        iterations += 1;
        let f = sys.excess(&cur);
        if f.abs() <= noise {
            converged = true;
            history.push(f.abs());
            break;
        }
        let fp = sys.solve((x + step).exp()).map(|s| sys.excess(&s));
        let fm = sys.solve((x - step).exp()).map(|s| sys.excess(&s));
        let slope = match (fp, fm) {
            (Ok(p), Ok(m)) => (p - m) / (T::lit(2.0) * step),
            (Ok(p), Err(_)) => (p - f) / step,
            (Err(_), Ok(m)) => (f - m) / step,
            (Err(e), Err(_)) => return Err(e),
        };
        if !(slope.abs() > T::zero()) || !slope.is_finite() {
            return Err(Error::NoConvergence {
                iterations,
                residual: f.abs().as_f64(),
            });
        }
        // damped Newton, each jump capped at a factor e in delta
        let full = (-f / slope).max(-T::one()).min(T::one());
        let mut trial = d * full;
        let mut accepted = None;
        for _ in 0..40 {
            if let Ok(s) = sys.solve((x + trial).exp()) {
                if sys.excess(&s).abs() <= f.abs() {
                    accepted = Some(s);
                    break;
                }
            }
            trial = trial * T::lit(0.5);
        }
        let Some(next) = accepted else {
            // no decrease anywhere along the Newton direction: at the noise floor
            history.push(f.abs());
            converged = f.abs() <= T::lit(1e3) * noise;
            break;
        };
        let change = (next.eta - cur.eta)
            .abs()
            .max((next.zeta - cur.zeta).abs())
            .max((next.rho - cur.rho).abs());
        x = x + trial;
        cur = next;
        let r = sys.excess(&cur).abs();
        history.push(r);
        // a tiny backtracked step is not convergence on its own
        if change < lattice.tol && r <= lattice.tol * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations,
            residual: sys.excess(&cur).abs().as_f64(),
        });
    }
    let tail = &history[history.len().saturating_sub(10)..];
    let monotone = tail.windows(2).all(|w| w[1] <= w[0]);
    if !monotone {
        log::warn!("finite-volume residual not monotone over the last steps");
    }

    let g = params.g();
    let v = lat.volume();
    let delta_v = cur.delta;
    let slope = sys.occupation_slope(cur.e_plus, cur.e_minus, cur.e_plus - cur.e_minus);
    let residuals = FvResiduals {
        eta_eq: cur.eta - g * (lattice.h + cur.zeta) / (T::lit(2.0) * delta_v),
        zeta_eq: cur.zeta - g * cur.eta * slope / (T::lit(2.0) * v),
        density_eq: cur.rho - (mu + delta_v) / params.lambda(),
    };
    Ok(FvRun {
        state: FvState {
            eta: cur.eta,
            zeta: cur.zeta,
            rho: cur.rho,
            delta_v,
            e_plus: cur.e_plus,
            e_minus: cur.e_minus,
            iterations,
            converged,
        },
        residuals,
        history,
        monotone,
        coherent,
        cutoff: lat.cutoff(),
        n0: cur.n0,
        nq: cur.nq,
        nb: cur.nb,
    })
}
