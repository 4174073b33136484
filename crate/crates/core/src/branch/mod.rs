//! Thermodynamic-limit branches, critical points and phase selection.
//!
//! With `w` the free-gas multiplicity and `delta = lim (lambda rho - mu)`:
//!
//! ```text
//! S1:  mu = w lambda rho0(delta) - delta                       mu <= mu_c
//! S2:  delta = 0                                  mu_c <= mu <= mu_c + alpha
//! S3:  mu = w lambda rho0(delta) + kappa delta + alpha        mu >= mu0 + alpha
//! ```
//!
//! The S3 map is convex in `delta` with its minimum `mu0 + alpha` at `delta0`,
//! so it has a lower root on `[0, delta0]` and an upper root on
//! `[delta0, inf)`. The equilibrium is the admissible branch of largest
//! pressure.

mod pressure;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::roots::{bisect, bisect_log, grow_until, DEFAULT_BISECTION_STEPS, MAX_EXPANSIONS};
use crate::scalar::Real;

pub use pressure::{p1, p2, p3};

/// Which self-consistent solution a branch belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchKind {
    /// Normal phase, no condensate.
    S1,
    /// Condensate at rest only, `delta = 0`.
    S2,
    /// Lower root of the S3 map; never the equilibrium.
    S3Lower,
    /// Simultaneous rest, recoil and photon condensation.
    S3Upper,
}

impl BranchKind {
    pub fn label(self) -> &'static str {
        match self {
            BranchKind::S1 => "S1",
            BranchKind::S2 => "S2",
            BranchKind::S3Lower => "S3lower",
            BranchKind::S3Upper => "S3upper",
        }
    }

    pub fn is_s3(self) -> bool {
        matches!(self, BranchKind::S3Lower | BranchKind::S3Upper)
    }
}

impl fmt::Display for BranchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for BranchKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "S1" => Ok(BranchKind::S1),
            "S2" => Ok(BranchKind::S2),
            "S3lower" => Ok(BranchKind::S3Lower),
            "S3upper" => Ok(BranchKind::S3Upper),
            other => Err(format!("unknown branch `{other}`")),
        }
    }
}

/// A solved point on one branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch<T> {
    pub kind: BranchKind,
    pub delta: T,
    pub mu: T,
    pub pressure: T,
    /// `(delta + mu) / lambda`, the slope of the branch pressure in `mu`.
    pub rho_total: T,
}

/// `mu0 + alpha` against `mu_c`: whether the S2 window survives in full.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subcase {
    /// `mu0 + alpha >= mu_c`.
    Easy,
    /// `mu0 + alpha < mu_c`.
    Subtle,
}

/// Position of the first-order transition `mu1` relative to `mu_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mu1Side {
    AboveMuC,
    BelowMuC,
}

impl fmt::Display for Subcase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subcase::Easy => "easy",
            Subcase::Subtle => "subtle",
        })
    }
}

impl fmt::Display for Mu1Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mu1Side::AboveMuC => "above_mu_c",
            Mu1Side::BelowMuC => "below_mu_c",
        })
    }
}

/// Critical chemical potentials of a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoints<T> {
    /// `w lambda rho_c`: onset of the rest condensate.
    pub mu_c: T,
    /// Minimiser of the S3 map.
    pub delta0: T,
    /// `w lambda rho0(delta0) + kappa delta0`.
    pub mu0: T,
    pub alpha: T,
    /// First-order transition into S3.
    pub mu1: T,
    /// `|p3(mu1) - max(p1, p2)(mu1)|`.
    pub mu1_residual: T,
    pub subcase: Subcase,
    pub mu1_side: Mu1Side,
}

/// Both roots of the S3 map at one `mu`; absent roots are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct S3Roots<T> {
    pub lower: Option<Branch<T>>,
    pub upper: Option<Branch<T>>,
}

/// Grid bracket of `mu1` from a uniform scan of the pressure difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mu1Bracket<T> {
    pub lo: T,
    pub hi: T,
    /// `None` when the bracket straddles `mu_c`.
    pub side: Option<Mu1Side>,
}

/// Phase solver with cached critical points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSolver<T> {
    params: ModelParams<T>,
    critical: CriticalPoints<T>,
    max_steps: usize,
}

/// `w lambda rho0(delta) - delta`; strictly decreasing from `mu_c`.
pub fn s1_map<T: Real>(params: &ModelParams<T>, delta: T) -> Result<T> {
    Ok(params.w() * params.lambda() * params.thermo().rho0(delta)? - delta)
}

/// `w lambda rho0(delta) + kappa delta + alpha`; convex, minimal at `delta0`.
pub fn s3_map<T: Real>(params: &ModelParams<T>, delta: T) -> Result<T> {
    Ok(params.w() * params.lambda() * params.thermo().rho0(delta)? + params.kappa() * delta + params.alpha())
}

fn branch<T: Real>(params: &ModelParams<T>, kind: BranchKind, delta: T, mu: T) -> Result<Branch<T>> {
    let pressure = match kind {
        BranchKind::S1 => p1(params, delta, mu)?,
        BranchKind::S2 => p2(params, mu)?,
        BranchKind::S3Lower | BranchKind::S3Upper => p3(params, delta, mu)?,
    };
    // delta + mu cancels in the dilute normal phase; use the density directly
    let rho_total = match kind {
        BranchKind::S1 => params.w() * params.thermo().rho0(delta)?,
        _ => (delta + mu) / params.lambda(),
    };
    Ok(Branch {
        kind,
        delta,
        mu,
        pressure,
        rho_total,
    })
}

/// Evaluates `f` inside a closure that cannot return errors; the first error
/// is stashed and replaces the result afterwards.
fn guarded<T: Real, F>(mut f: F) -> (impl FnMut(T) -> T, std::rc::Rc<std::cell::RefCell<Option<Error>>>)
where
    F: FnMut(T) -> Result<T>,
{
    let slot = std::rc::Rc::new(std::cell::RefCell::new(None));
    let inner = slot.clone();
    let g = move |x: T| match f(x) {
        Ok(v) => v,
        Err(e) => {
            inner.borrow_mut().get_or_insert(e);
            T::nan()
        }
    };
    (g, slot)
}

fn solve_guarded<T: Real, F>(f: F, lo: T, hi: T, log_scale: bool, steps: usize) -> Result<T>
where
    F: FnMut(T) -> Result<T>,
{
    let (g, slot) = guarded(f);
    let r = if log_scale {
        bisect_log(g, lo, hi, T::zero(), steps)
    } else {
        bisect(g, lo, hi, T::zero(), steps)
    };
    if let Some(e) = slot.borrow_mut().take() {
        return Err(e);
    }
    r
}

fn find_delta0<T: Real>(params: &ModelParams<T>, steps: usize) -> Result<T> {
    let scale = params.w() * params.lambda();
    let kappa = params.kappa();
    let excess = |d: T| -> Result<T> { Ok(scale * params.thermo().drho0(d)? - kappa) };
    // drho0 diverges at 0+ and vanishes at infinity
    let lo = grow_until(T::one(), T::lit(0.1), "delta0 lower bracket", |d| {
        excess(d).map(|v| v > T::zero()).unwrap_or(false)
    })?;
    let hi = grow_until(T::one(), T::lit(10.0), "delta0 upper bracket", |d| {
        excess(d).map(|v| v < T::zero()).unwrap_or(false)
    })?;
    if lo >= hi {
        // only possible when both probes landed on the starting point
        return Ok(lo);
    }
    solve_guarded(excess, lo, hi, true, steps)
}

impl<T: Real> PhaseSolver<T> {
    pub fn new(params: ModelParams<T>) -> Result<Self> {
        Self::with_steps(params, DEFAULT_BISECTION_STEPS)
    }

    /// Solver with a custom cap on bisection steps.
    pub fn with_steps(params: ModelParams<T>, max_steps: usize) -> Result<Self> {
        let max_steps = max_steps.max(1);
        let mu_c = params.w() * params.lambda() * params.thermo().rho_c();
        let delta0 = find_delta0(&params, max_steps)?;
        let mu0 = s3_map(&params, delta0)? - params.alpha();
        let alpha = params.alpha();
        let subcase = if mu0 + alpha >= mu_c {
            Subcase::Easy
        } else {
            Subcase::Subtle
        };
        let mut solver = Self {
            params,
            critical: CriticalPoints {
                mu_c,
                delta0,
                mu0,
                alpha,
                mu1: T::nan(),
                mu1_residual: T::nan(),
                subcase,
                mu1_side: Mu1Side::AboveMuC,
            },
            max_steps,
        };
        let mu1 = solver.locate_mu1()?;
        solver.critical.mu1 = mu1;
        solver.critical.mu1_residual = solver.pressure_gap(mu1)?.abs();
        solver.critical.mu1_side = if mu1 >= mu_c {
            Mu1Side::AboveMuC
        } else {
            Mu1Side::BelowMuC
        };
        log::debug!("critical points: {:?}", solver.critical);
        Ok(solver)
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn critical(&self) -> &CriticalPoints<T> {
        &self.critical
    }

    /// Normal-phase branch: unique root of `mu = w lambda rho0(delta) - delta`.
    pub fn solve_s1(&self, mu: T) -> Result<Branch<T>> {
        let mu_c = self.critical.mu_c;
        if !(mu <= mu_c) {
            return Err(Error::BranchNotAdmissible {
                branch: "S1",
                mu: mu.as_f64(),
            });
        }
        let p = &self.params;
        let f = |d: T| -> Result<T> { Ok(s1_map(p, d)? - mu) };
        let delta = if mu == mu_c {
            T::zero()
        } else {
            // s1_map(hi) <= mu_c - hi < mu
            let hi = (-mu).max(T::zero()) + mu_c + T::one();
            solve_guarded(f, T::zero(), hi, false, self.max_steps)?
        };
        branch(p, BranchKind::S1, delta, mu)
    }

    /// Rest-condensate branch, admissible on `[mu_c, mu_c + alpha]`.
    pub fn solve_s2(&self, mu: T) -> Result<Branch<T>> {
        let c = &self.critical;
        if !(mu >= c.mu_c && mu <= c.mu_c + c.alpha) {
            return Err(Error::BranchNotAdmissible {
                branch: "S2",
                mu: mu.as_f64(),
            });
        }
        branch(&self.params, BranchKind::S2, T::zero(), mu)
    }

    /// Both roots of the S3 map at `mu`.
    pub fn solve_s3(&self, mu: T) -> Result<S3Roots<T>> {
        let p = &self.params;
        let d0 = self.critical.delta0;
        let none = S3Roots {
            lower: None,
            upper: None,
        };
        if mu.is_nan() {
            return Ok(none);
        }
        let at_min = s3_map(p, d0)? - mu;
        if at_min > T::zero() {
            return Ok(none);
        }
        let f = |d: T| -> Result<T> { Ok(s3_map(p, d)? - mu) };
        let (lower, upper) = if at_min == T::zero() {
            (Some(d0), d0)
        } else {
            let at_zero = s3_map(p, T::zero())? - mu;
            let lower = if at_zero >= T::zero() {
                Some(solve_guarded(f, T::zero(), d0, false, self.max_steps)?)
            } else {
                None
            };
            // kappa hi + alpha > mu
            let hi = d0 + ((mu - p.alpha()) / p.kappa()).max(T::zero()) + T::one();
            let upper = solve_guarded(f, d0, hi, false, self.max_steps)?;
            (lower, upper)
        };
        Ok(S3Roots {
            lower: lower
                .map(|d| branch(p, BranchKind::S3Lower, d, mu))
                .transpose()?,
            upper: Some(branch(p, BranchKind::S3Upper, upper, mu)?),
        })
    }

    /// Admissible branches at `mu` (S3 lower root excluded).
    pub fn admissible(&self, mu: T) -> Result<Vec<Branch<T>>> {
        let c = &self.critical;
        let mut out = Vec::with_capacity(3);
        if mu <= c.mu_c {
            out.push(self.solve_s1(mu)?);
        }
        if mu >= c.mu_c && mu <= c.mu_c + c.alpha {
            out.push(self.solve_s2(mu)?);
        }
        if let Some(up) = self.solve_s3(mu)?.upper {
            out.push(up);
        }
        Ok(out)
    }

    /// Equilibrium branch: largest pressure among admissible branches.
    ///
    /// An exact tie goes to S3 upper; S1 and S2 coincide at `mu_c`, where S1
    /// is reported.
    pub fn select_phase(&self, mu: T) -> Result<Branch<T>> {
        let candidates = self.admissible(mu)?;
        let mut best: Option<Branch<T>> = None;
        for b in candidates {
            best = match best {
                None => Some(b),
                Some(cur) if b.pressure > cur.pressure => Some(b),
                Some(cur) if b.pressure == cur.pressure && b.kind == BranchKind::S3Upper => Some(b),
                keep => keep,
            };
        }
        debug_assert!(best.is_some() || mu.is_nan(), "windows cover the real line");
        best.ok_or(Error::NoAdmissibleBranch { mu: mu.as_f64() })
    }

    /// Equilibrium pressure `p(mu)`.
    pub fn pressure(&self, mu: T) -> Result<T> {
        self.select_phase(mu).map(|b| b.pressure)
    }

    /// Pressure of the S1/S2 envelope, continued as S2 beyond `mu_c + alpha`.
    fn envelope(&self, mu: T) -> Result<T> {
        if mu <= self.critical.mu_c {
            Ok(self.solve_s1(mu)?.pressure)
        } else {
            p2(&self.params, mu)
        }
    }

    /// `p3_upper(mu) - envelope(mu)` for `mu >= mu0 + alpha`.
    pub fn pressure_gap(&self, mu: T) -> Result<T> {
        let up = self
            .solve_s3(mu)?
            .upper
            .ok_or(Error::BranchNotAdmissible {
                branch: "S3upper",
                mu: mu.as_f64(),
            })?;
        Ok(up.pressure - self.envelope(mu)?)
    }

    /// First-order transition: where S3 upper overtakes the S1/S2 envelope.
    fn locate_mu1(&self) -> Result<T> {
        let c = self.critical;
        let lo = c.mu0 + c.alpha;
        let gap_lo = self.pressure_gap(lo)?;
        if gap_lo >= T::zero() {
            return Ok(lo);
        }
        // at mu_c + alpha the lower root gives p2 exactly, so the gap is
        // positive there unless the window has collapsed
        let mut step = (c.mu_c + c.alpha - lo).max(T::lit(1e-3));
        let mut hi = lo + step;
        let mut attempts = 0;
        while self.pressure_gap(hi)? <= T::zero() {
            attempts += 1;
            if attempts > MAX_EXPANSIONS {
                return Err(Error::Bracket {
                    what: "mu1 upper bracket",
                    attempts,
                });
            }
            step = step * T::lit(2.0);
            hi = lo + step;
        }
        solve_guarded(|mu| self.pressure_gap(mu), lo, hi, false, self.max_steps)
    }

    /// Brackets `mu1` on a uniform grid of `steps` intervals over
    /// `[mu0 + alpha, max(mu_c + alpha, mu1)]`.
    pub fn scan_mu1(&self, steps: usize) -> Result<Mu1Bracket<T>> {
        let c = self.critical;
        let steps = steps.max(1);
        let lo = c.mu0 + c.alpha;
        let hi = (c.mu_c + c.alpha).max(c.mu1 + T::lit(1e-9));
        let n = T::lit(steps as f64);
        let mut prev = (lo, self.pressure_gap(lo)?);
        for i in 1..=steps {
            let mu = if i == steps {
                hi
            } else {
                lo + (hi - lo) * T::lit(i as f64) / n
            };
            let gap = self.pressure_gap(mu)?;
            if prev.1 < T::zero() && gap >= T::zero() {
                let side = if prev.0 >= c.mu_c {
                    Some(Mu1Side::AboveMuC)
                } else if mu < c.mu_c {
                    Some(Mu1Side::BelowMuC)
                } else {
                    None
                };
                return Ok(Mu1Bracket {
                    lo: prev.0,
                    hi: mu,
                    side,
                });
            }
            prev = (mu, gap);
        }
        Err(Error::Bracket {
            what: "mu1 grid scan",
            attempts: steps,
        })
    }
}

/// One-shot critical points.
pub fn critical_points<T: Real>(params: &ModelParams<T>) -> Result<CriticalPoints<T>> {
    PhaseSolver::new(*params).map(|s| s.critical)
}

/// One-shot normal-phase solve.
pub fn solve_s1<T: Real>(mu: T, params: &ModelParams<T>) -> Result<Branch<T>> {
    PhaseSolver::new(*params)?.solve_s1(mu)
}

/// One-shot S3 solve.
pub fn solve_s3<T: Real>(mu: T, params: &ModelParams<T>) -> Result<S3Roots<T>> {
    PhaseSolver::new(*params)?.solve_s3(mu)
}

/// One-shot phase selection.
pub fn select_phase<T: Real>(mu: T, params: &ModelParams<T>) -> Result<Branch<T>> {
    PhaseSolver::new(*params)?.select_phase(mu)
}

/// One-shot `mu1`.
pub fn locate_mu1<T: Real>(params: &ModelParams<T>) -> Result<(T, Mu1Side)> {
    let c = critical_points(params)?;
    Ok((c.mu1, c.mu1_side))
}

#[cfg(test)]
mod tests;
