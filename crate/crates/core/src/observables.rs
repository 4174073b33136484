//! Expectation values at a solved phase point.
//!
//! With `A = delta + eps(q)` and `B = Omega` the recoil/photon block of the
//! effective Hamiltonian is the quadratic form
//!
//! ```text
//! | A        g eta / 2 |
//! | g eta/2  B         |
//! ```
//!
//! whose eigenvalues are the quasi-particle energies `E+ >= E-`. Positivity of
//! `E-` is the constraint `eta^2 <= 4 Omega A / g^2`, saturated on S3.

use serde::{Deserialize, Serialize};

use crate::branch::{Branch, BranchKind, PhaseSolver};
use crate::error::{Error, Result};
use crate::params::{Model, ModelParams};
use crate::scalar::Real;

/// Quasi-particle energies and mixing angle of the recoil/photon block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum<T> {
    pub e_plus: T,
    pub e_minus: T,
    /// `tan 2 theta = g eta / (A - B)`, in `[0, pi/2]`.
    pub theta: T,
}

/// Quasi-particle spectrum at gap `delta` and rest-condensate amplitude `eta`.
///
/// `E-` is evaluated as `(A B - g^2 eta^2 / 4) / E+`, which keeps full
/// relative precision near the constraint; a saturated constraint (within
/// rounding) gives `E- = 0` and `E+ = A + B` exactly.
pub fn spectrum<T: Real>(delta: T, eta: T, params: &ModelParams<T>) -> Result<Spectrum<T>> {
    if !(delta >= T::zero()) {
        return Err(Error::Domain {
            function: "spectrum",
            value: delta.as_f64(),
        });
    }
    if !(eta >= T::zero()) || !eta.is_finite() {
        return Err(Error::Domain {
            function: "spectrum",
            value: eta.as_f64(),
        });
    }
    let a = delta + params.eps_q();
    let b = params.omega();
    let g = params.g();
    let product = a * b;
    let coupling = g * g * eta * eta / T::lit(4.0);
    let slack = product - coupling;
    let rounding = T::lit(8.0) * T::epsilon() * product.max(coupling);
    if slack < -rounding {
        return Err(Error::Domain {
            function: "spectrum (eta^2 > 4 Omega (delta + eps_q) / g^2)",
            value: eta.as_f64(),
        });
    }
    let half = T::lit(0.5);
    let theta = half * (g * eta).atan2(a - b);
    if slack.abs() <= rounding {
        return Ok(Spectrum {
            e_plus: a + b,
            e_minus: T::zero(),
            theta,
        });
    }
    let diff = a - b;
    let e_plus = half * (a + b) + half * (diff * diff + g * g * eta * eta).sqrt();
    Ok(Spectrum {
        e_plus,
        e_minus: slack / e_plus,
        theta,
    })
}

/// Condensate densities `(n0, nq, nb)`: rest, recoil and photon.
pub fn condensates<T: Real>(branch: &Branch<T>, params: &ModelParams<T>) -> (T, T, T) {
    match branch.kind {
        BranchKind::S1 => (T::zero(), T::zero(), T::zero()),
        BranchKind::S2 => {
            let rho_c = params.thermo().rho_c();
            let n0 = (branch.mu / params.lambda() - params.w() * rho_c).max(T::zero());
            (n0, T::zero(), T::zero())
        }
        BranchKind::S3Lower | BranchKind::S3Upper => {
            let d = branch.delta;
            let a = d + params.eps_q();
            let scale = params.condensate_scale();
            let g2 = params.g() * params.g();
            (scale * a, scale * d, T::lit(4.0) * d * a / g2)
        }
    }
}

/// Correlation densities `(corr_qb, corr_0b, corr_0q)`.
///
/// `corr_0b` is `sqrt(n0 nb) = 4 (delta + eps) sqrt(Omega delta) / g^2`, the
/// value forced by factorisation of the condensate amplitudes.
pub fn correlations<T: Real>(branch: &Branch<T>, params: &ModelParams<T>) -> (T, T, T) {
    if !branch.kind.is_s3() {
        return (T::zero(), T::zero(), T::zero());
    }
    let d = branch.delta;
    let a = d + params.eps_q();
    let om = params.omega();
    let g2 = params.g() * params.g();
    let four = T::lit(4.0);
    let corr_qb = four * d * (om * a).sqrt() / g2;
    let corr_0b = four * a * (om * d).sqrt() / g2;
    let corr_0q = four * om * (a * d).sqrt() / g2;
    (corr_qb, corr_0b, corr_0q)
}

/// Thermodynamic densities `(energy, entropy, pressure)` of a branch.
///
/// The energy is that of `H - mu N` per volume; `pressure = entropy / beta -
/// energy` holds by construction of the closed forms.
pub fn thermo<T: Real>(branch: &Branch<T>, params: &ModelParams<T>) -> Result<(T, T, T)> {
    let ctx = params.thermo();
    let w = params.w();
    let d = branch.delta;
    let s = d + branch.mu;
    let two_lambda = T::lit(2.0) * params.lambda();
    let entropy = w * ctx.s0(d)?;
    let mut energy = w * ctx.eps0(d)? - s * s / two_lambda;
    if branch.kind.is_s3() {
        energy = energy + params.condensate_scale() * (d + params.eps_q()) * d;
    }
    let pressure = entropy / params.beta() - energy;
    Ok((energy, entropy, pressure))
}

/// Every observable at one equilibrium (or explicitly chosen) branch point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint<T> {
    pub mu: T,
    pub branch: BranchKind,
    pub delta: T,
    pub rho_total: T,
    pub pressure: T,
    pub entropy_density: T,
    pub energy_density: T,
    pub n0: T,
    pub nq: T,
    pub nb: T,
    /// `sqrt(n0)`; the condensate phase is fixed to zero.
    pub eta_mag: T,
    pub corr_qb: T,
    pub corr_0b: T,
    pub corr_0q: T,
    pub e_plus: T,
    pub e_minus: T,
    pub theta: T,
}

impl<T: Real> PhasePoint<T> {
    /// Evaluates all observables on `branch`; the pressure is the branch's
    /// closed form.
    pub fn from_branch(branch: &Branch<T>, params: &ModelParams<T>) -> Result<Self> {
        let (n0, nq, nb) = condensates(branch, params);
        let (corr_qb, corr_0b, corr_0q) = correlations(branch, params);
        let (energy, entropy, _) = thermo(branch, params)?;
        let eta_mag = n0.sqrt();
        let spec = spectrum(branch.delta, eta_mag, params)?;
        let e_minus = if branch.kind.is_s3() {
            T::zero()
        } else {
            spec.e_minus
        };
        Ok(Self {
            mu: branch.mu,
            branch: branch.kind,
            delta: branch.delta,
            rho_total: branch.rho_total,
            pressure: branch.pressure,
            entropy_density: entropy,
            energy_density: energy,
            n0,
            nq,
            nb,
            eta_mag,
            corr_qb,
            corr_0b,
            corr_0q,
            e_plus: spec.e_plus,
            e_minus,
            theta: spec.theta,
        })
    }
}

impl<T: Real> PhaseSolver<T> {
    /// Observables at the equilibrium branch for `mu`.
    pub fn phase_point(&self, mu: T) -> Result<PhasePoint<T>> {
        let b = self.select_phase(mu)?;
        PhasePoint::from_branch(&b, self.params())
    }
}

/// Spatial density over one period of the recoil wave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GratingProfile<T> {
    /// `2 pi / q`.
    pub period: T,
    /// `(x, rho(x))` on `n` equally spaced points of `[0, period)`.
    pub samples: Vec<(T, T)>,
    /// Arithmetic mean of the sampled densities.
    pub mean_density: T,
    /// `2 |C|`; the profile swings by `2 * amplitude` peak to peak.
    pub amplitude: T,
    /// Phase of the interference term.
    pub phase: T,
}

/// Matter-wave grating `rho(x) = rho + 2 |C| cos(q x + phase)`.
///
/// Only the Rayleigh model on S3 interferes (`|C| = corr_0q`); in the Raman
/// model the recoiled atoms sit in the other internal state, and without a
/// recoil condensate there is nothing to interfere with, so the profile is
/// flat at `rho_total`.
pub fn grating_profile<T: Real>(
    point: &PhasePoint<T>,
    params: &ModelParams<T>,
    n_samples: usize,
    phase: T,
) -> Result<GratingProfile<T>> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            value: n_samples as f64,
            reason: "need at least two samples",
        });
    }
    let q = params.q();
    if !(q > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q.as_f64(),
            reason: "grating period 2 pi / q needs q > 0",
        });
    }
    let period = T::lit(2.0) * T::PI() / q;
    let c_abs = if params.model() == Model::Rayleigh && point.branch.is_s3() {
        point.corr_0q
    } else {
        T::zero()
    };
    let amplitude = T::lit(2.0) * c_abs;
    let n = T::lit(n_samples as f64);
    let samples: Vec<(T, T)> = (0..n_samples)
        .map(|j| {
            let x = period * T::lit(j as f64) / n;
            let rho = if c_abs == T::zero() {
                point.rho_total
            } else {
                point.rho_total + amplitude * (q * x + phase).cos()
            };
            (x, rho)
        })
        .collect();
    let mean_density = samples.iter().fold(T::zero(), |acc, s| acc + s.1) / n;
    Ok(GratingProfile {
        period,
        samples,
        mean_density,
        amplitude,
        phase,
    })
}
