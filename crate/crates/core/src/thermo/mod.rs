//! Ideal Bose gas in three dimensions, evaluated at `mu = -delta <= 0`.
//!
//! Units: `hbar = k_B = 1`, single-particle energy `k^2 / 2m`. With
//! `z = e^{-beta delta}` and `c = (m / 2 pi beta)^{3/2}`:
//!
//! ```text
//! rho0  = c Li_{3/2}(z)
//! p0    = c Li_{5/2}(z) / beta
//! eps0  = (3/2) p0 + delta rho0        (energy of H - mu N per volume)
//! s0    = beta (eps0 + p0)
//! drho0 = d rho0 / d mu = beta c Li_{1/2}(z)
//! ```

pub mod polylog;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use polylog::{polylog, polylog_exp, PolylogOrder};

/// Inverse temperature and mass of the free gas, with the thermal prefactor
/// `(m / 2 pi beta)^{3/2}` computed once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoContext<T> {
    beta: T,
    mass: T,
    prefactor: T,
}

impl<T: Real> ThermoContext<T> {
    pub fn new(beta: T, mass: T) -> Result<Self> {
        if !(beta > T::zero() && beta.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta.as_f64(),
                reason: "must be positive and finite",
            });
        }
        if !(mass > T::zero() && mass.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mass",
                value: mass.as_f64(),
                reason: "must be positive and finite",
            });
        }
        let prefactor = (mass / (T::lit(2.0) * T::PI() * beta)).powf(T::lit(1.5));
        Ok(Self {
            beta,
            mass,
            prefactor,
        })
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    /// `(m / 2 pi beta)^{3/2}`.
    pub fn prefactor(&self) -> T {
        self.prefactor
    }

    /// Single-particle kinetic energy `k^2 / 2m`.
    pub fn kinetic(&self, k: T) -> T {
        k * k / (T::lit(2.0) * self.mass)
    }

    fn check(&self, function: &'static str, delta: T) -> Result<()> {
        if delta >= T::zero() {
            Ok(())
        } else {
            Err(Error::Domain {
                function,
                value: delta.as_f64(),
            })
        }
    }

    /// Free-gas density at `mu = -delta`.
    pub fn rho0(&self, delta: T) -> Result<T> {
        self.check("rho0", delta)?;
        Ok(self.prefactor * polylog_exp(PolylogOrder::ThreeHalves, self.beta * delta)?)
    }

    /// Critical density `rho0(0)`.
    pub fn rho_c(&self) -> T {
        self.prefactor * polylog_exp(PolylogOrder::ThreeHalves, T::zero()).unwrap_or_else(|_| T::nan())
    }

    /// Free-gas pressure at `mu = -delta`.
    pub fn p0(&self, delta: T) -> Result<T> {
        self.check("p0", delta)?;
        Ok(self.prefactor * polylog_exp(PolylogOrder::FiveHalves, self.beta * delta)? / self.beta)
    }

    /// Grand-canonical energy density `int (e - mu) n`, closed form.
    pub fn eps0(&self, delta: T) -> Result<T> {
        Ok(T::lit(1.5) * self.p0(delta)? + delta * self.rho0(delta)?)
    }

    /// Entropy density `beta (eps0 + p0)`.
    pub fn s0(&self, delta: T) -> Result<T> {
        Ok(self.beta * (self.eps0(delta)? + self.p0(delta)?))
    }

    /// `d rho0 / d mu` at `mu = -delta`; diverges like `delta^{-1/2}` at 0.
    pub fn drho0(&self, delta: T) -> Result<T> {
        self.check("drho0", delta)?;
        if delta == T::zero() {
            return Err(Error::Divergence {
                function: "drho0",
                value: 0.0,
            });
        }
        Ok(self.beta * self.prefactor * polylog_exp(PolylogOrder::Half, self.beta * delta)?)
    }
}
