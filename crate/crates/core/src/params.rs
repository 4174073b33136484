//! Model definition: couplings, model kind and derived constants.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::thermo::ThermoContext;

/// The two superradiance models.
///
/// Raman: two-level atoms, recoiled and condensed atoms in different internal
/// states; the free-gas kinetic sum runs over both levels. Rayleigh: a single
/// internal state, recoiled atoms can interfere with the condensate at rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    Raman,
    Rayleigh,
}

impl Model {
    /// Number of free-gas species in the kinetic sum.
    pub fn multiplicity(self) -> u32 {
        match self {
            Model::Raman => 2,
            Model::Rayleigh => 1,
        }
    }

    /// Numeric label used on the command line (`1` or `2`).
    pub fn number(self) -> u8 {
        match self {
            Model::Raman => 1,
            Model::Rayleigh => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Model::Raman),
            2 => Some(Model::Rayleigh),
            _ => None,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Raman => f.write_str("raman"),
            Model::Rayleigh => f.write_str("rayleigh"),
        }
    }
}

/// Raw physical couplings. All default to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings<T> {
    /// Inverse temperature.
    pub beta: T,
    /// Mean-field repulsion stabilising the system.
    pub lambda: T,
    /// Photon mode frequency.
    pub omega: T,
    /// Photon-atom coupling.
    pub g: T,
    pub mass: T,
    /// Recoil wavenumber magnitude.
    pub q: T,
}

impl<T: Real> Default for Couplings<T> {
    fn default() -> Self {
        Self {
            beta: T::one(),
            lambda: T::one(),
            omega: T::one(),
            g: T::one(),
            mass: T::one(),
            q: T::one(),
        }
    }
}

/// Validated model parameters with the derived constants.
///
/// `kappa = 8 omega lambda / g^2 - 1` must be positive (thermodynamic
/// stability, `lambda > g^2 / 8 omega`); `alpha = eps(q) (kappa + 1) / 2`
/// is the upper edge of the rest-condensate window above `mu_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    model: Model,
    couplings: Couplings<T>,
    thermo: ThermoContext<T>,
    eps_q: T,
    kappa: T,
    alpha: T,
}

fn positive<T: Real>(name: &'static str, value: T) -> Result<()> {
    if value > T::zero() && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: value.as_f64(),
            reason: "must be positive and finite",
        })
    }
}

impl<T: Real> ModelParams<T> {
    pub fn new(model: Model, couplings: Couplings<T>) -> Result<Self> {
        let Couplings {
            beta,
            lambda,
            omega,
            g,
            mass,
            q,
        } = couplings;
        positive("beta", beta)?;
        positive("lambda", lambda)?;
        positive("omega", omega)?;
        positive("g", g)?;
        positive("mass", mass)?;
        if !(q >= T::zero() && q.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q.as_f64(),
                reason: "must be non-negative and finite",
            });
        }
        let thermo = ThermoContext::new(beta, mass)?;
        let kappa = T::lit(8.0) * omega * lambda / (g * g) - T::one();
        if !(kappa > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda.as_f64(),
                reason: "stability requires lambda > g^2 / (8 omega)",
            });
        }
        let eps_q = thermo.kinetic(q);
        let alpha = eps_q * (kappa + T::one()) / T::lit(2.0);
        // same window edge written through the couplings directly
        let alpha_direct = T::lit(4.0) * omega * lambda * eps_q / (g * g);
        debug_assert!((alpha - alpha_direct).abs() <= T::lit(1e3) * T::epsilon() * alpha.max(T::one()));
        if q == T::zero() {
            log::warn!("q = 0: recoil switched off, alpha = 0 reduces to the no-recoil model");
        }
        Ok(Self {
            model,
            couplings,
            thermo,
            eps_q,
            kappa,
            alpha,
        })
    }

    /// Default couplings (all 1) for the given model.
    pub fn defaults(model: Model) -> Self {
        Self::new(model, Couplings::default()).expect("unit couplings are stable")
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn couplings(&self) -> &Couplings<T> {
        &self.couplings
    }

    pub fn thermo(&self) -> &ThermoContext<T> {
        &self.thermo
    }

    pub fn beta(&self) -> T {
        self.couplings.beta
    }

    pub fn lambda(&self) -> T {
        self.couplings.lambda
    }

    pub fn omega(&self) -> T {
        self.couplings.omega
    }

    pub fn g(&self) -> T {
        self.couplings.g
    }

    pub fn mass(&self) -> T {
        self.couplings.mass
    }

    pub fn q(&self) -> T {
        self.couplings.q
    }

    /// Recoil energy `q^2 / 2m`.
    pub fn eps_q(&self) -> T {
        self.eps_q
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Free-gas multiplicity `w` as a scalar.
    pub fn w(&self) -> T {
        T::lit(self.model.multiplicity() as f64)
    }

    /// `q = 0`: no recoil, the superradiant window collapses (`alpha = 0`).
    pub fn degenerate_recoil(&self) -> bool {
        self.couplings.q == T::zero()
    }

    /// `4 omega / g^2`, the scale of every Solution-3 condensate density.
    pub fn condensate_scale(&self) -> T {
        T::lit(4.0) * self.omega() / (self.g() * self.g())
    }
}
