//! Equilibrium phase structure of two exactly solvable models of
//! Bose-Einstein-condensation superradiance with momentum recoil.
//!
//! The crate is organised bottom-up:
//!
//! * [`thermo`]: ideal Bose gas functions (polylogarithm and quadrature paths).
//! * [`params`]: couplings, model kind and derived constants.
//! * [`branch`]: thermodynamic-limit density equations, critical points and
//!   phase selection by pressure maximisation.
//! * [`observables`]: condensates, correlations, spectrum, thermodynamic
//!   densities and the matter-wave grating profile.
//! * [`oracle`]: finite-volume self-consistency solver on a momentum lattice.
//!
//! Every kernel is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! fix the scalar to `f64`.
//!
//! ```
//! use recoil_bec::{BranchKind, Model, ModelParams64, PhaseSolver64};
//!
//! let solver = PhaseSolver64::new(ModelParams64::defaults(Model::Raman))?;
//! let c = solver.critical();
//! assert!(c.mu0 < c.mu_c);
//! let point = solver.phase_point(c.mu1 + 1.0)?;
//! assert_eq!(point.branch, BranchKind::S3Upper);
//! assert!(point.n0 > 0.0 && point.nq > 0.0 && point.nb > 0.0);
//! # Ok::<(), recoil_bec::Error>(())
//! ```

// `!(x > 0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// quadrature nodes and frozen reference values keep all their digits
#![allow(clippy::excessive_precision)]

pub mod branch;
pub mod error;
pub mod observables;
pub mod oracle;
pub mod params;
pub mod roots;
pub mod scalar;
pub mod thermo;

pub use branch::{Branch, BranchKind, CriticalPoints, Mu1Side, PhaseSolver, Subcase, S3Roots};
pub use error::{Error, Result};
pub use observables::{GratingProfile, PhasePoint, Spectrum};
pub use oracle::{FvRun, FvState, LatticeConfig, LimitScan};
pub use params::{Couplings, Model, ModelParams};
pub use scalar::Real;
pub use thermo::ThermoContext;

pub type ModelParams64 = ModelParams<f64>;
pub type Couplings64 = Couplings<f64>;
pub type ThermoContext64 = ThermoContext<f64>;
pub type PhaseSolver64 = PhaseSolver<f64>;
pub type Branch64 = Branch<f64>;
pub type CriticalPoints64 = CriticalPoints<f64>;
pub type PhasePoint64 = PhasePoint<f64>;
pub type GratingProfile64 = GratingProfile<f64>;
pub type LatticeConfig64 = LatticeConfig<f64>;
pub type FvState64 = FvState<f64>;
