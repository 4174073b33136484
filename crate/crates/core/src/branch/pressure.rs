//! Branch pressures as functions of `(delta, mu)`.
//!
//! Each is stationary in `delta` exactly on its own density equation, so
//! `dp/dmu = (delta + mu) / lambda` along the branch.

use crate::error::Result;
use crate::params::ModelParams;
use crate::scalar::Real;

/// `w p0(delta) + (delta + mu)^2 / 2 lambda`.
pub fn p1<T: Real>(params: &ModelParams<T>, delta: T, mu: T) -> Result<T> {
    let s = delta + mu;
    Ok(params.w() * params.thermo().p0(delta)? + s * s / (T::lit(2.0) * params.lambda()))
}

/// `w p0(0) + mu^2 / 2 lambda`.
pub fn p2<T: Real>(params: &ModelParams<T>, mu: T) -> Result<T> {
    p1(params, T::zero(), mu)
}

/// `w p0(delta) + [(delta + mu)^2 - (kappa + 1) delta^2 - 2 alpha delta] / 2 lambda`.
pub fn p3<T: Real>(params: &ModelParams<T>, delta: T, mu: T) -> Result<T> {
    let s = delta + mu;
    let quad = s * s - (params.kappa() + T::one()) * delta * delta - T::lit(2.0) * params.alpha() * delta;
    Ok(params.w() * params.thermo().p0(delta)? + quad / (T::lit(2.0) * params.lambda()))
}
