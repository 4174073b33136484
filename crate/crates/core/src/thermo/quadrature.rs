//! Direct radial quadrature of the free-gas integrals.
//!
//! Independent of the polylogarithm route in the parent module and used to
//! cross-validate it: each function integrates `k^2 f(k) / (2 pi^2)` over
//! `[0, K]` with adaptive Gauss-Kronrod (7/15 points). `K` is chosen so that
//! `beta k^2 / 2m >= 60` at the cutoff, which puts the dropped tail below
//! `e^{-60}` times the integrand scale.

use super::ThermoContext;
use crate::error::{Error, Result};
use crate::scalar::Real;

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for KRONROD_NODES[1], [3], [5], [7]
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: usize = 48;
const CUTOFF_EXPONENT: f64 = 60.0;

/// Gauss-Kronrod 7/15 pair on `[a, b]`: (Kronrod estimate, error estimate).
fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let fc = f(mid);
    let mut kronrod = fc * T::lit(KRONROD_WEIGHTS[7]);
    let mut gauss = fc * T::lit(GAUSS_WEIGHTS[3]);
    for i in 0..7 {
        let dx = half * T::lit(KRONROD_NODES[i]);
        let pair = f(mid - dx) + f(mid + dx);
        kronrod = kronrod + pair * T::lit(KRONROD_WEIGHTS[i]);
        if i % 2 == 1 {
            gauss = gauss + pair * T::lit(GAUSS_WEIGHTS[i / 2]);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Each subinterval gets a share of the tolerance proportional to its width.
fn adaptive<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, tol_per_len: T, depth: usize) -> T {
    let (value, err) = gk15(f, a, b);
    // below the rounding floor the error estimate is noise
    let floor = T::epsilon() * T::lit(50.0) * value.abs();
    if err <= (tol_per_len * (b - a)).max(floor) || depth >= MAX_DEPTH {
        return value;
    }
    let mid = (a + b) * T::lit(0.5);
    adaptive(f, a, mid, tol_per_len, depth + 1) + adaptive(f, mid, b, tol_per_len, depth + 1)
}

/// Adaptive Gauss-Kronrod integral of `f` over `[a, b]` to absolute
/// tolerance `tol`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> T {
    if b == a {
        return T::zero();
    }
    adaptive(&f, a, b, tol / (b - a).abs(), 0)
}

impl<T: Real> ThermoContext<T> {
    fn radial_cutoff(&self) -> T {
        (T::lit(2.0 * CUTOFF_EXPONENT) * self.mass() / self.beta()).sqrt()
    }

    fn radial<F: Fn(T) -> T>(&self, f: F) -> T {
        let norm = T::one() / (T::lit(2.0) * T::PI() * T::PI());
        let scale = self.prefactor();
        let tol = scale * T::lit(1e-14);
        let kmax = self.radial_cutoff();
        // the integrand peaks near the thermal wavenumber; split there
        let k_th = (T::lit(2.0) * self.mass() / self.beta()).sqrt();
        let body = |k: T| k * k * f(k);
        norm * (integrate(body, T::zero(), k_th, tol) + integrate(body, k_th, kmax, tol))
    }

    fn occupation(&self, k: T, delta: T) -> T {
        crate::scalar::bose(self.beta() * (self.kinetic(k) + delta))
    }

    /// `rho0` by radial quadrature.
    pub fn rho0_quadrature(&self, delta: T) -> Result<T> {
        domain("rho0_quadrature", delta)?;
        Ok(self.radial(|k| self.occupation(k, delta)))
    }

    /// `p0 = -(1/beta) int ln(1 - e^{-beta (e + delta)})` by radial quadrature.
    pub fn p0_quadrature(&self, delta: T) -> Result<T> {
        domain("p0_quadrature", delta)?;
        let beta = self.beta();
        Ok(self.radial(|k| {
            let x = beta * (self.kinetic(k) + delta);
            if x == T::zero() {
                T::zero()
            } else if x > T::LN_2() {
                -(-(-x).exp()).ln_1p() / beta
            } else {
                -(-(-x).exp_m1()).ln() / beta
            }
        }))
    }

    /// `eps0 = int (e + delta) n` by radial quadrature.
    pub fn eps0_quadrature(&self, delta: T) -> Result<T> {
        domain("eps0_quadrature", delta)?;
        Ok(self.radial(|k| (self.kinetic(k) + delta) * self.occupation(k, delta)))
    }

    /// `drho0 = beta int e^x / (e^x - 1)^2` by radial quadrature; `delta > 0`.
    pub fn drho0_quadrature(&self, delta: T) -> Result<T> {
        domain("drho0_quadrature", delta)?;
        if delta == T::zero() {
            return Err(Error::Divergence {
                function: "drho0_quadrature",
                value: 0.0,
            });
        }
        let beta = self.beta();
        Ok(self.radial(|k| {
            let x = beta * (self.kinetic(k) + delta);
            let n = crate::scalar::bose(x);
            beta * n * (T::one() + n)
        }))
    }
}

fn domain<T: Real>(function: &'static str, delta: T) -> Result<()> {
    if delta >= T::zero() {
        Ok(())
    } else {
        Err(Error::Domain {
            function,
            value: delta.as_f64(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = integrate(|x: f64| x * x * x, 0.0, 2.0, 1e-14);
        assert_relative_eq!(v, 4.0, max_relative = 1e-14);
    }

    #[test]
    fn integrates_gaussian() {
        let v = integrate(|x: f64| (-x * x).exp(), 0.0, 12.0, 1e-15);
        assert_relative_eq!(v, std::f64::consts::PI.sqrt() / 2.0, max_relative = 1e-13);
    }

    #[test]
    fn quadrature_frozen_values() {
        // reference values from an arbitrary-precision tanh-sinh quadrature
        let ctx = ThermoContext::new(1.0f64, 1.0).unwrap();
        assert_relative_eq!(
            ctx.rho0_quadrature(0.0).unwrap(),
            0.165_869_209_313_022_2,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            ctx.rho0_quadrature(1.0).unwrap(),
            0.027_203_260_022_080_873,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            ctx.p0_quadrature(0.5).unwrap(),
            0.043_973_184_615_797_517,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            ctx.eps0_quadrature(0.1).unwrap(),
            0.119_698_920_010_191_78,
            max_relative = 1e-10
        );
    }
}
