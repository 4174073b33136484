//! Polylogarithms `Li_s(z)` of half-integer order on `0 <= z <= 1`.
//!
//! Two routes are used. Away from `z = 1` the defining series
//! `sum z^n / n^s` converges geometrically. Close to `z = 1` it does not (the
//! order-3/2 series needs on the order of 10^24 terms for 1e-12 at `z = 1`),
//! so with `z = e^{-t}` and `t < 1` the expansion
//!
//! ```text
//! Li_s(e^{-t}) = Gamma(1 - s) t^{s-1} + sum_k zeta(s - k) (-t)^k / k!
//! ```
//!
//! is summed instead. It converges like `(t / 2 pi)^k`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `t = -ln z` below which the small-`t` expansion replaces the series.
pub const SERIES_SWITCH: f64 = 1.0;

const MAX_SERIES_TERMS: usize = 4096;
const ZETA_TABLE_LEN: usize = 72;

/// Orders needed by the three-dimensional Bose functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolylogOrder {
    /// `s = 1/2`, density derivative.
    Half,
    /// `s = 3/2`, density.
    ThreeHalves,
    /// `s = 5/2`, pressure.
    FiveHalves,
}

impl PolylogOrder {
    pub fn value(self) -> f64 {
        match self {
            PolylogOrder::Half => 0.5,
            PolylogOrder::ThreeHalves => 1.5,
            PolylogOrder::FiveHalves => 2.5,
        }
    }

    /// Offset into the `zeta(5/2 - j)` table of `zeta(s)`.
    fn table_offset(self) -> usize {
        match self {
            PolylogOrder::FiveHalves => 0,
            PolylogOrder::ThreeHalves => 1,
            PolylogOrder::Half => 2,
        }
    }

    /// `Gamma(1 - s)`.
    fn reflected_gamma(self) -> f64 {
        let sqrt_pi = PI.sqrt();
        match self {
            PolylogOrder::Half => sqrt_pi,
            PolylogOrder::ThreeHalves => -2.0 * sqrt_pi,
            PolylogOrder::FiveHalves => 4.0 * sqrt_pi / 3.0,
        }
    }
}

/// `Li_s(z)` for `0 <= z <= 1`.
///
/// Order 1/2 diverges at `z = 1`.
pub fn polylog<T: Real>(order: PolylogOrder, fugacity: T) -> Result<T> {
    if !(fugacity >= T::zero() && fugacity <= T::one()) {
        return Err(Error::Domain {
            function: "polylog",
            value: fugacity.as_f64(),
        });
    }
    if fugacity == T::zero() {
        return Ok(T::zero());
    }
    polylog_exp(order, -fugacity.ln())
}

/// `Li_s(e^{-t})` for `t >= 0`.
///
/// Taking `t` rather than the fugacity avoids the cancellation in `1 - z`
/// when the Bose functions are evaluated at small `beta * delta`.
pub fn polylog_exp<T: Real>(order: PolylogOrder, t: T) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(Error::Domain {
            function: "polylog",
            value: (-t).exp().as_f64(),
        });
    }
    if t == T::zero() {
        return match order {
            PolylogOrder::Half => Err(Error::Divergence {
                function: "polylog of order 1/2",
                value: 1.0,
            }),
            _ => Ok(T::lit(zeta_table()[order.table_offset()])),
        };
    }
    if t.is_infinite() {
        return Ok(T::zero());
    }
    if t >= T::lit(SERIES_SWITCH) {
        Ok(series(order, t))
    } else {
        Ok(small_t_expansion(order, t))
    }
}

fn series<T: Real>(order: PolylogOrder, t: T) -> T {
    let s = T::lit(order.value());
    let z = (-t).exp();
    let ratio_bound = z / (T::one() - z);
    let eps = T::epsilon() * T::lit(0.25);
    let mut zn = T::one();
    let mut sum = T::zero();
    for n in 1..=MAX_SERIES_TERMS {
        zn = zn * z;
        let term = zn / T::lit(n as f64).powf(s);
        sum = sum + term;
        // Later terms shrink at least by a factor z each, so the tail is
        // bounded by term * z / (1 - z).
        if term * ratio_bound <= eps * sum {
            break;
        }
    }
    sum
}

fn small_t_expansion<T: Real>(order: PolylogOrder, t: T) -> T {
    let s = order.value();
    let table = zeta_table();
    let offset = order.table_offset();
    let eps = T::epsilon() * T::lit(0.25);
    let mut sum = T::lit(order.reflected_gamma()) * t.powf(T::lit(s - 1.0));
    let mut power = T::one();
    for k in 0..(ZETA_TABLE_LEN - offset) {
        if k > 0 {
            power = power * (-t) / T::lit(k as f64);
        }
        let term = T::lit(table[offset + k]) * power;
        sum = sum + term;
        if k >= 2 && term.abs() <= eps * sum.abs() {
            break;
        }
    }
    sum
}

/// `zeta(5/2 - j)` for `j = 0..ZETA_TABLE_LEN`.
fn zeta_table() -> &'static [f64; ZETA_TABLE_LEN] {
    static TABLE: OnceLock<[f64; ZETA_TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0.0; ZETA_TABLE_LEN];
        for (j, slot) in table.iter_mut().enumerate() {
            *slot = riemann_zeta(2.5 - j as f64);
        }
        table
    })
}

/// Riemann zeta for real `s != 1`.
///
/// Euler-Maclaurin summation on `0 < s <= 8`, the plain series above that,
/// and the reflection formula for `s <= 0`.
pub fn riemann_zeta(s: f64) -> f64 {
    if s > 8.0 {
        let mut sum = 1.0;
        let mut n = 2.0f64;
        loop {
            let term = n.powf(-s);
            sum += term;
            if term < 1e-18 * sum {
                // integral tail beyond n
                return sum + n.powf(1.0 - s) / (s - 1.0) - 0.5 * term;
            }
            n += 1.0;
        }
    }
    if s > 0.0 {
        return euler_maclaurin_zeta(s);
    }
    // zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s) zeta(1 - s)
    2f64.powf(s) * PI.powf(s - 1.0) * (0.5 * PI * s).sin() * gamma_pos(1.0 - s) * riemann_zeta(1.0 - s)
}

fn euler_maclaurin_zeta(s: f64) -> f64 {
    // B_2k / (2k)!
    const BERNOULLI_OVER_FACTORIAL: [f64; 10] = [
        1.0 / 6.0 / 2.0,
        -1.0 / 30.0 / 24.0,
        1.0 / 42.0 / 720.0,
        -1.0 / 30.0 / 40320.0,
        5.0 / 66.0 / 3628800.0,
        -691.0 / 2730.0 / 479001600.0,
        7.0 / 6.0 / 87178291200.0,
        -3617.0 / 510.0 / 20922789888000.0,
        43867.0 / 798.0 / 6402373705728000.0,
        -174611.0 / 330.0 / 2432902008176640000.0,
    ];
    const N: usize = 15;
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2) times N^(-s-2j+1)
    let mut rising = s;
    let mut npow = n.powf(-s - 1.0);
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if j > 0 {
            let a = s + (2 * j - 1) as f64;
            rising *= a * (a + 1.0);
            npow /= n * n;
        }
        sum += c * rising * npow;
    }
    sum
}

/// Gamma on positive arguments by recurrence onto a Stirling series.
fn gamma_pos(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut shift = 1.0;
    let mut y = x;
    while y < 12.0 {
        shift *= y;
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2
                * (1.0 / 360.0
                    - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    let ln_gamma = (y - 0.5) * y.ln() - y + 0.5 * (2.0 * PI).ln() + series;
    ln_gamma.exp() / shift
}
