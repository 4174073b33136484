//! Bracketing root finders used by the branch solver and the lattice oracle.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default cap on bisection steps.
///
/// 200 halvings collapse any finite `f64` bracket; the loop normally exits
/// earlier when the midpoint stops moving.
pub const DEFAULT_BISECTION_STEPS: usize = 200;

/// Maximum number of geometric expansions when growing a bracket.
pub const MAX_EXPANSIONS: usize = 60;

/// Bisection on `[lo, hi]`.
///
/// `f(lo)` and `f(hi)` must differ in sign (a zero at either end is accepted
/// and returned). Stops when `|f| <= ftol`, when the midpoint coincides with
/// an endpoint, or after `max_steps` halvings, and returns whichever probed
/// point has the smallest residual.
pub fn bisect<T, F>(mut f: F, lo: T, hi: T, ftol: T, max_steps: usize) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::Bracket {
            what: "bisection (no sign change)",
            attempts: 0,
        });
    }
    let (mut best, mut best_res) = if fa.abs() < fb.abs() {
        (a, fa.abs())
    } else {
        (b, fb.abs())
    };
    let two = T::lit(2.0);
    for _ in 0..max_steps {
        let m = a + (b - a) / two;
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm.abs() < best_res {
            best = m;
            best_res = fm.abs();
        }
        if fm == T::zero() || fm.abs() <= ftol {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(best)
}

/// Bisection in `ln x` for a root known to lie in `[lo, hi]` with `0 < lo < hi`.
pub fn bisect_log<T, F>(mut f: F, lo: T, hi: T, ftol: T, max_steps: usize) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    debug_assert!(lo > T::zero() && hi > lo);
    bisect(|u: T| f(u.exp()), lo.ln(), hi.ln(), ftol, max_steps).map(|u| u.exp())
}

/// Grows `x` geometrically from `start` until `accept(x)` holds.
pub fn grow_until<T, P>(start: T, factor: T, what: &'static str, mut accept: P) -> Result<T>
where
    T: Real,
    P: FnMut(T) -> bool,
{
    let mut x = start;
    for _ in 0..MAX_EXPANSIONS {
        if accept(x) {
            return Ok(x);
        }
        x = x * factor;
    }
    Err(Error::Bracket {
        what,
        attempts: MAX_EXPANSIONS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 0.0, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_missing_sign_change() {
        assert!(matches!(
            bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 0.0, 50),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn endpoint_root_is_returned_exactly() {
        assert_eq!(bisect(|x: f64| x, 0.0, 3.0, 0.0, 10).unwrap(), 0.0);
    }

    #[test]
    fn log_bisection_resolves_tiny_roots() {
        let r = bisect_log(|x: f64| x.ln() + 20.0 * 10f64.ln(), 1e-30, 1.0, 0.0, 200).unwrap();
        assert!((r / 1e-20 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn works_in_single_precision() {
        let r = bisect(|x: f32| x * x - 2.0, 0.0, 2.0, 0.0, 200).unwrap();
        assert!((r - 2f32.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn growth_fails_after_cap() {
        assert!(grow_until(1.0f64, 2.0, "never", |_| false).is_err());
        assert_eq!(grow_until(1.0f64, 2.0, "eight", |x| x >= 8.0).unwrap(), 8.0);
    }
}
