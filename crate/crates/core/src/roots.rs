//! Bracketed scalar root finding and one-dimensional minimisation.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Iteration cap for bracketed solvers and bracket growth.
pub const MAX_ITERATIONS: usize = 200;

/// Stopping rule for [`bracketed_root`]: the bracket is accepted once its
/// width drops below `abs + rel * |x|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
    pub max_iter: usize,
}

impl<T: Real> Tolerance<T> {
    /// Converges to a few ulps, which is what the level solvers need to meet
    /// their residual contract near steep parts of the shape.
    pub fn machine() -> Self {
        Tolerance {
            abs: T::min_positive_value(),
            rel: T::epsilon() * T::lit(4.0),
            max_iter: MAX_ITERATIONS,
        }
    }

    pub fn mixed(tol: f64) -> Self {
        Tolerance {
            abs: T::tol(tol),
            rel: T::tol(tol),
            max_iter: MAX_ITERATIONS,
        }
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self::machine()
    }
}

/// Finds a sign change of `f` inside `[a, b]` by bisection interleaved with
/// Illinois-modified regula falsi steps.
///
/// `f(a)` and `f(b)` must have opposite signs (or one of them vanish). The
/// endpoint of the final bracket with the smaller residual is returned.
pub fn bracketed_root<T, F>(mut f: F, a: T, b: T, tol: Tolerance<T>) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::Numerical {
            operation: "bracketed_root",
            reason: format!(
                "no sign change on [{:e}, {:e}] (f = {:e}, {:e})",
                a.as_f64(),
                b.as_f64(),
                fa.as_f64(),
                fb.as_f64()
            ),
        });
    }
    // Weighted copies used by the Illinois update; fa/fb keep the true values.
    let (mut wa, mut wb) = (fa, fb);
    let mut side = 0i8;
    let mut force_bisect = false;
    let two = T::lit(2.0);

    for _ in 0..tol.max_iter {
        let width = b - a;
        let scale = a.abs().max(b.abs());
        if width <= tol.abs + tol.rel * scale {
            break;
        }
        let mid = a + width / two;
        let mut c = if force_bisect {
            mid
        } else {
            (a * wb - b * wa) / (wb - wa)
        };
        if !(c > a && c < b) {
            c = mid;
        }
        let fc = f(c);
        if fc == T::zero() {
            return Ok(c);
        }
        if fc.is_nan() {
            return Err(Error::Numerical {
                operation: "bracketed_root",
                reason: format!("non-finite value at x = {:e}", c.as_f64()),
            });
        }
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
            wa = fc;
            if side == -1 {
                wb = wb / two;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            wb = fc;
            if side == 1 {
                wa = wa / two;
            }
            side = 1;
        }
        force_bisect = b - a > width / two;
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

/// Minimum of a unimodal function on `[a, b]` located by Brent's method
/// (successive parabolic interpolation safeguarded by golden-section steps).
///
/// Returns `(x_min, f(x_min))`.
pub fn minimize<T, F>(mut f: F, a: T, b: T, rel_tol: T, max_iter: usize) -> (T, T)
where
    T: Real,
    F: FnMut(T) -> T,
{
    let golden = T::lit(0.381_966_011_250_105_1);
    let half = T::lit(0.5);
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut x = a + golden * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d = T::zero();
    let mut e = T::zero();
    let tiny = T::epsilon() * T::lit(10.0);

    for _ in 0..max_iter {
        let m = half * (a + b);
        let tol1 = rel_tol * x.abs() + tiny;
        let tol2 = tol1 + tol1;
        if (x - m).abs() <= tol2 - half * (b - a) {
            break;
        }
        let mut golden_step = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = (q - r) + (q - r);
            if q > T::zero() {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (half * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if m >= x { tol1 } else { -tol1 };
                }
                golden_step = false;
            }
        }
        if golden_step {
            e = if x >= m { a - x } else { b - x };
            d = golden * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > T::zero() {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}
