//! One-dimensional minimization and root bracketing.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

const GOLDEN: f64 = 0.381_966_011_250_105_1; // (3 - sqrt5) / 2

/// Brent's method on `[lo, hi]`: golden-section steps safeguarded by
/// parabolic interpolation. Stops when the bracket shrinks below
/// `2 * (xtol * |x| + 1e-12)`.
pub fn brent_minimize<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<Minimum> {
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::validation(format!("invalid bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut evaluations = 1;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..max_iter {
        let mid = 0.5 * (a + b);
        let tol1 = xtol * x.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(Minimum { x, value: fx, evaluations });
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if mid >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= mid { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        evaluations += 1;
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
    Err(Error::Convergence { refinements: max_iter, difference: b - a, tolerance: xtol })
}

/// Bisection for the point where `pred` flips from true (at `inside`) to
/// false (at `outside`). Returns the last point known to satisfy `pred`.
pub fn bisect_edge<F: FnMut(f64) -> bool>(mut pred: F, mut inside: f64, mut outside: f64, xtol: f64) -> f64 {
    while (outside - inside).abs() > xtol {
        let mid = 0.5 * (inside + outside);
        if pred(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn parabola() {
        let m = brent_minimize(|x| (x - 1.3).powi(2) + 0.5, 0.0, 4.0, 1e-10, 100).unwrap();
        assert_abs_diff_eq!(m.x, 1.3, epsilon = 1e-8);
        assert_abs_diff_eq!(m.value, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn cosine_minimum() {
        let m = brent_minimize(f64::cos, 2.0, 5.0, 1e-10, 100).unwrap();
        assert_abs_diff_eq!(m.x, std::f64::consts::PI, epsilon = 1e-8);
        assert!(m.evaluations < 40);
    }

    #[test]
    fn boundary_minimum_and_bad_bracket() {
        let m = brent_minimize(|x| x, 1.0, 2.0, 1e-9, 200).unwrap();
        assert!(m.x - 1.0 < 1e-6);
        assert!(brent_minimize(|x| x, 2.0, 1.0, 1e-9, 10).is_err());
    }

    #[test]
    fn bisect_finds_threshold() {
        let edge = bisect_edge(|x| x * x < 2.0, 0.0, 4.0, 1e-12);
        assert_abs_diff_eq!(edge, 2f64.sqrt(), epsilon = 1e-11);
        let edge = bisect_edge(|x| x > -3.0, 0.0, -10.0, 1e-12);
        assert_abs_diff_eq!(edge, -3.0, epsilon = 1e-11);
    }
}
