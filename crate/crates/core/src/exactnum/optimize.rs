//! Bracketed one-dimensional minimization and root finding.

use crate::error::{Error, Result};

/// Golden-section ratio `(3 - sqrt(5)) / 2`.
const CGOLD: f64 = 0.381_966_011_250_105_1;

/// Number of equally spaced probes used to validate a minimization bracket.
const BRACKET_PROBES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub argmin: f64,
    pub min: f64,
    pub evals: usize,
}

/// Minimize a unimodal `f` on `[lo, hi]` by golden-section search with
/// parabolic steps (Brent), to abscissa tolerance `tol`.
///
/// The bracket is probed on a uniform grid first; if the smallest probe sits
/// on an endpoint the function is not decreasing-then-increasing there and
/// `BadBracket` is returned.
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, bracket: (f64, f64), tol: f64) -> Result<Minimum> {
    let (lo, hi) = bracket;
    if lo.is_nan() || hi.is_nan() || lo >= hi || tol.is_nan() || tol <= 0.0 {
        return Err(Error::BadBracket { lo, hi });
    }
    let probes: Vec<(f64, f64)> = (0..=BRACKET_PROBES)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / BRACKET_PROBES as f64;
            (x, f(x))
        })
        .collect();
    let best = probes
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if best == 0 || best == BRACKET_PROBES || probes.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::BadBracket { lo, hi });
    }
    // shrink to the probe cell around the best sample
    let mut a = probes[best - 1].0;
    let mut b = probes[best + 1].0;
    let mut evals = probes.len();

    let mut x = probes[best].0;
    let mut fx = probes[best].1;
    let (mut w, mut v) = (x, x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..500 {
        let m = 0.5 * (a + b);
        let tol1 = 0.25 * tol + f64::EPSILON * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) || (b - a) <= tol {
            break;
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
            let e_prev = e;
            e = d;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if (u - a) < tol2 || (b - u) < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = f(u);
        evals += 1;
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
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
    Ok(Minimum {
        argmin: x,
        min: fx,
        evals,
    })
}

/// Root of `g` on `[lo, hi]` by Brent's bisection/secant/inverse-quadratic
/// hybrid; stops when the bracket is narrower than `tol` or `g` vanishes.
pub fn find_root_bracketed<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (g(a), g(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa * fb).is_nan() || fa * fb >= 0.0 {
        return Err(Error::NoSignChange { lo, hi });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..1000 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_minimum() {
        let m = minimize_scalar(|x| (x - 1.0) * (x - 1.0), (-5.0, 5.0), 1e-8).unwrap();
        assert!((m.argmin - 1.0).abs() < 1e-7);
        assert!(m.min.abs() < 1e-14);
        let m = minimize_scalar(|x| x * x + 1.0, (-2.0, 2.0), 1e-8).unwrap();
        assert!(m.argmin.abs() < 1e-7);
        assert!((m.min - 1.0).abs() < 1e-14);
    }

    #[test]
    fn monotone_function_is_a_bad_bracket() {
        let err = minimize_scalar(|x| x, (0.0, 1.0), 1e-8).unwrap_err();
        assert!(matches!(err, Error::BadBracket { .. }));
    }

    #[test]
    fn roots() {
        assert!((find_root_bracketed(|x| x - 2.0, 0.0, 5.0, 1e-12).unwrap() - 2.0).abs() < 1e-12);
        let r = find_root_bracketed(|x| x * x * x - 1.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change() {
        let err = find_root_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
    }
}
