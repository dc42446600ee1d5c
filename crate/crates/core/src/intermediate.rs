//! Intermediate deviations, `M = x sqrt(N)`.
//!
//! Here `log p_{N,M} ~ sqrt(N) min_mu (x mu + chi(mu))` with
//!
//! ```text
//! chi(mu) = (1/sqrt 2) int_0^inf log(1 - (1 - e^{-2 mu}) e^{-t^2}) dt
//! ```
//!
//! `chi` is strictly decreasing and convex with `chi(0) = 0` and
//! `chi'(0) = -sqrt(pi/2)`, so the minimiser is the unique root of
//! `x + chi'(mu)`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::asymptotics::{clt_constant, ZETA_3_2};
use crate::error::{Error, Result};
use crate::exact_dist::factor_weights;
use crate::exactnum::{find_root_bracketed, gaussian_truncation, integrate_semiaxis};

/// Default absolute tolerance for `chi`, `chi'` and the minimiser.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Bracket expansion gives up once `|mu|` would exceed this.
pub const MU_LIMIT: f64 = 1e6;

/// `lim_{mu -> inf} chi(mu) = -(sqrt(pi) / (2 sqrt 2)) zeta(3/2)`.
pub fn chi_limit() -> f64 {
    -(PI.sqrt() / (2.0 * SQRT_2)) * ZETA_3_2
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiEvaluation {
    pub mu: f64,
    pub value: f64,
    /// Absolute tolerance actually requested from the quadrature.
    pub tol: f64,
    pub evals: usize,
}

/// The integrand `1 - (1 - e^{-2 mu}) e^{-t^2}` is written as `a + b` with
/// `a = 1 - e^{-t^2}` and `b = e^{-2 mu - t^2}`, both nonnegative, and this
/// returns `(ln a, ln b)`.
fn log_parts(mu: f64, t: f64) -> (f64, f64) {
    let a = -(-t * t).exp_m1();
    (a.ln(), -2.0 * mu - t * t)
}

fn log_sum_exp(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x > y { (x, y) } else { (y, x) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// Quadrature tolerance: `tol`, floored at a few ulps of the integral size
/// so that large `|mu|` does not ask for more digits than `f64` holds.
fn effective_tol(mu: f64, tol: f64) -> f64 {
    let scale = 1.0 + (4.0 / 3.0) * (mu.abs()).powf(1.5);
    tol.max(64.0 * f64::EPSILON * scale)
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "finite reals",
        })
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            range: "(0, inf)",
        })
    }
}

pub fn chi(mu: f64, tol: f64) -> Result<ChiEvaluation> {
    check_finite("mu", mu)?;
    check_tol(tol)?;
    if mu == 0.0 {
        return Ok(ChiEvaluation {
            mu,
            value: 0.0,
            tol,
            evals: 0,
        });
    }
    let tol = effective_tol(mu, tol);
    let integrand = |t: f64| {
        let (la, lb) = log_parts(mu, t);
        log_sum_exp(la, lb)
    };
    let t_max = gaussian_truncation(2.0 * mu.abs(), tol);
    let q = integrate_semiaxis(integrand, t_max, tol)?;
    Ok(ChiEvaluation {
        mu,
        value: q.value / SQRT_2,
        tol,
        evals: q.evals,
    })
}

/// `chi'(mu) = -sqrt 2 int_0^inf b / (a + b) dt`, always negative.
pub fn chi_derivative(mu: f64, tol: f64) -> Result<ChiEvaluation> {
    check_finite("mu", mu)?;
    check_tol(tol)?;
    let integrand = |t: f64| {
        let (la, lb) = log_parts(mu, t);
        1.0 / (1.0 + (la - lb).exp())
    };
    let t_max = gaussian_truncation((-2.0 * mu).max(0.0), tol);
    let q = integrate_semiaxis(integrand, t_max, tol)?;
    Ok(ChiEvaluation {
        mu,
        value: -SQRT_2 * q.value,
        tol,
        evals: q.evals,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEvaluation {
    pub x: f64,
    pub mu_star: f64,
    /// `x mu* + chi(mu*)`, so that `log p ~ sqrt(N) * exponent`.
    pub exponent: f64,
    pub tol: f64,
    pub bracket_used: (f64, f64),
    pub quadrature_evals: usize,
}

/// `min_mu (x mu + chi(mu))` for `x > 0`.
///
/// The bracket starts at `[-max(1, x^2), max(1, 4/x)]`, since the left tail
/// puts the minimiser near `-x^2/4`, and each side is doubled until
/// `x + chi'` changes sign there.
pub fn intermediate_rate(x: f64, tol: f64) -> Result<RateEvaluation> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            range: "(0, inf)",
        });
    }
    check_tol(tol)?;
    let evals = std::cell::Cell::new(0usize);
    let failure = std::cell::Cell::new(None);
    let g = |mu: f64| match chi_derivative(mu, tol) {
        Ok(d) => {
            evals.set(evals.get() + d.evals);
            x + d.value
        }
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };

    let mut lo = -(x * x).max(1.0);
    let mut hi = (4.0 / x).max(1.0);
    while g(lo) >= 0.0 {
        if let Some(e) = failure.take() {
            return Err(e);
        }
        lo *= 2.0;
        if lo < -MU_LIMIT {
            return Err(Error::BracketExpansionFailed { x, limit: MU_LIMIT });
        }
    }
    while g(hi) <= 0.0 {
        if let Some(e) = failure.take() {
            return Err(e);
        }
        hi *= 2.0;
        if hi > MU_LIMIT {
            return Err(Error::BracketExpansionFailed { x, limit: MU_LIMIT });
        }
    }
    if let Some(e) = failure.take() {
        return Err(e);
    }

    let mu_star = find_root_bracketed(g, lo, hi, tol)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let c = chi(mu_star, tol)?;
    Ok(RateEvaluation {
        x,
        mu_star,
        exponent: x * mu_star + c.value,
        tol,
        bracket_used: (lo, hi),
        quadrature_evals: evals.get() + c.evals,
    })
}

/// Leading tail behaviour of the exponent: `-x^3/12` for large `x` and
/// `-(x - sqrt(pi/2))^2 / c` next to the mean.
pub fn tail_exponents(x: f64) -> (f64, f64) {
    let left = -x * x * x / 12.0;
    let d = x - FRAC_PI_2.sqrt();
    (left, -d * d / clt_constant())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledLogZ {
    /// `log Z_N(xi) / sqrt(N/2)` from the exact factors.
    pub finite_n: f64,
    /// `int_0^inf log(1 - (1 - xi^2) e^{-t^2}) dt = sqrt 2 chi(-log xi)`.
    pub limit: f64,
}

pub fn scaled_log_z(n: u32, xi: f64, precision_bits: u32, tol: f64) -> Result<ScaledLogZ> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::OutOfRange {
            name: "xi",
            value: xi,
            range: "(0, inf)",
        });
    }
    let weights = factor_weights(n)?;
    let finite_n =
        weights.log_generating_function(xi, precision_bits) / (f64::from(n) / 2.0).sqrt();
    let limit = SQRT_2 * chi(-xi.ln(), tol)?.value;
    Ok(ScaledLogZ { finite_n, limit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_at_zero_and_sign() {
        assert_eq!(chi(0.0, 1e-12).unwrap().value, 0.0);
        assert!(chi(0.3, 1e-10).unwrap().value < 0.0);
        assert!(chi(-0.3, 1e-10).unwrap().value > 0.0);
    }

    #[test]
    fn chi_derivative_at_zero() {
        let d = chi_derivative(0.0, 1e-12).unwrap().value;
        assert!((d + FRAC_PI_2.sqrt()).abs() < 1e-11, "{d}");
    }

    #[test]
    fn chi_large_mu_limit() {
        let v = chi(40.0, 1e-12).unwrap().value;
        assert!((v - chi_limit()).abs() < 1e-10, "{v}");
        assert!((chi_limit() + 1.637_063_5).abs() < 1e-7);
    }

    #[test]
    fn chi_left_tail_growth() {
        let r50 = chi(-50.0, 1e-10).unwrap().value / ((4.0 / 3.0) * 50f64.powf(1.5));
        let r200 = chi(-200.0, 1e-10).unwrap().value / ((4.0 / 3.0) * 200f64.powf(1.5));
        assert!((r50 - 1.000_123).abs() < 1e-5, "{r50}");
        assert!((r200 - 1.0).abs() < (r50 - 1.0).abs());
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-3;
        for mu in [-1.0, 0.5, 2.0] {
            let fd =
                (chi(mu + h, 1e-13).unwrap().value - chi(mu - h, 1e-13).unwrap().value) / (2.0 * h);
            let d = chi_derivative(mu, 1e-13).unwrap().value;
            assert!((fd - d).abs() < 1e-6, "mu={mu} fd={fd} d={d}");
        }
    }

    #[test]
    fn second_derivative_at_zero() {
        let h = 1e-3;
        let c2 = (chi(h, 1e-13).unwrap().value + chi(-h, 1e-13).unwrap().value) / (h * h);
        let exact = PI.sqrt() * (SQRT_2 - 1.0);
        assert!((c2 - exact).abs() < 1e-5, "{c2}");
    }

    #[test]
    fn rate_at_the_mean() {
        let r = intermediate_rate(FRAC_PI_2.sqrt(), 1e-10).unwrap();
        assert!(r.mu_star.abs() < 1e-8 && r.exponent.abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn rate_values() {
        let r = intermediate_rate(4.0, 1e-10).unwrap();
        assert!((r.mu_star + 4.0529).abs() < 1e-3, "{r:?}");
        assert!((r.exponent + 5.12573).abs() < 1e-5, "{r:?}");
        for x in [0.5, 2.0, 4.0] {
            let r = intermediate_rate(x, 1e-10).unwrap();
            let d = chi_derivative(r.mu_star, 1e-10).unwrap().value;
            assert!((x + d).abs() < 1e-9);
            assert!(r.exponent <= 0.0);
            assert!(r.bracket_used.0 < r.mu_star && r.mu_star < r.bracket_used.1);
        }
        assert!(matches!(
            intermediate_rate(0.0, 1e-10),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn tails() {
        let (left, _) = tail_exponents(2.0);
        assert!((left + 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(tail_exponents(FRAC_PI_2.sqrt()).1, 0.0);
    }

    #[test]
    fn scaled_log_z_edges() {
        let s = scaled_log_z(40, 1.0, 128, 1e-12).unwrap();
        assert!(s.finite_n.abs() < 1e-15 && s.limit == 0.0);
        let s = scaled_log_z(40, 1e-30, 128, 1e-12).unwrap();
        assert!((s.limit + 2.315_157_3).abs() < 1e-7, "{}", s.limit);
        assert_eq!(
            scaled_log_z(41, 0.5, 128, 1e-12).unwrap_err(),
            Error::OddN(41)
        );
    }
}
