//! Closed-form asymptotic regimes for the real-eigenvalue count.
//!
//! * large deviations, `M = alpha N`: `log p ~ -N^2 r(alpha)`
//! * the local CLT around the mean `mu_N ~ sqrt(pi N / 2)`
//! * the all-real and no-real endpoints `M = N` and `M = 0`

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::exact_dist::{exact_moments, DEFAULT_PRECISION_BITS};

/// `zeta(3/2)`.
#[allow(clippy::excessive_precision)]
pub const ZETA_3_2: f64 = 2.612_375_348_685_488_343_348_567_567_924_071_630_571;

/// `zeta'(-1)`.
#[allow(clippy::excessive_precision)]
pub const ZETA_PRIME_MINUS1: f64 = -0.165_421_143_700_450_929_213_919_155_229_3;

/// Below this `alpha` the rate is summed from its Taylor series, since the
/// closed form cancels down to `alpha^3 / 12` from terms of size `alpha`.
const SERIES_CUTOFF: f64 = 0.5;

/// `x log x`, continued by 0 at `x = 0`.
fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "(0, 1]",
        })
    }
}

/// `sum_{k>=1} alpha^{2k+1} / (2 (2k-1) (2k) (2k+1))`, the Taylor series of
/// the rate; used for `alpha < SERIES_CUTOFF`.
fn rate_series(alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    let mut power = alpha * a2;
    let mut sum = 0.0;
    for k in 1..200 {
        let j = 2.0 * k as f64;
        let term = power / (2.0 * (j - 1.0) * j * (j + 1.0));
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
        power *= a2;
    }
    sum
}

/// The closed form
/// `(1/8)[-2a + (a-1)((1-a)log(1-a) - (a+1)log(1+a)) + 2a(a+1)log(1+a)]`.
fn rate_closed_form(a: f64) -> f64 {
    let l1p = a.ln_1p();
    (-2.0 * a + (a - 1.0) * (xlogx(1.0 - a) - (1.0 + a) * l1p) + 2.0 * a * (a + 1.0) * l1p) / 8.0
}

/// Large-deviation rate `r(alpha) = -lim log p_{N, alpha N} / N^2`.
pub fn ld_rate(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(if alpha < SERIES_CUTOFF {
        rate_series(alpha)
    } else {
        rate_closed_form(alpha)
    })
}

/// The leading two terms `(1/8)(2 alpha^3 / 3 + alpha^5 / 15)`.
pub fn small_alpha_rate(alpha: f64) -> f64 {
    let a3 = alpha * alpha * alpha;
    (2.0 * a3 / 3.0 + a3 * alpha * alpha / 15.0) / 8.0
}

/// Electrostatic pieces of the rate: a uniform negative background on the
/// annulus between the two polar caps, positive charge `alpha / pi` on the
/// equator, and their interaction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBreakdown {
    pub alpha: f64,
    /// Polar angle of the cap boundary, `cos(theta0) = alpha`.
    pub theta0: f64,
    pub e_annulus: f64,
    pub e_equator: f64,
    pub e_cross: f64,
    pub total: f64,
    /// Potential of the annulus background at a point on the equator.
    pub v_a_equator: f64,
    /// Potential of the equator charge at a point on the equator.
    pub v_e: f64,
}

/// Split `r(alpha)` into annulus, equator and cross energies.
pub fn energy_breakdown(alpha: f64) -> Result<EnergyBreakdown> {
    check_alpha(alpha)?;
    let a = alpha;
    let one_m = 1.0 - a;
    let one_p = 1.0 + a;
    let half_log_half_one_p = (0.5 * one_p).ln();
    // (1 - a) * {(1/2) log((1+a)/(1-a)) + a(-1 + log((1/2) sqrt(1 - a^2)))}
    // with the (1-a)log(1-a) pieces taken through xlogx so a = 1 is the limit
    let annulus_bracket = 0.5 * one_m * one_p.ln() - 0.5 * xlogx(one_m)
        + a * (-one_m - one_m * LN_2 + 0.5 * one_m * one_p.ln() + 0.5 * xlogx(one_m));
    let e_annulus = 0.25 * ((a - one_p * half_log_half_one_p) * a + annulus_bracket);
    let v_e = a * LN_2;
    let e_equator = 0.5 * a * a * LN_2;
    let v_a_equator = -0.5 * (a - one_p * half_log_half_one_p - one_m * LN_2);
    let e_cross = a * v_a_equator;
    Ok(EnergyBreakdown {
        alpha,
        theta0: a.acos(),
        e_annulus,
        e_equator,
        e_cross,
        total: e_annulus + e_equator + e_cross,
        v_a_equator,
        v_e,
    })
}

/// `sqrt(2 pi) (2 - sqrt 2)`.
pub fn clt_constant() -> f64 {
    (2.0 * PI).sqrt() * (2.0 - 2f64.sqrt())
}

/// Parameters of the Gaussian approximation around the mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CltParameters {
    pub n: u32,
    pub mu_n: f64,
    pub sigma2: f64,
    pub c: f64,
}

impl CltParameters {
    /// Half-width `N^{1/4}` in `M` of the window where the approximation
    /// is expected to hold, i.e. `|alpha - mu_N / N| ~ N^{-3/4}`.
    pub fn window_half_width(&self) -> f64 {
        f64::from(self.n).powf(0.25)
    }
}

/// `mu_N` is `sqrt(pi N / 2)` unless `use_exact_mean`, in which case it is
/// the exact finite-N mean (even `N` only).
pub fn clt_parameters(n: u32, use_exact_mean: bool) -> Result<CltParameters> {
    if n == 0 {
        return Err(Error::TooSmall(n, 1));
    }
    let mu_n = if use_exact_mean {
        exact_moments(n, DEFAULT_PRECISION_BITS)?.mean.to_f64()
    } else {
        (PI * f64::from(n) / 2.0).sqrt()
    };
    Ok(CltParameters {
        n,
        mu_n,
        sigma2: (2.0 - 2f64.sqrt()) * mu_n,
        c: clt_constant(),
    })
}

/// `-(1/2) log(pi c sqrt N) - N^{3/2} (alpha - mu_N / N)^2 / c` for
/// `alpha = M / N`.
///
/// This is a density in `M`. Since `M` only takes values of one parity, the
/// lattice probability is about twice its exponential.
pub fn clt_log_density(n: u32, m: u32, use_exact_mean: bool) -> Result<f64> {
    if m > n || (n - m) % 2 == 1 {
        return Err(Error::Parity { n, m });
    }
    let params = clt_parameters(n, use_exact_mean)?;
    Ok(clt_log_density_with(&params, f64::from(m)))
}

/// As [`clt_log_density`] for given parameters and a real `M`.
pub fn clt_log_density_with(params: &CltParameters, m: f64) -> f64 {
    let n = f64::from(params.n);
    let deviation = (m - params.mu_n) / n;
    -0.5 * (PI * params.c * n.sqrt()).ln() - n.powf(1.5) * deviation * deviation / params.c
}

/// `log p_{N,N} ~ N^2/4 - (N^2/2) log 2 + (1/12) log N - 1/12 - zeta'(-1)`.
pub fn all_real_log_asymptotic(n: u32) -> f64 {
    let n = f64::from(n);
    n * n / 4.0 - n * n / 2.0 * LN_2 + n.ln() / 12.0 - 1.0 / 12.0 - ZETA_PRIME_MINUS1
}

/// `log p_{N,0} ~ -sqrt(pi N / 8) zeta(3/2)`.
pub fn no_real_log_asymptotic(n: u32) -> f64 {
    -(PI * f64::from(n) / 8.0).sqrt() * ZETA_3_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_values() {
        assert!((ld_rate(1.0).unwrap() - (LN_2 / 2.0 - 0.25)).abs() < 1e-15);
        assert!((ld_rate(0.5).unwrap() * 3600.0 - 38.51248).abs() < 1e-5);
        assert!(matches!(ld_rate(0.0), Err(Error::OutOfRange { .. })));
        assert!(matches!(ld_rate(1.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn series_and_closed_form_overlap() {
        for a in [0.3, 0.4, 0.45, 0.5, 0.6] {
            let diff = rate_series(a) - rate_closed_form(a);
            assert!(diff.abs() < 1e-16, "alpha={a} diff={diff}");
        }
    }

    #[test]
    fn small_alpha() {
        assert_eq!(small_alpha_rate(0.0), 0.0);
        assert!((small_alpha_rate(0.1) - 8.341_666_666_666_667e-5).abs() < 1e-18);
        let a: f64 = 1e-3;
        assert!((ld_rate(a).unwrap() / (a.powi(3) / 12.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn breakdown_pieces() {
        let b = energy_breakdown(1.0).unwrap();
        assert!((b.e_equator - LN_2 / 2.0).abs() < 1e-15);
        assert!(b.theta0.abs() < 1e-15);
        let b = energy_breakdown(0.5).unwrap();
        assert!((b.total - 38.5125 / 3600.0).abs() < 1e-7);
        assert!((b.theta0.cos() - 0.5).abs() < 1e-15);
        let b = energy_breakdown(1e-6).unwrap();
        assert!(b.e_annulus.abs() < 1e-5 && b.e_cross.abs() < 1e-5 && b.e_equator.abs() < 1e-5);
    }

    #[test]
    fn equator_plus_cross_closed_form() {
        for k in 1..100 {
            let a = f64::from(k) / 100.0;
            let b = energy_breakdown(a).unwrap();
            let closed = 0.5 * a * (-a * (1.0 + LN_2) + (1.0 + a) * a.ln_1p());
            assert!((b.e_equator + b.e_cross - closed).abs() < 1e-15);
        }
    }

    #[test]
    fn clt() {
        assert!((clt_constant() - 1.468_348_847_45).abs() < 1e-10);
        let p = clt_parameters(100, false).unwrap();
        let at_mean = clt_log_density_with(&p, p.mu_n);
        assert!((at_mean + 1.915_726_757_65).abs() < 1e-10);
        let d = 3.7;
        assert!(
            (clt_log_density_with(&p, p.mu_n + d) - clt_log_density_with(&p, p.mu_n - d)).abs()
                < 1e-12
        );
        assert_eq!(
            clt_log_density(100, 13, false).unwrap_err(),
            Error::Parity { n: 100, m: 13 }
        );
    }

    #[test]
    fn endpoint_asymptotes() {
        assert!((all_real_log_asymptotic(60) + 347.2417).abs() < 1e-4);
        assert!((no_real_log_asymptotic(100) + 16.370_635).abs() < 1e-6);
        let n = 37.0 * PI;
        assert!(((n / 8.0).sqrt() - 0.5 * (n / 2.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn zeta_three_halves_recomputed() {
        // partial sum plus Euler-Maclaurin tail from K
        let k = 1000u32;
        let head: f64 = (1..k).map(|j| f64::from(j).powf(-1.5)).sum();
        let kf = f64::from(k);
        let tail = 2.0 / kf.sqrt() + 0.5 * kf.powf(-1.5) + kf.powf(-2.5) / 8.0;
        assert!((head + tail - ZETA_3_2).abs() < 1e-12);
    }

    #[test]
    fn zeta_prime_minus_one_recomputed() {
        // zeta'(-1) = 1/12 - log A and 12 log A = gamma + log(2 pi) - 6 zeta'(2) / pi^2
        const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
        let k = 1000u32;
        let head: f64 = (2..k).map(|j| f64::from(j).ln() / f64::from(j * j)).sum();
        let kf = f64::from(k);
        let f = kf.ln() / (kf * kf);
        let df = (1.0 - 2.0 * kf.ln()) / (kf * kf * kf);
        let tail = (kf.ln() + 1.0) / kf + 0.5 * f - df / 12.0;
        let zeta_prime_2 = -(head + tail);
        let log_a = (EULER_GAMMA + (2.0 * PI).ln() - 6.0 * zeta_prime_2 / (PI * PI)) / 12.0;
        assert!((1.0 / 12.0 - log_a - ZETA_PRIME_MINUS1).abs() < 1e-12);
    }
}
