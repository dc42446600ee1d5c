//! The gamma-function product form of `Z_N`, kept as an independent oracle.
//!
//! ```text
//! Z_N(xi) = (-1)^{m(m-1)/2} / 2^{N(N-1)/2} * G((N+1)/2)^m G(m+1)^m
//!           * prod_{s=1}^{N} G(s/2)^-2 * prod_{l<m} (xi^2 alpha_l + beta_l)
//! ```
//!
//! with `m = N/2`. Every factor here is a single power of `sqrt(pi)` times a
//! rational, so the whole construction stays in [`SqrtPiLaurent`]. Nothing is
//! shared with the primary route except the exact kernel.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{check_even, expand_weights, factor_weights, table_from_polynomial, GenPoly};
use crate::error::Result;
use crate::exactnum::{factorial, PiPolynomial, SqrtPiLaurent};

/// A rational multiple of an integer power of `sqrt(pi)`.
#[derive(Clone, Debug)]
struct Mono {
    coefficient: BigRational,
    degree: i32,
}

impl Mono {
    fn new(coefficient: BigRational, degree: i32) -> Self {
        Mono {
            coefficient,
            degree,
        }
    }

    fn int(value: BigInt) -> Self {
        Mono::new(BigRational::from_integer(value), 0)
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono::new(
            &self.coefficient * &other.coefficient,
            self.degree + other.degree,
        )
    }

    fn recip(&self) -> Mono {
        Mono::new(self.coefficient.recip(), -self.degree)
    }

    fn pow(&self, k: u32) -> Mono {
        (0..k).fold(Mono::int(BigInt::one()), |acc, _| acc.mul(self))
    }

    fn to_laurent(&self) -> SqrtPiLaurent {
        SqrtPiLaurent::monomial(self.coefficient.clone(), self.degree)
    }
}

/// `Gamma(k/2)` for a positive integer `k`.
fn gamma_half(k: u64) -> Mono {
    assert!(k > 0, "Gamma has a pole at 0");
    if k.is_multiple_of(2) {
        Mono::int(factorial(k / 2 - 1))
    } else {
        // Gamma(j + 1/2) = sqrt(pi) (2j)! / (4^j j!)
        let j = (k - 1) / 2;
        let den = (BigInt::one() << (2 * j)) * factorial(j);
        Mono::new(BigRational::new(factorial(2 * j), den), 1)
    }
}

/// Exact ingredients of the gamma product form.
#[derive(Clone, Debug)]
pub struct GammaFactors {
    pub n: u32,
    pub alpha: Vec<SqrtPiLaurent>,
    pub beta: Vec<SqrtPiLaurent>,
    pub beta_prime: Vec<SqrtPiLaurent>,
    pub prefactor: SqrtPiLaurent,
}

impl GammaFactors {
    /// `beta_l` from its own closed form rather than as `beta'_l - alpha_l`.
    pub fn beta_direct(&self, l: usize) -> SqrtPiLaurent {
        let (n, _) = dims(self.n);
        let inner_rational = beta_prime_bracket(n, l as u64);
        let inner = &SqrtPiLaurent::monomial(inner_rational, 0)
            - &ratio(n).mul(&Mono::new(BigRational::one(), 1)).to_laurent();
        let outer = Mono::new(
            BigRational::new(BigInt::from(2), denominator(n, l as u64)),
            1,
        );
        &outer.to_laurent() * &inner
    }

    /// `prefactor * prod_l beta'_l`, which equals `Z_N(1)` and must be 1.
    pub fn normalization(&self) -> SqrtPiLaurent {
        self.beta_prime
            .iter()
            .fold(self.prefactor.clone(), |acc, b| &acc * b)
    }
}

fn dims(n: u32) -> (u64, u64) {
    (u64::from(n), u64::from(n) / 2)
}

/// `N - 1 - 4l`, which is odd and so never zero.
fn denominator(n: u64, l: u64) -> BigInt {
    BigInt::from(n as i64 - 1 - 4 * l as i64)
}

/// `Gamma((N+1)/2) / Gamma(N/2 + 1)`.
fn ratio(n: u64) -> Mono {
    gamma_half(n + 1).mul(&gamma_half(n + 2).recip())
}

/// `2^N Gamma(2l+1) Gamma(N-2l) / Gamma(N+1)`.
fn beta_prime_bracket(n: u64, l: u64) -> BigRational {
    BigRational::new(
        (BigInt::one() << n) * factorial(2 * l) * factorial(n - 2 * l - 1),
        factorial(n),
    )
}

pub fn gamma_factors(n: u32) -> Result<GammaFactors> {
    check_even(n)?;
    let (n, m) = dims(n);
    let ratio = ratio(n);
    let mut alpha = Vec::new();
    let mut beta_prime = Vec::new();
    for l in 0..m {
        let den = denominator(n, l);
        let a = Mono::new(BigRational::new(BigInt::from(2), den.clone()), 2).mul(&ratio);
        let bp = Mono::new(
            beta_prime_bracket(n, l) * BigRational::new(BigInt::from(2), den),
            1,
        );
        alpha.push(a.to_laurent());
        beta_prime.push(bp.to_laurent());
    }
    let beta = beta_prime
        .iter()
        .zip(&alpha)
        .map(|(bp, a)| bp - a)
        .collect();

    let sign = if (m * (m.saturating_sub(1)) / 2) % 2 == 1 {
        -1
    } else {
        1
    };
    let mut pre = Mono::new(
        BigRational::new(BigInt::from(sign), BigInt::one() << (n * (n - 1) / 2)),
        0,
    );
    let m32 = m as u32;
    pre = pre
        .mul(&gamma_half(n + 1).pow(m32))
        .mul(&gamma_half(n + 2).pow(m32));
    for s in 1..=n {
        pre = pre.mul(&gamma_half(s).pow(2).recip());
    }
    Ok(GammaFactors {
        n: n as u32,
        alpha,
        beta,
        beta_prime,
        prefactor: pre.to_laurent(),
    })
}

/// Expand the gamma product form term by term, folding left to right.
pub fn gamma_form_polynomial(n: u32) -> Result<GenPoly> {
    let g = gamma_factors(n)?;
    let mut poly: Vec<SqrtPiLaurent> = vec![g.prefactor.clone()];
    for (a, b) in g.alpha.iter().zip(&g.beta) {
        let mut next = vec![SqrtPiLaurent::zero(); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k] = &next[k] + &(c * b);
            next[k + 1] = &next[k + 1] + &(c * a);
        }
        poly = next;
    }
    let coefficients = poly
        .iter()
        .map(SqrtPiLaurent::to_pi_polynomial)
        .collect::<Result<Vec<PiPolynomial>>>()?;
    Ok(GenPoly { n, coefficients })
}

/// Largest absolute difference between the numeric coefficients produced by
/// the two routes, each evaluated at `precision_bits`.
pub fn crosscheck_gamma_form(n: u32, precision_bits: u32) -> Result<f64> {
    let oracle = table_from_polynomial(gamma_form_polynomial(n)?, precision_bits);
    let primary = table_from_polynomial(expand_weights(&factor_weights(n)?), precision_bits);
    let worst = oracle
        .entries
        .iter()
        .zip(&primary.entries)
        .map(|(a, b)| a.p_numeric.sub(&b.p_numeric).abs().to_f64())
        .fold(0.0, f64::max);
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_dist::generating_polynomial;
    use crate::exactnum::rational;

    #[test]
    fn gamma_at_half_integers() {
        let g = gamma_half(1);
        assert_eq!((g.coefficient, g.degree), (rational(1, 1), 1));
        let g = gamma_half(5); // Gamma(5/2) = 3 sqrt(pi) / 4
        assert_eq!((g.coefficient, g.degree), (rational(3, 4), 1));
        let g = gamma_half(8); // Gamma(4) = 6
        assert_eq!((g.coefficient, g.degree), (rational(6, 1), 0));
    }

    #[test]
    fn beta_identity_and_normalization() {
        for n in (2..=40).step_by(2) {
            let g = gamma_factors(n).unwrap();
            for l in 0..g.beta.len() {
                assert_eq!(g.beta[l], g.beta_direct(l), "N={n} l={l}");
            }
            assert_eq!(g.normalization(), SqrtPiLaurent::one(), "N={n}");
        }
    }

    #[test]
    fn ratio_matches_primary_weights() {
        let n = 12;
        let g = gamma_factors(n).unwrap();
        let w = factor_weights(n).unwrap();
        for l in 0..g.alpha.len() {
            let ratio =
                &g.alpha[l] * &SqrtPiLaurent::monomial(g.beta_prime[l].coefficient(1).recip(), -1);
            assert_eq!(ratio.to_pi_polynomial().unwrap(), w.pair_probability(l));
        }
    }

    #[test]
    fn both_routes_agree_exactly() {
        for n in [2u32, 4, 10, 26] {
            assert_eq!(
                gamma_form_polynomial(n).unwrap(),
                generating_polynomial(n).unwrap()
            );
        }
        assert_eq!(crosscheck_gamma_form(2, 128).unwrap(), 0.0);
    }
}
