//! Exact finite-N distribution of the number of real eigenvalues.
//!
//! For even N the generating function factorizes as
//!
//! ```text
//! Z_N(xi) = prod_{l=0}^{N/2-1} (1 - (1 - xi^2) * pi * q_l)
//! ```
//!
//! with rational `q_l = C(N-1, 2l) * N * C(N, N/2) / 4^N`. Each factor is
//! the generating function of a Bernoulli variable with success probability
//! `pi * q_l` that contributes two real eigenvalues, so `p_{N,M}` is the
//! coefficient of `xi^M`. Everything here is exact in `Q[pi]`; floats only
//! appear when a [`ProbabilityTable`] is rendered.
//!
//! The product form written with gamma-function factors and a sign
//! prefactor lives in [`gamma`] and is kept as an independent second route.

pub mod gamma;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{binomial, HighPrecFloat, PiPolynomial, Symbolic};

pub use gamma::{crosscheck_gamma_form, gamma_factors, gamma_form_polynomial, GammaFactors};

/// Numeric precision used when the caller does not choose one.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

pub(crate) fn check_even(n: u32) -> Result<()> {
    if n % 2 == 1 {
        return Err(Error::OddN(n));
    }
    if n < 2 {
        return Err(Error::TooSmall(n, 2));
    }
    Ok(())
}

/// The rationals `q_l`, one per factor of `Z_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorWeights {
    n: u32,
    q: Vec<BigRational>,
}

impl FactorWeights {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> &[BigRational] {
        &self.q
    }

    /// `pi * q_l`, the probability that factor `l` contributes a real pair.
    pub fn pair_probability(&self, l: usize) -> PiPolynomial {
        PiPolynomial::monomial(self.q[l].clone(), 1)
    }

    /// Root of factor `l` as a function of `xi^2`: `-(1 - pi q_l) / (pi q_l)`.
    pub fn zero_location(&self, l: usize, precision_bits: u32) -> HighPrecFloat {
        let p = self.pair_probability(l);
        let complement = &PiPolynomial::one() - &p;
        complement
            .evaluate(precision_bits)
            .div(&p.evaluate(precision_bits))
            .neg()
    }

    /// `log p_{N,0} = sum_l log(1 - pi q_l)`.
    pub fn log_p_no_real(&self, precision_bits: u32) -> f64 {
        (0..self.q.len())
            .map(|l| {
                (&PiPolynomial::one() - &self.pair_probability(l))
                    .evaluate(precision_bits)
                    .ln_abs()
            })
            .sum()
    }

    /// `log p_{N,N} = sum_l log(pi q_l)`.
    pub fn log_p_all_real(&self, precision_bits: u32) -> f64 {
        (0..self.q.len())
            .map(|l| self.pair_probability(l).evaluate(precision_bits).ln_abs())
            .sum()
    }

    /// `log Z_N(xi)` for real `xi`, each factor rounded at `precision_bits`.
    pub fn log_generating_function(&self, xi: f64, precision_bits: u32) -> f64 {
        let one = HighPrecFloat::from_i64(1, precision_bits);
        let x = HighPrecFloat::from_f64(xi, precision_bits);
        let shrink = one.sub(&x.mul(&x));
        (0..self.q.len())
            .map(|l| {
                let p = self.pair_probability(l).evaluate(precision_bits);
                one.sub(&shrink.mul(&p)).ln_abs()
            })
            .sum()
    }
}

/// Exact factor weights for even `n >= 2`.
pub fn factor_weights(n: u32) -> Result<FactorWeights> {
    check_even(n)?;
    let n64 = u64::from(n);
    let m = n64 / 2;
    let common = BigRational::new(
        BigInt::from(n64) * binomial(n64, m),
        BigInt::one() << (2 * n64),
    );
    let q = (0..m)
        .map(|l| &common * BigRational::from_integer(binomial(n64 - 1, 2 * l)))
        .collect();
    Ok(FactorWeights { n, q })
}

/// `Z_N` as a polynomial in `xi^2`: `coefficients[k]` multiplies `xi^(2k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenPoly {
    pub n: u32,
    pub coefficients: Vec<PiPolynomial>,
}

impl GenPoly {
    pub fn coefficient(&self, k: usize) -> Option<&PiPolynomial> {
        self.coefficients.get(k)
    }

    /// Sum of all coefficients, i.e. `Z_N(1)`.
    pub fn total(&self) -> PiPolynomial {
        self.coefficients.iter().sum()
    }
}

fn int_poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `prod (1 + a_l u)`, multiplied in a balanced tree.
fn product_tree(a: &[BigInt]) -> Vec<BigInt> {
    match a {
        [] => vec![BigInt::one()],
        [single] => vec![BigInt::one(), single.clone()],
        _ => {
            let (left, right) = a.split_at(a.len() / 2);
            let (l, r) = rayon::join(|| product_tree(left), || product_tree(right));
            int_poly_mul(&l, &r)
        }
    }
}

/// `num / den` reduced, stripping powers of two directly when `den` is one.
fn reduced(num: BigInt, den: BigInt) -> BigRational {
    if den.magnitude().count_ones() != 1 || num.is_zero() {
        return BigRational::new(num, den);
    }
    let k = den.trailing_zeros().unwrap_or(0);
    let strip = num.trailing_zeros().unwrap_or(0).min(k);
    BigRational::new_raw(num >> strip, BigInt::one() << (k - strip))
}

/// Expand `prod_l [(1 - pi q_l) + xi^2 pi q_l]` exactly.
///
/// With `y = xi^2 - 1` each factor is `1 + pi q_l y`. All `q_l` are integer
/// multiples `a_l r` of `r = q_0`, so the product is `sum_j e_j (pi r y)^j`
/// where `e_j` are the elementary symmetric polynomials of the integers
/// `a_l`, expanded in a balanced product tree. Substituting `y = xi^2 - 1`
/// gives the coefficient of `xi^(2k)` as
/// `sum_{j >= k} (-1)^(j-k) C(j, k) e_j r^j pi^j`, one term per power of π.
pub fn generating_polynomial(n: u32) -> Result<GenPoly> {
    let weights = factor_weights(n)?;
    Ok(expand_weights(&weights))
}

pub(crate) fn expand_weights(weights: &FactorWeights) -> GenPoly {
    let r = weights.q[0].clone();
    let a: Vec<BigInt> = weights
        .q
        .iter()
        .map(|q| {
            let ratio = q / &r;
            assert!(
                ratio.is_integer(),
                "weights are not integer multiples of q_0"
            );
            ratio.to_integer()
        })
        .collect();
    let e = product_tree(&a);
    let mut r_num = vec![BigInt::one()];
    let mut r_den = vec![BigInt::one()];
    for j in 1..e.len() {
        r_num.push(&r_num[j - 1] * r.numer());
        r_den.push(&r_den[j - 1] * r.denom());
    }
    let coefficients = (0..e.len())
        .into_par_iter()
        .map(|k| {
            PiPolynomial::from_terms((k..e.len()).map(|j| {
                let mut num = binomial(j as u64, k as u64) * &e[j] * &r_num[j];
                if (j - k) % 2 == 1 {
                    num = -num;
                }
                (j as u32, reduced(num, r_den[j].clone()))
            }))
        })
        .collect();
    GenPoly {
        n: weights.n,
        coefficients,
    }
}

#[derive(Clone, Debug)]
pub struct ProbabilityEntry {
    pub m: u32,
    pub p_symbolic: PiPolynomial,
    pub p_numeric: HighPrecFloat,
}

/// `p_{N,M}` for every `M` of the parity of `N`.
#[derive(Clone, Debug)]
pub struct ProbabilityTable {
    pub n: u32,
    pub precision_bits: u32,
    pub entries: Vec<ProbabilityEntry>,
}

impl ProbabilityTable {
    pub fn get(&self, m: u32) -> Option<&ProbabilityEntry> {
        if m % 2 == 1 {
            return None;
        }
        self.entries.get((m / 2) as usize)
    }

    pub fn total(&self) -> PiPolynomial {
        self.entries.iter().map(|e| &e.p_symbolic).sum()
    }

    /// `(sum M p, sum M^2 p - (sum M p)^2)` computed directly from the table.
    pub fn direct_moments(&self) -> (PiPolynomial, PiPolynomial) {
        let mut first = PiPolynomial::zero();
        let mut second = PiPolynomial::zero();
        for e in &self.entries {
            let m = BigInt::from(e.m);
            first += &e.p_symbolic.scale_int(&m);
            second += &e.p_symbolic.scale_int(&(&m * &m));
        }
        let variance = &second - &(&first * &first);
        (first, variance)
    }
}

pub fn probability_table(n: u32, precision_bits: u32) -> Result<ProbabilityTable> {
    let poly = generating_polynomial(n)?;
    Ok(table_from_polynomial(poly, precision_bits))
}

pub(crate) fn table_from_polynomial(poly: GenPoly, precision_bits: u32) -> ProbabilityTable {
    let entries = poly
        .coefficients
        .into_par_iter()
        .enumerate()
        .map(|(k, p)| ProbabilityEntry {
            m: 2 * k as u32,
            p_numeric: p.evaluate(precision_bits),
            p_symbolic: p,
        })
        .collect();
    ProbabilityTable {
        n: poly.n,
        precision_bits,
        entries,
    }
}

/// A single `p_{N,M}` without rendering the whole table.
pub fn probability(n: u32, m: u32, precision_bits: u32) -> Result<ProbabilityEntry> {
    check_even(n)?;
    if m % 2 == 1 || m > n {
        return Err(Error::Parity { n, m });
    }
    let poly = generating_polynomial(n)?;
    let p = poly.coefficients[(m / 2) as usize].clone();
    Ok(ProbabilityEntry {
        m,
        p_numeric: p.evaluate(precision_bits),
        p_symbolic: p,
    })
}

/// Mean and variance of the real-eigenvalue count from the Bernoulli
/// decomposition: `mean = 2 pi sum q_l`, `var = 4 sum pi q_l (1 - pi q_l)`.
#[derive(Clone, Debug)]
pub struct ExactMoments {
    pub n: u32,
    pub mean_symbolic: PiPolynomial,
    pub variance_symbolic: PiPolynomial,
    pub mean: HighPrecFloat,
    pub variance: HighPrecFloat,
}

impl ExactMoments {
    /// Exact agreement with the moments summed directly over `table`.
    pub fn matches_table(&self, table: &ProbabilityTable) -> bool {
        let (mean, variance) = table.direct_moments();
        mean == self.mean_symbolic && variance == self.variance_symbolic
    }
}

pub fn exact_moments(n: u32, precision_bits: u32) -> Result<ExactMoments> {
    let weights = factor_weights(n)?;
    let two = BigInt::from(2);
    let four = BigInt::from(4);
    let mut mean = PiPolynomial::zero();
    let mut variance = PiPolynomial::zero();
    for l in 0..weights.q.len() {
        let p = weights.pair_probability(l);
        mean += &p.scale_int(&two);
        let bernoulli = &p * &(&PiPolynomial::one() - &p);
        variance += &bernoulli.scale_int(&four);
    }
    Ok(ExactMoments {
        n,
        mean: mean.evaluate(precision_bits),
        variance: variance.evaluate(precision_bits),
        mean_symbolic: mean,
        variance_symbolic: variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational;

    #[test]
    fn weights_small_n() {
        assert_eq!(factor_weights(2).unwrap().q(), &[rational(1, 4)]);
        assert_eq!(
            factor_weights(4).unwrap().q(),
            &[rational(3, 32), rational(9, 32)]
        );
        assert_eq!(factor_weights(7).unwrap_err(), Error::OddN(7));
        assert_eq!(factor_weights(0).unwrap_err(), Error::TooSmall(0, 2));
    }

    #[test]
    fn weights_stay_below_one_over_pi() {
        for n in (2..=120).step_by(2) {
            let w = factor_weights(n).unwrap();
            for l in 0..w.q().len() {
                let p = w.pair_probability(l).evaluate(128).to_f64();
                assert!(p > 0.0 && p < 1.0, "N={n} l={l} pi*q={p}");
                assert!(w.zero_location(l, 128).is_negative());
            }
        }
    }

    #[test]
    fn n2_and_n4_polynomials() {
        let z2 = generating_polynomial(2).unwrap();
        let quarter_pi = PiPolynomial::monomial(rational(1, 4), 1);
        assert_eq!(z2.coefficients[0], &PiPolynomial::one() - &quarter_pi);
        assert_eq!(z2.coefficients[1], quarter_pi);

        let z4 = generating_polynomial(4).unwrap();
        assert_eq!(
            z4.coefficients[2],
            PiPolynomial::monomial(rational(27, 1024), 2)
        );
        assert_eq!(z4.total(), PiPolynomial::one());
    }

    #[test]
    fn n2_table() {
        let t = probability_table(2, 64).unwrap();
        assert!((t.get(0).unwrap().p_numeric.to_f64() - 0.214_601_836_602_551_7).abs() < 1e-15);
        assert!((t.get(2).unwrap().p_numeric.to_f64() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!(t.get(1).is_none());
    }

    #[test]
    fn all_real_is_product_of_pair_probabilities() {
        for n in [6u32, 12, 30] {
            let w = factor_weights(n).unwrap();
            let poly = expand_weights(&w);
            let product = (0..w.q().len())
                .map(|l| w.pair_probability(l))
                .fold(PiPolynomial::one(), |acc, p| &acc * &p);
            assert_eq!(poly.coefficients.last().unwrap(), &product);
            let none = (0..w.q().len())
                .map(|l| &PiPolynomial::one() - &w.pair_probability(l))
                .fold(PiPolynomial::one(), |acc, p| &acc * &p);
            assert_eq!(poly.coefficients[0], none);
        }
    }

    #[test]
    fn moments_small_n() {
        let m2 = exact_moments(2, 128).unwrap();
        assert!((m2.mean.to_f64() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let pi = std::f64::consts::PI;
        assert!((m2.variance.to_f64() - (pi - pi * pi / 4.0)).abs() < 1e-15);
        let m4 = exact_moments(4, 128).unwrap();
        assert!((m4.mean.to_f64() - 3.0 * pi / 4.0).abs() < 1e-15);
        for n in [2u32, 10, 24] {
            let m = exact_moments(n, 128).unwrap();
            assert!(m.matches_table(&probability_table(n, 64).unwrap()));
        }
    }

    #[test]
    fn single_probability_validation() {
        assert_eq!(
            probability(8, 3, 64).unwrap_err(),
            Error::Parity { n: 8, m: 3 }
        );
        assert_eq!(
            probability(8, 10, 64).unwrap_err(),
            Error::Parity { n: 8, m: 10 }
        );
        assert!(probability(8, 4, 64).is_ok());
    }

    #[test]
    fn log_helpers_agree_with_table() {
        let n = 20;
        let w = factor_weights(n).unwrap();
        let t = probability_table(n, 128).unwrap();
        assert!((w.log_p_no_real(128) - t.get(0).unwrap().p_numeric.ln_abs()).abs() < 1e-12);
        assert!((w.log_p_all_real(128) - t.get(n).unwrap().p_numeric.ln_abs()).abs() < 1e-11);
        assert!(w.log_generating_function(1.0, 128).abs() < 1e-15);
        // Z_N(1/2) = sum p_M 2^-M
        let direct: f64 = t
            .entries
            .iter()
            .map(|e| e.p_numeric.to_f64() * 0.5f64.powi(e.m as i32))
            .sum();
        assert!((w.log_generating_function(0.5, 128) - direct.ln()).abs() < 1e-12);
    }
}
