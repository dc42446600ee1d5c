//! Exact numbers of the form `sum_j r_j * pi^j` and `sum_j r_j * sqrt(pi)^j`.
//!
//! Because π is transcendental, two such expressions are equal as real
//! numbers exactly when their coefficient maps are equal, so `==` on these
//! types is value equality.

use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::float::HighPrecFloat;
use crate::error::{Error, Result};

/// Guard bits of [`Symbolic::evaluate`]: the returned value has relative
/// error below `2^(-precision_bits + EVAL_GUARD_BITS)`.
pub const EVAL_GUARD_BITS: u32 = 1;

/// Lowest precision accepted by [`Symbolic::evaluate`]; smaller requests are
/// raised to it.
pub const MIN_PRECISION_BITS: u32 = 53;

type Terms<D> = BTreeMap<D, BigRational>;

fn insert_add<D: Ord + Copy>(terms: &mut Terms<D>, deg: D, value: BigRational) {
    if value.is_zero() {
        return;
    }
    match terms.entry(deg) {
        std::collections::btree_map::Entry::Vacant(slot) => {
            slot.insert(value);
        }
        std::collections::btree_map::Entry::Occupied(mut slot) => {
            *slot.get_mut() += value;
            if slot.get().is_zero() {
                slot.remove();
            }
        }
    }
}

fn add_terms<D: Ord + Copy>(a: &Terms<D>, b: &Terms<D>) -> Terms<D> {
    let mut out = a.clone();
    for (&d, v) in b {
        insert_add(&mut out, d, v.clone());
    }
    out
}

fn mul_terms<D: Ord + Copy + Add<Output = D>>(a: &Terms<D>, b: &Terms<D>) -> Terms<D> {
    let mut out = Terms::new();
    for (&da, va) in a {
        for (&db, vb) in b {
            insert_add(&mut out, da + db, va * vb);
        }
    }
    out
}

fn neg_terms<D: Ord + Copy>(a: &Terms<D>) -> Terms<D> {
    a.iter().map(|(&d, v)| (d, -v)).collect()
}

/// Values that are exact real numbers and can be rounded to binary floats.
pub trait Symbolic {
    /// `(degree, coefficient)` pairs with respect to [`Symbolic::base`].
    fn laurent_terms(&self) -> Vec<(i64, &BigRational)>;

    /// The transcendental the degrees refer to, at the given precision.
    fn base(precision_bits: u32) -> HighPrecFloat;

    /// Real value with relative error below `2^(-precision_bits + 1)`.
    ///
    /// The working precision is raised until the Horner rounding bound,
    /// scaled by `sum |r_j| base^j`, is small against the computed value, so
    /// cancellation between coefficients of alternating sign is accounted
    /// for. A nonzero exact value is never zero, which guarantees termination.
    fn evaluate(&self, precision_bits: u32) -> HighPrecFloat {
        let precision = precision_bits.max(MIN_PRECISION_BITS);
        let terms = self.laurent_terms();
        if terms.is_empty() {
            return HighPrecFloat::zero(precision);
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap_or(0);
        let hi = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let span = (hi - lo) as u64;
        // covers Horner (2 roundings per step), base and coefficient rounding,
        // and the |lo| multiplications of the final power
        let ops = 4 * span + 4 * lo.unsigned_abs() + 16;
        let ops_bits = 64 - ops.leading_zeros();
        let mut working = precision + 32 + ops_bits;
        loop {
            let x = Self::base(working);
            let mut acc = HighPrecFloat::zero(working);
            let mut abs_acc = HighPrecFloat::zero(working);
            let mut idx = terms.len();
            for deg in (lo..=hi).rev() {
                acc = acc.mul(&x);
                abs_acc = abs_acc.mul(&x);
                if idx > 0 && terms[idx - 1].0 == deg {
                    let c = HighPrecFloat::from_rational(terms[idx - 1].1, working);
                    abs_acc = abs_acc.add(&c.abs());
                    acc = acc.add(&c);
                    idx -= 1;
                }
            }
            if lo != 0 {
                let scale = x.powi(lo as i32);
                acc = acc.mul(&scale);
                abs_acc = abs_acc.mul(&scale);
            }
            if !acc.is_zero() {
                let err_log2 = abs_acc.log2_abs() - f64::from(working) + f64::from(ops_bits);
                let margin = acc.log2_abs() - err_log2;
                let needed = f64::from(precision) + 2.0;
                if margin >= needed {
                    return acc.with_precision(precision);
                }
                working += (needed - margin).ceil() as u32 + 16;
            } else {
                working *= 2;
            }
        }
    }
}

/// Free-function form of [`Symbolic::evaluate`].
pub fn evaluate_symbolic<S: Symbolic>(value: &S, precision_bits: u32) -> HighPrecFloat {
    value.evaluate(precision_bits)
}

/// Polynomial in π with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PiPolynomial {
    terms: Terms<u32>,
}

impl PiPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(value: BigRational) -> Self {
        Self::monomial(value, 0)
    }

    pub fn monomial(value: BigRational, degree: u32) -> Self {
        let mut terms = Terms::new();
        insert_add(&mut terms, degree, value);
        Self { terms }
    }

    /// π itself.
    pub fn pi() -> Self {
        Self::monomial(BigRational::one(), 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, BigRational)>>(iter: I) -> Self {
        let mut terms = Terms::new();
        for (d, v) in iter {
            insert_add(&mut terms, d, v);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn coefficient(&self, degree: u32) -> BigRational {
        self.terms
            .get(&degree)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.terms.iter().map(|(&d, v)| (d, v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&d, v)| (d, v * factor)).collect(),
        }
    }

    pub fn scale_int(&self, factor: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(factor.clone()))
    }
}

impl Symbolic for PiPolynomial {
    fn laurent_terms(&self) -> Vec<(i64, &BigRational)> {
        self.terms.iter().map(|(&d, v)| (i64::from(d), v)).collect()
    }

    fn base(precision_bits: u32) -> HighPrecFloat {
        HighPrecFloat::pi(precision_bits)
    }
}

impl Add for &PiPolynomial {
    type Output = PiPolynomial;
    fn add(self, rhs: &PiPolynomial) -> PiPolynomial {
        PiPolynomial {
            terms: add_terms(&self.terms, &rhs.terms),
        }
    }
}

impl Add for PiPolynomial {
    type Output = PiPolynomial;
    fn add(mut self, rhs: PiPolynomial) -> PiPolynomial {
        self += &rhs;
        self
    }
}

impl AddAssign<&PiPolynomial> for PiPolynomial {
    fn add_assign(&mut self, rhs: &PiPolynomial) {
        for (&d, v) in &rhs.terms {
            insert_add(&mut self.terms, d, v.clone());
        }
    }
}

impl Sub for &PiPolynomial {
    type Output = PiPolynomial;
    fn sub(self, rhs: &PiPolynomial) -> PiPolynomial {
        PiPolynomial {
            terms: add_terms(&self.terms, &neg_terms(&rhs.terms)),
        }
    }
}

impl Sub for PiPolynomial {
    type Output = PiPolynomial;
    fn sub(self, rhs: PiPolynomial) -> PiPolynomial {
        &self - &rhs
    }
}

impl Mul for &PiPolynomial {
    type Output = PiPolynomial;
    fn mul(self, rhs: &PiPolynomial) -> PiPolynomial {
        PiPolynomial {
            terms: mul_terms(&self.terms, &rhs.terms),
        }
    }
}

impl Mul for PiPolynomial {
    type Output = PiPolynomial;
    fn mul(self, rhs: PiPolynomial) -> PiPolynomial {
        &self * &rhs
    }
}

impl Neg for PiPolynomial {
    type Output = PiPolynomial;
    fn neg(self) -> PiPolynomial {
        PiPolynomial {
            terms: neg_terms(&self.terms),
        }
    }
}

impl Zero for PiPolynomial {
    fn zero() -> Self {
        PiPolynomial::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for PiPolynomial {
    fn one() -> Self {
        PiPolynomial::one()
    }
}

impl Sum for PiPolynomial {
    fn sum<I: Iterator<Item = PiPolynomial>>(iter: I) -> Self {
        let items: Vec<PiPolynomial> = iter.collect();
        items.iter().sum()
    }
}

impl<'a> Sum<&'a PiPolynomial> for PiPolynomial {
    fn sum<I: Iterator<Item = &'a PiPolynomial>>(iter: I) -> Self {
        let mut by_degree: BTreeMap<u32, Vec<&BigRational>> = BTreeMap::new();
        for x in iter {
            for (&d, v) in &x.terms {
                by_degree.entry(d).or_default().push(v);
            }
        }
        PiPolynomial::from_terms(by_degree.into_iter().map(|(d, vs)| (d, sum_rationals(&vs))))
    }
}

/// `2^k` if `d` is a positive power of two.
fn power_of_two_exponent(d: &BigInt) -> Option<u64> {
    let tz = d.trailing_zeros()?;
    (d.is_positive() && d.magnitude().count_ones() == 1).then_some(tz)
}

/// Exact sum with a single normalization at the end.
///
/// Dyadic inputs are aligned by shifting, so no gcd is taken until the
/// result is reduced; other denominators go through a running lcm.
pub fn sum_rationals(values: &[&BigRational]) -> BigRational {
    let shifts: Option<Vec<u64>> = values
        .iter()
        .map(|v| power_of_two_exponent(v.denom()))
        .collect();
    if let Some(shifts) = shifts {
        let top = shifts.iter().copied().max().unwrap_or(0);
        let mut num = BigInt::zero();
        for (v, &k) in values.iter().zip(&shifts) {
            num += v.numer() << (top - k);
        }
        if num.is_zero() {
            return BigRational::zero();
        }
        let strip = num.trailing_zeros().unwrap_or(0).min(top);
        return BigRational::new_raw(num >> strip, BigInt::one() << (top - strip));
    }
    let mut den = BigInt::one();
    for v in values {
        den = den.lcm(v.denom());
    }
    let mut num = BigInt::zero();
    for v in values {
        num += v.numer() * (&den / v.denom());
    }
    BigRational::new(num, den)
}

fn fmt_terms<D: fmt::Display + Zero + PartialEq + Copy>(
    f: &mut fmt::Formatter<'_>,
    terms: &mut dyn Iterator<Item = (D, &BigRational)>,
    symbol: &str,
) -> fmt::Result {
    let mut first = true;
    for (d, v) in terms {
        let neg = v.is_negative();
        let mag = v.abs();
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        first = false;
        if d == D::zero() {
            write!(f, "{mag}")?;
        } else if mag.is_one() {
            write!(f, "{symbol}^{d}")?;
        } else {
            write!(f, "{mag}*{symbol}^{d}")?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl fmt::Display for PiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(f, &mut self.terms(), "pi")
    }
}

/// Laurent polynomial in `s = sqrt(pi)` with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SqrtPiLaurent {
    terms: Terms<i32>,
}

impl SqrtPiLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::one(), 0)
    }

    /// `value * sqrt(pi)^degree`.
    pub fn monomial(value: BigRational, degree: i32) -> Self {
        let mut terms = Terms::new();
        insert_add(&mut terms, degree, value);
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, degree: i32) -> BigRational {
        self.terms
            .get(&degree)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigRational)> {
        self.terms.iter().map(|(&d, v)| (d, v))
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&d, v)| (d, v * factor)).collect(),
        }
    }

    /// Exact conversion using `s^2 = pi`; defined only when every degree is
    /// even and non-negative.
    pub fn to_pi_polynomial(&self) -> Result<PiPolynomial> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (&d, v) in &self.terms {
            if d < 0 || d % 2 != 0 {
                return Err(Error::NotConvertible(format!(
                    "term of degree {d} in sqrt(pi)"
                )));
            }
            out.push(((d / 2) as u32, v.clone()));
        }
        Ok(PiPolynomial::from_terms(out))
    }
}

impl From<&PiPolynomial> for SqrtPiLaurent {
    fn from(p: &PiPolynomial) -> Self {
        Self {
            terms: p.terms().map(|(d, v)| (2 * d as i32, v.clone())).collect(),
        }
    }
}

impl Symbolic for SqrtPiLaurent {
    fn laurent_terms(&self) -> Vec<(i64, &BigRational)> {
        self.terms.iter().map(|(&d, v)| (i64::from(d), v)).collect()
    }

    fn base(precision_bits: u32) -> HighPrecFloat {
        HighPrecFloat::pi(precision_bits + 2)
            .sqrt()
            .with_precision(precision_bits)
    }
}

impl Add for &SqrtPiLaurent {
    type Output = SqrtPiLaurent;
    fn add(self, rhs: &SqrtPiLaurent) -> SqrtPiLaurent {
        SqrtPiLaurent {
            terms: add_terms(&self.terms, &rhs.terms),
        }
    }
}

impl Sub for &SqrtPiLaurent {
    type Output = SqrtPiLaurent;
    fn sub(self, rhs: &SqrtPiLaurent) -> SqrtPiLaurent {
        SqrtPiLaurent {
            terms: add_terms(&self.terms, &neg_terms(&rhs.terms)),
        }
    }
}

impl Mul for &SqrtPiLaurent {
    type Output = SqrtPiLaurent;
    fn mul(self, rhs: &SqrtPiLaurent) -> SqrtPiLaurent {
        SqrtPiLaurent {
            terms: mul_terms(&self.terms, &rhs.terms),
        }
    }
}

impl fmt::Display for SqrtPiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(f, &mut self.terms(), "sqrt(pi)")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn constants_evaluate() {
        assert_eq!(PiPolynomial::one().evaluate(64).to_f64(), 1.0);
        let quarter_pi = PiPolynomial::monomial(r(1, 4), 1);
        assert_eq!(
            quarter_pi.evaluate(64).to_scientific(19),
            "7.853981633974483096e-1"
        );
        let complement = &PiPolynomial::one() - &quarter_pi;
        assert_eq!(
            complement.evaluate(64).to_scientific(17),
            "2.1460183660255169e-1"
        );
        assert!(PiPolynomial::zero().evaluate(64).is_zero());
    }

    #[test]
    fn heavy_cancellation_keeps_relative_accuracy() {
        // (pi - 355/113)^7 expanded: alternating coefficients, value ~ 1.6e-49
        let base = &PiPolynomial::pi() - &PiPolynomial::constant(r(355, 113));
        let mut p = PiPolynomial::one();
        for _ in 0..7 {
            p = &p * &base;
        }
        let v = p.evaluate(64);
        let direct = HighPrecFloat::pi(400)
            .sub(&HighPrecFloat::from_rational(&r(355, 113), 400))
            .powi(7);
        let rel = v.sub(&direct).abs().log2_abs() - direct.log2_abs();
        assert!(rel < -63.0, "relative error 2^{rel}");
    }

    #[test]
    fn laurent_negative_powers() {
        // 2/sqrt(pi) + sqrt(pi)
        let x = &SqrtPiLaurent::monomial(r(2, 1), -1) + &SqrtPiLaurent::monomial(r(1, 1), 1);
        let s = std::f64::consts::PI.sqrt();
        assert!((x.evaluate(64).to_f64() - (2.0 / s + s)).abs() < 1e-15);
    }

    #[test]
    fn laurent_conversion() {
        let p = PiPolynomial::from_terms([(0, r(1, 2)), (3, r(-5, 7))]);
        let l = SqrtPiLaurent::from(&p);
        assert_eq!(l.coefficient(6), r(-5, 7));
        assert_eq!(l.to_pi_polynomial().unwrap(), p);
        let odd = SqrtPiLaurent::monomial(r(1, 1), 3);
        assert!(matches!(
            odd.to_pi_polynomial(),
            Err(Error::NotConvertible(_))
        ));
        let neg = SqrtPiLaurent::monomial(r(1, 1), -2);
        assert!(neg.to_pi_polynomial().is_err());
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let a = PiPolynomial::from_terms([(1, r(1, 3)), (2, r(1, 1))]);
        let b = PiPolynomial::from_terms([(1, r(-1, 3))]);
        let s = &a + &b;
        assert_eq!(s.len(), 1);
        assert_eq!(s.degree(), Some(2));
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn display() {
        let p = PiPolynomial::from_terms([(0, r(1, 1)), (1, r(-1, 4))]);
        assert_eq!(p.to_string(), "1 - 1/4*pi^1");
        assert_eq!(PiPolynomial::zero().to_string(), "0");
    }
}
