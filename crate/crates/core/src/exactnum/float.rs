//! Binary floating point with a big-integer mantissa.
//!
//! A value is `mantissa * 2^exponent` where a nonzero mantissa has exactly
//! `precision` significant bits. Every operation rounds its result to nearest
//! at the working precision, so a single operation has relative error at most
//! `2^-precision`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub struct HighPrecFloat {
    mantissa: BigInt,
    exponent: i64,
    precision: u32,
}

/// Round `m / 2^shift` to nearest, ties away from zero.
fn round_shift(m: &BigInt, shift: u64) -> BigInt {
    if shift == 0 {
        return m.clone();
    }
    let mag = m.magnitude();
    let half = num_bigint::BigUint::one() << (shift - 1);
    let rounded = (mag + half) >> shift;
    BigInt::from_biguint(m.sign(), rounded)
}

impl HighPrecFloat {
    pub fn zero(precision: u32) -> Self {
        Self {
            mantissa: BigInt::zero(),
            exponent: 0,
            precision: precision.max(2),
        }
    }

    fn normalized(mantissa: BigInt, exponent: i64, precision: u32) -> Self {
        let precision = precision.max(2);
        if mantissa.is_zero() {
            return Self::zero(precision);
        }
        let bits = mantissa.bits();
        let p = u64::from(precision);
        let (mut m, mut e) = if bits > p {
            let shift = bits - p;
            (round_shift(&mantissa, shift), exponent + shift as i64)
        } else {
            let shift = p - bits;
            (mantissa << shift, exponent - shift as i64)
        };
        // rounding up may carry into one extra bit; the dropped bit is zero
        if m.bits() > p {
            m >>= 1u32;
            e += 1;
        }
        Self {
            mantissa: m,
            exponent: e,
            precision,
        }
    }

    pub fn from_bigint(value: &BigInt, precision: u32) -> Self {
        Self::normalized(value.clone(), 0, precision)
    }

    pub fn from_i64(value: i64, precision: u32) -> Self {
        Self::normalized(BigInt::from(value), 0, precision)
    }

    /// Nearest representable value to an exact rational (within one ulp).
    pub fn from_rational(value: &BigRational, precision: u32) -> Self {
        let num = value.numer();
        let den = value.denom();
        if num.is_zero() {
            return Self::zero(precision);
        }
        let shift = i64::from(precision) + 2 + den.bits() as i64 - num.bits() as i64;
        let q = if shift >= 0 {
            (num << shift as u64).div_floor(den)
        } else {
            num.div_floor(&(den << (-shift) as u64))
        };
        Self::normalized(q, -shift, precision)
    }

    /// Exact conversion of a finite f64, then rounded to `precision`.
    pub fn from_f64(value: f64, precision: u32) -> Self {
        assert!(value.is_finite(), "from_f64 needs a finite value");
        if value == 0.0 {
            return Self::zero(precision);
        }
        let bits = value.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Self::normalized(BigInt::from(m) * sign, e, precision)
    }

    /// π correctly rounded to within one ulp, via Machin's formula.
    pub fn pi(precision: u32) -> Self {
        let guard = 40u64;
        let frac_bits = u64::from(precision) + guard;
        let one = BigInt::one() << frac_bits;
        let atan_inv = |x: u64| -> BigInt {
            let x2 = BigInt::from(x * x);
            let mut term = &one / BigInt::from(x);
            let mut sum = term.clone();
            let mut k = 1u64;
            while !term.is_zero() {
                term /= &x2;
                let t = &term / BigInt::from(2 * k + 1);
                if k % 2 == 1 {
                    sum -= t;
                } else {
                    sum += t;
                }
                k += 1;
            }
            sum
        };
        let pi_fixed = atan_inv(5) * 16 - atan_inv(239) * 4;
        Self::normalized(pi_fixed, -(frac_bits as i64), precision)
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// Round to a different precision.
    pub fn with_precision(&self, precision: u32) -> Self {
        Self::normalized(self.mantissa.clone(), self.exponent, precision)
    }

    pub fn abs(&self) -> Self {
        Self {
            mantissa: self.mantissa.abs(),
            ..self.clone()
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            mantissa: -&self.mantissa,
            ..self.clone()
        }
    }

    /// Position of the leading bit: `|x|` lies in `[2^(t-1), 2^t)`.
    fn top(&self) -> i64 {
        self.exponent + self.mantissa.bits() as i64
    }

    pub fn add(&self, other: &Self) -> Self {
        let precision = self.precision.max(other.precision);
        if self.is_zero() {
            return other.with_precision(precision);
        }
        if other.is_zero() {
            return self.with_precision(precision);
        }
        // A summand entirely below the rounding position of the other one
        // changes the result by less than 2^-(precision+3) relative.
        let gap = i64::from(precision) + 4;
        if self.top() - other.top() > gap {
            return self.with_precision(precision);
        }
        if other.top() - self.top() > gap {
            return other.with_precision(precision);
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &other.mantissa << (other.exponent - e) as u64;
        Self::normalized(a + b, e, precision)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let precision = self.precision.max(other.precision);
        Self::normalized(
            &self.mantissa * &other.mantissa,
            self.exponent + other.exponent,
            precision,
        )
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero");
        let precision = self.precision.max(other.precision);
        let shift = u64::from(precision) + 2 + other.mantissa.bits();
        let q = (&self.mantissa << shift).div_floor(&other.mantissa);
        Self::normalized(q, self.exponent - other.exponent - shift as i64, precision)
    }

    pub fn recip(&self) -> Self {
        Self::from_i64(1, self.precision).div(self)
    }

    pub fn powi(&self, n: i32) -> Self {
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Self::from_i64(1, self.precision);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of a negative value");
        if self.is_zero() {
            return self.clone();
        }
        let p = u64::from(self.precision);
        let want = 2 * p + 4;
        let bits = self.mantissa.bits();
        let mut shift = want.saturating_sub(bits) as i64;
        if (self.exponent - shift) % 2 != 0 {
            shift += 1;
        }
        let m = &self.mantissa << shift as u64;
        let root = m.sqrt();
        Self::normalized(root, (self.exponent - shift) / 2, self.precision)
    }

    /// Nearest f64 (underflows to 0 and overflows to ±inf).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits();
        let shift = bits.saturating_sub(64);
        let top = (self.mantissa.magnitude() >> shift)
            .to_u64()
            .unwrap_or(u64::MAX);
        let mag = ldexp(top as f64, self.exponent + shift as i64);
        if self.is_negative() {
            -mag
        } else {
            mag
        }
    }

    /// Natural logarithm of |x| in double precision; valid far outside the
    /// f64 exponent range.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mantissa.bits();
        let shift = bits.saturating_sub(64);
        let top = (self.mantissa.magnitude() >> shift)
            .to_u64()
            .unwrap_or(u64::MAX) as f64;
        top.ln() + (self.exponent + shift as i64) as f64 * std::f64::consts::LN_2
    }

    /// log2 of |x| in double precision.
    pub fn log2_abs(&self) -> f64 {
        self.ln_abs() / std::f64::consts::LN_2
    }

    /// Exact rational value of this float.
    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as u64)
        } else {
            BigRational::new(
                self.mantissa.clone(),
                BigInt::one() << (-self.exponent) as u64,
            )
        }
    }

    /// Scientific notation with `digits` significant digits, correctly
    /// rounded from the stored binary value, e.g. `3.562969809274e-17`.
    pub fn to_scientific(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        let sign = if self.is_negative() { "-" } else { "" };
        let mag = self.to_rational().abs();
        let ten = BigInt::from(10);
        let lo = num_traits::pow(ten.clone(), digits - 1);
        let hi = &lo * &ten;
        let mut k = (self.ln_abs() / std::f64::consts::LN_10).floor() as i64;
        let digits_str = loop {
            let s = digits as i64 - 1 - k;
            let scale =
                BigRational::from_integer(num_traits::pow(ten.clone(), s.unsigned_abs() as usize));
            let scaled = if s >= 0 { &mag * &scale } else { &mag / &scale };
            let n = scaled.round().to_integer();
            if n >= hi {
                k += 1;
            } else if n < lo {
                k -= 1;
            } else {
                break n.to_string();
            }
        };
        let (head, tail) = digits_str.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{k}")
        } else {
            format!("{sign}{head}.{tail}e{k}")
        }
    }

    /// Default number of decimal digits carried by the precision.
    pub fn decimal_digits(&self) -> usize {
        ((f64::from(self.precision) * std::f64::consts::LOG10_2).floor() as usize).max(1)
    }
}

fn ldexp(x: f64, e: i64) -> f64 {
    let mut x = x;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl PartialEq for HighPrecFloat {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for HighPrecFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let diff = self.sub(other);
        Some(match diff.mantissa.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        })
    }
}

impl fmt::Display for HighPrecFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or_else(|| self.decimal_digits());
        f.write_str(&self.to_scientific(digits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let pi = HighPrecFloat::pi(200);
        assert_eq!(
            pi.to_scientific(50),
            "3.1415926535897932384626433832795028841971693993751e0"
        );
    }

    #[test]
    fn rational_roundtrip_through_f64() {
        let r = BigRational::new(BigInt::from(1), BigInt::from(3));
        let x = HighPrecFloat::from_rational(&r, 64);
        assert!((x.to_f64() - 1.0 / 3.0).abs() < 1e-17);
        assert_eq!(HighPrecFloat::from_f64(0.1, 53).to_f64(), 0.1);
        assert_eq!(HighPrecFloat::from_f64(-2.5e-300, 53).to_f64(), -2.5e-300);
    }

    #[test]
    fn sqrt_and_division() {
        let two = HighPrecFloat::from_i64(2, 128);
        let r = two.sqrt();
        let back = r.mul(&r);
        assert!(back.sub(&two).abs().log2_abs() < -124.0);
        let third = HighPrecFloat::from_i64(1, 128).div(&HighPrecFloat::from_i64(3, 128));
        assert_eq!(third.to_scientific(10), "3.333333333e-1");
    }

    #[test]
    fn tiny_values_keep_their_logarithm() {
        let tiny = HighPrecFloat::from_i64(3, 64).mul(&HighPrecFloat::from_i64(2, 64).powi(-5000));
        assert_eq!(tiny.to_f64(), 0.0);
        let expected = 3f64.ln() - 5000.0 * std::f64::consts::LN_2;
        assert!((tiny.ln_abs() - expected).abs() < 1e-12);
    }

    #[test]
    fn scientific_rounding_edges() {
        let x = HighPrecFloat::from_f64(9.9996, 64);
        assert_eq!(x.to_scientific(4), "1.000e1");
        assert_eq!(HighPrecFloat::from_i64(-7, 64).to_scientific(1), "-7e0");
        assert_eq!(HighPrecFloat::zero(64).to_scientific(5), "0");
    }

    #[test]
    fn ordering() {
        let a = HighPrecFloat::from_f64(1.5, 64);
        let b = HighPrecFloat::from_f64(1.25, 64);
        assert!(a > b);
        assert!(a.neg() < b.neg());
        assert_eq!(a, a.with_precision(200));
    }
}
