//! Numeric and symbolic kernel: exact rationals, polynomials in π and in
//! √π, big-mantissa floats, semi-axis quadrature and bracketed 1-D solvers.

mod float;
mod optimize;
mod quad;
mod symbolic;

use num_bigint::BigInt;
use num_traits::One;

pub use float::HighPrecFloat;
pub use num_rational::BigRational;
pub use optimize::{find_root_bracketed, minimize_scalar, Minimum};
pub use quad::{
    gaussian_truncation, integrate_semiaxis, Quadrature, GEOMETRIC_LEVELS, MAX_SUBDIVISIONS,
};
pub use symbolic::{
    evaluate_symbolic, sum_rationals, PiPolynomial, SqrtPiLaurent, Symbolic, EVAL_GUARD_BITS,
    MIN_PRECISION_BITS,
};

/// n!
pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Binomial coefficient C(n, k), zero when k > n.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
