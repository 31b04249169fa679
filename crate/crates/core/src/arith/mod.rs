//! Exact integer and rational arithmetic: binomials, Stirling numbers and
//! polynomials in `n` with rational coefficients.

mod poly;
mod real;
mod stirling;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use poly::{Basis, CoefficientRecord, PreparedPolynomial, RationalPolynomial};
pub use real::{ln_abs_rational, rational_to_f64, sqrt_rational_to_f64};
pub use stirling::{StirlingTable, DEFAULT_STIRLING_ORDER};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// An exact rational as decimal strings, for JSON output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactValue {
    pub numerator: String,
    pub denominator: String,
}

impl From<&BigRational> for ExactValue {
    fn from(r: &BigRational) -> Self {
        ExactValue {
            numerator: r.numer().to_string(),
            denominator: r.denom().to_string(),
        }
    }
}

/// Binomial coefficient `C(a, b)`; zero when `b < 0` or `b > a`.
pub fn binomial(a: u64, b: i64) -> BigInt {
    if b < 0 || b as u64 > a {
        return BigInt::zero();
    }
    let b = (b as u64).min(a - b as u64);
    let mut acc = BigInt::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// `C(a, 2)` for small arguments.
#[inline]
pub const fn choose2(a: u64) -> u64 {
    if a < 2 {
        0
    } else {
        a * (a - 1) / 2
    }
}

pub fn factorial(m: u64) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, i| acc * i)
}

/// `2^e` as an exact rational, `e` may be negative.
pub fn pow2(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Integer in a rational wrapper.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(a: usize, b: usize) -> u64 {
        let mut row = vec![1u64];
        for _ in 0..a {
            let mut next = vec![1u64; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row[b]
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(8, 4), BigInt::from(pascal(8, 4)));
        assert_eq!(binomial(8, 4), BigInt::from(70));
        for a in 0..12 {
            assert_eq!(binomial(a, 0), BigInt::one());
        }
        assert_eq!(binomial(5, -1), BigInt::zero());
        assert_eq!(binomial(5, 6), BigInt::zero());
    }

    #[test]
    fn binomial_matches_pascal_triangle() {
        for a in 0..40 {
            for b in 0..=a {
                assert_eq!(binomial(a as u64, b as i64), BigInt::from(pascal(a, b)));
            }
        }
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(pow2(3), int(8));
        assert_eq!(pow2(-5), ratio(1, 32));
        assert_eq!(pow2(0), int(1));
    }
}
