//! Closed-form expressions used to cross-check the enumeration engine.

use num_rational::BigRational;

use crate::arith::{choose2, factorial, int, pow2, ratio, Basis, RationalPolynomial};
use crate::error::{Error, Result};

/// `E[X^2]` written as a sum over the intersection size `i = |S_1 ∩ S_2|`:
///
/// ```text
/// p^2 (n)_{2k} / (k! k!) + p^2 (n)_{2k-1} / (1! (k-1)! (k-1)!)
///   + sum_{i=2}^{k} 2 / 2^{2 C(k,2) - C(i,2)} (n)_{2k-i} / (i! (k-i)! (k-i)!)
/// ```
///
/// with `p = 2 / 2^{C(k,2)}`. Returned in the monomial basis.
pub fn second_moment_reference(k: u32) -> Result<RationalPolynomial> {
    if k < 2 {
        return Err(Error::domain(format!("k = {k} must be at least 2")));
    }
    let ck = choose2(k as u64) as i64;
    let p = pow2(1 - ck);
    let fact = |m: u32| int(factorial(m as u64));
    let mut terms = vec![
        (2 * k, &p * &p / (fact(k) * fact(k))),
        (2 * k - 1, &p * &p / (fact(1) * fact(k - 1) * fact(k - 1))),
    ];
    for i in 2..=k {
        let prob = pow2(1 - (2 * ck - choose2(i as u64) as i64));
        terms.push((2 * k - i, prob / (fact(i) * fact(k - i) * fact(k - i))));
    }
    Ok(RationalPolynomial::from_terms(Basis::FallingFactorial, terms).to_basis(Basis::Monomial))
}

/// Predicted leading term `(degree, coefficient)` of `E[(X - mu)^m]` for
/// `m in 2..=5`:
///
/// | m | degree  | coefficient                         |
/// |---|---------|-------------------------------------|
/// | 2 | 2k - 3  | 1/2 · 2^2 / ((k-3)!^2 2^{2C(k,2)})  |
/// | 3 | 3k - 5  | 1   · 2^3 / ((k-3)!^3 2^{3C(k,2)})  |
/// | 4 | 4k - 6  | 3/4 · 2^4 / ((k-3)!^4 2^{4C(k,2)})  |
/// | 5 | 5k - 8  | 5   · 2^5 / ((k-3)!^5 2^{5C(k,2)})  |
pub fn leading_central_reference(k: u32, m: u32) -> Result<(u32, BigRational)> {
    let (scale, degree) = match m {
        2 => (ratio(1, 2), 2 * k as i64 - 3),
        3 => (int(1), 3 * k as i64 - 5),
        4 => (ratio(3, 4), 4 * k as i64 - 6),
        5 => (int(5), 5 * k as i64 - 8),
        _ => {
            return Err(Error::UnsupportedOrder {
                order: m,
                detail: "closed-form leading terms exist for m = 2..=5 only".into(),
            })
        }
    };
    if k < 3 {
        return Err(Error::domain(format!(
            "leading-term formulas need k >= 3, got {k}"
        )));
    }
    let fk3 = int(factorial(k as u64 - 3));
    let denom = (0..m).fold(int(1), |acc, _| acc * &fk3);
    let power = pow2(m as i64 - m as i64 * choose2(k as u64) as i64);
    Ok((degree as u32, scale * power / denom))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_reference_values() {
        assert_eq!(
            leading_central_reference(4, 2).unwrap(),
            (5, ratio(1, 2048))
        );
        assert_eq!(leading_central_reference(3, 2).unwrap(), (3, ratio(1, 32)));
        assert_eq!(leading_central_reference(4, 4).unwrap().0, 10);
        assert!(matches!(
            leading_central_reference(4, 6),
            Err(Error::UnsupportedOrder { order: 6, .. })
        ));
        assert!(leading_central_reference(2, 2).is_err());
    }

    #[test]
    fn reference_second_moment_for_triangles() {
        // Expanded independently from the four-term k = 3 sum.
        let expected = [
            (6, ratio(1, 576)),
            (5, ratio(-1, 96)),
            (4, ratio(13, 576)),
            (3, ratio(1, 96)),
            (2, ratio(-25, 288)),
            (1, ratio(1, 16)),
        ];
        let p = second_moment_reference(3).unwrap();
        assert_eq!(p, RationalPolynomial::from_terms(Basis::Monomial, expected));
        assert_eq!(p.eval_i64(6), ratio(115, 4));
    }
}
