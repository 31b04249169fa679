use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Nearest `f64` to an exact rational (infinite when out of range).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// `sqrt(r)` for `r >= 0`, computed with `precision_bits` bits of integer
/// square root before the final rounding to `f64`.
pub fn sqrt_rational_to_f64(r: &BigRational, precision_bits: u32) -> f64 {
    assert!(!r.is_negative(), "square root of a negative rational");
    if r.is_zero() {
        return 0.0;
    }
    // sqrt(p/q) = sqrt(p q) / q; scale by 4^prec so the integer root keeps prec bits.
    let scaled: BigInt = (r.numer() * r.denom()) << (2 * precision_bits as usize);
    let root = scaled.sqrt();
    let denom = r.denom() << precision_bits as usize;
    rational_to_f64(&BigRational::new(root, denom))
}

fn ln_abs_int(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln |r|`; `-inf` for zero. Works far outside the `f64` range.
pub fn ln_abs_rational(r: &BigRational) -> f64 {
    if r.numer().sign() == Sign::NoSign {
        return f64::NEG_INFINITY;
    }
    ln_abs_int(r.numer()) - ln_abs_int(r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};

    #[test]
    fn square_roots() {
        assert_eq!(sqrt_rational_to_f64(&int(4), 128), 2.0);
        let r2 = sqrt_rational_to_f64(&int(2), 256);
        assert!((r2 - std::f64::consts::SQRT_2).abs() < 1e-16);
        let q = sqrt_rational_to_f64(&ratio(1, 9), 256);
        assert!((q - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn logs_of_huge_rationals() {
        let huge = BigRational::from_integer(BigInt::from(1) << 5000u32);
        let l = ln_abs_rational(&huge);
        assert!((l - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((ln_abs_rational(&ratio(-3, 7)) - (3.0f64 / 7.0).ln()).abs() < 1e-15);
        assert_eq!(ln_abs_rational(&int(0)), f64::NEG_INFINITY);
    }
}
