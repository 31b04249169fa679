use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::stirling::StirlingTable;

/// Basis in which the coefficients of a [`RationalPolynomial`] are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// `n^0, n^1, n^2, ...`
    Monomial,
    /// `(n)_0, (n)_1, (n)_2, ...` with `(n)_m = n (n-1) ... (n-m+1)`.
    FallingFactorial,
}

/// A univariate polynomial in `n` with exact rational coefficients.
///
/// Coefficients are stored sparsely by degree and zero coefficients are never
/// stored, so `degree()` is the true degree after any cancellation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolynomial {
    basis: Basis,
    coeffs: BTreeMap<u32, BigRational>,
}

impl RationalPolynomial {
    pub fn zero(basis: Basis) -> Self {
        RationalPolynomial {
            basis,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_terms(Basis::Monomial, [(0, c)])
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// `c * n^degree`.
    pub fn monomial(degree: u32, c: BigRational) -> Self {
        Self::from_terms(Basis::Monomial, [(degree, c)])
    }

    /// `c * (n)_degree`, kept in the falling-factorial basis.
    pub fn falling_term(degree: u32, c: BigRational) -> Self {
        Self::from_terms(Basis::FallingFactorial, [(degree, c)])
    }

    /// Builds a polynomial from `(degree, coefficient)` pairs; repeated degrees add up.
    pub fn from_terms(basis: Basis, terms: impl IntoIterator<Item = (u32, BigRational)>) -> Self {
        let mut p = RationalPolynomial::zero(basis);
        for (d, c) in terms {
            p.add_term(d, c);
        }
        p
    }

    /// The falling factorial `n (n-1) ... (n-m+1)` expanded in the monomial basis.
    /// Its coefficients are the signed Stirling numbers of the first kind.
    pub fn falling_factorial(m: u32) -> Self {
        let table = StirlingTable::shared(m as usize);
        let row = table.first_row(m as usize);
        Self::from_terms(
            Basis::Monomial,
            row.iter()
                .enumerate()
                .map(|(j, s)| (j as u32, BigRational::from_integer(s.clone()))),
        )
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coefficient(&self, degree: u32) -> BigRational {
        self.coeffs
            .get(&degree)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Stored (nonzero) coefficients in ascending degree.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u32, &BigRational)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    /// Highest-degree term. The leading coefficient is the same in both bases
    /// since `(n)_m = n^m + lower terms`.
    pub fn leading_term(&self) -> Option<(u32, BigRational)> {
        self.coeffs.iter().next_back().map(|(d, c)| (*d, c.clone()))
    }

    pub(crate) fn add_term(&mut self, degree: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(degree) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Exact re-expression in `target`.
    pub fn to_basis(&self, target: Basis) -> Self {
        if target == self.basis {
            return self.clone();
        }
        let Some(deg) = self.degree() else {
            return RationalPolynomial::zero(target);
        };
        let table = StirlingTable::shared(deg as usize);
        let mut dense = vec![BigRational::zero(); deg as usize + 1];
        for (m, a) in self.terms() {
            let row = match target {
                // n^m = sum_j S(m,j) (n)_j
                Basis::FallingFactorial => table.second_row(m as usize),
                // (n)_m = sum_j s(m,j) n^j
                Basis::Monomial => table.first_row(m as usize),
            };
            for (j, s) in row.iter().enumerate() {
                if !s.is_zero() {
                    dense[j] += a * BigRational::from_integer(s.clone());
                }
            }
        }
        Self::from_terms(
            target,
            dense.into_iter().enumerate().map(|(j, c)| (j as u32, c)),
        )
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return RationalPolynomial::zero(self.basis);
        }
        RationalPolynomial {
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|(d, a)| (*d, a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = RationalPolynomial::one().to_basis(self.basis);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    fn mul_monomial(a: &Self, b: &Self) -> Self {
        let mut out = RationalPolynomial::zero(Basis::Monomial);
        for (da, ca) in a.terms() {
            for (db, cb) in b.terms() {
                out.add_term(da + db, ca * cb);
            }
        }
        out
    }

    /// Common denominator form: returns `(integer coefficients dense by degree, denominator)`.
    fn integerized(&self) -> (Vec<BigInt>, BigInt) {
        let denom = self
            .coeffs
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let len = self.degree().map_or(0, |d| d as usize + 1);
        let mut dense = vec![BigInt::zero(); len];
        for (d, c) in self.terms() {
            dense[d as usize] = c.numer() * (&denom / c.denom());
        }
        (dense, denom)
    }

    /// Prepares the polynomial for repeated exact evaluation.
    pub fn prepare(&self) -> PreparedPolynomial {
        let (coeffs, denom) = self.integerized();
        PreparedPolynomial {
            basis: self.basis,
            coeffs,
            denom,
        }
    }

    /// Exact value at an integer point.
    pub fn eval(&self, n: &BigInt) -> BigRational {
        self.prepare().eval(n)
    }

    pub fn eval_i64(&self, n: i64) -> BigRational {
        self.eval(&BigInt::from(n))
    }

    /// Serialization records, ascending degree.
    pub fn to_records(&self) -> Vec<CoefficientRecord> {
        self.terms()
            .map(|(d, c)| CoefficientRecord {
                degree: d,
                numerator: c.numer().to_string(),
                denominator: c.denom().to_string(),
                basis: self.basis,
            })
            .collect()
    }

    pub fn from_records(records: &[CoefficientRecord]) -> Result<Self, String> {
        let basis = records.first().map_or(Basis::Monomial, |r| r.basis);
        let mut p = RationalPolynomial::zero(basis);
        for r in records {
            if r.basis != basis {
                return Err("mixed bases in polynomial records".into());
            }
            let num: BigInt = r
                .numerator
                .parse()
                .map_err(|e| format!("bad numerator {:?}: {e}", r.numerator))?;
            let den: BigInt = r
                .denominator
                .parse()
                .map_err(|e| format!("bad denominator {:?}: {e}", r.denominator))?;
            if den.is_zero() {
                return Err("zero denominator".into());
            }
            p.add_term(r.degree, BigRational::new(num, den));
        }
        Ok(p)
    }
}

/// Integer-coefficient form of a polynomial for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct PreparedPolynomial {
    basis: Basis,
    coeffs: Vec<BigInt>,
    denom: BigInt,
}

impl PreparedPolynomial {
    /// Numerator of the value at `n`; the value is `numerator / denom` with `denom > 0`.
    pub fn eval_numerator(&self, n: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        match self.basis {
            Basis::Monomial => {
                for c in self.coeffs.iter().rev() {
                    acc = acc * n + c;
                }
            }
            Basis::FallingFactorial => {
                // a_0 + n (a_1 + (n-1) (a_2 + (n-2) (...)))
                for (j, c) in self.coeffs.iter().enumerate().rev() {
                    acc = acc * (n - j) + c;
                }
            }
        }
        acc
    }

    pub fn eval(&self, n: &BigInt) -> BigRational {
        BigRational::new(self.eval_numerator(n), self.denom.clone())
    }

    pub fn sign_at(&self, n: &BigInt) -> num_bigint::Sign {
        self.eval_numerator(n).sign()
    }
}

impl Add<&RationalPolynomial> for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        let rhs = rhs.to_basis(self.basis);
        let mut out = self.clone();
        for (d, c) in rhs.coeffs {
            out.add_term(d, c);
        }
        out
    }
}

impl Sub<&RationalPolynomial> for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        RationalPolynomial {
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|(d, c)| (*d, -c)).collect(),
        }
    }
}

impl Mul<&RationalPolynomial> for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        let a = self.to_basis(Basis::Monomial);
        let b = rhs.to_basis(Basis::Monomial);
        RationalPolynomial::mul_monomial(&a, &b).to_basis(self.basis)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RationalPolynomial> for RationalPolynomial {
            type Output = RationalPolynomial;
            fn $m(self, rhs: RationalPolynomial) -> RationalPolynomial {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RationalPolynomial> for RationalPolynomial {
            type Output = RationalPolynomial;
            fn $m(self, rhs: &RationalPolynomial) -> RationalPolynomial {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        -&self
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (d, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let var = match (self.basis, d) {
                (_, 0) => String::new(),
                (Basis::Monomial, 1) => "n".to_string(),
                (Basis::Monomial, d) => format!("n^{d}"),
                (Basis::FallingFactorial, d) => format!("(n)_{d}"),
            };
            if var.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&var)?;
            } else {
                write!(f, "{abs}*{var}")?;
            }
        }
        Ok(())
    }
}

/// One stored coefficient in the JSON form of a polynomial. Integers are
/// decimal strings because they routinely exceed 64 bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub degree: u32,
    pub numerator: String,
    pub denominator: String,
    pub basis: Basis,
}

impl Serialize for RationalPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_records().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let records = Vec::<CoefficientRecord>::deserialize(d)?;
        RationalPolynomial::from_records(&records).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};
    use proptest::prelude::*;

    fn poly(coeffs: &[i64]) -> RationalPolynomial {
        RationalPolynomial::from_terms(
            Basis::Monomial,
            coeffs.iter().enumerate().map(|(d, c)| (d as u32, int(*c))),
        )
    }

    #[test]
    fn falling_factorial_expansions() {
        assert_eq!(
            RationalPolynomial::falling_factorial(0),
            RationalPolynomial::one()
        );
        assert_eq!(
            RationalPolynomial::falling_factorial(3),
            poly(&[0, 2, -3, 1])
        );
        assert_eq!(
            RationalPolynomial::falling_factorial(4),
            poly(&[0, -6, 11, -6, 1])
        );
        assert_eq!(
            RationalPolynomial::falling_factorial(3).eval_i64(6),
            int(120)
        );
    }

    #[test]
    fn falling_factorial_vanishes_below_order() {
        for m in 0..12u32 {
            let p = RationalPolynomial::falling_factorial(m);
            for n in 0..m as i64 {
                assert!(p.eval_i64(n).is_zero(), "(n)_{m} at n={n}");
            }
        }
    }

    #[test]
    fn n_squared_in_falling_basis() {
        let sq = RationalPolynomial::monomial(2, int(1));
        let ff = sq.to_basis(Basis::FallingFactorial);
        assert_eq!(ff.basis(), Basis::FallingFactorial);
        assert_eq!(ff.coefficient(2), int(1));
        assert_eq!(ff.coefficient(1), int(1));
        assert_eq!(ff.coefficient(0), int(0));
        assert_eq!(ff.terms().count(), 2);
    }

    #[test]
    fn zero_polynomial_behaviour() {
        let z = RationalPolynomial::zero(Basis::Monomial);
        assert_eq!(z.degree(), None);
        assert_eq!(z.leading_term(), None);
        let zf = z.to_basis(Basis::FallingFactorial);
        assert!(zf.is_zero());
        assert!(zf.to_basis(Basis::Monomial).is_zero());
    }

    #[test]
    fn leading_term_and_inverse() {
        let p = poly(&[0, -6, 11, -6, 1]);
        assert_eq!(p.leading_term(), Some((4, int(1))));
        assert!((&p + &(-&p)).is_zero());
        assert!((&p - &p).is_zero());
        assert_eq!(p.eval_i64(6), int(360));
    }

    #[test]
    fn records_carry_decimal_strings() {
        let big = BigRational::new(BigInt::from(3) << 100u32, BigInt::from(7));
        let p = RationalPolynomial::from_terms(
            Basis::FallingFactorial,
            [(5, big.clone()), (0, ratio(-1, 2))],
        );
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"falling_factorial\""));
        assert!(json.contains(&(BigInt::from(3) << 100u32).to_string()));
        let back: RationalPolynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn mixed_basis_records_rejected() {
        let recs = vec![
            CoefficientRecord {
                degree: 0,
                numerator: "1".into(),
                denominator: "1".into(),
                basis: Basis::Monomial,
            },
            CoefficientRecord {
                degree: 1,
                numerator: "1".into(),
                denominator: "1".into(),
                basis: Basis::FallingFactorial,
            },
        ];
        assert!(RationalPolynomial::from_records(&recs).is_err());
    }

    #[test]
    fn display_forms() {
        assert_eq!(poly(&[0, 2, -3, 1]).to_string(), "n^3 - 3*n^2 + 2*n");
        let ff = RationalPolynomial::falling_term(4, ratio(1, 24));
        assert_eq!(ff.to_string(), "1/24*(n)_4");
    }

    fn arb_poly() -> impl Strategy<Value = RationalPolynomial> {
        proptest::collection::vec((-50i64..50, 1i64..20), 0..=7).prop_map(|cs| {
            RationalPolynomial::from_terms(
                Basis::Monomial,
                cs.into_iter()
                    .enumerate()
                    .map(|(d, (a, b))| (d as u32, ratio(a, b))),
            )
        })
    }

    proptest! {
        #[test]
        fn basis_round_trip_is_identity(p in arb_poly()) {
            let ff = p.to_basis(Basis::FallingFactorial);
            prop_assert_eq!(ff.to_basis(Basis::Monomial), p.clone());
            for n in 0..=8i64 {
                prop_assert_eq!(ff.eval_i64(n), p.eval_i64(n));
            }
        }

        #[test]
        fn coefficients_stay_canonical(p in arb_poly(), q in arb_poly()) {
            let prod = &p * &q;
            let sum = &p + &q;
            for (_, c) in prod.terms().chain(sum.terms()) {
                prop_assert!(!c.is_zero());
                prop_assert!(c.denom().is_positive());
                prop_assert!(c.numer().gcd(c.denom()).is_one());
            }
            for n in -3..=5i64 {
                prop_assert_eq!(prod.eval_i64(n), p.eval_i64(n) * q.eval_i64(n));
                prop_assert_eq!(sum.eval_i64(n), p.eval_i64(n) + q.eval_i64(n));
            }
        }

        #[test]
        fn falling_basis_arithmetic_matches(p in arb_poly(), q in arb_poly()) {
            let pf = p.to_basis(Basis::FallingFactorial);
            let prod = &pf * &q;
            prop_assert_eq!(prod.basis(), Basis::FallingFactorial);
            prop_assert_eq!(prod.to_basis(Basis::Monomial), &p * &q);
        }
    }
}
