//! Exact moments of X, the number of monochromatic k-cliques in a uniformly
//! random red/blue coloring of the edges of K_n, as polynomials in n.
//!
//! `E[X^r]` is a sum over ordered r-tuples of k-subsets of the probability
//! that all of them are monochromatic. Grouping tuples by their overlap
//! profile turns that sum into `sum_profile P(profile) (n)_v / prod a_T!`.

mod engine;
pub mod profile;
pub mod reference;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    binomial, factorial, int, rational_to_f64, sqrt_rational_to_f64, Basis, RationalPolynomial,
    StirlingTable,
};
use crate::error::{Error, Result};

pub use profile::{
    enumerate_profiles, profile_stats, tuple_probability, OverlapProfile, ProfileEnumerator,
    ProfileStats,
};
pub use reference::{leading_central_reference, second_moment_reference};

/// Default cap on visited enumeration nodes.
pub const DEFAULT_PROFILE_NODE_CAP: u64 = 100_000_000;
/// Default bits of precision for irrational evaluations of exact values.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub profile_node_cap: u64,
    pub precision_bits: u32,
    /// Split the enumeration into independent subtrees on the rayon pool.
    pub parallel: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            profile_node_cap: DEFAULT_PROFILE_NODE_CAP,
            precision_bits: DEFAULT_PRECISION_BITS,
            parallel: true,
        }
    }
}

impl EngineConfig {
    pub fn with_node_cap(mut self, cap: u64) -> Self {
        self.profile_node_cap = cap;
        self
    }
}

/// `E[X^r]` together with the number of overlap profiles summed.
#[derive(Debug, Clone)]
pub struct RawMoment {
    pub polynomial: RationalPolynomial,
    pub profile_count: u64,
}

/// `E[X^r]` as a polynomial in n (monomial basis).
pub fn raw_moment(k: u32, r: u32, cfg: &EngineConfig) -> Result<RationalPolynomial> {
    raw_moment_with_count(k, r, cfg).map(|m| m.polynomial)
}

pub fn raw_moment_with_count(k: u32, r: u32, cfg: &EngineConfig) -> Result<RawMoment> {
    let counts = engine::accumulate(r, k, cfg.profile_node_cap, cfg.parallel)?;
    Ok(RawMoment {
        polynomial: counts.polynomial().to_basis(Basis::Monomial),
        profile_count: counts.profile_count,
    })
}

/// Straightforward evaluation of `E[X^r]` profile by profile through
/// [`profile_stats`] and [`tuple_probability`]. Slower than [`raw_moment`]
/// and kept as an independent route to the same polynomial.
pub fn raw_moment_by_profiles(k: u32, r: u32, node_cap: u64) -> Result<RationalPolynomial> {
    sum_over_profiles(k, r, node_cap, |_| true, tuple_probability)
}

/// `E[(X)_r]` summed directly over tuples of pairwise distinct subsets.
pub fn factorial_moment_by_profiles(k: u32, r: u32, node_cap: u64) -> Result<RationalPolynomial> {
    sum_over_profiles(
        k,
        r,
        node_cap,
        |p| (0..r).all(|i| ((i + 1)..r).all(|j| p.shared(i, j) < k)),
        tuple_probability,
    )
}

/// `sum weight(p) (n)_v / prod a_T!` over profiles accepted by `keep`.
pub fn sum_over_profiles(
    k: u32,
    r: u32,
    node_cap: u64,
    keep: impl Fn(&OverlapProfile) -> bool,
    weight: impl Fn(&OverlapProfile) -> BigRational,
) -> Result<RationalPolynomial> {
    let mut acc = RationalPolynomial::zero(Basis::FallingFactorial);
    for p in enumerate_profiles(r, k, node_cap)? {
        let p = p?;
        if !keep(&p) {
            continue;
        }
        let s = profile_stats(&p);
        let c = weight(&p) / BigRational::from_integer(s.symmetry_denominator);
        acc = &acc + &RationalPolynomial::falling_term(s.v, c);
    }
    Ok(acc.to_basis(Basis::Monomial))
}

/// Raw, factorial, binomial and central moments of X for one clique size.
///
/// Index `r` of each vector holds the order-`r` moment; index 0 is the
/// constant 1 (for `central`, index 1 is the zero polynomial).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentTable {
    pub k: u32,
    pub max_order: u32,
    pub mean: RationalPolynomial,
    pub raw: Vec<RationalPolynomial>,
    pub factorial: Vec<RationalPolynomial>,
    pub binomial: Vec<RationalPolynomial>,
    pub central: Vec<RationalPolynomial>,
    /// Number of overlap profiles enumerated for each raw moment.
    pub profile_counts: Vec<u64>,
}

impl MomentTable {
    pub fn compute(k: u32, max_order: u32, cfg: &EngineConfig) -> Result<MomentTable> {
        let mut raw = vec![RationalPolynomial::one()];
        let mut profile_counts = vec![1];
        for r in 1..=max_order {
            let m = raw_moment_with_count(k, r, cfg)?;
            raw.push(m.polynomial);
            profile_counts.push(m.profile_count);
        }
        Ok(Self::from_raw(k, raw, profile_counts))
    }

    /// Derives the other moment families from `raw[0..=max_order]`.
    pub fn from_raw(k: u32, raw: Vec<RationalPolynomial>, profile_counts: Vec<u64>) -> MomentTable {
        let max_order = (raw.len() - 1) as u32;
        let mean = raw
            .get(1)
            .cloned()
            .unwrap_or_else(|| RationalPolynomial::zero(Basis::Monomial));
        let factorial = (0..=max_order)
            .map(|r| factorial_from_raw(&raw, r))
            .collect::<Vec<_>>();
        let binomial = factorial
            .iter()
            .enumerate()
            .map(|(s, f)| {
                f.scale(&BigRational::new(
                    1.into(),
                    crate::arith::factorial(s as u64),
                ))
            })
            .collect();
        let central = (0..=max_order)
            .map(|m| central_from_raw(&raw, &mean, m))
            .collect();
        MomentTable {
            k,
            max_order,
            mean,
            raw,
            factorial,
            binomial,
            central,
            profile_counts,
        }
    }

    fn check(&self, order: u32) -> Result<()> {
        if order > self.max_order {
            return Err(Error::range(
                "moment order",
                format!("{order} exceeds the table's max order {}", self.max_order),
            ));
        }
        Ok(())
    }

    pub fn raw(&self, r: u32) -> Result<&RationalPolynomial> {
        self.check(r)?;
        Ok(&self.raw[r as usize])
    }

    pub fn factorial(&self, r: u32) -> Result<&RationalPolynomial> {
        self.check(r)?;
        Ok(&self.factorial[r as usize])
    }

    pub fn binomial(&self, s: u32) -> Result<&RationalPolynomial> {
        self.check(s)?;
        Ok(&self.binomial[s as usize])
    }

    pub fn central(&self, m: u32) -> Result<&RationalPolynomial> {
        self.check(m)?;
        Ok(&self.central[m as usize])
    }

    /// `c_m = E[(X-mu)^m] / Var^{m/2}` at a given n.
    pub fn standardized(&self, m: u32, n: i64, precision_bits: u32) -> Result<f64> {
        self.check(m.max(2))?;
        let var = self.central[2].eval_i64(n);
        let mom = self.central[m as usize].eval_i64(n);
        standardize(&mom, &var, m, precision_bits)
    }
}

/// `mom / var^{m/2}` where only the final square root is inexact.
pub fn standardize(
    mom: &BigRational,
    var: &BigRational,
    m: u32,
    precision_bits: u32,
) -> Result<f64> {
    if !var.is_positive() {
        return Err(Error::domain(format!("variance {var} is not positive")));
    }
    let half = m / 2;
    let mut q = mom.clone();
    for _ in 0..half {
        q /= var;
    }
    if m % 2 == 0 {
        return Ok(rational_to_f64(&q));
    }
    // q / sqrt(var) = sign(q) sqrt(q^2 / var)
    let sq = &q * &q / var;
    let root = sqrt_rational_to_f64(&sq, precision_bits);
    Ok(if q.is_negative() { -root } else { root })
}

fn factorial_from_raw(raw: &[RationalPolynomial], r: u32) -> RationalPolynomial {
    let table = StirlingTable::shared(r as usize);
    let mut acc = RationalPolynomial::zero(Basis::Monomial);
    for (j, s) in table.first_row(r as usize).iter().enumerate() {
        if !s.is_zero() {
            acc = &acc + &raw[j].scale(&BigRational::from_integer(s.clone()));
        }
    }
    acc
}

fn central_from_raw(
    raw: &[RationalPolynomial],
    mean: &RationalPolynomial,
    m: u32,
) -> RationalPolynomial {
    let neg_mean = -mean;
    let mut acc = RationalPolynomial::zero(Basis::Monomial);
    let mut mean_pow = RationalPolynomial::one();
    // sum_j C(m,j) raw_j (-mean)^{m-j}, accumulated from j = m downwards
    for j in (0..=m).rev() {
        let c = BigRational::from_integer(binomial(m as u64, j as i64));
        acc = &acc + &(&raw[j as usize] * &mean_pow).scale(&c);
        mean_pow = &mean_pow * &neg_mean;
    }
    acc
}

/// `E[(X)_r] = sum_j s(r,j) E[X^j]`.
pub fn factorial_moment(k: u32, r: u32, cfg: &EngineConfig) -> Result<RationalPolynomial> {
    Ok(MomentTable::compute(k, r, cfg)?.factorial[r as usize].clone())
}

/// `E[C(X, s)] = E[(X)_s] / s!`.
pub fn binomial_moment(k: u32, s: u32, cfg: &EngineConfig) -> Result<RationalPolynomial> {
    Ok(MomentTable::compute(k, s, cfg)?.binomial[s as usize].clone())
}

/// `E[(X - mu)^m]` expanded exactly from raw moments.
pub fn central_moment(k: u32, m: u32, cfg: &EngineConfig) -> Result<RationalPolynomial> {
    if m == 0 {
        return Err(Error::range(
            "moment order",
            "central moments start at m = 1",
        ));
    }
    Ok(MomentTable::compute(k, m, cfg)?.central[m as usize].clone())
}

pub fn standardized_moment(k: u32, m: u32, n: i64, cfg: &EngineConfig) -> Result<f64> {
    MomentTable::compute(k, m.max(2), cfg)?.standardized(m, n, cfg.precision_bits)
}

/// `E[X] = 2^{1 - C(k,2)} C(n,k)` written directly.
pub fn first_moment_closed_form(k: u32) -> RationalPolynomial {
    let p = crate::arith::pow2(1 - crate::arith::choose2(k as u64) as i64);
    RationalPolynomial::falling_factorial(k).scale(&(p / int(factorial(k as u64))))
}

/// Leading coefficient predicted for `E[X^r]`: `(2^{1-C(k,2)} / k!)^r`.
pub fn raw_leading_coefficient(k: u32, r: u32) -> BigRational {
    let p = crate::arith::pow2(1 - crate::arith::choose2(k as u64) as i64);
    let base = p / int(factorial(k as u64));
    (0..r).fold(int(1), |acc, _| acc * &base)
}
