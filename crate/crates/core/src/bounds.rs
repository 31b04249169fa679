//! Lower bounds on the diagonal Ramsey number R(k,k) from truncated
//! inclusion-exclusion, plus the binomial upper bound and second-moment ratios.
//!
//! A lower bound needs a partial sum that is strictly positive: by the
//! Bonferroni inequalities, for odd m,
//! `P(X = 0) >= sum_{s<=m} (-1)^s E[C(X,s)]`, so a positive right side at n
//! exhibits a coloring of K_n with no monochromatic K_k.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    binomial, choose2, ln_abs_rational, rational_to_f64, ExactValue, RationalPolynomial,
};
use crate::error::{Error, Result};
use crate::moments::{EngineConfig, MomentTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundMethod {
    FirstMoment,
    Bonferroni { m: u32 },
    Chebyshev,
    BinomialUpper,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: u64,
    pub value: ExactValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub k: u32,
    pub method: BoundMethod,
    pub threshold_n: Option<u64>,
    pub implied_bound: String,
    /// Partial sums at `threshold_n` and `threshold_n + 1`.
    pub certificate: Vec<Certificate>,
    /// Every n in the scan where the partial sum changed sign.
    pub sign_changes: Vec<u64>,
    /// For m > 1: the m = 1 threshold and whether this one is larger.
    pub first_moment_threshold: Option<u64>,
    pub improves_on_first_moment: Option<bool>,
    pub note: String,
}

const STRICT_NOTE: &str =
    "a bound is claimed only where the partial sum is strictly positive; a zero sum proves nothing";

/// `sum_{s<=m} (-1)^s E[C(X,s)]` as a polynomial in n.
pub fn bonferroni_polynomial(table: &MomentTable, m: u32) -> Result<RationalPolynomial> {
    let mut acc = RationalPolynomial::zero(crate::arith::Basis::Monomial);
    for s in 0..=m {
        let b = table.binomial(s)?;
        acc = if s % 2 == 0 { &acc + b } else { &acc - b };
    }
    Ok(acc)
}

pub fn bonferroni_sum(k: u32, n: u64, m: u32, cfg: &EngineConfig) -> Result<BigRational> {
    let table = MomentTable::compute(k, m, cfg)?;
    Ok(bonferroni_polynomial(&table, m)?.eval(&BigInt::from(n)))
}

/// Upper bound on the positive real roots (Fujiwara).
fn root_bound(p: &RationalPolynomial) -> f64 {
    let Some((d, lead)) = p.leading_term() else {
        return 0.0;
    };
    let ln_lead = ln_abs_rational(&lead);
    let mut best = f64::NEG_INFINITY;
    for (j, c) in p.terms() {
        if j == d {
            continue;
        }
        let mut ln = ln_abs_rational(c) - ln_lead;
        if j == 0 {
            ln -= std::f64::consts::LN_2;
        }
        best = best.max(ln / (d - j) as f64);
    }
    if best == f64::NEG_INFINITY {
        0.0
    } else {
        2.0 * best.exp()
    }
}

struct Scan {
    threshold: Option<u64>,
    sign_changes: Vec<u64>,
}

/// Scans `n = start..=limit` and records the largest n with a positive value.
fn scan(p: &RationalPolynomial, start: u64, limit: u64) -> Scan {
    let prepared = p.to_basis(crate::arith::Basis::FallingFactorial).prepare();
    let mut threshold = None;
    let mut sign_changes = Vec::new();
    let mut prev: Option<Sign> = None;
    for n in start..=limit {
        let s = prepared.sign_at(&BigInt::from(n));
        if s == Sign::Plus {
            threshold = Some(n);
        }
        if let Some(q) = prev {
            if (q == Sign::Plus) != (s == Sign::Plus) {
                sign_changes.push(n);
            }
        }
        prev = Some(s);
    }
    Scan {
        threshold,
        sign_changes,
    }
}

fn scan_limit(p: &RationalPolynomial, k: u32) -> u64 {
    // For n >= R(k,k) every odd partial sum is <= P(X=0) = 0, and R(k,k) <= C(2k,k).
    let ramsey = ramsey_upper_bound(k).to_u64().unwrap_or(u64::MAX);
    let fujiwara = root_bound(p).ceil();
    let fujiwara = if fujiwara.is_finite() && fujiwara < u64::MAX as f64 {
        fujiwara as u64 + 1
    } else {
        u64::MAX
    };
    ramsey.min(fujiwara)
}

fn threshold_from_table(table: &MomentTable, m: u32) -> Result<(Scan, RationalPolynomial)> {
    let p = bonferroni_polynomial(table, m)?;
    let k = table.k;
    let start = (k as u64).saturating_sub(1).max(1);
    Ok((scan(&p, start, scan_limit(&p, k)), p))
}

/// Largest n with a strictly positive order-m Bonferroni sum, for odd m.
pub fn bonferroni_threshold(k: u32, m: u32, cfg: &EngineConfig) -> Result<BoundReport> {
    if m % 2 == 0 {
        return Err(Error::domain(format!(
            "Bonferroni lower bounds use odd truncation orders, got m = {m}"
        )));
    }
    let table = MomentTable::compute(k, m, cfg)?;
    bonferroni_threshold_from_table(&table, m)
}

/// As [`bonferroni_threshold`], reusing moments already computed up to order `m`.
pub fn bonferroni_threshold_from_table(table: &MomentTable, m: u32) -> Result<BoundReport> {
    if m % 2 == 0 {
        return Err(Error::domain(format!(
            "Bonferroni lower bounds use odd truncation orders, got m = {m}"
        )));
    }
    let k = table.k;
    let (found, poly) = threshold_from_table(table, m)?;
    let (first, improves) = if m > 1 {
        let (base, _) = threshold_from_table(table, 1)?;
        let improves = match (found.threshold, base.threshold) {
            (Some(a), Some(b)) => Some(a > b),
            _ => None,
        };
        (base.threshold, improves)
    } else {
        (None, None)
    };
    let certificate = found
        .threshold
        .map(|n| {
            [n, n + 1]
                .into_iter()
                .map(|x| Certificate {
                    n: x,
                    value: ExactValue::from(&poly.eval(&BigInt::from(x))),
                })
                .collect()
        })
        .unwrap_or_default();
    let implied_bound = match found.threshold {
        Some(n) => format!("R({k},{k}) >= {}", n + 1),
        None => "no bound".to_string(),
    };
    Ok(BoundReport {
        k,
        method: if m == 1 {
            BoundMethod::FirstMoment
        } else {
            BoundMethod::Bonferroni { m }
        },
        threshold_n: found.threshold,
        implied_bound,
        certificate,
        sign_changes: found.sign_changes,
        first_moment_threshold: first,
        improves_on_first_moment: improves,
        note: STRICT_NOTE.to_string(),
    })
}

/// Largest n with `C(n,k) < 2^{C(k,2)-1}`, i.e. `E[X] < 1`, by an exact scan.
pub fn first_moment_threshold(k: u32) -> Result<u64> {
    if k < 2 {
        return Err(Error::domain(format!("clique size must be >= 2, got {k}")));
    }
    let limit = BigInt::one() << (choose2(k as u64) - 1);
    let mut n = k as u64;
    let mut c = BigInt::one();
    while c < limit {
        // C(n+1,k) = C(n,k) (n+1) / (n+1-k)
        c = c * (n + 1) / (n + 1 - k as u64);
        n += 1;
    }
    Ok(n - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErdosCheck {
    pub k: u32,
    pub threshold_n: u64,
    /// `k 2^{k/2} / (sqrt(2) e)`.
    pub reference: f64,
    pub ratio: f64,
}

pub fn erdos_asymptotic_check(k: u32) -> Result<ErdosCheck> {
    if k < 3 {
        return Err(Error::domain(format!("Erdős check needs k >= 3, got {k}")));
    }
    let threshold_n = first_moment_threshold(k)?;
    let reference =
        k as f64 * 2f64.powf(k as f64 / 2.0) / (std::f64::consts::SQRT_2 * std::f64::consts::E);
    Ok(ErdosCheck {
        k,
        threshold_n,
        reference,
        ratio: threshold_n as f64 / reference,
    })
}

/// `C(2k, k)`, an upper bound on R(k,k).
pub fn ramsey_upper_bound(k: u32) -> BigInt {
    binomial(2 * k as u64, k as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub k: u32,
    pub n: u64,
    pub ratio: ExactValue,
    pub ratio_f64: f64,
    /// The asymptotic reference as usually quoted.
    pub reference: f64,
    /// The same asymptotic with its exact leading constant.
    pub reference_exact_constant: f64,
    /// Set by [`var_mean_ratio`]: whether Var(X) > E[X].
    pub super_poisson: Option<bool>,
}

fn variance_and_mean(k: u32, n: u64, cfg: &EngineConfig) -> Result<(BigRational, BigRational)> {
    if n < k as u64 {
        return Err(Error::domain(format!("need n >= k, got n = {n}, k = {k}")));
    }
    let table = MomentTable::compute(k, 2, cfg)?;
    let nn = BigInt::from(n);
    Ok((table.central(2)?.eval(&nn), table.mean.eval(&nn)))
}

/// Exact `Var(X) / E[X]^2`, the Chebyshev bound on `P(X = 0)`, with references
/// `k^6 / (2 n^3)` and `(k(k-1)(k-2))^2 / (2 n^3)`.
pub fn chebyshev_ratio(k: u32, n: u64, cfg: &EngineConfig) -> Result<RatioReport> {
    let (var, mean) = variance_and_mean(k, n, cfg)?;
    if !mean.is_positive() {
        return Err(Error::domain("E[X] is zero"));
    }
    let ratio = var / (&mean * &mean);
    let n3 = 2.0 * (n as f64).powi(3);
    let kf = k as f64;
    let falling3 = kf * (kf - 1.0) * (kf - 2.0);
    Ok(RatioReport {
        k,
        n,
        ratio_f64: rational_to_f64(&ratio),
        ratio: ExactValue::from(&ratio),
        reference: kf.powi(6) / n3,
        reference_exact_constant: falling3 * falling3 / n3,
        super_poisson: None,
    })
}

/// Exact `Var(X) / E[X]` with reference `k(k-1)(k-2)/(k-3)! n^{k-3} / 2^{C(k,2)}`.
pub fn var_mean_ratio(k: u32, n: u64, cfg: &EngineConfig) -> Result<RatioReport> {
    if k < 3 {
        return Err(Error::domain(format!("reference needs k >= 3, got {k}")));
    }
    let (var, mean) = variance_and_mean(k, n, cfg)?;
    if mean.is_zero() {
        return Err(Error::domain("E[X] is zero"));
    }
    let ratio = var / mean;
    let kf = k as f64;
    let fact: f64 = (1..=k - 3).map(f64::from).product();
    let reference = kf * (kf - 1.0) * (kf - 2.0) / fact * (n as f64).powi(k as i32 - 3)
        / 2f64.powi(choose2(k as u64) as i32);
    Ok(RatioReport {
        k,
        n,
        ratio_f64: rational_to_f64(&ratio),
        super_poisson: Some(ratio > BigRational::one()),
        ratio: ExactValue::from(&ratio),
        reference,
        reference_exact_constant: reference,
    })
}
