//! Poisson, negative binomial and Delaporte models.
//!
//! Pointwise probabilities use log-gamma; whole pmf vectors are built by
//! ratio recurrences anchored at the mode and truncated where a Chernoff
//! bound on the remaining tail falls below [`DEFAULT_TAIL_TOLERANCE`].
//! Alternating series are summed in exact rational arithmetic.

mod delaporte;
mod fit;
mod pmf;

pub use delaporte::{
    delaporte_alternating_sum, delaporte_central_moment, delaporte_central_moment_series,
    delaporte_factorial_moment, delaporte_mgf, delaporte_p_zero, delaporte_pmf,
    delaporte_pmf_vector, delaporte_poisson_gap, DelaporteParams,
};
pub use fit::{
    expected_count, fit_bign, poisson_rate_smalln, poisson_rate_smalln_exact, RegimeBoundary,
};
pub use pmf::{negbin_pmf_vector, poisson_pmf_vector, PmfVector, DEFAULT_TAIL_TOLERANCE};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use statrs::function::gamma::ln_gamma;

use crate::arith::{rational_to_f64, StirlingTable};
use crate::error::{Error, Result};

pub(crate) fn check_rate(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "Poisson rate must be finite and >= 0, got {lambda}"
        )))
    }
}

pub(crate) fn check_negbin(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::domain(format!(
            "alpha must be finite and > 0, got {alpha}"
        )));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::domain(format!(
            "beta must be finite and > 0, got {beta}"
        )));
    }
    Ok(())
}

pub(crate) fn ln_poisson(lambda: f64, j: u64) -> f64 {
    if lambda == 0.0 {
        return if j == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    j as f64 * lambda.ln() - lambda - ln_gamma(j as f64 + 1.0)
}

pub(crate) fn ln_negbin(alpha: f64, beta: f64, i: u64) -> f64 {
    let i = i as f64;
    let ln_q = beta.ln() - beta.ln_1p();
    ln_gamma(alpha + i) - ln_gamma(alpha) - ln_gamma(i + 1.0) + i * ln_q - alpha * beta.ln_1p()
}

/// `lambda^j e^{-lambda} / j!`.
pub fn poisson_pmf(lambda: f64, j: u64) -> Result<f64> {
    check_rate(lambda)?;
    Ok(ln_poisson(lambda, j).exp())
}

/// `exp(lambda (e^t - 1))`.
pub fn poisson_mgf(lambda: f64, t: f64) -> Result<f64> {
    check_rate(lambda)?;
    Ok((lambda * t.exp_m1()).exp())
}

/// `E[(X)_m] = lambda^m`.
pub fn poisson_factorial_moment(lambda: f64, m: u32) -> f64 {
    lambda.powi(m as i32)
}

/// `E[X^m] = sum_j S(m,j) lambda^j`.
pub fn poisson_raw_moment(lambda: f64, m: u32) -> f64 {
    let table = StirlingTable::shared(m as usize);
    table
        .second_row(m as usize)
        .iter()
        .enumerate()
        .map(|(j, s)| s.to_f64().unwrap_or(f64::INFINITY) * lambda.powi(j as i32))
        .sum()
}

pub(crate) fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// `sum_{s=0}^{terms} (-1)^s lambda^s / s!`, summed exactly and rounded once.
pub fn poisson_alternating_sum(lambda: f64, terms: u32) -> Result<f64> {
    check_rate(lambda)?;
    let l = exact(lambda);
    let mut term = BigRational::one();
    let mut acc = BigRational::zero();
    for s in 0..=terms {
        if s > 0 {
            term = -term * &l / BigRational::from_integer(s.into());
        }
        acc += &term;
    }
    Ok(rational_to_f64(&acc))
}

/// Gamma(alpha + i) / (Gamma(alpha) i!) p^i (1 - p)^alpha with `p = beta / (1 + beta)`.
pub fn negbin_pmf(alpha: f64, beta: f64, i: u64) -> Result<f64> {
    check_negbin(alpha, beta)?;
    Ok(ln_negbin(alpha, beta, i).exp())
}

/// `(1 - beta (e^t - 1))^{-alpha}`, defined for `t < ln(1 + 1/beta)`.
pub fn negbin_mgf(alpha: f64, beta: f64, t: f64) -> Result<f64> {
    check_negbin(alpha, beta)?;
    let radius = (1.0 / beta).ln_1p();
    if t >= radius {
        return Err(Error::domain(format!(
            "mgf diverges at t = {t}: radius of convergence is ln(1 + 1/beta) = {radius}"
        )));
    }
    Ok((-alpha * (-beta * t.exp_m1()).ln_1p()).exp())
}

/// Standardized central moments of N(0,1): 0 for odd m, (m-1)!! for even m.
pub fn normal_central_reference(m: u32) -> Result<BigInt> {
    if m == 0 {
        return Err(Error::range(
            "moment order",
            "normal reference starts at m = 1",
        ));
    }
    if m % 2 == 1 {
        return Ok(BigInt::zero());
    }
    Ok((1..m).step_by(2).fold(BigInt::one(), |acc, i| acc * i))
}
