use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pmf::{
    negbin_log_mgf, negbin_values, poisson_log_mgf, poisson_values, truncation, PmfVector,
};
use super::{check_negbin, check_rate, exact, ln_negbin, ln_poisson, DEFAULT_TAIL_TOLERANCE};
use crate::arith::rational_to_f64;
use crate::error::{Error, Result};

/// Poisson(`lambda`) plus an independent negative binomial(`alpha`, `beta`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelaporteParams {
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// In large convolutions, Poisson values below this fraction of the peak are
/// left out and their mass added to the tail bound.
const POISSON_CUTOFF: f64 = 1e-30;
const FULL_CONVOLUTION_WORK: f64 = 1e8;
const MAX_CONVOLUTION_WORK: f64 = 4e9;

impl DelaporteParams {
    pub fn new(lambda: f64, alpha: f64, beta: f64) -> Result<DelaporteParams> {
        let p = DelaporteParams {
            lambda,
            alpha,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_rate(self.lambda)?;
        check_negbin(self.alpha, self.beta)
    }

    pub fn mean(&self) -> f64 {
        self.lambda + self.alpha * self.beta
    }

    pub fn variance(&self) -> f64 {
        self.lambda + self.alpha * self.beta * (1.0 + self.beta)
    }

    /// The mgf is finite exactly for `t < ln(1 + 1/beta)`.
    pub fn mgf_radius(&self) -> f64 {
        (1.0 / self.beta).ln_1p()
    }

    fn log_mgf(&self, t: f64) -> f64 {
        poisson_log_mgf(self.lambda)(t) + negbin_log_mgf(self.alpha, self.beta)(t)
    }
}

/// `P(D = j) = sum_{i<=j} NB(i) Pois(j - i)`, summed in log space.
pub fn delaporte_pmf(p: &DelaporteParams, j: u64) -> Result<f64> {
    p.validate()?;
    if p.lambda == 0.0 {
        return Ok(ln_negbin(p.alpha, p.beta, j).exp());
    }
    let ln_q = p.beta.ln() - p.beta.ln_1p();
    let ln_lambda = p.lambda.ln();
    let mut logs = Vec::with_capacity(j as usize + 1);
    let mut cur = ln_negbin(p.alpha, p.beta, 0) + ln_poisson(p.lambda, j);
    logs.push(cur);
    for i in 0..j {
        let fi = i as f64;
        cur += ((p.alpha + fi) / (fi + 1.0)).ln() + ln_q + ((j - i) as f64).ln() - ln_lambda;
        logs.push(cur);
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
    Ok(top.exp() * sum)
}

/// `e^{-lambda} (1 + beta)^{-alpha}`.
pub fn delaporte_p_zero(p: &DelaporteParams) -> f64 {
    (-p.lambda - p.alpha * p.beta.ln_1p()).exp()
}

/// Truncated pmf vector by windowed convolution of Poisson and negative binomial vectors.
pub fn delaporte_pmf_vector(p: &DelaporteParams) -> Result<PmfVector> {
    p.validate()?;
    let t_max = p.mgf_radius();
    let (n, tail) = truncation(
        p.mean(),
        p.variance().sqrt(),
        |t| p.log_mgf(t),
        t_max,
        DEFAULT_TAIL_TOLERANCE,
    );
    let len = n + 1;
    let nb = negbin_values(p.alpha, p.beta, len);
    let pois = poisson_values(p.lambda, len);
    let nonzero = |cut: f64| {
        let lo = pois.iter().position(|&x| x > cut).unwrap_or(0);
        let hi = pois.iter().rposition(|&x| x > cut).unwrap_or(0);
        (lo, hi)
    };
    let (mut lo, mut hi) = nonzero(0.0);
    if len as f64 * (hi - lo + 1) as f64 > FULL_CONVOLUTION_WORK {
        let peak = pois.iter().cloned().fold(0.0, f64::max);
        (lo, hi) = nonzero(peak * POISSON_CUTOFF);
    }
    let work = len as f64 * (hi - lo + 1) as f64;
    if work > MAX_CONVOLUTION_WORK {
        return Err(Error::ResourceLimit(format!(
            "Delaporte convolution needs about {work:.3e} multiply-adds (limit {MAX_CONVOLUTION_WORK:.0e})"
        )));
    }
    let dropped: f64 = pois[..lo].iter().chain(&pois[hi + 1..]).sum();
    let probs: Vec<f64> = (0..len)
        .into_par_iter()
        .with_min_len(256)
        .map(|j| {
            if j < lo {
                return 0.0;
            }
            let top = hi.min(j);
            (lo..=top).map(|q| pois[q] * nb[j - q]).sum()
        })
        .collect();
    Ok(PmfVector::new(probs, tail + dropped))
}

/// `exp(lambda (e^t - 1)) / (1 - beta (e^t - 1))^alpha`.
pub fn delaporte_mgf(p: &DelaporteParams, t: f64) -> Result<f64> {
    p.validate()?;
    let radius = p.mgf_radius();
    if t >= radius {
        return Err(Error::domain(format!(
            "Delaporte mgf diverges at t = {t}: radius of convergence is ln(1 + 1/beta) = {radius}"
        )));
    }
    Ok(p.log_mgf(t).exp())
}

/// Closed-form central moments of order 2, 3 and 4.
pub fn delaporte_central_moment(p: &DelaporteParams, m: u32) -> Result<f64> {
    p.validate()?;
    let DelaporteParams {
        lambda: l,
        alpha: a,
        beta: b,
    } = *p;
    match m {
        2 => Ok(l + a * b * (1.0 + b)),
        3 => Ok(l + a * b * (1.0 + 3.0 * b + 2.0 * b * b)),
        4 => Ok(3.0 * l * l
            + l
            + a * b
                * (1.0 + b)
                * (3.0 * a * b * b + 3.0 * a * b + 6.0 * b * b + 6.0 * b + 6.0 * l + 1.0)),
        _ => Err(Error::UnsupportedOrder {
            order: m,
            detail: "closed forms cover m = 2..4; use delaporte_central_moment_series".into(),
        }),
    }
}

/// Central moment of any order summed over the truncated pmf about the exact mean.
pub fn delaporte_central_moment_series(p: &DelaporteParams, m: u32) -> Result<f64> {
    let v = delaporte_pmf_vector(p)?;
    let mu = p.mean();
    Ok(v.probabilities
        .iter()
        .enumerate()
        .map(|(j, q)| (j as f64 - mu).powi(m as i32) * q)
        .sum())
}

/// `E[(D)_s] = sum_t C(s,t) beta^t alpha^(t) lambda^{s-t}` with the rising factorial `alpha^(t)`.
pub fn delaporte_factorial_moment(p: &DelaporteParams, s: u32) -> f64 {
    let mut total = 0.0;
    let mut binom = 1.0;
    let mut rising = 1.0;
    for t in 0..=s {
        if t > 0 {
            binom = binom * (s - t + 1) as f64 / t as f64;
            rising *= p.alpha + (t - 1) as f64;
        }
        total += binom * p.beta.powi(t as i32) * rising * p.lambda.powi((s - t) as i32);
    }
    total
}

/// `sum_{s=0}^{terms} (-1)^s E[(D)_s]/s!`, summed exactly. Converges to
/// `P(D = 0)` only for `beta < 1`.
pub fn delaporte_alternating_sum(p: &DelaporteParams, terms: u32) -> Result<f64> {
    p.validate()?;
    if p.beta >= 1.0 {
        return Err(Error::domain(format!(
            "alternating factorial-moment series diverges for beta = {} >= 1",
            p.beta
        )));
    }
    let (l, a, b) = (exact(p.lambda), exact(p.alpha), exact(p.beta));
    // E[(D)_s]/s! = sum_t [lambda^{s-t}/(s-t)!] [alpha^(t) beta^t / t!]
    let mut pois = vec![BigRational::one()];
    let mut nb = vec![BigRational::one()];
    for s in 1..=terms as usize {
        let d = BigRational::from_integer(s.into());
        pois.push(&pois[s - 1] * &l / &d);
        let rise = &a + BigRational::from_integer((s - 1).into());
        nb.push(&nb[s - 1] * rise * &b / &d);
    }
    // sum_{s<=S} (-1)^s sum_{t<=s} pois[s-t] nb[t] = sum_t (-1)^t nb[t] prefix[S-t],
    // where prefix[u] = sum_{w<=u} (-1)^w pois[w]
    let mut prefix = Vec::with_capacity(pois.len());
    let mut run = BigRational::zero();
    for (w, x) in pois.iter().enumerate() {
        if w % 2 == 0 {
            run += x;
        } else {
            run -= x;
        }
        prefix.push(run.clone());
    }
    let last = terms as usize;
    let mut acc = BigRational::zero();
    for (t, x) in nb.iter().enumerate() {
        let term = x * &prefix[last - t];
        if t % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(rational_to_f64(&acc))
}

/// `alpha beta^2`, the variance in excess of a Poisson with the same mean.
pub fn delaporte_poisson_gap(p: &DelaporteParams) -> f64 {
    p.alpha * p.beta * p.beta
}

#[cfg(test)]
mod tests {
    use super::super::{negbin_pmf, poisson_pmf};
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn zero_term() {
        let p = DelaporteParams::new(1.3, 2.5, 0.4).unwrap();
        assert!(rel(delaporte_pmf(&p, 0).unwrap(), delaporte_p_zero(&p)) < 1e-14);
        let v = delaporte_pmf_vector(&p).unwrap();
        assert!(rel(v.get(0), delaporte_p_zero(&p)) < 1e-13);
    }

    #[test]
    fn pointwise_matches_definition() {
        let p = DelaporteParams::new(2.0, 1.5, 0.8).unwrap();
        let v = delaporte_pmf_vector(&p).unwrap();
        for j in 0..=50u64 {
            let direct: f64 = (0..=j)
                .map(|i| negbin_pmf(1.5, 0.8, i).unwrap() * poisson_pmf(2.0, j - i).unwrap())
                .sum();
            assert!(rel(delaporte_pmf(&p, j).unwrap(), direct) < 1e-12, "j={j}");
            assert!(rel(v.get(j as usize), direct) < 1e-12, "j={j}");
        }
    }

    #[test]
    fn lambda_zero_is_negative_binomial() {
        let p = DelaporteParams::new(0.0, 3.0, 1.5).unwrap();
        for j in 0..30 {
            assert!(
                rel(
                    delaporte_pmf(&p, j).unwrap(),
                    negbin_pmf(3.0, 1.5, j).unwrap()
                ) < 1e-14
            );
        }
    }

    #[test]
    fn mgf_behaviour() {
        let p = DelaporteParams::new(1.0, 2.0, 0.5).unwrap();
        assert_eq!(delaporte_mgf(&p, 0.0).unwrap(), 1.0);
        let h = 1e-6;
        let d = (delaporte_mgf(&p, h).unwrap() - delaporte_mgf(&p, -h).unwrap()) / (2.0 * h);
        assert!(rel(d, p.mean()) < 1e-6);
        let v = delaporte_pmf_vector(&p).unwrap();
        assert!(rel(v.mgf(0.1), delaporte_mgf(&p, 0.1).unwrap()) < 1e-12);
        let e = delaporte_mgf(&p, 3f64.ln()).unwrap_err();
        assert!(matches!(e, Error::Domain(ref m) if m.contains("ln(1 + 1/beta)")));
    }

    #[test]
    fn closed_forms_match_series() {
        let p = DelaporteParams::new(1.0, 2.0, 0.5).unwrap();
        for m in 2..=4 {
            let c = delaporte_central_moment(&p, m).unwrap();
            let s = delaporte_central_moment_series(&p, m).unwrap();
            assert!(rel(s, c) < 1e-9, "m={m}: {c} vs {s}");
        }
        assert!(matches!(
            delaporte_central_moment(&p, 5),
            Err(Error::UnsupportedOrder { order: 5, .. })
        ));
    }

    #[test]
    fn factorial_moments() {
        let p = DelaporteParams::new(1.5, 2.0, 0.25).unwrap();
        assert!(rel(delaporte_factorial_moment(&p, 1), p.mean()) < 1e-15);
        let (l, a, b) = (1.5, 2.0, 0.25);
        let s2 = l * l + 2.0 * a * b * l + a * (a + 1.0) * b * b;
        assert!(rel(delaporte_factorial_moment(&p, 2), s2) < 1e-15);
        let v = delaporte_pmf_vector(&p).unwrap();
        for s in 0..6 {
            let series: f64 = v
                .probabilities
                .iter()
                .enumerate()
                .map(|(j, q)| (0..s).map(|i| j as f64 - i as f64).product::<f64>() * q)
                .sum();
            assert!(rel(series, delaporte_factorial_moment(&p, s)) < 1e-10);
        }
        let alt = delaporte_alternating_sum(&p, 120).unwrap();
        assert!(rel(alt, delaporte_p_zero(&p)) < 1e-12);
        assert!(
            delaporte_alternating_sum(&DelaporteParams::new(1.0, 1.0, 2.0).unwrap(), 5).is_err()
        );
    }

    #[test]
    fn gap_is_overdispersion() {
        let p = DelaporteParams::new(0.7, 3.0, 0.2).unwrap();
        assert!(rel(delaporte_poisson_gap(&p), p.variance() - p.mean()) < 1e-12);
        assert!(delaporte_poisson_gap(&p) > 0.0);
        assert!(DelaporteParams::new(-0.1, 1.0, 1.0).is_err());
        assert!(DelaporteParams::new(0.1, 0.0, 1.0).is_err());
    }
}
