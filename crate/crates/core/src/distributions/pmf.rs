use serde::{Deserialize, Serialize};

use super::{check_negbin, check_rate, ln_negbin, ln_poisson};
use crate::error::Result;

/// Target bound on the probability mass beyond a truncated pmf vector.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-18;

/// Probabilities for `0..=truncation_bound` plus a bound on the mass above it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfVector {
    pub probabilities: Vec<f64>,
    pub truncation_bound: usize,
    pub tail_mass_bound: f64,
}

impl PmfVector {
    pub(crate) fn new(probabilities: Vec<f64>, tail_mass_bound: f64) -> PmfVector {
        PmfVector {
            truncation_bound: probabilities.len().saturating_sub(1),
            probabilities,
            tail_mass_bound,
        }
    }

    pub fn get(&self, j: usize) -> f64 {
        self.probabilities.get(j).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(j, p)| j as f64 * p)
            .sum()
    }

    pub fn raw_moment(&self, m: u32) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(j, p)| (j as f64).powi(m as i32) * p)
            .sum()
    }

    /// `sum_j p_j (j - mean)^m` about the vector's own mean.
    pub fn central_moment(&self, m: u32) -> f64 {
        let mu = self.mean();
        self.probabilities
            .iter()
            .enumerate()
            .map(|(j, p)| (j as f64 - mu).powi(m as i32) * p)
            .sum()
    }

    pub fn mgf(&self, t: f64) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(j, p)| (t * j as f64).exp() * p)
            .sum()
    }
}

/// `min_t exp(log_mgf(t) - t x)` over `0 < t < t_max`; a bound on `P(X >= x)`.
pub(crate) fn chernoff_tail(log_mgf: impl Fn(f64) -> f64, t_max: f64, x: f64) -> f64 {
    let f = |t: f64| log_mgf(t) - t * x;
    let (mut a, mut b) = (0.0, t_max * (1.0 - 1e-12));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let best = f((a + b) / 2.0).min(0.0);
    best.exp()
}

/// Smallest index `N >= mean + 20 sd` (grown geometrically) whose Chernoff
/// tail bound `P(X > N)` is below `tol`. Returns `(N, bound)`.
pub(crate) fn truncation(
    mean: f64,
    sd: f64,
    log_mgf: impl Fn(f64) -> f64,
    t_max: f64,
    tol: f64,
) -> (usize, f64) {
    let mut n = (mean + 20.0 * sd).ceil() as usize + 10;
    loop {
        let bound = chernoff_tail(&log_mgf, t_max, (n + 1) as f64);
        if bound <= tol {
            return (n, bound);
        }
        n += (n / 4).max(16);
    }
}

/// `p_0..p_len-1` from the log-probability at `mode` and the ratio `p_{j+1}/p_j`.
pub(crate) fn anchored(
    len: usize,
    mode: usize,
    ln_mode: f64,
    ratio: impl Fn(usize) -> f64,
) -> Vec<f64> {
    let mut v = vec![0.0; len];
    let mode = mode.min(len - 1);
    v[mode] = ln_mode.exp();
    for j in mode..len - 1 {
        v[j + 1] = v[j] * ratio(j);
    }
    for j in (0..mode).rev() {
        v[j] = v[j + 1] / ratio(j);
    }
    v
}

pub(crate) fn poisson_values(lambda: f64, len: usize) -> Vec<f64> {
    if lambda == 0.0 {
        let mut v = vec![0.0; len];
        v[0] = 1.0;
        return v;
    }
    let mode = lambda.floor() as usize;
    anchored(
        len,
        mode,
        ln_poisson(lambda, mode.min(len - 1) as u64),
        |j| lambda / (j + 1) as f64,
    )
}

pub(crate) fn negbin_values(alpha: f64, beta: f64, len: usize) -> Vec<f64> {
    let q = beta / (1.0 + beta);
    let mode = if alpha > 1.0 {
        ((alpha - 1.0) * beta).floor() as usize
    } else {
        0
    };
    anchored(
        len,
        mode,
        ln_negbin(alpha, beta, mode.min(len - 1) as u64),
        |j| (alpha + j as f64) / (j + 1) as f64 * q,
    )
}

pub(crate) fn poisson_log_mgf(lambda: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| lambda * t.exp_m1()
}

pub(crate) fn negbin_log_mgf(alpha: f64, beta: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| {
        let inner = -beta * t.exp_m1();
        if inner <= -1.0 {
            f64::INFINITY
        } else {
            -alpha * inner.ln_1p()
        }
    }
}

pub fn poisson_pmf_vector(lambda: f64) -> Result<PmfVector> {
    check_rate(lambda)?;
    if lambda == 0.0 {
        return Ok(PmfVector::new(vec![1.0], 0.0));
    }
    let t_max = ((40.0 * lambda + 40.0) / lambda).ln().max(1.0);
    let (n, tail) = truncation(
        lambda,
        lambda.sqrt(),
        poisson_log_mgf(lambda),
        t_max,
        DEFAULT_TAIL_TOLERANCE,
    );
    Ok(PmfVector::new(poisson_values(lambda, n + 1), tail))
}

pub fn negbin_pmf_vector(alpha: f64, beta: f64) -> Result<PmfVector> {
    check_negbin(alpha, beta)?;
    let mean = alpha * beta;
    let sd = (alpha * beta * (1.0 + beta)).sqrt();
    let t_max = (1.0 / beta).ln_1p();
    let (n, tail) = truncation(
        mean,
        sd,
        negbin_log_mgf(alpha, beta),
        t_max,
        DEFAULT_TAIL_TOLERANCE,
    );
    Ok(PmfVector::new(negbin_values(alpha, beta, n + 1), tail))
}
