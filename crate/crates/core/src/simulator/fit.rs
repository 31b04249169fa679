use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use super::SimulationReport;
use crate::distributions::{
    delaporte_pmf, delaporte_pmf_vector, fit_bign, poisson_pmf, poisson_pmf_vector, DelaporteParams,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Method of moments on mean, variance and third central moment.
    Delaporte,
    /// Parameters from the big-n leading-term fit, not from the data.
    DelaporteBigN,
    Poisson,
    /// Normal with the sample mean and variance, discretized to unit bins.
    Normal,
}

impl Model {
    fn fitted_parameters(self) -> i64 {
        match self {
            Model::Delaporte => 3,
            Model::DelaporteBigN => 0,
            Model::Poisson => 1,
            Model::Normal => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelParams {
    Delaporte { lambda: f64, alpha: f64, beta: f64 },
    Poisson { lambda: f64 },
    Normal { mean: f64, sd: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: Model,
    /// Parameters tried, present even when they are out of the model's domain.
    pub params: Option<ModelParams>,
    pub feasible: bool,
    pub note: Option<String>,
    pub chi_square: Option<f64>,
    pub degrees_of_freedom: Option<i64>,
    pub p_value: Option<f64>,
    pub log_likelihood: Option<f64>,
    pub binning: Option<String>,
}

const MIN_EXPECTED: f64 = 5.0;

/// Model probabilities for values `0..=top`, the last entry absorbing `P(X >= top)`.
fn binned_probabilities(pmf: impl Fn(u64) -> f64, top: u64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..top).map(&pmf).collect();
    let below: f64 = v.iter().sum();
    v.push((1.0 - below).max(0.0));
    v
}

struct Scores {
    chi_square: f64,
    dof: i64,
    log_likelihood: f64,
    binning: String,
}

fn score(rep: &SimulationReport, probs: &[f64], point: impl Fn(u64) -> f64, fitted: i64) -> Scores {
    let n = rep.samples as f64;
    let top = probs.len() - 1;
    let mut observed = vec![0.0; top + 1];
    for (&x, &c) in &rep.histogram {
        observed[(x as usize).min(top)] += c as f64;
    }
    // merge left to right until each bin expects at least MIN_EXPECTED
    let mut bins: Vec<(usize, usize, f64, f64)> = Vec::new();
    let mut open: Option<(usize, f64, f64)> = None;
    for j in 0..=top {
        let (lo, e, o) = open.take().unwrap_or((j, 0.0, 0.0));
        let (e, o) = (e + n * probs[j], o + observed[j]);
        if e >= MIN_EXPECTED {
            bins.push((lo, j, e, o));
        } else {
            open = Some((lo, e, o));
        }
    }
    if let Some((lo, e, o)) = open {
        match bins.last_mut() {
            Some(last) => {
                last.1 = top;
                last.2 += e;
                last.3 += o;
            }
            None => bins.push((lo, top, e, o)),
        }
    }
    let chi_square = bins
        .iter()
        .map(|&(_, _, e, o)| {
            if e > 0.0 {
                (o - e) * (o - e) / e
            } else if o > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .sum();
    let log_likelihood = rep
        .histogram
        .iter()
        .map(|(&x, &c)| c as f64 * point(x).ln())
        .sum();
    Scores {
        chi_square,
        dof: bins.len() as i64 - 1 - fitted,
        log_likelihood,
        binning: format!(
            "{} bins over values 0..={top} (last bin includes the upper tail), merged to >= {MIN_EXPECTED} expected counts",
            bins.len()
        ),
    }
}

fn finish(
    rep: &SimulationReport,
    model: Model,
    params: ModelParams,
    pmf: impl Fn(u64) -> f64,
) -> FitReport {
    let top = *rep.histogram.keys().next_back().unwrap_or(&0);
    let probs = binned_probabilities(&pmf, top);
    let s = score(rep, &probs, &pmf, model.fitted_parameters());
    let p_value = (s.dof > 0)
        .then(|| {
            ChiSquared::new(s.dof as f64)
                .ok()
                .map(|d| d.sf(s.chi_square))
        })
        .flatten();
    FitReport {
        model,
        params: Some(params),
        feasible: true,
        note: None,
        chi_square: Some(s.chi_square),
        degrees_of_freedom: Some(s.dof),
        p_value,
        log_likelihood: Some(s.log_likelihood),
        binning: Some(s.binning),
    }
}

fn infeasible(model: Model, params: Option<ModelParams>, why: String) -> FitReport {
    FitReport {
        model,
        params,
        feasible: false,
        note: Some(why),
        chi_square: None,
        degrees_of_freedom: None,
        p_value: None,
        log_likelihood: None,
        binning: None,
    }
}

fn delaporte_report(rep: &SimulationReport, model: Model, p: DelaporteParams) -> Result<FitReport> {
    let v = delaporte_pmf_vector(&p)?;
    let params = ModelParams::Delaporte {
        lambda: p.lambda,
        alpha: p.alpha,
        beta: p.beta,
    };
    let pmf = |x: u64| {
        if x as usize <= v.truncation_bound {
            v.get(x as usize)
        } else {
            delaporte_pmf(&p, x).unwrap_or(0.0)
        }
    };
    Ok(finish(rep, model, params, pmf))
}

/// Fits each model to the sampled histogram and scores it by chi-square and log-likelihood.
pub fn fit_and_compare(rep: &SimulationReport, models: &[Model]) -> Result<Vec<FitReport>> {
    if rep.histogram.len() < 2 {
        return Err(Error::Fit(format!(
            "histogram has {} distinct value(s); nothing to fit",
            rep.histogram.len()
        )));
    }
    let mean = rep.moments.mean;
    let var = rep.moments.central_moment(2);
    let mu3 = rep.moments.central_moment(3);
    let mut out = Vec::new();
    for &model in models {
        let report = match model {
            Model::Poisson => {
                let v = poisson_pmf_vector(mean)?;
                let pmf = |x: u64| {
                    if x as usize <= v.truncation_bound {
                        v.get(x as usize)
                    } else {
                        poisson_pmf(mean, x).unwrap_or(0.0)
                    }
                };
                finish(rep, model, ModelParams::Poisson { lambda: mean }, pmf)
            }
            Model::Normal => {
                let sd = var.sqrt();
                let normal = Normal::new(mean, sd).map_err(|e| Error::Fit(e.to_string()))?;
                let pmf = |x: u64| {
                    let hi = normal.cdf(x as f64 + 0.5);
                    if x == 0 {
                        hi
                    } else {
                        hi - normal.cdf(x as f64 - 0.5)
                    }
                };
                finish(rep, model, ModelParams::Normal { mean, sd }, pmf)
            }
            Model::Delaporte => {
                // var - mean = alpha beta^2, mu3 - mean - 3 (var - mean) = 2 alpha beta^3
                let g = var - mean;
                let h = mu3 - mean - 3.0 * g;
                let beta = h / (2.0 * g);
                let alpha = g / (beta * beta);
                let lambda = mean - alpha * beta;
                let params = ModelParams::Delaporte {
                    lambda,
                    alpha,
                    beta,
                };
                match DelaporteParams::new(lambda, alpha, beta) {
                    Ok(p) if g > 0.0 && h > 0.0 => delaporte_report(rep, model, p)?,
                    _ => infeasible(
                        model,
                        Some(params),
                        format!(
                            "method-of-moments infeasible: var - mean = {g:.6e}, mu3 - mean - 3(var - mean) = {h:.6e} give lambda = {lambda:.6e}, alpha = {alpha:.6e}, beta = {beta:.6e}"
                        ),
                    ),
                }
            }
            Model::DelaporteBigN => match fit_bign(rep.n as f64, rep.k) {
                Ok(p) => delaporte_report(rep, model, p)?,
                Err(e) => infeasible(model, None, format!("big-n fit unavailable: {e}")),
            },
        };
        out.push(report);
    }
    Ok(out)
}
