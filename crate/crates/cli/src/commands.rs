use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::Signed;
use ramsey_moments::arith::{
    rational_to_f64, Basis, BigInt, BigRational, ExactValue, RationalPolynomial,
};
use ramsey_moments::bounds::{
    bonferroni_threshold_from_table, chebyshev_ratio, erdos_asymptotic_check,
    first_moment_threshold, ramsey_upper_bound, var_mean_ratio, BoundReport, ErdosCheck,
    RatioReport,
};
use ramsey_moments::distributions::{
    delaporte_central_moment, delaporte_factorial_moment, delaporte_mgf, delaporte_p_zero,
    delaporte_pmf, delaporte_pmf_vector, delaporte_poisson_gap, expected_count, fit_bign,
    negbin_mgf, negbin_pmf, negbin_pmf_vector, poisson_factorial_moment, poisson_mgf, poisson_pmf,
    poisson_pmf_vector, poisson_rate_smalln_exact, DelaporteParams, PmfVector, RegimeBoundary,
};
use ramsey_moments::moments::{leading_central_reference, standardize, MomentTable};
use ramsey_moments::oracle::{exact_distribution, exact_distribution_by_symmetry, oracle_moment};
use ramsey_moments::simulator::{
    self, fit_and_compare, FitReport, Model, SimulationConfig, SimulationReport,
};
use serde::Serialize;

use crate::args::*;
use crate::render::{csv_rows, float, frac, opt_float, Render};
use crate::settings::{usage, CliError, Settings};

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn exact(r: &BigRational) -> ExactValue {
    ExactValue::from(r)
}

#[derive(Debug, Serialize)]
pub struct Evaluation {
    pub n: i64,
    pub value: ExactValue,
    pub approx: f64,
    /// Standardized moment, for central moments with positive variance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standardized: Option<f64>,
}

fn evaluate(p: &RationalPolynomial, ns: &[i64]) -> Vec<(i64, BigRational)> {
    ns.iter().map(|&n| (n, p.eval(&BigInt::from(n)))).collect()
}

fn coefficient_rows(p: &RationalPolynomial) -> String {
    let basis = match p.basis() {
        Basis::Monomial => "monomial",
        Basis::FallingFactorial => "falling_factorial",
    };
    csv_rows(
        "degree,numerator,denominator,basis",
        p.to_records().into_iter().map(|r| {
            vec![
                r.degree.to_string(),
                r.numerator,
                r.denominator,
                basis.to_string(),
            ]
        }),
    )
}

fn evaluation_rows(evals: &[Evaluation]) -> String {
    csv_rows(
        "n,numerator,denominator,value,standardized",
        evals.iter().map(|e| {
            vec![
                e.n.to_string(),
                e.value.numerator.clone(),
                e.value.denominator.clone(),
                float(e.approx),
                opt_float(e.standardized),
            ]
        }),
    )
}

fn check_k(k: u32) -> Result<(), CliError> {
    if k < 2 {
        return Err(usage(format!("--k must be at least 2, got {k}")));
    }
    Ok(())
}

// ---------------------------------------------------------------- moments

#[derive(Debug, Serialize)]
pub struct MomentsOutput {
    pub k: u32,
    pub r: u32,
    pub family: &'static str,
    pub basis: Basis,
    pub polynomial: RationalPolynomial,
    pub profile_count: u64,
    pub elapsed_ms: f64,
    pub evaluations: Vec<Evaluation>,
}

impl Render for MomentsOutput {
    fn pretty(&self) -> String {
        let name = match self.family {
            "raw" => format!("E[X^{}]", self.r),
            "factorial" => format!("E[(X)_{}]", self.r),
            _ => format!("E[C(X,{})]", self.r),
        };
        let mut s = format!(
            "{name} for k = {} ({} overlap profiles, {:.1} ms)\n  = {}\n",
            self.k, self.profile_count, self.elapsed_ms, self.polynomial
        );
        for e in &self.evaluations {
            s += &format!("n = {}: {} ~ {}\n", e.n, frac(&e.value), float(e.approx));
        }
        s
    }

    fn csv(&self) -> String {
        if self.evaluations.is_empty() {
            coefficient_rows(&self.polynomial)
        } else {
            evaluation_rows(&self.evaluations)
        }
    }
}

pub fn moments(a: &MomentsArgs, s: &Settings) -> Result<MomentsOutput, CliError> {
    check_k(a.k)?;
    if a.r == 0 {
        return Err(usage("--r must be at least 1"));
    }
    let start = Instant::now();
    let table = MomentTable::compute(a.k, a.r, &s.engine())?;
    let (family, poly) = match a.family {
        MomentFamily::Raw => ("raw", table.raw(a.r)?),
        MomentFamily::Factorial => ("factorial", table.factorial(a.r)?),
        MomentFamily::Binomial => ("binomial", table.binomial(a.r)?),
    };
    let basis = match a.basis {
        BasisArg::Monomial => Basis::Monomial,
        BasisArg::Ff => Basis::FallingFactorial,
    };
    let polynomial = poly.to_basis(basis);
    let evaluations = evaluate(&polynomial, &a.eval_n)
        .into_iter()
        .map(|(n, v)| Evaluation {
            n,
            approx: rational_to_f64(&v),
            value: exact(&v),
            standardized: None,
        })
        .collect();
    Ok(MomentsOutput {
        k: a.k,
        r: a.r,
        family,
        basis,
        polynomial,
        profile_count: table.profile_counts[a.r as usize],
        elapsed_ms: ms(start),
        evaluations,
    })
}

// ---------------------------------------------------------------- central

#[derive(Debug, Serialize)]
pub struct LeadingCheck {
    pub degree: u32,
    pub coefficient: ExactValue,
    pub predicted_degree: u32,
    pub predicted_coefficient: ExactValue,
    pub matches: bool,
}

#[derive(Debug, Serialize)]
pub struct CentralOutput {
    pub k: u32,
    pub m: u32,
    pub polynomial: RationalPolynomial,
    pub degree: Option<u32>,
    pub elapsed_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leading: Option<LeadingCheck>,
    pub evaluations: Vec<Evaluation>,
}

impl Render for CentralOutput {
    fn pretty(&self) -> String {
        let mut s = format!(
            "E[(X - mu)^{}] for k = {} ({:.1} ms)\n  = {}\n",
            self.m, self.k, self.elapsed_ms, self.polynomial
        );
        if let Some(l) = &self.leading {
            s += &format!(
                "leading term: {} n^{}; predicted {} n^{}: {}\n",
                frac(&l.coefficient),
                l.degree,
                frac(&l.predicted_coefficient),
                l.predicted_degree,
                if l.matches { "match" } else { "MISMATCH" }
            );
        }
        for e in &self.evaluations {
            s += &format!(
                "n = {}: {} ~ {}, c_{} = {}\n",
                e.n,
                frac(&e.value),
                float(e.approx),
                self.m,
                opt_float(e.standardized)
            );
        }
        s
    }

    fn csv(&self) -> String {
        if self.evaluations.is_empty() {
            coefficient_rows(&self.polynomial)
        } else {
            evaluation_rows(&self.evaluations)
        }
    }
}

pub fn central(a: &CentralArgs, s: &Settings) -> Result<CentralOutput, CliError> {
    check_k(a.k)?;
    if a.m == 0 {
        return Err(usage("--m must be at least 1"));
    }
    // fail on an unsupported prediction before the expensive part
    let predicted = if a.leading {
        Some(leading_central_reference(a.k, a.m)?)
    } else {
        None
    };
    let start = Instant::now();
    let table = MomentTable::compute(a.k, a.m.max(2), &s.engine())?;
    let polynomial = table.central(a.m)?.clone();
    let leading = if let Some((pd, pc)) = predicted {
        let (d, c) = polynomial.leading_term().ok_or_else(|| {
            ramsey_moments::Error::Domain("central moment is identically zero".into())
        })?;
        Some(LeadingCheck {
            degree: d,
            matches: d == pd && c == pc,
            coefficient: exact(&c),
            predicted_degree: pd,
            predicted_coefficient: exact(&pc),
        })
    } else {
        None
    };
    let var = table.central(2)?;
    let evaluations = evaluate(&polynomial, &a.eval_n)
        .into_iter()
        .map(|(n, v)| {
            let var_n = var.eval(&BigInt::from(n));
            let standardized = if var_n.is_positive() {
                Some(standardize(&v, &var_n, a.m, s.precision)?)
            } else {
                None
            };
            Ok(Evaluation {
                n,
                approx: rational_to_f64(&v),
                value: exact(&v),
                standardized,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(CentralOutput {
        k: a.k,
        m: a.m,
        degree: polynomial.degree(),
        polynomial,
        elapsed_ms: ms(start),
        leading,
        evaluations,
    })
}

// ---------------------------------------------------------------- oracle

#[derive(Debug, Serialize)]
pub struct RawMomentValue {
    pub r: u32,
    pub value: ExactValue,
    pub approx: f64,
}

#[derive(Debug, Serialize)]
pub struct OracleOutput {
    pub n: u32,
    pub k: u32,
    pub denominator: String,
    /// Value of X to the number of colorings attaining it.
    pub counts: BTreeMap<String, String>,
    pub p_zero: ExactValue,
    pub moments: Vec<RawMomentValue>,
    pub elapsed_ms: f64,
    #[serde(skip)]
    rows: Vec<(u64, BigInt, BigRational)>,
}

impl Render for OracleOutput {
    fn pretty(&self) -> String {
        let mut s = format!(
            "X over all {} colorings of K_{} (k = {}, {:.1} ms)\n{:>8} {:>14} {:>22}\n",
            self.denominator, self.n, self.k, self.elapsed_ms, "value", "count", "probability"
        );
        for (i, c, p) in &self.rows {
            s += &format!("{i:>8} {c:>14} {:>22}\n", float(rational_to_f64(p)));
        }
        s += &format!("P(X = 0) = {}\n", frac(&self.p_zero));
        for m in &self.moments {
            s += &format!("E[X^{}] = {}\n", m.r, frac(&m.value));
        }
        s
    }

    fn csv(&self) -> String {
        csv_rows(
            "value,count,probability_exact,probability",
            self.rows.iter().map(|(i, c, p)| {
                vec![
                    i.to_string(),
                    c.to_string(),
                    p.to_string(),
                    float(rational_to_f64(p)),
                ]
            }),
        )
    }
}

pub fn oracle(a: &OracleArgs, s: &Settings) -> Result<OracleOutput, CliError> {
    let start = Instant::now();
    let d = if a.symmetry {
        exact_distribution_by_symmetry(a.n, a.k, &s.oracle())?
    } else {
        exact_distribution(a.n, a.k, &s.oracle())?
    };
    let moments = (1..=a.max_r)
        .map(|r| {
            let v = oracle_moment(&d, r);
            RawMomentValue {
                r,
                approx: rational_to_f64(&v),
                value: exact(&v),
            }
        })
        .collect();
    Ok(OracleOutput {
        n: a.n,
        k: a.k,
        denominator: d.denominator.to_string(),
        counts: d
            .counts
            .iter()
            .map(|(i, c)| (i.to_string(), c.to_string()))
            .collect(),
        p_zero: exact(&d.probability(0)),
        moments,
        elapsed_ms: ms(start),
        rows: d
            .counts
            .iter()
            .map(|(&i, c)| (i, c.clone(), d.probability(i)))
            .collect(),
    })
}

// ---------------------------------------------------------------- dist

#[derive(Debug, Serialize)]
pub struct DistParamsOut {
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct PmfEntry {
    pub j: u64,
    pub p: f64,
}

#[derive(Debug, Serialize)]
pub struct OrderValue {
    pub order: u32,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct DistMoments {
    pub mean: f64,
    pub variance: f64,
    pub central: Vec<OrderValue>,
    pub factorial: Vec<OrderValue>,
    /// Variance minus mean; zero exactly for Poisson.
    pub poisson_gap: f64,
}

#[derive(Debug, Serialize)]
pub struct DistOutput {
    pub query: &'static str,
    pub family: &'static str,
    pub params: DistParamsOut,
    pub p_zero: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmf: Option<Vec<PmfEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_mass_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mgf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moments: Option<DistMoments>,
}

impl Render for DistOutput {
    fn pretty(&self) -> String {
        let p = &self.params;
        let mut s = format!(
            "{} (lambda = {}, alpha = {}, beta = {})\nP(X = 0) = {}\n",
            self.family,
            opt_float(p.lambda),
            opt_float(p.alpha),
            opt_float(p.beta),
            float(self.p_zero)
        );
        if let Some(pmf) = &self.pmf {
            for e in pmf {
                s += &format!("P(X = {}) = {}\n", e.j, float(e.p));
            }
            if let (Some(b), Some(t)) = (self.truncation_bound, self.tail_mass_bound) {
                s += &format!("mass above {b} is at most {}\n", float(t));
            }
        }
        if let (Some(t), Some(m)) = (self.t, self.mgf) {
            s += &format!("mgf at t = {}: {}\n", float(t), float(m));
        }
        if let Some(m) = &self.moments {
            s += &format!(
                "mean = {}\nvariance = {}\n",
                float(m.mean),
                float(m.variance)
            );
            for c in &m.central {
                s += &format!("E[(X - mu)^{}] = {}\n", c.order, float(c.value));
            }
            for c in &m.factorial {
                s += &format!("E[(X)_{}] = {}\n", c.order, float(c.value));
            }
            s += &format!("variance - mean = {}\n", float(m.poisson_gap));
        }
        s
    }

    fn csv(&self) -> String {
        if let Some(pmf) = &self.pmf {
            return csv_rows("j,p", pmf.iter().map(|e| vec![e.j.to_string(), float(e.p)]));
        }
        if let Some(m) = &self.moments {
            let mut rows = vec![
                vec!["mean".into(), "1".into(), float(m.mean)],
                vec!["variance".into(), "2".into(), float(m.variance)],
            ];
            rows.extend(
                m.central
                    .iter()
                    .map(|c| vec!["central".into(), c.order.to_string(), float(c.value)]),
            );
            rows.extend(
                m.factorial
                    .iter()
                    .map(|c| vec!["factorial".into(), c.order.to_string(), float(c.value)]),
            );
            return csv_rows("quantity,order,value", rows);
        }
        csv_rows("t,mgf", [vec![opt_float(self.t), opt_float(self.mgf)]])
    }
}

enum Family {
    Poisson(f64),
    Negbin(f64, f64),
    Delaporte(DelaporteParams),
}

fn family_of(a: &DistArgs) -> Result<Family, CliError> {
    let need = |v: Option<f64>, flag: &str, fam: &str| {
        v.ok_or_else(|| usage(format!("{fam} needs {flag}")))
    };
    let refuse = |v: Option<f64>, flag: &str, fam: &str| match v {
        Some(_) => Err(usage(format!("{fam} does not take {flag}"))),
        None => Ok(()),
    };
    Ok(match a.family {
        DistFamily::Poisson => {
            refuse(a.alpha, "--alpha", "poisson")?;
            refuse(a.beta, "--beta", "poisson")?;
            Family::Poisson(need(a.lambda, "--lambda", "poisson")?)
        }
        DistFamily::Negbin => {
            refuse(a.lambda, "--lambda", "negbin")?;
            Family::Negbin(
                need(a.alpha, "--alpha", "negbin")?,
                need(a.beta, "--beta", "negbin")?,
            )
        }
        DistFamily::Delaporte => Family::Delaporte(DelaporteParams::new(
            need(a.lambda, "--lambda", "delaporte")?,
            need(a.alpha, "--alpha", "delaporte")?,
            need(a.beta, "--beta", "delaporte")?,
        )?),
    })
}

const DEFAULT_MAX_J: u64 = 200;

pub fn dist(a: &DistArgs, _s: &Settings) -> Result<DistOutput, CliError> {
    let fam = family_of(a)?;
    let pointwise = |j: u64| -> ramsey_moments::Result<f64> {
        match &fam {
            Family::Poisson(l) => poisson_pmf(*l, j),
            Family::Negbin(al, be) => negbin_pmf(*al, *be, j),
            Family::Delaporte(p) => delaporte_pmf(p, j),
        }
    };
    let p_zero = match &fam {
        Family::Delaporte(p) => delaporte_p_zero(p),
        _ => pointwise(0)?,
    };
    let mut out = DistOutput {
        query: match a.query {
            DistQuery::Pmf => "pmf",
            DistQuery::Mgf => "mgf",
            DistQuery::Moments => "moments",
        },
        family: match a.family {
            DistFamily::Delaporte => "delaporte",
            DistFamily::Poisson => "poisson",
            DistFamily::Negbin => "negbin",
        },
        params: DistParamsOut {
            lambda: a.lambda,
            alpha: a.alpha,
            beta: a.beta,
        },
        p_zero,
        pmf: None,
        truncation_bound: None,
        tail_mass_bound: None,
        t: None,
        mgf: None,
        moments: None,
    };
    if a.query != DistQuery::Mgf && a.t.is_some() {
        return Err(usage("--t applies to mgf only"));
    }
    if a.query != DistQuery::Pmf && a.max_j.is_some() {
        return Err(usage("--max-j applies to pmf only"));
    }
    match a.query {
        DistQuery::Pmf => {
            let values = match a.max_j {
                Some(j) => (0..=j)
                    .map(|j| {
                        Ok(PmfEntry {
                            j,
                            p: pointwise(j)?,
                        })
                    })
                    .collect::<ramsey_moments::Result<_>>()?,
                None => {
                    let v: PmfVector = match &fam {
                        Family::Poisson(l) => poisson_pmf_vector(*l)?,
                        Family::Negbin(al, be) => negbin_pmf_vector(*al, *be)?,
                        Family::Delaporte(p) => delaporte_pmf_vector(p)?,
                    };
                    out.truncation_bound = Some(v.truncation_bound);
                    out.tail_mass_bound = Some(v.tail_mass_bound);
                    let top = (v.truncation_bound as u64).min(DEFAULT_MAX_J);
                    (0..=top)
                        .map(|j| PmfEntry {
                            j,
                            p: v.get(j as usize),
                        })
                        .collect()
                }
            };
            out.pmf = Some(values);
        }
        DistQuery::Mgf => {
            let t = a.t.ok_or_else(|| usage("mgf needs --t"))?;
            out.t = Some(t);
            out.mgf = Some(match &fam {
                Family::Poisson(l) => poisson_mgf(*l, t)?,
                Family::Negbin(al, be) => negbin_mgf(*al, *be, t)?,
                Family::Delaporte(p) => delaporte_mgf(p, t)?,
            });
        }
        DistQuery::Moments => {
            let as_delaporte = match &fam {
                Family::Poisson(_) => None,
                Family::Negbin(al, be) => Some(DelaporteParams::new(0.0, *al, *be)?),
                Family::Delaporte(p) => Some(*p),
            };
            let m = match (as_delaporte, &fam) {
                (Some(p), _) => DistMoments {
                    mean: p.mean(),
                    variance: p.variance(),
                    central: (2..=4)
                        .map(|m| {
                            Ok(OrderValue {
                                order: m,
                                value: delaporte_central_moment(&p, m)?,
                            })
                        })
                        .collect::<ramsey_moments::Result<_>>()?,
                    factorial: (1..=4)
                        .map(|s| OrderValue {
                            order: s,
                            value: delaporte_factorial_moment(&p, s),
                        })
                        .collect(),
                    poisson_gap: delaporte_poisson_gap(&p),
                },
                (None, Family::Poisson(l)) => DistMoments {
                    mean: *l,
                    variance: *l,
                    central: vec![
                        OrderValue {
                            order: 2,
                            value: *l,
                        },
                        OrderValue {
                            order: 3,
                            value: *l,
                        },
                        OrderValue {
                            order: 4,
                            value: l + 3.0 * l * l,
                        },
                    ],
                    factorial: (1..=4)
                        .map(|s| OrderValue {
                            order: s,
                            value: poisson_factorial_moment(*l, s),
                        })
                        .collect(),
                    poisson_gap: 0.0,
                },
                _ => unreachable!(),
            };
            out.moments = Some(m);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- fit

#[derive(Debug, Serialize)]
pub struct RegimeInfo {
    pub constant: f64,
    pub min_n: f64,
    pub in_big_regime: bool,
}

#[derive(Debug, Serialize)]
pub struct FitOutput {
    pub k: u32,
    pub n: u64,
    pub regime: &'static str,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_exact: Option<ExactValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub mean: f64,
    pub variance: f64,
    /// E[X] = C(n,k) 2^{1-C(k,2)}, for comparison with the model mean.
    pub expected_count: f64,
    pub poisson_gap: f64,
    pub boundary: RegimeInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Render for FitOutput {
    fn pretty(&self) -> String {
        let mut s = format!(
            "{}-n fit at k = {}, n = {}\nlambda = {}\n",
            self.regime,
            self.k,
            self.n,
            float(self.lambda)
        );
        if let Some(l) = &self.lambda_exact {
            s += &format!("lambda (exact) = {}\n", frac(l));
        }
        if let (Some(a), Some(b)) = (self.alpha, self.beta) {
            s += &format!("alpha = {}\nbeta = {}\n", float(a), float(b));
        }
        s += &format!(
            "model mean = {}, model variance = {}, E[X] = {}\nvariance - mean = {}\nbig-n boundary: n >= {} ({})\n",
            float(self.mean),
            float(self.variance),
            float(self.expected_count),
            float(self.poisson_gap),
            float(self.boundary.min_n),
            if self.boundary.in_big_regime { "inside" } else { "outside" }
        );
        if let Some(n) = &self.note {
            s += &format!("note: {n}\n");
        }
        s
    }

    fn csv(&self) -> String {
        let mut rows = vec![vec!["lambda".to_string(), float(self.lambda)]];
        if let (Some(a), Some(b)) = (self.alpha, self.beta) {
            rows.push(vec!["alpha".into(), float(a)]);
            rows.push(vec!["beta".into(), float(b)]);
        }
        rows.push(vec!["mean".into(), float(self.mean)]);
        rows.push(vec!["variance".into(), float(self.variance)]);
        csv_rows("parameter,value", rows)
    }
}

pub fn fit(a: &FitArgs, _s: &Settings) -> Result<FitOutput, CliError> {
    let boundary = RegimeBoundary {
        constant: a
            .boundary_constant
            .unwrap_or(RegimeBoundary::default().constant),
    };
    if boundary.constant.is_nan() || boundary.constant <= 0.0 {
        return Err(usage("--boundary-constant must be positive"));
    }
    if a.n < a.k as u64 {
        return Err(ramsey_moments::Error::Domain(format!(
            "need n >= k, got n = {}, k = {}",
            a.n, a.k
        ))
        .into());
    }
    let n = a.n as f64;
    let info = RegimeInfo {
        constant: boundary.constant,
        min_n: boundary.min_n(a.k),
        in_big_regime: boundary.is_big(n, a.k),
    };
    let ex = expected_count(n, a.k);
    Ok(match a.regime {
        Regime::Big => {
            let p = fit_bign(n, a.k)?;
            FitOutput {
                k: a.k,
                n: a.n,
                regime: "big",
                lambda: p.lambda,
                lambda_exact: None,
                alpha: Some(p.alpha),
                beta: Some(p.beta),
                mean: p.mean(),
                variance: p.variance(),
                expected_count: ex,
                poisson_gap: delaporte_poisson_gap(&p),
                note: (!info.in_big_regime).then(|| "n is below the big-n boundary".to_string()),
                boundary: info,
            }
        }
        Regime::Small => {
            let l = poisson_rate_smalln_exact(a.n, a.k);
            let lf = rational_to_f64(&l);
            FitOutput {
                k: a.k,
                n: a.n,
                regime: "small",
                lambda: lf,
                lambda_exact: Some(exact(&l)),
                alpha: None,
                beta: None,
                mean: lf,
                variance: lf,
                expected_count: ex,
                poisson_gap: 0.0,
                note: info
                    .in_big_regime
                    .then(|| "n is inside the big-n regime".to_string()),
                boundary: info,
            }
        }
    })
}

// ---------------------------------------------------------------- bounds

#[derive(Debug, Serialize)]
pub struct BoundsOutput {
    pub k: u32,
    pub reports: Vec<BoundReport>,
    pub first_moment_threshold: u64,
    /// C(2k, k) as a decimal string.
    pub upper_bound: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub erdos: Option<ErdosCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chebyshev: Option<RatioReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var_mean: Option<RatioReport>,
}

impl Render for BoundsOutput {
    fn pretty(&self) -> String {
        let mut s = format!("k = {}\n", self.k);
        for r in &self.reports {
            let m = match r.method {
                ramsey_moments::bounds::BoundMethod::Bonferroni { m } => m,
                _ => 1,
            };
            s += &format!(
                "m = {m}: threshold {}: {}\n",
                r.threshold_n.map_or("none".into(), |n| n.to_string()),
                r.implied_bound
            );
            for c in &r.certificate {
                s += &format!("  partial sum at n = {}: {}\n", c.n, frac(&c.value));
            }
            if let Some(i) = r.improves_on_first_moment {
                s += &format!("  improves on m = 1: {}\n", if i { "yes" } else { "no" });
            }
        }
        s += &format!(
            "R({k},{k}) <= C({},{k}) = {}\n",
            2 * self.k,
            self.upper_bound,
            k = self.k
        );
        if let Some(e) = &self.erdos {
            s += &format!(
                "first-moment threshold {} vs k 2^(k/2)/(sqrt(2) e) = {}: ratio {}\n",
                e.threshold_n,
                float(e.reference),
                float(e.ratio)
            );
        }
        for (name, r) in [("Var/E^2", &self.chebyshev), ("Var/E", &self.var_mean)] {
            if let Some(r) = r {
                s += &format!(
                    "{name} at n = {}: {} ~ {} (reference {}, exact-constant reference {})\n",
                    r.n,
                    frac(&r.ratio),
                    float(r.ratio_f64),
                    float(r.reference),
                    float(r.reference_exact_constant)
                );
            }
        }
        s
    }

    fn csv(&self) -> String {
        csv_rows(
            "m,threshold_n,improves_on_first_moment,implied_bound",
            self.reports.iter().map(|r| {
                let m = match r.method {
                    ramsey_moments::bounds::BoundMethod::Bonferroni { m } => m,
                    _ => 1,
                };
                vec![
                    m.to_string(),
                    r.threshold_n.map_or(String::new(), |n| n.to_string()),
                    r.improves_on_first_moment
                        .map_or(String::new(), |b| b.to_string()),
                    r.implied_bound.clone(),
                ]
            }),
        )
    }
}

pub fn bounds(a: &BoundsArgs, s: &Settings) -> Result<BoundsOutput, CliError> {
    check_k(a.k)?;
    if a.m.is_empty() {
        return Err(usage("--m needs at least one order"));
    }
    if a.n.is_some() && !a.chebyshev {
        return Err(usage("--n is only used with --chebyshev"));
    }
    let top = *a.m.iter().max().unwrap();
    let table = MomentTable::compute(a.k, top.max(1), &s.engine())?;
    let reports =
        a.m.iter()
            .map(|&m| bonferroni_threshold_from_table(&table, m))
            .collect::<ramsey_moments::Result<Vec<_>>>()?;
    let (chebyshev, var_mean) = match (a.chebyshev, a.n) {
        (true, Some(n)) => (
            Some(chebyshev_ratio(a.k, n, &s.engine())?),
            if a.k >= 3 {
                Some(var_mean_ratio(a.k, n, &s.engine())?)
            } else {
                None
            },
        ),
        _ => (None, None),
    };
    Ok(BoundsOutput {
        k: a.k,
        reports,
        first_moment_threshold: first_moment_threshold(a.k)?,
        upper_bound: ramsey_upper_bound(a.k).to_string(),
        erdos: if a.k >= 3 {
            Some(erdos_asymptotic_check(a.k)?)
        } else {
            None
        },
        chebyshev,
        var_mean,
    })
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Serialize)]
pub struct SimulateOutput {
    pub report: SimulationReport,
    pub fits: Vec<FitReport>,
}

impl Render for SimulateOutput {
    fn pretty(&self) -> String {
        let r = &self.report;
        let mut s = format!(
            "n = {}, k = {}, {} samples, seed {} ({}), {:.3} s\nmean = {}\nvariance = {}\n",
            r.n,
            r.k,
            r.samples,
            r.seed,
            r.rng,
            r.elapsed_seconds,
            float(r.mean()),
            float(r.moments.variance())
        );
        for p in 3..=5 {
            s += &format!(
                "central moment {p} = {}\n",
                float(r.moments.central_moment(p))
            );
        }
        s += &format!("{:>8} {:>12}\n", "value", "count");
        for (v, c) in &r.histogram {
            s += &format!("{v:>8} {c:>12}\n");
        }
        for f in &self.fits {
            s += &format!(
                "fit {:?}: feasible {}, chi2 {} on {} df, p {}, log-likelihood {}",
                f.model,
                f.feasible,
                opt_float(f.chi_square),
                f.degrees_of_freedom.map_or("-".into(), |d| d.to_string()),
                opt_float(f.p_value),
                opt_float(f.log_likelihood)
            );
            if let Some(n) = &f.note {
                s += &format!(" ({n})");
            }
            s.push('\n');
        }
        s
    }

    fn csv(&self) -> String {
        csv_rows(
            "value,count",
            self.report
                .histogram
                .iter()
                .map(|(v, c)| vec![v.to_string(), c.to_string()]),
        )
    }
}

pub fn simulate(a: &SimulateArgs, s: &Settings) -> Result<SimulateOutput, CliError> {
    let seed = s
        .seed
        .ok_or_else(|| usage("simulate needs --seed (or seed=... in the config file)"))?;
    let cfg = SimulationConfig {
        subset_cost_cap: s.cap_subset_cost,
        ..SimulationConfig::new(a.samples, seed).with_workers(a.workers)
    };
    let report = simulator::run(a.n, a.k, &cfg)?;
    let models: Vec<Model> = a
        .fit
        .iter()
        .map(|m| match m {
            ModelArg::Delaporte => Model::Delaporte,
            ModelArg::DelaporteBigN => Model::DelaporteBigN,
            ModelArg::Poisson => Model::Poisson,
            ModelArg::Normal => Model::Normal,
        })
        .collect();
    let fits = if models.is_empty() {
        Vec::new()
    } else {
        fit_and_compare(&report, &models)?
    };
    Ok(SimulateOutput { report, fits })
}
