//! The identity suite behind `verify`. Each check returns a detail string on
//! success and an expected/actual description on failure.

use std::time::Instant;

use ramsey_moments::arith::{ratio, BigInt};
use ramsey_moments::bounds::{bonferroni_polynomial, bonferroni_threshold_from_table};
use ramsey_moments::distributions::{
    delaporte_central_moment, delaporte_central_moment_series, delaporte_p_zero, delaporte_pmf,
    delaporte_pmf_vector, negbin_pmf, poisson_alternating_sum, poisson_pmf, poisson_pmf_vector,
    poisson_raw_moment, DelaporteParams,
};
use ramsey_moments::moments::{
    leading_central_reference, raw_moment, second_moment_reference, EngineConfig, MomentTable,
};
use ramsey_moments::oracle::{
    exact_distribution, exact_distribution_by_symmetry, oracle_moment, oracle_p_zero, OracleConfig,
};
use ramsey_moments::simulator::{run, SimulationConfig};
use serde::Serialize;

use crate::render::{csv_rows, Render};
use crate::settings::Settings;

/// Soft budget for the whole suite; exceeding it only prints a warning.
pub const SUITE_BUDGET_SECONDS: f64 = 300.0;

type CheckResult = Result<String, String>;

pub struct Check {
    pub name: &'static str,
    pub about: &'static str,
    run: fn(&Context) -> CheckResult,
}

pub struct Context {
    /// Verify runs fixed workloads, so the profile-node cap is lifted.
    engine: EngineConfig,
    seed: u64,
}

pub const CHECKS: &[Check] = &[
    Check {
        name: "second-moment",
        about: "E[X^2] for k = 3, 4 equals the overlap-sum closed form; E[X^2] at (6,3) is 115/4",
        run: second_moment,
    },
    Check {
        name: "engine-oracle",
        about: "engine moments equal exhaustive enumeration at (5,3), (6,3), (6,4) for r <= 5 and (7,3) for r <= 4",
        run: engine_oracle,
    },
    Check {
        name: "oracle-symmetry",
        about: "enumerating half the colorings and doubling gives the same distribution",
        run: oracle_symmetry,
    },
    Check {
        name: "leading-terms",
        about: "leading terms of central moments m = 2..5 for k = 4, 5",
        run: leading_terms,
    },
    Check {
        name: "delaporte",
        about: "Delaporte pmf is the Poisson-negative binomial convolution, sums to 1, and P(D=0) has its closed form",
        run: delaporte,
    },
    Check {
        name: "delaporte-moments",
        about: "closed-form Delaporte central moments m <= 4 match series sums on a 27-point grid",
        run: delaporte_moments,
    },
    Check {
        name: "poisson-series",
        about: "alternating series for exp(-lambda) and Stirling-converted Poisson moments",
        run: poisson_series,
    },
    Check {
        name: "bonferroni-bracketing",
        about: "odd and even truncations bracket the exact P(X=0) for n <= 6, m <= 5",
        run: bracketing,
    },
    Check {
        name: "erdos-threshold",
        about: "k = 5, m = 1 threshold is n = 11",
        run: erdos,
    },
    Check {
        name: "no-improvement",
        about: "for k = 5..8 the m = 3 and m = 5 thresholds do not exceed the m = 1 threshold (the slow one)",
        run: no_improvement,
    },
    Check {
        name: "simulation-determinism",
        about: "simulated histograms do not depend on the worker count",
        run: simulation_determinism,
    },
];

#[derive(Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct VerifyOutput {
    pub checks: Vec<CheckOutcome>,
    pub passed: usize,
    pub failed: usize,
    pub elapsed_ms: f64,
}

impl Render for VerifyOutput {
    fn pretty(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s += &format!(
                "{} {:<24} {:>10.1} ms  {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.elapsed_ms,
                c.detail
            );
        }
        s += &format!(
            "{} passed, {} failed ({:.1} s)\n",
            self.passed,
            self.failed,
            self.elapsed_ms / 1e3
        );
        s
    }

    fn csv(&self) -> String {
        csv_rows(
            "name,passed,elapsed_ms,detail",
            self.checks.iter().map(|c| {
                vec![
                    c.name.clone(),
                    c.passed.to_string(),
                    format!("{:.3}", c.elapsed_ms),
                    c.detail.clone(),
                ]
            }),
        )
    }
}

pub fn lookup(names: &[String]) -> Result<Vec<&'static Check>, String> {
    if names.is_empty() {
        return Ok(CHECKS.iter().collect());
    }
    names
        .iter()
        .map(|n| {
            CHECKS.iter().find(|c| c.name == n).ok_or_else(|| {
                let known: Vec<_> = CHECKS.iter().map(|c| c.name).collect();
                format!("unknown check {n:?}; known checks: {}", known.join(", "))
            })
        })
        .collect()
}

pub fn run_checks(checks: &[&Check], s: &Settings) -> VerifyOutput {
    let ctx = Context {
        engine: EngineConfig {
            precision_bits: s.precision,
            ..EngineConfig::default().with_node_cap(u64::MAX)
        },
        seed: s.seed.unwrap_or(20_240_601),
    };
    let start = Instant::now();
    let checks: Vec<CheckOutcome> = checks
        .iter()
        .map(|c| {
            let t = Instant::now();
            let r = (c.run)(&ctx);
            CheckOutcome {
                name: c.name.to_string(),
                passed: r.is_ok(),
                detail: r.unwrap_or_else(|e| e),
                elapsed_ms: t.elapsed().as_secs_f64() * 1e3,
            }
        })
        .collect();
    let failed = checks.iter().filter(|c| !c.passed).count();
    VerifyOutput {
        passed: checks.len() - failed,
        failed,
        checks,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn core<T>(r: ramsey_moments::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn expect(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn second_moment(ctx: &Context) -> CheckResult {
    for k in [3, 4] {
        let got = core(raw_moment(k, 2, &ctx.engine))?;
        let want = core(second_moment_reference(k))?;
        expect(got == want, || {
            format!("k = {k}: expected {want}, got {got}")
        })?;
    }
    let v = core(raw_moment(3, 2, &ctx.engine))?.eval_i64(6);
    expect(v == ratio(115, 4), || {
        format!("E[X^2] at (6,3): expected 115/4, got {v}")
    })?;
    Ok("k = 3, 4 match; E[X^2](6,3) = 115/4".into())
}

fn engine_oracle(ctx: &Context) -> CheckResult {
    let mut compared = 0;
    for (n, k, top) in [(5, 3, 5), (6, 3, 5), (6, 4, 5), (7, 3, 4)] {
        let d = core(exact_distribution(n, k, &OracleConfig::default()))?;
        let table = core(MomentTable::compute(k, top, &ctx.engine))?;
        for r in 1..=top {
            let got = core(table.raw(r))?.eval_i64(n as i64);
            let want = oracle_moment(&d, r);
            expect(got == want, || {
                format!("(n,k,r) = ({n},{k},{r}): oracle {want}, engine {got}")
            })?;
            compared += 1;
        }
    }
    Ok(format!("{compared} moments equal"))
}

fn oracle_symmetry(_: &Context) -> CheckResult {
    for (n, k) in [(5, 3), (6, 3), (6, 4)] {
        let full = core(exact_distribution(n, k, &OracleConfig::default()))?;
        let half = core(exact_distribution_by_symmetry(
            n,
            k,
            &OracleConfig::default(),
        ))?;
        expect(full == half, || format!("({n},{k}): histograms differ"))?;
    }
    Ok("3 histograms equal".into())
}

fn leading_terms(ctx: &Context) -> CheckResult {
    for k in [4, 5] {
        let table = core(MomentTable::compute(k, 5, &ctx.engine))?;
        for m in 2..=5 {
            let got = core(table.central(m))?.leading_term();
            let want = core(leading_central_reference(k, m))?;
            expect(got.as_ref() == Some(&want), || {
                format!(
                    "k = {k}, m = {m}: expected {}/n^{}, got {got:?}",
                    want.1, want.0
                )
            })?;
        }
    }
    Ok("8 leading terms match".into())
}

fn grid() -> Vec<DelaporteParams> {
    let mut out = Vec::new();
    for lambda in [0.0, 1.0, 5.0] {
        for alpha in [0.5, 2.0, 10.0] {
            for beta in [0.1, 0.5, 2.0] {
                out.push(DelaporteParams {
                    lambda,
                    alpha,
                    beta,
                });
            }
        }
    }
    out
}

fn delaporte(_: &Context) -> CheckResult {
    let mut worst: f64 = 0.0;
    for p in grid() {
        let total = core(delaporte_pmf_vector(&p))?.total();
        expect((total - 1.0).abs() <= 1e-12, || {
            format!("{p:?}: pmf sums to {total}")
        })?;
        let closed = (-p.lambda).exp() * (1.0 + p.beta).powf(-p.alpha);
        let zero = delaporte_p_zero(&p);
        expect((zero - closed).abs() <= 1e-12 * closed, || {
            format!("{p:?}: P(D=0) {zero} vs {closed}")
        })?;
        for j in 0..=50u64 {
            let direct = core(delaporte_pmf(&p, j))?;
            let conv: f64 = (0..=j)
                .map(|i| Ok(negbin_pmf(p.alpha, p.beta, i)? * poisson_pmf(p.lambda, j - i)?))
                .sum::<ramsey_moments::Result<f64>>()
                .map_err(|e| e.to_string())?;
            let err = (direct - conv).abs() / conv.max(f64::MIN_POSITIVE);
            if conv > 1e-300 {
                worst = worst.max(err);
            }
            expect(conv <= 1e-300 || err <= 1e-10, || {
                format!("{p:?} j = {j}: pmf {direct}, convolution {conv}")
            })?;
        }
    }
    Ok(format!(
        "27 parameter points, worst relative convolution error {worst:.1e}"
    ))
}

fn delaporte_moments(_: &Context) -> CheckResult {
    let mut worst: f64 = 0.0;
    for p in grid() {
        for m in 2..=4 {
            let c = core(delaporte_central_moment(&p, m))?;
            let s = core(delaporte_central_moment_series(&p, m))?;
            let err = (c - s).abs() / c.abs();
            worst = worst.max(err);
            expect(err <= 1e-9, || {
                format!("{p:?} m = {m}: closed form {c}, series {s}")
            })?;
        }
    }
    Ok(format!("worst relative error {worst:.1e}"))
}

fn poisson_series(_: &Context) -> CheckResult {
    for lambda in [0.5, 2.0, 10.0] {
        let s = core(poisson_alternating_sum(lambda, 100))?;
        let e = (-lambda).exp();
        expect((s - e).abs() <= 1e-10, || {
            format!("lambda = {lambda}: series {s}, exp(-lambda) {e}")
        })?;
        let v = core(poisson_pmf_vector(lambda))?;
        for m in 0..=6 {
            let a = v.raw_moment(m);
            let b = poisson_raw_moment(lambda, m);
            expect((a - b).abs() <= 1e-9 * b, || {
                format!("lambda = {lambda}, m = {m}: series {a}, Stirling {b}")
            })?;
        }
    }
    Ok("lambda in {0.5, 2, 10}".into())
}

fn bracketing(ctx: &Context) -> CheckResult {
    let mut cases = 0;
    for k in 2..=6u32 {
        let table = core(MomentTable::compute(k, 5, &ctx.engine))?;
        for n in k..=6 {
            let d = core(exact_distribution(n, k, &OracleConfig::default()))?;
            let p0 = oracle_p_zero(&d);
            for m in 0..=5 {
                let s = core(bonferroni_polynomial(&table, m))?.eval(&BigInt::from(n));
                let ok = if m % 2 == 1 { s <= p0 } else { s >= p0 };
                expect(ok, || {
                    format!("(n,k,m) = ({n},{k},{m}): partial sum {s}, P(X=0) = {p0}")
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} truncations bracket P(X=0)"))
}

fn erdos(ctx: &Context) -> CheckResult {
    let table = core(MomentTable::compute(5, 1, &ctx.engine))?;
    let r = core(bonferroni_threshold_from_table(&table, 1))?;
    expect(r.threshold_n == Some(11), || {
        format!("expected 11, got {:?}", r.threshold_n)
    })?;
    Ok(r.implied_bound)
}

fn no_improvement(ctx: &Context) -> CheckResult {
    let mut found = Vec::new();
    for k in 5..=8 {
        let table = core(MomentTable::compute(k, 5, &ctx.engine))?;
        let base = core(bonferroni_threshold_from_table(&table, 1))?.threshold_n;
        let mut row = vec![format!("k={k}: m1 {}", base.unwrap_or(0))];
        for m in [3, 5] {
            let r = core(bonferroni_threshold_from_table(&table, m))?;
            let better = match (r.threshold_n, base) {
                (Some(a), Some(b)) => a > b,
                (Some(_), None) => true,
                _ => false,
            };
            expect(!better, || {
                format!(
                    "k = {k}, m = {m}: threshold {:?} beats m = 1 threshold {base:?}",
                    r.threshold_n
                )
            })?;
            row.push(format!("m{m} {}", r.threshold_n.unwrap_or(0)));
        }
        found.push(row.join(" "));
    }
    Ok(found.join("; "))
}

fn simulation_determinism(ctx: &Context) -> CheckResult {
    let cfg = SimulationConfig::new(20_000, ctx.seed);
    let one = core(run(6, 3, &cfg.with_workers(1)))?;
    let two = core(run(6, 3, &cfg.with_workers(2)))?;
    expect(one.same_results(&two), || {
        "workers 1 and 2 gave different reports".into()
    })?;
    Ok(format!("seed {}, mean {:.4}", ctx.seed, one.mean()))
}
