use num_rational::BigRational;
use num_traits::{One, Zero};
use ramsey_moments::arith::{binomial, int, ratio, Basis, BigInt, RationalPolynomial};
use ramsey_moments::moments::{
    central_moment, factorial_moment_by_profiles, first_moment_closed_form,
    leading_central_reference, raw_leading_coefficient, raw_moment, raw_moment_by_profiles,
    raw_moment_with_count, second_moment_reference, sum_over_profiles, EngineConfig, MomentTable,
};
use ramsey_moments::Error;

fn cfg() -> EngineConfig {
    EngineConfig::default()
}

fn mono(terms: &[(u32, i64, i64)]) -> RationalPolynomial {
    RationalPolynomial::from_terms(
        Basis::Monomial,
        terms.iter().map(|&(d, a, b)| (d, ratio(a, b))),
    )
}

#[test]
fn second_moment_of_triangles_expanded() {
    // Monomial coefficients of the four-term k = 3 sum, expanded with a CAS.
    let expected = mono(&[
        (6, 1, 576),
        (5, -1, 96),
        (4, 13, 576),
        (3, 1, 96),
        (2, -25, 288),
        (1, 1, 16),
    ]);
    assert_eq!(raw_moment(3, 2, &cfg()).unwrap(), expected);
}

#[test]
fn second_moment_of_k4_expanded() {
    let expected = mono(&[
        (8, 1, 589824),
        (7, -1, 49152),
        (6, 29, 294912),
        (5, 1, 4096),
        (4, -1943, 589824),
        (3, 457, 49152),
        (2, -515, 49152),
        (1, 17, 4096),
    ]);
    assert_eq!(raw_moment(4, 2, &cfg()).unwrap(), expected);
}

#[test]
fn second_moment_matches_general_sum() {
    for k in 2..=9 {
        assert_eq!(
            raw_moment(k, 2, &cfg()).unwrap(),
            second_moment_reference(k).unwrap(),
            "k={k}"
        );
    }
    let n = BigInt::from(10);
    assert_eq!(
        raw_moment(5, 2, &cfg()).unwrap().eval(&n),
        second_moment_reference(5).unwrap().eval(&n)
    );
}

#[test]
fn first_moment_is_scaled_binomial() {
    for k in 2..=8 {
        let m = raw_moment(k, 1, &cfg()).unwrap();
        assert_eq!(m, first_moment_closed_form(k));
        for n in 0..15i64 {
            let expected = BigRational::new(
                binomial(n as u64, k as i64) * 2,
                BigInt::one() << (k * (k - 1) / 2),
            );
            assert_eq!(m.eval_i64(n), expected);
        }
    }
}

#[test]
fn values_at_six_vertices() {
    let t = MomentTable::compute(3, 2, &cfg()).unwrap();
    assert_eq!(t.raw(1).unwrap().eval_i64(6), int(5));
    assert_eq!(t.raw(2).unwrap().eval_i64(6), ratio(115, 4));
    assert_eq!(t.factorial(2).unwrap().eval_i64(6), ratio(95, 4));
    assert_eq!(t.binomial(2).unwrap().eval_i64(6), ratio(95, 8));
    assert_eq!(t.binomial(0).unwrap(), &RationalPolynomial::one());
    assert_eq!(t.binomial(1).unwrap(), &t.mean);
    assert_eq!(t.factorial(1).unwrap(), &t.mean);
    assert_eq!(t.central(2).unwrap().eval_i64(6), ratio(15, 4));
}

#[test]
fn fast_and_profile_routes_agree() {
    for (k, r) in [(2, 3), (3, 3), (3, 4), (4, 3), (5, 3), (2, 5)] {
        assert_eq!(
            raw_moment(k, r, &cfg()).unwrap(),
            raw_moment_by_profiles(k, r, u64::MAX).unwrap(),
            "k={k} r={r}"
        );
    }
}

#[test]
fn degree_law() {
    for (k, rmax) in [(3, 5), (4, 4), (5, 3), (6, 3)] {
        for r in 1..=rmax {
            let p = raw_moment(k, r, &cfg()).unwrap();
            let (d, c) = p.leading_term().unwrap();
            assert_eq!(d, r * k);
            assert_eq!(c, raw_leading_coefficient(k, r), "k={k} r={r}");
        }
    }
}

#[test]
fn factorial_moment_paths_agree() {
    for k in 2..=4 {
        for r in 1..=3 {
            let t = MomentTable::compute(k, r, &cfg()).unwrap();
            let direct = factorial_moment_by_profiles(k, r, u64::MAX).unwrap();
            assert_eq!(t.factorial(r).unwrap(), &direct, "k={k} r={r}");
        }
    }
}

#[test]
fn equal_subset_profiles_account_for_the_difference() {
    // E[X^2] - E[(X)_2] = E[X]: the profiles with S_1 = S_2.
    for k in 3..=5 {
        let t = MomentTable::compute(k, 2, &cfg()).unwrap();
        assert_eq!(t.raw(2).unwrap() - t.factorial(2).unwrap(), t.mean.clone());
    }
}

#[test]
fn profile_completeness() {
    for (k, r) in [(2, 3), (3, 2), (3, 3), (4, 2), (3, 4)] {
        let all = sum_over_profiles(k, r, u64::MAX, |_| true, |_| int(1)).unwrap();
        let cnk = RationalPolynomial::falling_factorial(k).scale(&BigRational::new(
            1.into(),
            ramsey_moments::arith::factorial(k as u64),
        ));
        assert_eq!(all, cnk.pow(r), "k={k} r={r}");
    }
}

#[test]
fn permuted_profiles_give_same_moment() {
    let perm = [2u32, 0, 3, 1];
    let direct = raw_moment_by_profiles(3, 4, u64::MAX).unwrap();
    let permuted = sum_over_profiles(
        3,
        4,
        u64::MAX,
        |_| true,
        |p| ramsey_moments::moments::tuple_probability(&p.permuted(&perm)),
    )
    .unwrap();
    assert_eq!(direct, permuted);
}

#[test]
fn central_moment_basics() {
    for k in 3..=5 {
        assert!(central_moment(k, 1, &cfg()).unwrap().is_zero());
    }
    assert!(matches!(
        central_moment(3, 0, &cfg()),
        Err(Error::Range { .. })
    ));
}

#[test]
fn cancellation_law_and_leading_terms() {
    for k in 4..=6 {
        let max_m = if k == 6 { 4 } else { 5 };
        let t = MomentTable::compute(k, max_m, &cfg()).unwrap();
        for m in 2..=max_m {
            let lead = t.central(m).unwrap().leading_term().unwrap();
            assert_eq!(
                lead,
                leading_central_reference(k, m).unwrap(),
                "k={k} m={m}"
            );
            assert!(lead.0 < m * k);
        }
    }
}

#[test]
fn standardized_moments() {
    let t = MomentTable::compute(4, 4, &cfg()).unwrap();
    for n in [10, 50, 300] {
        assert!((t.standardized(2, n, 256).unwrap() - 1.0).abs() < 1e-15);
    }
    let c3 = t.standardized(3, 10_000, 256).unwrap();
    assert!((c3 * 100.0 / (2.0 * 2f64.sqrt()) - 1.0).abs() < 0.05);
    // X is identically zero below k, so the variance vanishes
    assert!(matches!(t.standardized(3, 3, 256), Err(Error::Domain(_))));
}

#[test]
fn node_cap_reports_resource_limit() {
    let tight = EngineConfig::default().with_node_cap(500);
    assert!(matches!(
        raw_moment(4, 4, &tight),
        Err(Error::ResourceLimit(_))
    ));
    let ok = raw_moment_with_count(4, 4, &EngineConfig::default()).unwrap();
    assert_eq!(ok.profile_count, 4079);
    let _ = BigRational::zero();
}
