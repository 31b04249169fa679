use num_rational::BigRational;
use statrs::function::gamma::ln_gamma;

use super::DelaporteParams;
use crate::arith::{binomial, choose2, pow2, rational_to_f64};
use crate::error::{Error, Result};

/// Where the big-n regime starts: `n >= constant * k * 2^{k/2}`.
///
/// Two constants circulate, `2/e` and `sqrt(2)/e`; the default is `2/e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeBoundary {
    pub constant: f64,
}

impl Default for RegimeBoundary {
    fn default() -> Self {
        RegimeBoundary {
            constant: 2.0 / std::f64::consts::E,
        }
    }
}

impl RegimeBoundary {
    pub fn min_n(&self, k: u32) -> f64 {
        self.constant * k as f64 * 2f64.powf(k as f64 / 2.0)
    }

    pub fn is_big(&self, n: f64, k: u32) -> bool {
        n >= self.min_n(k)
    }
}

/// `E[X] = (n)_k / k! * 2^{1 - C(k,2)}` for real `n`.
pub fn expected_count(n: f64, k: u32) -> f64 {
    let falling: f64 = (0..k).map(|i| n - i as f64).product();
    falling / (1..=k).map(f64::from).product::<f64>() * 2f64.powi(1 - choose2(k as u64) as i32)
}

/// Delaporte parameters from matching leading terms of the central moments:
/// `alpha = n/2`, `beta = n^{k-2} / (2^{C(k,2)-1} (k-3)!)` and
/// `lambda = n^k/(k! 2^{C(k,2)-1}) [1 - k(k-1)(k-2)/(2n)]`.
pub fn fit_bign(n: f64, k: u32) -> Result<DelaporteParams> {
    if k < 3 {
        return Err(Error::domain(format!("big-n fit needs k >= 3, got {k}")));
    }
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::domain(format!("n must be positive, got {n}")));
    }
    let kf = k as f64;
    let c = choose2(k as u64) as f64;
    let ln2 = std::f64::consts::LN_2;
    let alpha = n / 2.0;
    let beta = ((kf - 2.0) * n.ln() - (c - 1.0) * ln2 - ln_gamma(kf - 2.0)).exp();
    let lead = (kf * n.ln() - ln_gamma(kf + 1.0) - (c - 1.0) * ln2).exp();
    let lambda = lead * (1.0 - kf * (kf - 1.0) * (kf - 2.0) / (2.0 * n));
    if lambda < 0.0 {
        return Err(Error::Regime(format!(
            "big-n fit gives lambda = {lambda:.6e} < 0 at n = {n}, k = {k}; need n >= k(k-1)(k-2)/2 = {}",
            k * (k - 1) * (k - 2) / 2
        )));
    }
    DelaporteParams::new(lambda, alpha, beta)
}

/// `C(n,k) / 2^{C(k,2)-1}`, which is exactly `E[X]`.
pub fn poisson_rate_smalln_exact(n: u64, k: u32) -> BigRational {
    BigRational::from_integer(binomial(n, k as i64)) * pow2(1 - choose2(k as u64) as i64)
}

pub fn poisson_rate_smalln(n: u64, k: u32) -> f64 {
    rational_to_f64(&poisson_rate_smalln_exact(n, k))
}

#[cfg(test)]
mod tests {
    use super::super::delaporte_poisson_gap;
    use super::*;
    use crate::arith::{int, ratio};

    #[test]
    fn small_n_rate() {
        assert_eq!(poisson_rate_smalln_exact(6, 3), int(5));
        assert_eq!(poisson_rate_smalln(6, 3), 5.0);
        assert_eq!(poisson_rate_smalln_exact(4, 4), ratio(1, 32));
        assert_eq!(expected_count(6.0, 3), 5.0);
    }

    #[test]
    fn big_n_fit() {
        let p = fit_bign(200.0, 4).unwrap();
        assert_eq!(p.alpha, 100.0);
        // beta = n^2 / 2^5, lambda + alpha beta = n^4 / (24 * 32)
        assert!((p.beta - 1250.0).abs() < 1e-9);
        assert!((p.mean() / (200f64.powi(4) / 768.0) - 1.0).abs() < 1e-12);
        assert!(matches!(fit_bign(11.0, 4), Err(Error::Regime(_))));
        assert!(fit_bign(12.0, 4).is_ok());
        assert!(fit_bign(100.0, 2).is_err());
    }

    #[test]
    fn gap_bound_at_k30() {
        let k = 30u32;
        let n = k as f64 / std::f64::consts::E * 2f64.powi(15);
        let gap = delaporte_poisson_gap(&fit_bign(n, k).unwrap());
        let bound =
            std::f64::consts::E.powi(3) / std::f64::consts::PI * (k * k) as f64 / 2f64.powi(15);
        assert!(gap < bound, "{gap} vs {bound}");
    }

    #[test]
    fn regime_boundary() {
        let b = RegimeBoundary::default();
        assert!(b.is_big(b.min_n(10) + 1.0, 10));
        assert!(!b.is_big(b.min_n(10) - 1.0, 10));
    }
}
