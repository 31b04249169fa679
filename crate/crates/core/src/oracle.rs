//! Exact distribution of X for small n by enumerating every 2-coloring of K_n.
//!
//! Edges are numbered in lexicographic order of `(u, v)`, `u < v`, and a
//! coloring is the integer whose bit `e` is the color of edge `e`.

use std::collections::BTreeMap;
use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::choose2;
use crate::error::{Error, Result};

/// Default largest n for exhaustive enumeration.
pub const DEFAULT_ORACLE_MAX_N: u32 = 7;
/// Largest n the oracle will ever enumerate (2^28 colorings).
pub const ORACLE_HARD_MAX_N: u32 = 8;

const CHUNK: u64 = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest accepted n. Values above [`DEFAULT_ORACLE_MAX_N`] are an explicit override.
    pub max_n: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_n: DEFAULT_ORACLE_MAX_N,
        }
    }
}

/// Histogram of X over all `2^C(n,2)` colorings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    pub n: u32,
    pub k: u32,
    /// Value of X to the number of colorings attaining it; zero counts are omitted.
    pub counts: BTreeMap<u64, BigInt>,
    pub denominator: BigInt,
}

impl ExactDistribution {
    pub fn probability(&self, i: u64) -> BigRational {
        let c = self.counts.get(&i).cloned().unwrap_or_default();
        BigRational::new(c, self.denominator.clone())
    }

    pub fn max_value(&self) -> u64 {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    /// Probabilities as floats, indexed by value `0..=max_value`.
    pub fn pmf_f64(&self) -> Vec<f64> {
        (0..=self.max_value())
            .map(|i| crate::arith::rational_to_f64(&self.probability(i)))
            .collect()
    }
}

/// Bit masks of the edges inside every k-subset of `{0..n-1}`.
pub(crate) fn subset_edge_masks(n: u32, k: u32) -> Vec<u64> {
    let mut index = [[0u32; 16]; 16];
    let mut e = 0;
    for u in 0..n as usize {
        for v in (u + 1)..n as usize {
            index[u][v] = e;
            e += 1;
        }
    }
    let mut masks = Vec::new();
    let mut subset: Vec<usize> = (0..k as usize).collect();
    loop {
        let mut m = 0u64;
        for (x, &u) in subset.iter().enumerate() {
            for &v in &subset[x + 1..] {
                m |= 1 << index[u][v];
            }
        }
        masks.push(m);
        // next combination in lexicographic order
        let Some(i) = (0..k as usize)
            .rev()
            .find(|&i| subset[i] < n as usize - k as usize + i)
        else {
            break;
        };
        subset[i] += 1;
        for j in i + 1..k as usize {
            subset[j] = subset[j - 1] + 1;
        }
    }
    masks
}

fn check(n: u32, k: u32, cfg: &OracleConfig) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::domain(format!(
            "oracle needs 2 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    if cfg.max_n > ORACLE_HARD_MAX_N {
        return Err(Error::range(
            "oracle cap",
            format!(
                "cap {} exceeds the hard limit {ORACLE_HARD_MAX_N}",
                cfg.max_n
            ),
        ));
    }
    if n > cfg.max_n {
        let e = choose2(n as u64);
        return Err(Error::ResourceLimit(format!(
            "exhaustive oracle at n = {n} needs 2^{e} = {} colorings; cap is n <= {}",
            BigInt::one() << e,
            cfg.max_n
        )));
    }
    Ok(())
}

fn histogram(masks: &[u64], range: Range<u64>) -> Vec<u64> {
    let mut hist = vec![0u64; masks.len() + 1];
    let chunks: Vec<u64> = (range.start..range.end).step_by(CHUNK as usize).collect();
    let parts: Vec<Vec<u64>> = chunks
        .par_iter()
        .map(|&start| {
            let mut h = vec![0u64; masks.len() + 1];
            for c in start..(start + CHUNK).min(range.end) {
                let x = masks
                    .iter()
                    .filter(|&&m| {
                        let s = c & m;
                        s == 0 || s == m
                    })
                    .count();
                h[x] += 1;
            }
            h
        })
        .collect();
    for p in parts {
        for (a, b) in hist.iter_mut().zip(p) {
            *a += b;
        }
    }
    hist
}

fn build(n: u32, k: u32, hist: &[u64], factor: u64) -> ExactDistribution {
    let counts = hist
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (i as u64, BigInt::from(c) * factor))
        .collect();
    ExactDistribution {
        n,
        k,
        counts,
        denominator: BigInt::one() << choose2(n as u64),
    }
}

/// Exact histogram of X over all colorings of K_n.
pub fn exact_distribution(n: u32, k: u32, cfg: &OracleConfig) -> Result<ExactDistribution> {
    check(n, k, cfg)?;
    let masks = subset_edge_masks(n, k);
    let hist = histogram(&masks, 0..1u64 << choose2(n as u64));
    Ok(build(n, k, &hist, 1))
}

/// Same histogram from the colorings whose first edge is color 0, doubled.
/// Agrees with [`exact_distribution`] because complementing a coloring keeps X.
pub fn exact_distribution_by_symmetry(
    n: u32,
    k: u32,
    cfg: &OracleConfig,
) -> Result<ExactDistribution> {
    check(n, k, cfg)?;
    let masks = subset_edge_masks(n, k);
    // colorings with bit 0 clear are exactly the even integers; shift it out
    let shifted: Vec<u64> = masks.iter().map(|m| m >> 1).collect();
    let first_edge: Vec<bool> = masks.iter().map(|m| m & 1 != 0).collect();
    let half = 1u64 << (choose2(n as u64) - 1);
    let mut hist = vec![0u64; masks.len() + 1];
    let parts: Vec<Vec<u64>> = (0..half)
        .step_by(CHUNK as usize)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&start| {
            let mut h = vec![0u64; masks.len() + 1];
            for c in start..(start + CHUNK).min(half) {
                let x = shifted
                    .iter()
                    .zip(&first_edge)
                    .filter(|&(&m, &has0)| {
                        let s = c & m;
                        // edge 0 is color 0, so only the all-zero pattern can be monochromatic
                        s == 0 || (!has0 && s == m)
                    })
                    .count();
                h[x] += 1;
            }
            h
        })
        .collect();
    for p in parts {
        for (a, b) in hist.iter_mut().zip(p) {
            *a += b;
        }
    }
    Ok(build(n, k, &hist, 2))
}

/// `E[X^r] = sum_i i^r P(X = i)`, exact.
pub fn oracle_moment(d: &ExactDistribution, r: u32) -> BigRational {
    let num = d.counts.iter().fold(BigInt::zero(), |acc, (&i, c)| {
        acc + BigInt::from(i).pow(r) * c
    });
    BigRational::new(num, d.denominator.clone())
}

pub fn oracle_p_zero(d: &ExactDistribution) -> BigRational {
    d.probability(0)
}
