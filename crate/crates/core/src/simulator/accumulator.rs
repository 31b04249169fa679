use serde::{Deserialize, Serialize};

/// Highest central-moment order tracked.
pub const MAX_ORDER: usize = 5;

const BINOM: [[f64; MAX_ORDER + 1]; MAX_ORDER + 1] = [
    [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0, 0.0],
    [1.0, 5.0, 10.0, 10.0, 5.0, 1.0],
];

/// Count, mean and `sum (x - mean)^p` for `p = 2..=5`, merged pairwise.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MomentAccumulator {
    pub count: u64,
    pub mean: f64,
    /// `central_sums[p]` is `sum (x - mean)^p`; entries 0 and 1 are unused.
    pub central_sums: [f64; MAX_ORDER + 1],
}

impl MomentAccumulator {
    pub fn push(&mut self, x: f64) {
        self.merge(&MomentAccumulator {
            count: 1,
            mean: x,
            central_sums: [0.0; MAX_ORDER + 1],
        });
    }

    /// Combines two disjoint samples. Not commutative in floating point, so
    /// callers merge in a fixed order.
    pub fn merge(&mut self, other: &MomentAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let sa = -nb * delta / n;
        let sb = na * delta / n;
        let a = self.sums_with_count();
        let b = other.sums_with_count();
        let mut out = [0.0; MAX_ORDER + 1];
        for p in 2..=MAX_ORDER {
            let mut total = 0.0;
            for j in 0..=p {
                total +=
                    BINOM[p][j] * (a[p - j] * sa.powi(j as i32) + b[p - j] * sb.powi(j as i32));
            }
            out[p] = total;
        }
        self.count += other.count;
        self.mean += delta * nb / n;
        self.central_sums = out;
    }

    fn sums_with_count(&self) -> [f64; MAX_ORDER + 1] {
        let mut s = self.central_sums;
        s[0] = self.count as f64;
        s[1] = 0.0;
        s
    }

    /// `sum (x - mean)^p / count`.
    pub fn central_moment(&self, p: usize) -> f64 {
        match p {
            0 => 1.0,
            1 => 0.0,
            _ => self.central_sums[p] / self.count as f64,
        }
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        self.central_moment(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(xs: &[f64], p: i32) -> f64 {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m).powi(p)).sum::<f64>() / xs.len() as f64
    }

    #[test]
    fn streaming_matches_two_pass() {
        let xs: Vec<f64> = (0..500)
            .map(|i| ((i * 37) % 23) as f64 + 0.5 * (i % 3) as f64)
            .collect();
        let mut acc = MomentAccumulator::default();
        xs.iter().for_each(|&x| acc.push(x));
        assert_eq!(acc.count, 500);
        for p in 2..=5 {
            let d = direct(&xs, p);
            assert!(
                (acc.central_moment(p as usize) - d).abs() <= 1e-9 * d.abs().max(1.0),
                "p={p}"
            );
        }
        let mut left = MomentAccumulator::default();
        let mut right = MomentAccumulator::default();
        xs[..123].iter().for_each(|&x| left.push(x));
        xs[123..].iter().for_each(|&x| right.push(x));
        left.merge(&right);
        for p in 2..=5 {
            assert!(
                (left.central_moment(p) - acc.central_moment(p)).abs()
                    <= 1e-9 * acc.central_moment(p).abs().max(1.0)
            );
        }
    }
}
