use rand::RngCore;

use crate::arith::choose2;

/// A red/blue coloring of the edges of K_n. Edge `(u, v)`, `u < v`, is bit
/// `edge_index(n, u, v)` of `words`; a set bit means red.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    n: u32,
    words: Vec<u64>,
}

/// Position of edge `(u, v)` in lexicographic order of pairs.
pub fn edge_index(n: u32, u: u32, v: u32) -> usize {
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    let (n, u, v) = (n as usize, u as usize, v as usize);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

impl Coloring {
    pub fn edges(n: u32) -> usize {
        choose2(n as u64) as usize
    }

    pub fn from_fn(n: u32, mut red: impl FnMut(u32, u32) -> bool) -> Coloring {
        let mut c = Coloring {
            n,
            words: vec![0; Self::edges(n).div_ceil(64)],
        };
        for u in 0..n {
            for v in (u + 1)..n {
                if red(u, v) {
                    let e = edge_index(n, u, v);
                    c.words[e / 64] |= 1 << (e % 64);
                }
            }
        }
        c
    }

    /// Fills the edge bits from consecutive `next_u64` words, low bit first.
    pub fn random(n: u32, rng: &mut impl RngCore) -> Coloring {
        let edges = Self::edges(n);
        let mut words: Vec<u64> = (0..edges.div_ceil(64)).map(|_| rng.next_u64()).collect();
        if edges % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (edges % 64)) - 1;
            }
        }
        Coloring { n, words }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_red(&self, u: u32, v: u32) -> bool {
        let e = edge_index(self.n, u, v);
        self.words[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn complement(&self) -> Coloring {
        Coloring::from_fn(self.n, |u, v| !self.is_red(u, v))
    }
}

/// Number of monochromatic k-subsets, by a lexicographic walk over
/// k-combinations that tests each new vertex against the current prefix.
pub fn sample_count(n: u32, k: u32, coloring: &Coloring) -> u64 {
    assert_eq!(coloring.n(), n, "coloring is for a different n");
    if k > n {
        return 0;
    }
    if k <= 1 {
        return crate::arith::binomial(n as u64, k as i64)
            .try_into()
            .unwrap_or(u64::MAX);
    }
    // colors[d]: bit 0 = prefix 0..=d may be all blue, bit 1 = all red
    let k = k as usize;
    let mut combo = vec![0u32; k];
    let mut colors = vec![0u8; k];
    let mut count = 0;
    let mut d = 0;
    let mut next = 0u32;
    loop {
        if next + (k - d) as u32 > n {
            // no room at this depth: backtrack
            if d == 0 {
                return count;
            }
            d -= 1;
            next = combo[d] + 1;
            continue;
        }
        let v = next;
        let mut ok = if d == 0 { 0b11 } else { colors[d - 1] };
        for &u in &combo[..d] {
            if ok == 0 {
                break;
            }
            ok &= if coloring.is_red(u, v) { 0b10 } else { 0b01 };
        }
        combo[d] = v;
        colors[d] = ok;
        if d + 1 == k {
            if ok != 0 {
                count += 1;
            }
            next = v + 1;
        } else if ok != 0 {
            d += 1;
            next = v + 1;
        } else {
            next = v + 1;
        }
    }
}

/// Adjacency rows of the red and blue graphs, for `n <= 128`.
pub(crate) struct Rows {
    red: Vec<u128>,
    blue: Vec<u128>,
}

impl Rows {
    pub(crate) fn new(c: &Coloring) -> Rows {
        let n = c.n();
        let mut red = vec![0u128; n as usize];
        let mut e = 0usize;
        for u in 0..n as usize {
            for v in (u + 1)..n as usize {
                if c.words[e / 64] >> (e % 64) & 1 == 1 {
                    red[u] |= 1 << v;
                    red[v] |= 1 << u;
                }
                e += 1;
            }
        }
        let all: u128 = if n == 128 {
            u128::MAX
        } else {
            (1u128 << n) - 1
        };
        let blue = red
            .iter()
            .enumerate()
            .map(|(u, r)| all & !r & !(1u128 << u))
            .collect();
        Rows { red, blue }
    }
}

/// k-cliques inside `cand`, each counted once (only higher-indexed neighbors are extended).
fn cliques(adj: &[u128], cand: u128, need: u32) -> u64 {
    match need {
        0 => 1,
        1 => cand.count_ones() as u64,
        2 => {
            let mut c = cand;
            let mut total = 0;
            while c != 0 {
                let v = c.trailing_zeros();
                c &= c - 1;
                total += (c & adj[v as usize]).count_ones() as u64;
            }
            total
        }
        _ => {
            let mut c = cand;
            let mut total = 0;
            while c.count_ones() >= need {
                let v = c.trailing_zeros();
                c &= c - 1;
                total += cliques(adj, c & adj[v as usize], need - 1);
            }
            total
        }
    }
}

/// Same value as [`sample_count`] by counting red and blue k-cliques with bitsets.
pub fn fast_count(n: u32, k: u32, coloring: &Coloring) -> u64 {
    if n > 128 || k < 2 {
        return sample_count(n, k, coloring);
    }
    let rows = Rows::new(coloring);
    let all: u128 = if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    };
    cliques(&rows.red, all, k) + cliques(&rows.blue, all, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn edge_order_is_lexicographic() {
        let n = 6;
        let mut e = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                assert_eq!(edge_index(n, u, v), e);
                assert_eq!(edge_index(n, v, u), e);
                e += 1;
            }
        }
    }

    #[test]
    fn trivial_colorings() {
        for (n, k) in [(5, 3), (7, 4), (9, 2), (6, 6)] {
            let red = Coloring::from_fn(n, |_, _| true);
            let expect: u64 = crate::arith::binomial(n as u64, k as i64)
                .try_into()
                .unwrap();
            assert_eq!(sample_count(n, k, &red), expect);
            assert_eq!(fast_count(n, k, &red), expect);
        }
        let c = Coloring::from_fn(4, |u, v| u == 0 && v == 1);
        assert_eq!(sample_count(4, 4, &c), 0);
        assert_eq!(sample_count(4, 4, &Coloring::from_fn(4, |_, _| false)), 1);
    }

    #[test]
    fn pentagon_has_no_monochromatic_triangle() {
        let pentagon = Coloring::from_fn(5, |u, v| v - u == 1 || (u == 0 && v == 4));
        assert_eq!(sample_count(5, 3, &pentagon), 0);
        assert_eq!(fast_count(5, 3, &pentagon), 0);
    }

    #[test]
    fn routes_agree_and_respect_color_swap() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (n, k) in [(6, 3), (9, 3), (12, 4), (20, 4), (70, 3), (128, 3)] {
            for _ in 0..5 {
                let c = Coloring::random(n, &mut rng);
                let a = sample_count(n, k, &c);
                assert_eq!(a, fast_count(n, k, &c), "n={n} k={k}");
                assert_eq!(a, sample_count(n, k, &c.complement()));
            }
        }
    }
}
