//! Overlap profiles of ordered tuples of k-subsets.
//!
//! An ordered r-tuple `(S_1, ..., S_r)` of k-subsets of `{1..n}` partitions the
//! union of the subsets into Venn cells: cell `T` (a nonempty subset of the
//! tuple indices) holds the vertices lying in exactly the `S_j` with `j in T`.
//! The cell sizes `a_T` determine both the probability that every `S_j`
//! induces a monochromatic clique and the number of tuples with that shape,
//! `(n)_v / prod_T a_T!`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{choose2, pow2};
use crate::error::{Error, Result};

/// Largest supported tuple length; cells are indexed by `u8`-sized masks.
pub const MAX_TUPLE_LEN: u32 = 8;

/// Cell sizes for an ordered r-tuple of k-subsets. Index `T` of `cell_sizes`
/// is the bitmask of tuple indices (bit `j` for `S_{j+1}`); index 0 is unused.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OverlapProfile {
    r: u32,
    k: u32,
    cell_sizes: Vec<u32>,
}

/// Quantities derived from a profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileStats {
    /// Distinct vertices in the union.
    pub v: u32,
    /// Edges of the union of the r cliques.
    pub edge_count: u32,
    /// Components of the "shares an edge" graph on tuple indices; each
    /// component must carry a single color.
    pub component_count: u32,
    /// `prod_T a_T!`
    pub symmetry_denominator: BigInt,
}

impl OverlapProfile {
    /// Validates that every tuple index is covered by exactly `k` vertices.
    pub fn new(r: u32, k: u32, cell_sizes: Vec<u32>) -> Result<Self> {
        check_shape(r, k)?;
        if cell_sizes.len() != 1usize << r {
            return Err(Error::domain(format!(
                "expected {} cell sizes, got {}",
                1usize << r,
                cell_sizes.len()
            )));
        }
        if cell_sizes[0] != 0 {
            return Err(Error::domain("the empty cell must have size 0"));
        }
        for j in 0..r {
            let load: u32 = (1..cell_sizes.len())
                .filter(|t| t & (1 << j) != 0)
                .map(|t| cell_sizes[t])
                .sum();
            if load != k {
                return Err(Error::domain(format!(
                    "index {} is covered by {load} vertices, expected {k}",
                    j + 1
                )));
            }
        }
        Ok(OverlapProfile { r, k, cell_sizes })
    }

    /// The unique profile of an ordered pair with `|S_1 ∩ S_2| = i`.
    pub fn pair(k: u32, i: u32) -> Result<Self> {
        if i > k {
            return Err(Error::domain(format!("intersection {i} exceeds k = {k}")));
        }
        OverlapProfile::new(2, k, vec![0, k - i, k - i, i])
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn cell(&self, mask: usize) -> u32 {
        self.cell_sizes[mask]
    }

    pub fn cell_sizes(&self) -> &[u32] {
        &self.cell_sizes
    }

    /// Nonempty cells as `(mask, size)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.cell_sizes
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, a)| **a > 0)
            .map(|(t, a)| (t, *a))
    }

    /// Number of vertices shared by `S_i` and `S_j` (0-based indices).
    pub fn shared(&self, i: u32, j: u32) -> u32 {
        let both = (1usize << i) | (1usize << j);
        self.cells()
            .filter(|(t, _)| t & both == both)
            .map(|(_, a)| a)
            .sum()
    }

    /// Relabels tuple indices: index `j` becomes `perm[j]`.
    pub fn permuted(&self, perm: &[u32]) -> Self {
        let mut sizes = vec![0; self.cell_sizes.len()];
        for (t, a) in self.cells() {
            let mut image = 0usize;
            for (j, &pj) in perm.iter().enumerate().take(self.r as usize) {
                if t & (1 << j) != 0 {
                    image |= 1 << pj;
                }
            }
            sizes[image] = a;
        }
        OverlapProfile {
            r: self.r,
            k: self.k,
            cell_sizes: sizes,
        }
    }
}

pub(crate) fn check_shape(r: u32, k: u32) -> Result<()> {
    if r == 0 || r > MAX_TUPLE_LEN {
        return Err(Error::range(
            "tuple length",
            format!("r = {r} not in 1..={MAX_TUPLE_LEN}"),
        ));
    }
    if k < 2 {
        return Err(Error::domain(format!(
            "clique size k = {k} must be at least 2"
        )));
    }
    Ok(())
}

/// Components of the graph on `0..r` given by an adjacency predicate.
pub(crate) fn component_count(r: u32, adjacent: impl Fn(u32, u32) -> bool) -> u32 {
    let mut nbrs = [0u16; MAX_TUPLE_LEN as usize];
    for i in 0..r {
        for j in (i + 1)..r {
            if adjacent(i, j) {
                nbrs[i as usize] |= 1 << j;
                nbrs[j as usize] |= 1 << i;
            }
        }
    }
    components_from_neighbors(r, &nbrs)
}

pub(crate) fn components_from_neighbors(r: u32, nbrs: &[u16]) -> u32 {
    let mut unseen: u16 = ((1u32 << r) - 1) as u16;
    let mut count = 0;
    while unseen != 0 {
        count += 1;
        let mut frontier = unseen & unseen.wrapping_neg();
        unseen &= !frontier;
        while frontier != 0 {
            let i = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = nbrs[i] & unseen;
            unseen &= !fresh;
            frontier |= fresh;
        }
    }
    count
}

/// Vertex count, union edge count, color components and symmetry denominator.
pub fn profile_stats(p: &OverlapProfile) -> ProfileStats {
    let cells: Vec<(usize, u32)> = p.cells().collect();
    let v = cells.iter().map(|(_, a)| a).sum();
    let mut edges = 0u64;
    for (idx, &(t, a)) in cells.iter().enumerate() {
        edges += choose2(a as u64);
        for &(u, b) in &cells[idx + 1..] {
            if t & u != 0 {
                edges += a as u64 * b as u64;
            }
        }
    }
    let component_count = component_count(p.r, |i, j| p.shared(i, j) >= 2);
    let symmetry_denominator = cells
        .iter()
        .map(|(_, a)| crate::arith::factorial(*a as u64))
        .fold(BigInt::one(), |acc, f| acc * f);
    ProfileStats {
        v,
        edge_count: edges as u32,
        component_count,
        symmetry_denominator,
    }
}

/// Probability that all r subsets of a tuple with this profile induce
/// monochromatic cliques: each edge-sharing component picks one of two colors
/// and every union edge must match, so `2^components / 2^edges`.
pub fn tuple_probability(p: &OverlapProfile) -> BigRational {
    let s = profile_stats(p);
    pow2(s.component_count as i64 - s.edge_count as i64)
}

/// Non-singleton cell masks in the canonical enumeration order.
pub(crate) fn enumeration_cells(r: u32) -> Vec<usize> {
    (1usize..(1 << r)).filter(|t| t.count_ones() >= 2).collect()
}

/// Depth-first enumeration of all overlap profiles for `(r, k)`.
///
/// Non-singleton cells are visited in increasing mask order; each singleton
/// cell `{j}` is then forced to `k - load_j`. Every partial assignment with
/// loads at most `k` extends to a solution (all later cells zero), so the walk
/// never visits a dead branch.
pub struct ProfileEnumerator {
    r: u32,
    k: u32,
    cells: Vec<usize>,
    values: Vec<u32>,
    loads: Vec<u32>,
    started: bool,
    done: bool,
    visited: u64,
    cap: u64,
}

impl ProfileEnumerator {
    pub fn visited(&self) -> u64 {
        self.visited
    }

    fn adjust(&mut self, d: usize, delta: i64) {
        let t = self.cells[d];
        for j in 0..self.r as usize {
            if t & (1 << j) != 0 {
                self.loads[j] = (self.loads[j] as i64 + delta) as u32;
            }
        }
    }

    fn current(&self) -> OverlapProfile {
        let mut sizes = vec![0u32; 1 << self.r];
        for (d, &t) in self.cells.iter().enumerate() {
            sizes[t] = self.values[d];
        }
        for j in 0..self.r as usize {
            sizes[1 << j] = self.k - self.loads[j];
        }
        OverlapProfile {
            r: self.r,
            k: self.k,
            cell_sizes: sizes,
        }
    }

    fn advance(&mut self) -> bool {
        for d in (0..self.cells.len()).rev() {
            let t = self.cells[d];
            let room = (0..self.r as usize)
                .filter(|j| t & (1 << j) != 0)
                .all(|j| self.loads[j] < self.k);
            if room {
                self.values[d] += 1;
                self.adjust(d, 1);
                return true;
            }
            let old = self.values[d];
            if old > 0 {
                self.values[d] = 0;
                self.adjust(d, -(old as i64));
            }
        }
        false
    }
}

impl Iterator for ProfileEnumerator {
    type Item = Result<OverlapProfile>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        self.visited += 1;
        if self.visited > self.cap {
            self.done = true;
            return Some(Err(node_cap_error(self.r, self.k, self.cap)));
        }
        Some(Ok(self.current()))
    }
}

pub(crate) fn node_cap_error(r: u32, k: u32, cap: u64) -> Error {
    Error::ResourceLimit(format!(
        "overlap-profile enumeration for r = {r}, k = {k} exceeded the cap of {cap} visited nodes"
    ))
}

/// Streams every overlap profile of ordered r-tuples of k-subsets exactly
/// once. Equal subsets are allowed. Yields an error and stops once more than
/// `node_cap` profiles have been produced.
pub fn enumerate_profiles(r: u32, k: u32, node_cap: u64) -> Result<ProfileEnumerator> {
    check_shape(r, k)?;
    let cells = enumeration_cells(r);
    Ok(ProfileEnumerator {
        r,
        k,
        values: vec![0; cells.len()],
        cells,
        loads: vec![0; r as usize],
        started: false,
        done: false,
        visited: 0,
        cap: node_cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};
    use std::collections::HashSet;

    fn all(r: u32, k: u32) -> Vec<OverlapProfile> {
        enumerate_profiles(r, k, u64::MAX)
            .unwrap()
            .collect::<Result<Vec<_>>>()
            .unwrap()
    }

    #[test]
    fn single_subset_has_one_profile() {
        for k in 2..7 {
            let ps = all(1, k);
            assert_eq!(ps.len(), 1);
            assert_eq!(ps[0].cell(1), k);
        }
    }

    #[test]
    fn pairs_have_one_profile_per_intersection() {
        assert_eq!(all(2, 3).len(), 4);
        assert_eq!(all(2, 4).len(), 5);
        let inters: HashSet<u32> = all(2, 4).iter().map(|p| p.shared(0, 1)).collect();
        assert_eq!(inters, (0..=4).collect());
    }

    #[test]
    fn counts_match_generating_function() {
        // Coefficient of x1^k ... xr^k in prod_T 1/(1 - x^T), computed independently.
        let expected: &[(u32, u32, usize)] = &[
            (3, 2, 16),
            (3, 3, 39),
            (3, 4, 81),
            (4, 2, 139),
            (4, 3, 862),
            (5, 2, 1750),
        ];
        for &(r, k, n) in expected {
            assert_eq!(all(r, k).len(), n, "r={r} k={k}");
        }
    }

    #[test]
    fn profiles_are_distinct_and_valid() {
        let ps = all(3, 4);
        let set: HashSet<_> = ps.iter().cloned().collect();
        assert_eq!(set.len(), ps.len());
        for p in ps {
            OverlapProfile::new(3, 4, p.cell_sizes().to_vec()).unwrap();
            let v: u32 = p.cells().map(|(_, a)| a).sum();
            assert!((4..=12).contains(&v));
        }
    }

    #[test]
    fn pair_stats_for_triangles() {
        let s = profile_stats(&OverlapProfile::pair(3, 2).unwrap());
        assert_eq!((s.v, s.edge_count, s.component_count), (4, 5, 1));
        assert_eq!(s.symmetry_denominator, BigInt::from(2));

        let s = profile_stats(&OverlapProfile::pair(3, 1).unwrap());
        assert_eq!((s.v, s.edge_count, s.component_count), (5, 6, 2));

        let s = profile_stats(&OverlapProfile::pair(3, 3).unwrap());
        assert_eq!((s.v, s.edge_count, s.component_count), (3, 3, 1));
        assert_eq!(s.symmetry_denominator, BigInt::from(6));
    }

    #[test]
    fn tuple_probabilities() {
        for k in 2..8u32 {
            let single = OverlapProfile::new(1, k, vec![0, k]).unwrap();
            assert_eq!(
                tuple_probability(&single),
                pow2(1 - choose2(k as u64) as i64)
            );
            let one_shared = OverlapProfile::pair(k, 1).unwrap();
            let p = pow2(1 - choose2(k as u64) as i64);
            assert_eq!(tuple_probability(&one_shared), &p * &p);
        }
        assert_eq!(
            tuple_probability(&OverlapProfile::pair(3, 2).unwrap()),
            ratio(1, 16)
        );
        assert_eq!(
            tuple_probability(&OverlapProfile::pair(3, 3).unwrap()),
            ratio(1, 4)
        );
        assert_eq!(
            tuple_probability(&OverlapProfile::pair(3, 0).unwrap()),
            ratio(1, 16)
        );
        let _ = int(0);
    }

    #[test]
    fn stats_invariants_hold() {
        for p in all(4, 3) {
            let s = profile_stats(&p);
            assert!(s.edge_count as u64 <= choose2(s.v as u64));
            assert!((1..=4).contains(&s.component_count));
        }
    }

    #[test]
    fn invalid_profiles_rejected() {
        assert!(OverlapProfile::new(2, 3, vec![0, 1, 1, 1]).is_err());
        assert!(OverlapProfile::new(2, 3, vec![0, 3, 3]).is_err());
        assert!(OverlapProfile::pair(3, 4).is_err());
        assert!(enumerate_profiles(0, 3, 10).is_err());
        assert!(enumerate_profiles(2, 1, 10).is_err());
    }

    #[test]
    fn node_cap_trips() {
        let out: Vec<_> = enumerate_profiles(3, 4, 10).unwrap().collect();
        assert_eq!(out.len(), 11);
        assert!(matches!(out.last(), Some(Err(Error::ResourceLimit(_)))));
    }

    #[test]
    fn permutation_preserves_stats_multiset() {
        let ps = all(3, 3);
        let perm = [2u32, 0, 1];
        let mut a: Vec<_> = ps
            .iter()
            .map(|p| format!("{:?}", profile_stats(p)))
            .collect();
        let mut b: Vec<_> = ps
            .iter()
            .map(|p| format!("{:?}", profile_stats(&p.permuted(&perm))))
            .collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        let permuted: HashSet<_> = ps.iter().map(|p| p.permuted(&perm)).collect();
        assert_eq!(permuted, ps.into_iter().collect());
    }
}
