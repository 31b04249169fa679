//! Fast accumulation of moment polynomials over overlap profiles.
//!
//! Walks the same cell order as [`super::profile::ProfileEnumerator`] but keeps
//! vertex, edge, pair-share and symmetry-denominator totals incrementally, so a
//! leaf costs a handful of integer operations. Leaves are grouped by
//! `(v, edges - components, prod a_T!)` and turned into a polynomial once.

use std::hash::Hash;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::profile::{check_shape, components_from_neighbors, enumeration_cells, node_cap_error};
use crate::arith::{factorial, pow2, Basis, RationalPolynomial};
use crate::error::{Error, Result};

const FLUSH_EVERY: u64 = 1 << 16;
const MAX_PAIRS: usize = 28;

/// Product of cell factorials. `u128` when `(k!)^r` fits, big integers otherwise.
trait Weight: Clone + Eq + Hash + Send + Sync {
    fn one() -> Self;
    fn times(&self, f: u128) -> Self;
    fn to_big(&self) -> BigInt;
}

impl Weight for u128 {
    fn one() -> Self {
        1
    }
    #[inline]
    fn times(&self, f: u128) -> Self {
        self * f
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Weight for BigInt {
    fn one() -> Self {
        BigInt::from(1)
    }
    fn times(&self, f: u128) -> Self {
        self * f
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

struct Cell {
    mask: u32,
    members: Vec<usize>,
    pairs: Vec<usize>,
    /// Earlier non-singleton cells sharing a tuple index with this one.
    earlier: Vec<usize>,
}

struct Plan {
    r: u32,
    k: u32,
    cells: Vec<Cell>,
    /// `(i, j)` for every pair index, `i < j`.
    pair_list: Vec<(usize, usize)>,
    fact: Vec<u128>,
    /// Edges a singleton cell of size b adds: `C(b,2) + b (k - b)`.
    singleton_edges: Vec<u32>,
    /// `next_free[sat * (cells + 1) + d]`: first cell at or after `d` avoiding
    /// every saturated tuple index in `sat`.
    next_free: Vec<u16>,
    /// Component counts by strong-pair mask, for small r.
    components: Option<Vec<u8>>,
}

impl Plan {
    fn new(r: u32, k: u32) -> Plan {
        let ru = r as usize;
        let mut pair_index = [[usize::MAX; 8]; 8];
        let mut pair_list = Vec::new();
        for i in 0..ru {
            for j in (i + 1)..ru {
                pair_index[i][j] = pair_list.len();
                pair_list.push((i, j));
            }
        }
        let masks = enumeration_cells(r);
        let cells: Vec<Cell> = masks
            .iter()
            .enumerate()
            .map(|(d, &t)| {
                let members: Vec<usize> = (0..ru).filter(|j| t & (1 << j) != 0).collect();
                let mut pairs = Vec::new();
                for (x, &i) in members.iter().enumerate() {
                    for &j in &members[x + 1..] {
                        pairs.push(pair_index[i][j]);
                    }
                }
                let earlier = (0..d).filter(|&e| masks[e] & t != 0).collect();
                Cell {
                    mask: t as u32,
                    members,
                    pairs,
                    earlier,
                }
            })
            .collect();
        let fact = (0..=k as u128)
            .scan(1u128, |acc, i| {
                if i > 0 {
                    *acc *= i;
                }
                Some(*acc)
            })
            .collect();
        let singleton_edges = (0..=k)
            .map(|b| b * b.saturating_sub(1) / 2 + b * (k - b))
            .collect();
        let stride = cells.len() + 1;
        let mut next_free = vec![0u16; (1 << r) * stride];
        for sat in 0..(1usize << r) {
            let mut next = cells.len();
            for d in (0..stride).rev() {
                if d < cells.len() && cells[d].mask as usize & sat == 0 {
                    next = d;
                }
                next_free[sat * stride + d] = next as u16;
            }
        }
        let components = (r <= 6).then(|| {
            (0..1usize << pair_list.len())
                .map(|strong| {
                    let mut nbrs = [0u16; 8];
                    for (p, &(i, j)) in pair_list.iter().enumerate() {
                        if strong & (1 << p) != 0 {
                            nbrs[i] |= 1 << j;
                            nbrs[j] |= 1 << i;
                        }
                    }
                    components_from_neighbors(r, &nbrs) as u8
                })
                .collect()
        });
        Plan {
            r,
            k,
            cells,
            pair_list,
            fact,
            singleton_edges,
            next_free,
            components,
        }
    }

    fn components(&self, strong: u32) -> u32 {
        if let Some(t) = &self.components {
            return t[strong as usize] as u32;
        }
        let mut nbrs = [0u16; 8];
        for (p, &(i, j)) in self.pair_list.iter().enumerate() {
            if strong & (1 << p) != 0 {
                nbrs[i] |= 1 << j;
                nbrs[j] |= 1 << i;
            }
        }
        components_from_neighbors(self.r, &nbrs)
    }
}

/// Running totals for the current partial profile, updated in place.
struct State {
    loads: [u32; 8],
    pairs: [u32; MAX_PAIRS],
    /// Tuple indices whose load has reached k.
    saturated: u32,
    /// Pair indices sharing at least two vertices (one edge or more).
    strong: u32,
    v: u32,
    edges: u32,
}

type Shape<W> = (u32, u32, W);

struct Worker<'a, W: Weight> {
    plan: &'a Plan,
    st: State,
    out: FxHashMap<Shape<W>, u64>,
    values: Vec<u32>,
    local: u64,
    global: &'a AtomicU64,
    cap: u64,
    aborted: bool,
}

impl<'a, W: Weight> Worker<'a, W> {
    fn new(plan: &'a Plan, global: &'a AtomicU64, cap: u64) -> Self {
        Worker {
            plan,
            st: State {
                loads: [0; 8],
                pairs: [0; MAX_PAIRS],
                saturated: 0,
                strong: 0,
                v: 0,
                edges: 0,
            },
            out: FxHashMap::default(),
            values: vec![0; plan.cells.len()],
            local: 0,
            global,
            cap,
            aborted: false,
        }
    }

    /// Adds one more vertex to cell `d`, which currently holds `held` vertices.
    #[inline]
    fn grow(&mut self, d: usize, held: u32, inter: u32) {
        let cell = &self.plan.cells[d];
        let k = self.plan.k;
        for &j in &cell.members {
            self.st.loads[j] += 1;
            if self.st.loads[j] == k {
                self.st.saturated |= 1 << j;
            }
        }
        for &p in &cell.pairs {
            self.st.pairs[p] += 1;
            if self.st.pairs[p] == 2 {
                self.st.strong |= 1 << p;
            }
        }
        self.st.v += 1;
        self.st.edges += held + inter;
    }

    #[inline]
    fn shrink(&mut self, d: usize, by: u32) {
        let cell = &self.plan.cells[d];
        for &j in &cell.members {
            self.st.loads[j] -= by;
        }
        for &p in &cell.pairs {
            self.st.pairs[p] -= by;
        }
        self.st.v -= by;
    }

    fn flush(&mut self) {
        let total = self.global.fetch_add(self.local, Ordering::Relaxed) + self.local;
        self.local = 0;
        if total > self.cap {
            self.aborted = true;
        }
    }

    #[inline]
    fn visit(&mut self) -> bool {
        self.local += 1;
        if self.local >= FLUSH_EVERY {
            self.flush();
        }
        !self.aborted
    }

    fn leaf(&mut self, weight: &W) {
        let plan = self.plan;
        let k = plan.k;
        let mut v = self.st.v;
        let mut edges = self.st.edges;
        let mut w = weight.clone();
        for j in 0..plan.r as usize {
            let b = k - self.st.loads[j];
            v += b;
            edges += plan.singleton_edges[b as usize];
            if b > 1 {
                w = w.times(plan.fact[b as usize]);
            }
        }
        let comps = plan.components(self.st.strong);
        *self.out.entry((v, edges - comps, w)).or_insert(0) += 1;
    }

    fn dfs(&mut self, d: usize, weight: &W) {
        if !self.visit() {
            return;
        }
        let plan = self.plan;
        let stride = plan.cells.len() + 1;
        let d = plan.next_free[self.st.saturated as usize * stride + d] as usize;
        if d == plan.cells.len() {
            self.leaf(weight);
            return;
        }
        self.dfs(d + 1, weight);
        if self.aborted {
            return;
        }
        let cell = &plan.cells[d];
        let room = cell
            .members
            .iter()
            .map(|&j| plan.k - self.st.loads[j])
            .min()
            .unwrap_or(0);
        let inter: u32 = cell.earlier.iter().map(|&e| self.values[e]).sum();
        let (saturated, strong, edges) = (self.st.saturated, self.st.strong, self.st.edges);
        let mut w = weight.clone();
        let mut a = 0;
        while a < room {
            self.grow(d, a, inter);
            a += 1;
            w = w.times(a as u128);
            self.values[d] = a;
            self.dfs(d + 1, &w);
            if self.aborted {
                break;
            }
        }
        self.shrink(d, a);
        self.st.saturated = saturated;
        self.st.strong = strong;
        self.st.edges = edges;
        self.values[d] = 0;
    }
}

/// Grouped leaf counts for one `(r, k)`.
pub(crate) struct ShapeCounts {
    pub(crate) shapes: Vec<(u32, u32, BigInt, u64)>,
    pub(crate) profile_count: u64,
}

impl ShapeCounts {
    /// `sum count * 2^-x / W * (n)_v` in the falling-factorial basis.
    pub(crate) fn polynomial(&self) -> RationalPolynomial {
        let mut by_degree: std::collections::BTreeMap<u32, BigRational> = Default::default();
        for (v, x, w, count) in &self.shapes {
            let term = pow2(-(*x as i64)) * BigRational::new(BigInt::from(*count), w.clone());
            let slot = by_degree.entry(*v).or_insert_with(BigRational::zero);
            *slot += term;
        }
        RationalPolynomial::from_terms(Basis::FallingFactorial, by_degree)
    }
}

fn run<W: Weight>(plan: &Plan, cap: u64, parallel: bool) -> Result<ShapeCounts> {
    let global = AtomicU64::new(0);
    let mut merged: FxHashMap<Shape<W>, u64> = FxHashMap::default();
    if plan.cells.is_empty() {
        let mut worker = Worker::<W>::new(plan, &global, cap);
        worker.dfs(0, &W::one());
        worker.flush();
        if worker.aborted {
            return Err(node_cap_error(plan.r, plan.k, cap));
        }
        merged = worker.out;
    } else {
        // Split on the value of the first cell; subtrees are independent.
        let room = plan.k;
        let tasks: Vec<u32> = (0..=room).collect();
        let job = |a0: &u32| -> (FxHashMap<Shape<W>, u64>, bool) {
            let mut worker = Worker::<W>::new(plan, &global, cap);
            let mut w = W::one();
            for a in 1..=*a0 {
                worker.grow(0, a - 1, 0);
                w = w.times(a as u128);
            }
            worker.values[0] = *a0;
            // the root node itself is counted once, by task 0
            if *a0 == 0 {
                worker.visit();
            }
            worker.dfs(1, &w);
            worker.flush();
            (worker.out, worker.aborted)
        };
        let parts: Vec<_> = if parallel {
            tasks.par_iter().map(job).collect()
        } else {
            tasks.iter().map(job).collect()
        };
        for (part, aborted) in parts {
            if aborted {
                return Err(node_cap_error(plan.r, plan.k, cap));
            }
            for (key, c) in part {
                *merged.entry(key).or_insert(0) += c;
            }
        }
        if global.load(Ordering::Relaxed) > cap {
            return Err(node_cap_error(plan.r, plan.k, cap));
        }
    }
    let profile_count = merged.values().sum();
    let mut shapes: Vec<(u32, u32, BigInt, u64)> = merged
        .into_iter()
        .map(|((v, x, w), c)| (v, x, w.to_big(), c))
        .collect();
    shapes.sort();
    Ok(ShapeCounts {
        shapes,
        profile_count,
    })
}

/// Enumerates all overlap profiles of ordered r-tuples of k-subsets and
/// groups them by contribution shape.
pub(crate) fn accumulate(r: u32, k: u32, node_cap: u64, parallel: bool) -> Result<ShapeCounts> {
    check_shape(r, k)?;
    if k > 34 {
        return Err(Error::range("clique size", format!("k = {k} exceeds 34")));
    }
    let plan = Plan::new(r, k);
    let bound = factorial(k as u64).pow(r);
    if bound.to_u128().is_some() {
        run::<u128>(&plan, node_cap, parallel)
    } else {
        run::<BigInt>(&plan, node_cap, parallel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_counts_match_enumerator() {
        for (r, k) in [(1, 3), (2, 3), (2, 4), (3, 3), (3, 5), (4, 3), (5, 2)] {
            let fast = accumulate(r, k, u64::MAX, false).unwrap();
            let slow = super::super::profile::enumerate_profiles(r, k, u64::MAX)
                .unwrap()
                .count() as u64;
            assert_eq!(fast.profile_count, slow, "r={r} k={k}");
        }
    }

    #[test]
    fn parallel_and_serial_agree() {
        let a = accumulate(4, 3, u64::MAX, true).unwrap();
        let b = accumulate(4, 3, u64::MAX, false).unwrap();
        assert_eq!(a.shapes, b.shapes);
    }

    #[test]
    fn node_cap_is_enforced() {
        assert!(matches!(
            accumulate(4, 4, 1000, false),
            Err(Error::ResourceLimit(_))
        ));
        assert!(matches!(
            accumulate(4, 4, 1000, true),
            Err(Error::ResourceLimit(_))
        ));
    }
}
