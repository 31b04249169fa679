use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_STIRLING_ORDER: usize = 32;

/// Signed Stirling numbers of the first kind `s(m, j)` and Stirling numbers
/// of the second kind `S(m, j)` for `0 <= j <= m <= max_order`.
///
/// Rows are stored triangularly: row `m` has `m + 1` entries.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    max_order: usize,
    first_signed: Vec<Vec<BigInt>>,
    second: Vec<Vec<BigInt>>,
}

impl StirlingTable {
    pub fn new(max_order: usize) -> Self {
        let mut first_signed: Vec<Vec<BigInt>> = Vec::with_capacity(max_order + 1);
        let mut second: Vec<Vec<BigInt>> = Vec::with_capacity(max_order + 1);
        first_signed.push(vec![BigInt::one()]);
        second.push(vec![BigInt::one()]);
        for m in 1..=max_order {
            let prev_s = &first_signed[m - 1];
            let prev_big = &second[m - 1];
            let mut row_s = vec![BigInt::zero(); m + 1];
            let mut row_big = vec![BigInt::zero(); m + 1];
            for j in 1..=m {
                let diag_s = &prev_s[j - 1];
                let diag_big = &prev_big[j - 1];
                if j < m {
                    // s(m,j) = s(m-1,j-1) - (m-1) s(m-1,j)
                    row_s[j] = diag_s - &prev_s[j] * (m - 1);
                    // S(m,j) = j S(m-1,j) + S(m-1,j-1)
                    row_big[j] = &prev_big[j] * j + diag_big;
                } else {
                    row_s[j] = diag_s.clone();
                    row_big[j] = diag_big.clone();
                }
            }
            first_signed.push(row_s);
            second.push(row_big);
        }
        StirlingTable {
            max_order,
            first_signed,
            second,
        }
    }

    /// Process-wide table covering at least `order`. Tables are immutable once
    /// built; asking for a larger order replaces the cached one.
    pub fn shared(order: usize) -> Arc<StirlingTable> {
        static CACHE: OnceLock<RwLock<Arc<StirlingTable>>> = OnceLock::new();
        let cell =
            CACHE.get_or_init(|| RwLock::new(Arc::new(StirlingTable::new(DEFAULT_STIRLING_ORDER))));
        {
            let current = cell.read().expect("stirling cache poisoned");
            if current.max_order >= order {
                return Arc::clone(&current);
            }
        }
        let mut slot = cell.write().expect("stirling cache poisoned");
        if slot.max_order < order {
            let grown = order.max(2 * slot.max_order);
            *slot = Arc::new(StirlingTable::new(grown));
        }
        Arc::clone(&slot)
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    fn check(&self, m: usize, j: usize) -> Result<()> {
        if m > self.max_order {
            return Err(Error::range(
                "stirling order",
                format!("m = {m} exceeds table order {}", self.max_order),
            ));
        }
        if j > m {
            return Err(Error::range("stirling order", format!("j = {j} > m = {m}")));
        }
        Ok(())
    }

    /// `S(m, j)`: partitions of an `m`-set into `j` nonempty blocks.
    pub fn second(&self, m: usize, j: usize) -> Result<&BigInt> {
        self.check(m, j)?;
        Ok(&self.second[m][j])
    }

    /// Signed `s(m, j)`, the coefficient of `x^j` in `(x)_m`.
    pub fn first_signed(&self, m: usize, j: usize) -> Result<&BigInt> {
        self.check(m, j)?;
        Ok(&self.first_signed[m][j])
    }

    pub(crate) fn first_row(&self, m: usize) -> &[BigInt] {
        &self.first_signed[m]
    }

    pub(crate) fn second_row(&self, m: usize) -> &[BigInt] {
        &self.second[m]
    }
}
