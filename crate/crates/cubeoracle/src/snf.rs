//! Smith normal form over the integers.
//!
//! Sparse matrices are first reduced by eliminating unit pivots, which is
//! exact and cheap for boundary matrices; whatever remains is handed to a
//! dense big-integer elimination whose diagonal is then normalised to a
//! divisibility chain by gcd/lcm exchanges.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::OracleError;

/// Cap on `rows * cols` of the dense remainder.
pub const DENSE_CAP: usize = 16_000_000;

/// Invariant factors `d_1 | d_2 | ... | d_r` of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    /// Number of leading unit divisors.
    pub ones: usize,
    /// Divisors greater than one, in divisibility order.
    pub nontrivial: Vec<BigInt>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.ones + self.nontrivial.len()
    }

    /// The full chain, unit divisors included.
    pub fn divisors(&self) -> Vec<BigInt> {
        std::iter::repeat_n(BigInt::one(), self.ones)
            .chain(self.nontrivial.iter().cloned())
            .collect()
    }

    fn from_diagonal(ones: usize, diag: Vec<BigInt>) -> Self {
        let chain = normalise(diag);
        let extra = chain.iter().take_while(|d| d.is_one()).count();
        SnfResult {
            ones: ones + extra,
            nontrivial: chain[extra..].to_vec(),
        }
    }
}

/// Turns nonzero diagonal entries into a divisibility chain with the same
/// product structure: `(a, b) -> (gcd, lcm)` for every pair.
fn normalise(mut d: Vec<BigInt>) -> Vec<BigInt> {
    for v in d.iter_mut() {
        *v = v.abs();
    }
    for i in 0..d.len() {
        for j in (i + 1)..d.len() {
            let g = d[i].gcd(&d[j]);
            if g != d[i] {
                let l = d[i].lcm(&d[j]);
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d
}

/// Smith normal form of a dense matrix given by rows.
pub fn smith_normal_form(m: &[Vec<BigInt>]) -> SnfResult {
    SnfResult::from_diagonal(0, dense_diagonal(m.to_vec()))
}

/// Convenience wrapper for small integer matrices.
pub fn smith_normal_form_i64(m: &[Vec<i64>]) -> SnfResult {
    let big: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    smith_normal_form(&big)
}

/// Diagonalises by row and column operations; returns the nonzero
/// diagonal entries (not yet a divisibility chain).
fn dense_diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, v) in row.iter().enumerate().skip(t) {
                if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t].clone();
            let mut clean = true;
            for i in (t + 1)..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&p);
                for j in t..cols {
                    let s = &q * &a[t][j];
                    a[i][j] -= s;
                }
                clean &= a[i][t].is_zero();
            }
            for j in (t + 1)..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&p);
                for row in a.iter_mut().skip(t) {
                    let s = &q * &row[t];
                    row[j] -= s;
                }
                clean &= a[t][j].is_zero();
            }
            if clean {
                break;
            }
            // a remainder smaller than the pivot takes its place
            let mut best = (t, t);
            for i in (t + 1)..rows {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in (t + 1)..cols {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                a.swap(t, best.0);
            } else if best.1 != t {
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        diag.push(a[t][t].clone());
        t += 1;
    }
    diag
}

/// Column-sparse integer matrix.
#[derive(Clone, Debug, Default)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    /// `cols[j]` lists `(row, value)` pairs with nonzero values.
    pub cols: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            cols: vec![Vec::new(); ncols],
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.ncols]; self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                d[i][j] += v;
            }
        }
        d
    }
}

struct Elimination {
    rows: Vec<BTreeMap<usize, i64>>,
    col_rows: Vec<BTreeSet<usize>>,
}

impl Elimination {
    fn new(m: &SparseMatrix) -> Self {
        let mut rows = vec![BTreeMap::new(); m.nrows];
        let mut col_rows = vec![BTreeSet::new(); m.ncols];
        for (j, col) in m.cols.iter().enumerate() {
            for &(i, v) in col {
                if v != 0 {
                    let e = rows[i].entry(j).or_insert(0);
                    *e += v;
                    if *e == 0 {
                        rows[i].remove(&j);
                        col_rows[j].remove(&i);
                    } else {
                        col_rows[j].insert(i);
                    }
                }
            }
        }
        Elimination { rows, col_rows }
    }

    /// Pivots on the unit entry `(r, c)`. On overflow nothing is changed
    /// and `None` is returned.
    fn pivot(&mut self, r: usize, c: usize) -> Option<()> {
        let p = self.rows[r][&c];
        let pivot_row: Vec<(usize, i64)> = self.rows[r].iter().map(|(&j, &v)| (j, v)).collect();
        let targets: Vec<usize> = self.col_rows[c].iter().copied().filter(|&i| i != r).collect();
        let mut updates = Vec::with_capacity(targets.len());
        for &i in &targets {
            // 1/p = p for a unit
            let factor = self.rows[i][&c].checked_mul(p)?;
            let mut row = Vec::with_capacity(pivot_row.len());
            for &(j, v) in &pivot_row {
                let cur = self.rows[i].get(&j).copied().unwrap_or(0);
                row.push((j, cur.checked_sub(factor.checked_mul(v)?)?));
            }
            updates.push((i, row));
        }
        for (i, row) in updates {
            for (j, new) in row {
                if new == 0 {
                    self.rows[i].remove(&j);
                    self.col_rows[j].remove(&i);
                } else {
                    self.rows[i].insert(j, new);
                    self.col_rows[j].insert(i);
                }
            }
        }
        for &(j, _) in &pivot_row {
            self.col_rows[j].remove(&r);
        }
        self.rows[r].clear();
        Some(())
    }

    /// One sweep over the rows. Returns the number of pivots taken and
    /// whether an overflow stopped the sweep.
    fn sweep(&mut self) -> (usize, bool) {
        let mut taken = 0;
        for r in 0..self.rows.len() {
            let best = self.rows[r]
                .iter()
                .filter(|(_, &v)| v == 1 || v == -1)
                .min_by_key(|(&j, _)| (self.col_rows[j].len(), j))
                .map(|(&j, _)| j);
            if let Some(c) = best {
                if self.pivot(r, c).is_none() {
                    return (taken, true);
                }
                taken += 1;
            }
        }
        (taken, false)
    }

    fn remainder(&self) -> Vec<Vec<BigInt>> {
        let live_rows: Vec<usize> = (0..self.rows.len()).filter(|&i| !self.rows[i].is_empty()).collect();
        let live_cols: Vec<usize> = (0..self.col_rows.len())
            .filter(|&j| !self.col_rows[j].is_empty())
            .collect();
        let col_pos: BTreeMap<usize, usize> = live_cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
        live_rows
            .iter()
            .map(|&i| {
                let mut row = vec![BigInt::zero(); live_cols.len()];
                for (&j, &v) in &self.rows[i] {
                    row[col_pos[&j]] = BigInt::from(v);
                }
                row
            })
            .collect()
    }

    fn remainder_size(&self) -> (usize, usize) {
        (
            self.rows.iter().filter(|r| !r.is_empty()).count(),
            self.col_rows.iter().filter(|c| !c.is_empty()).count(),
        )
    }
}

/// Smith normal form of a sparse matrix.
pub fn sparse_smith_normal_form(m: &SparseMatrix) -> Result<SnfResult, OracleError> {
    let mut e = Elimination::new(m);
    let mut ones = 0;
    loop {
        // after an overflow the rest is finished densely
        let (taken, overflow) = e.sweep();
        ones += taken;
        if taken == 0 || overflow {
            break;
        }
    }
    let (r, c) = e.remainder_size();
    if r.saturating_mul(c) > DENSE_CAP {
        return Err(OracleError::Budget {
            what: "dense Smith normal form entries",
            requested: (r as u64) * (c as u64),
            cap: DENSE_CAP as u64,
        });
    }
    Ok(SnfResult::from_diagonal(ones, dense_diagonal(e.remainder())))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn diagonal_is_normalised() {
        let r = smith_normal_form_i64(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(r.divisors(), big(&[1, 6]));
        assert_eq!(r.rank(), 2);
        let r = smith_normal_form_i64(&[vec![4, 0, 0], vec![0, 6, 0], vec![0, 0, 10]]);
        assert_eq!(r.divisors(), big(&[2, 2, 60]));
    }

    #[test]
    fn zero_matrix() {
        let r = smith_normal_form_i64(&[vec![0, 0], vec![0, 0], vec![0, 0]]);
        assert_eq!(r.rank(), 0);
        assert!(r.divisors().is_empty());
        assert_eq!(smith_normal_form(&[]).rank(), 0);
    }

    #[test]
    fn known_example() {
        // classic: diag(2, 6, 12)
        let m = [vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        assert_eq!(smith_normal_form_i64(&m).divisors(), big(&[2, 6, 12]));
    }

    #[test]
    fn sparse_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..60 {
            let rows = rng.random_range(1..10);
            let cols = rng.random_range(1..10);
            let mut s = SparseMatrix::new(rows, cols);
            for j in 0..cols {
                for i in 0..rows {
                    if rng.random_bool(0.3) {
                        s.cols[j].push((i, rng.random_range(-3..=3)));
                    }
                }
            }
            let dense = smith_normal_form(&s.to_dense());
            assert_eq!(sparse_smith_normal_form(&s).unwrap(), dense);
        }
    }

    #[test]
    fn sparse_overflow_falls_back_to_dense() {
        let mut s = SparseMatrix::new(2, 2);
        s.cols[0] = vec![(0, 1), (1, i64::MAX)];
        s.cols[1] = vec![(0, i64::MAX), (1, 1)];
        let dense = smith_normal_form(&s.to_dense());
        assert_eq!(sparse_smith_normal_form(&s).unwrap(), dense);
    }

    fn arb_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(-9i64..=9, c), r)
        })
    }

    proptest! {
        #[test]
        fn divisibility_chain(m in arb_matrix()) {
            let d = smith_normal_form_i64(&m).divisors();
            for w in d.windows(2) {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
            prop_assert!(d.iter().all(|v| v.is_positive()));
        }
    }
}
