//! Square 0/1 matrices over the boolean semiring, stored as one machine word per row.
//!
//! Entry `(i, j)` is bit `j` of `rows[i]`. All indices are 0-based.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Largest supported dimension (one `u64` per row).
pub const MAX_DIM: usize = 64;

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl BoolMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "dimension {n} outside 1..={MAX_DIM}");
        BoolMatrix { n, rows: vec![0; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.rows[i] = 1 << i;
        }
        m
    }

    pub fn all_ones(n: usize) -> Self {
        BoolMatrix { n, rows: vec![full_mask(n); n] }
    }

    /// The n-cycle `i -> i+1 mod n` with the extra edge `n-1 -> 1`; its exponent is
    /// `n^2 - 2n + 2` for `n >= 2`.
    pub fn wielandt(n: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::OutOfRange(format!("wielandt matrix needs 2 <= n <= {MAX_DIM}, got {n}")));
        }
        let mut m = BoolMatrix::zeros(n);
        for i in 0..n {
            m.set(i, (i + 1) % n, true);
        }
        m.set(n - 1, 1, true);
        Ok(m)
    }

    /// Matrix of the map `i -> perm[i]`, i.e. entry `(i, perm[i])` is set.
    /// `perm` need not be injective; any total function works.
    pub fn from_function(map: &[usize]) -> Result<Self> {
        let n = map.len();
        check_dim(n)?;
        let mut m = Self::zeros(n);
        for (i, &j) in map.iter().enumerate() {
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, limit: n });
            }
            m.rows[i] = 1 << j;
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries; every row must have length `n`
    /// and every entry must be 0 or 1.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        check_dim(n)?;
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::Parse(format!(
                    "row {i} has length {}, expected {n} (matrix must be square)",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => m.rows[i] |= 1 << j,
                    other => {
                        return Err(Error::Parse(format!("entry ({i},{j}) = {other} is not 0 or 1")))
                    }
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix directly from row bitmasks. Bits at positions `>= n` are rejected.
    pub fn from_row_bits(n: usize, rows: Vec<u64>) -> Result<Self> {
        check_dim(n)?;
        if rows.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: rows.len() });
        }
        if rows.iter().any(|&r| r & !full_mask(n) != 0) {
            return Err(Error::Parse("row has bits outside the matrix width".into()));
        }
        Ok(BoolMatrix { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    #[inline]
    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    /// Bitmask of column `j` (bit `i` set iff entry `(i, j)` is set).
    pub fn column(&self, j: usize) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &r)| acc | (((r >> j) & 1) << i))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if value {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) as u8).collect())
            .collect()
    }

    /// Number of set entries.
    pub fn weight(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// Boolean product `self * other`: row `i` of the result is the OR of the rows
    /// of `other` selected by the bits of row `i` of `self`.
    pub fn product(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &BoolMatrix) -> BoolMatrix {
        let rows = self.rows.iter().map(|&r| or_selected(r, &other.rows)).collect();
        BoolMatrix { n: self.n, rows }
    }

    /// Entrywise OR.
    pub fn or(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect();
        Ok(BoolMatrix { n: self.n, rows })
    }

    pub fn transpose(&self) -> BoolMatrix {
        let rows = (0..self.n).map(|j| self.column(j)).collect();
        BoolMatrix { n: self.n, rows }
    }

    pub fn is_positive(&self) -> bool {
        let full = full_mask(self.n);
        self.rows.iter().all(|&r| r == full)
    }

    /// Least index of an all-ones column, if any.
    pub fn positive_column(&self) -> Option<usize> {
        let common = self.rows.iter().fold(full_mask(self.n), |acc, &r| acc & r);
        (common != 0).then(|| common.trailing_zeros() as usize)
    }

    /// Least index of an all-ones row, if any.
    pub fn positive_row(&self) -> Option<usize> {
        let full = full_mask(self.n);
        self.rows.iter().position(|&r| r == full)
    }

    pub fn nz_status(&self) -> NzStatus {
        let zero_rows: Vec<usize> = (0..self.n).filter(|&i| self.rows[i] == 0).collect();
        let col_union = self.rows.iter().fold(0u64, |acc, &r| acc | r);
        let zero_cols: Vec<usize> = (0..self.n).filter(|&j| (col_union >> j) & 1 == 0).collect();
        NzStatus { is_nz: zero_rows.is_empty() && zero_cols.is_empty(), zero_rows, zero_cols }
    }

    pub fn is_nz(&self) -> bool {
        self.nz_status().is_nz
    }

    /// A perfect matching (row -> column) inside the support, with `forced = (i, j)`
    /// pinned when given.
    pub fn positive_diagonal_through(&self, forced: Option<(usize, usize)>) -> Option<Vec<usize>> {
        perfect_matching(self, forced)
    }

    /// True iff the matrix is nonzero and every set entry lies on a positive diagonal.
    pub fn has_total_support(&self) -> bool {
        if self.weight() == 0 {
            return false;
        }
        (0..self.n).all(|i| {
            bits(self.rows[i]).all(|j| perfect_matching(self, Some((i, j))).is_some())
        })
    }

    /// Integer matrix with constant line sums `h` and the same support, built as a sum
    /// of permutation matrices inside the support.
    pub fn doubly_stochastic_pattern(&self) -> Result<DoublyStochasticPattern> {
        if !self.has_total_support() {
            return Err(Error::NoTotalSupport);
        }
        let n = self.n;
        let mut covered = vec![0u64; n];
        let mut perms: Vec<Vec<usize>> = Vec::new();
        loop {
            // lexicographically least uncovered support edge
            let next = (0..n).find_map(|i| {
                let open = self.rows[i] & !covered[i];
                (open != 0).then(|| (i, open.trailing_zeros() as usize))
            });
            let Some(edge) = next else { break };
            let perm = perfect_matching(self, Some(edge)).ok_or(Error::NoTotalSupport)?;
            for (i, &j) in perm.iter().enumerate() {
                covered[i] |= 1 << j;
            }
            perms.push(perm);
        }
        let mut d = vec![vec![0u64; n]; n];
        for perm in &perms {
            for (i, &j) in perm.iter().enumerate() {
                d[i][j] += 1;
            }
        }
        Ok(DoublyStochasticPattern { d, h: perms.len() as u64, perms })
    }

    /// If every part's row-support union is nonempty and lies inside a single part,
    /// and the induced map on parts is a bijection, returns it (`sigma[i]` is the image
    /// of part `i`).
    pub fn acts_as_permutation(&self, partition: &Partition) -> Option<Vec<usize>> {
        if partition.n() != self.n {
            return None;
        }
        let block = partition.block_of();
        let parts = partition.parts();
        let mut sigma = Vec::with_capacity(parts.len());
        let mut used = vec![false; parts.len()];
        for part in parts {
            let support = part.iter().fold(0u64, |acc, &i| acc | self.rows[i]);
            if support == 0 {
                return None;
            }
            let target = block[support.trailing_zeros() as usize];
            if bits(support).any(|j| block[j] != target) || used[target] {
                return None;
            }
            used[target] = true;
            sigma.push(target);
        }
        Some(sigma)
    }
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolMatrix{:?}", self.to_rows())
    }
}

impl fmt::Display for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    f.write_str(" ")?;
                }
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl Serialize for BoolMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoolMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<u8>>::deserialize(d)?;
        BoolMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NzStatus {
    pub is_nz: bool,
    pub zero_rows: Vec<usize>,
    pub zero_cols: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoublyStochasticPattern {
    /// Sum of the permutation matrices in `perms`.
    pub d: Vec<Vec<u64>>,
    /// Common row and column sum of `d`.
    pub h: u64,
    pub perms: Vec<Vec<usize>>,
}

/// Iterates the set bit positions of `mask` in increasing order.
#[inline]
pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            b
        })
    })
}

#[inline]
pub(crate) fn or_selected(selector: u64, rows: &[u64]) -> u64 {
    bits(selector).fold(0, |acc, k| acc | rows[k])
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Parse("matrix dimension must be positive".into()));
    }
    if n > MAX_DIM {
        return Err(Error::TooLarge { n, max: MAX_DIM });
    }
    Ok(())
}

// Kuhn's augmenting-path matching on the support graph; rows and candidate
// columns are tried in increasing order so the result is deterministic.
fn perfect_matching(m: &BoolMatrix, forced: Option<(usize, usize)>) -> Option<Vec<usize>> {
    let n = m.n;
    let (skip_row, skip_col) = match forced {
        Some((i, j)) => {
            if !m.get(i, j) {
                return None;
            }
            (Some(i), Some(j))
        }
        None => (None, None),
    };
    let col_mask = skip_col.map_or(full_mask(n), |j| full_mask(n) & !(1 << j));
    let mut col_owner: Vec<Option<usize>> = vec![None; n];

    fn augment(
        m: &BoolMatrix,
        row: usize,
        col_mask: u64,
        visited: &mut u64,
        col_owner: &mut [Option<usize>],
    ) -> bool {
        for j in bits(m.rows[row] & col_mask) {
            if *visited & (1 << j) != 0 {
                continue;
            }
            *visited |= 1 << j;
            let free = match col_owner[j] {
                None => true,
                Some(other) => augment(m, other, col_mask, visited, col_owner),
            };
            if free {
                col_owner[j] = Some(row);
                return true;
            }
        }
        false
    }

    for row in (0..n).filter(|&r| Some(r) != skip_row) {
        let mut visited = 0u64;
        if !augment(m, row, col_mask, &mut visited, &mut col_owner) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (j, owner) in col_owner.iter().enumerate() {
        if let Some(i) = owner {
            perm[*i] = j;
        }
    }
    if let (Some(i), Some(j)) = (skip_row, skip_col) {
        perm[i] = j;
    }
    Some(perm)
}

/// A nonempty ordered list of boolean matrices of a common dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixSet {
    n: usize,
    matrices: Vec<BoolMatrix>,
}

impl MatrixSet {
    pub fn new(matrices: Vec<BoolMatrix>) -> Result<Self> {
        let n = matrices.first().ok_or(Error::EmptySet)?.n;
        if let Some(bad) = matrices.iter().find(|m| m.n != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.n });
        }
        Ok(MatrixSet { n, matrices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn matrices(&self) -> &[BoolMatrix] {
        &self.matrices
    }

    pub fn get(&self, i: usize) -> Option<&BoolMatrix> {
        self.matrices.get(i)
    }

    pub fn transpose(&self) -> MatrixSet {
        MatrixSet { n: self.n, matrices: self.matrices.iter().map(BoolMatrix::transpose).collect() }
    }

    /// Entrywise OR of all members.
    pub fn union(&self) -> BoolMatrix {
        let rows = (0..self.n)
            .map(|i| self.matrices.iter().fold(0u64, |acc, m| acc | m.rows[i]))
            .collect();
        BoolMatrix { n: self.n, rows }
    }

    pub fn all_nz(&self) -> bool {
        self.matrices.iter().all(BoolMatrix::is_nz)
    }

    /// Irreducibility of the summed matrix: every `j` reachable from every `i`
    /// by a path of positive length in the union digraph.
    pub fn is_irreducible(&self) -> bool {
        let u = self.union();
        let full = full_mask(self.n);
        (0..self.n).all(|i| {
            let mut reach = u.rows[i];
            loop {
                let next = reach | or_selected(reach, &u.rows);
                if next == reach {
                    break;
                }
                reach = next;
            }
            reach == full
        })
    }

    /// Replays the left-to-right product of the given members. The empty word gives
    /// the identity.
    pub fn product_of(&self, word: &[usize]) -> Result<BoolMatrix> {
        let mut acc = BoolMatrix::identity(self.n);
        for &i in word {
            let m = self
                .matrices
                .get(i)
                .ok_or(Error::IndexOutOfRange { index: i, limit: self.matrices.len() })?;
            acc = acc.mul_unchecked(m);
        }
        Ok(acc)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix set serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct RawMatrixSet {
    n: usize,
    matrices: Vec<Vec<Vec<u8>>>,
}

impl Serialize for MatrixSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawMatrixSet { n: self.n, matrices: self.matrices.iter().map(BoolMatrix::to_rows).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawMatrixSet::deserialize(d)?;
        let matrices = raw
            .matrices
            .iter()
            .map(|rows| BoolMatrix::from_rows(rows))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let set = MatrixSet::new(matrices).map_err(D::Error::custom)?;
        if set.n != raw.n {
            return Err(D::Error::custom(format!(
                "declared n = {} but matrices are {}x{}",
                raw.n, set.n, set.n
            )));
        }
        Ok(set)
    }
}

/// Free-function form of [`BoolMatrix::product`].
pub fn bool_product(a: &BoolMatrix, b: &BoolMatrix) -> Result<BoolMatrix> {
    a.product(b)
}

pub fn is_irreducible_set(s: &MatrixSet) -> bool {
    s.is_irreducible()
}
