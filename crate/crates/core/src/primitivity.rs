//! Exponent and primitivity of matrix sets.
//!
//! The exponent is found by breadth-first search over distinct boolean products,
//! ordered by product length. Products are deduplicated in a hash table; for small
//! `n` the whole matrix is packed into one machine integer so that a table entry
//! costs a few words.

use std::collections::HashMap;
use std::hash::Hash;

use num_traits::PrimInt;
use serde::{Deserialize, Serialize};

use crate::boolmat::{bits, full_mask, BoolMatrix, MatrixSet};
use crate::error::{Error, Result};
use crate::partition::{Partition, SetPartitions};

/// Default bound on distinct products explored by [`exponent`].
pub const DEFAULT_PRODUCT_CAP: usize = 1 << 25;

/// Default largest dimension for the partition test.
pub const PV_MAX_N: usize = 10;

/// Representation of a product inside the closure search.
trait ProductRepr: Clone + Eq + Hash {
    fn pack(m: &BoolMatrix) -> Self;
    fn unpack(&self, n: usize) -> BoolMatrix;
    fn mul(&self, rhs: &Self, n: usize) -> Self;
    fn is_positive(&self, n: usize) -> bool;
}

/// Whole matrix in one integer, row `i` in bits `i*n .. (i+1)*n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Packed<T>(T);

impl<T: PrimInt + Hash> Packed<T> {
    #[inline]
    fn row(&self, i: usize, n: usize) -> u64 {
        let mask = T::from(full_mask(n)).unwrap();
        ((self.0 >> (i * n)) & mask).to_u64().unwrap()
    }
}

impl<T: PrimInt + Hash> ProductRepr for Packed<T> {
    fn pack(m: &BoolMatrix) -> Self {
        let n = m.n();
        let packed = m
            .rows()
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &r)| acc | (T::from(r).unwrap() << (i * n)));
        Packed(packed)
    }

    fn unpack(&self, n: usize) -> BoolMatrix {
        BoolMatrix::from_row_bits(n, (0..n).map(|i| self.row(i, n)).collect()).unwrap()
    }

    #[inline]
    fn mul(&self, rhs: &Self, n: usize) -> Self {
        let mut out = T::zero();
        for i in 0..n {
            let acc = bits(self.row(i, n)).fold(0u64, |acc, k| acc | rhs.row(k, n));
            out = out | (T::from(acc).unwrap() << (i * n));
        }
        Packed(out)
    }

    fn is_positive(&self, n: usize) -> bool {
        let bits = n * n;
        let full = if bits == T::zero().count_zeros() as usize {
            !T::zero()
        } else {
            (T::one() << bits) - T::one()
        };
        self.0 == full
    }
}

impl ProductRepr for BoolMatrix {
    fn pack(m: &BoolMatrix) -> Self {
        m.clone()
    }

    fn unpack(&self, _n: usize) -> BoolMatrix {
        self.clone()
    }

    fn mul(&self, rhs: &Self, _n: usize) -> Self {
        self.mul_unchecked(rhs)
    }

    fn is_positive(&self, _n: usize) -> bool {
        BoolMatrix::is_positive(self)
    }
}

const NO_PARENT: u32 = u32::MAX;

struct Search<R> {
    n: usize,
    gens: Vec<R>,
    elems: Vec<R>,
    // (parent element, generator appended)
    parent: Vec<(u32, u32)>,
    index: HashMap<R, u32>,
    layer_ends: Vec<usize>,
}

enum Outcome {
    Positive(usize),
    Closed,
    Capped,
}

impl<R: ProductRepr> Search<R> {
    fn new(s: &MatrixSet) -> Self {
        Search {
            n: s.n(),
            gens: s.matrices().iter().map(R::pack).collect(),
            elems: Vec::new(),
            parent: Vec::new(),
            index: HashMap::new(),
            layer_ends: Vec::new(),
        }
    }

    // Returns Some(idx) for a newly inserted element.
    fn insert(&mut self, m: R, parent: u32, gen: u32) -> Option<usize> {
        if self.index.contains_key(&m) {
            return None;
        }
        let idx = self.elems.len();
        self.index.insert(m.clone(), idx as u32);
        self.elems.push(m);
        self.parent.push((parent, gen));
        Some(idx)
    }

    fn run(&mut self, cap: usize, stop_at_positive: bool) -> Outcome {
        let n = self.n;
        for g in 0..self.gens.len() {
            let m = self.gens[g].clone();
            if let Some(idx) = self.insert(m, NO_PARENT, g as u32) {
                if stop_at_positive && self.elems[idx].is_positive(n) {
                    self.layer_ends.push(self.elems.len());
                    return Outcome::Positive(idx);
                }
                if self.elems.len() >= cap {
                    return Outcome::Capped;
                }
            }
        }
        self.layer_ends.push(self.elems.len());
        let mut start = 0;
        loop {
            let end = self.elems.len();
            if start == end {
                self.layer_ends.pop();
                return Outcome::Closed;
            }
            for e in start..end {
                for g in 0..self.gens.len() {
                    let p = self.elems[e].mul(&self.gens[g], n);
                    if let Some(idx) = self.insert(p, e as u32, g as u32) {
                        if stop_at_positive && self.elems[idx].is_positive(n) {
                            self.layer_ends.push(self.elems.len());
                            return Outcome::Positive(idx);
                        }
                        if self.elems.len() >= cap {
                            return Outcome::Capped;
                        }
                    }
                }
            }
            self.layer_ends.push(self.elems.len());
            start = end;
        }
    }

    fn word(&self, mut idx: usize) -> Vec<usize> {
        let mut w = Vec::new();
        loop {
            let (p, g) = self.parent[idx];
            w.push(g as usize);
            if p == NO_PARENT {
                break;
            }
            idx = p as usize;
        }
        w.reverse();
        w
    }
}

/// Shortest positive product of a primitive set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentResult {
    pub exponent: usize,
    /// Matrix indices, multiplied left to right.
    pub witness: Vec<usize>,
    pub products_explored: usize,
}

/// All distinct products of a matrix set, grouped by shortest length.
#[derive(Debug, Clone)]
pub struct SemigroupClosure {
    /// Distinct products in discovery order.
    pub elements: Vec<BoolMatrix>,
    /// Shortest word producing each element.
    pub words: Vec<Vec<usize>>,
    /// `layers[L]` holds the indices of elements whose shortest word has length `L + 1`.
    pub layers: Vec<std::ops::Range<usize>>,
    /// True when the cap stopped the search before closure.
    pub truncated: bool,
}

fn with_repr<T>(n: usize, small: impl FnOnce() -> T, mid: impl FnOnce() -> T, big: impl FnOnce() -> T) -> T {
    if n * n <= 64 {
        small()
    } else if n * n <= 128 {
        mid()
    } else {
        big()
    }
}

/// Exponent of `s` with a lexicographically least shortest witness.
///
/// Errors with [`Error::NotPrimitive`] when the closure completes without a positive
/// product and [`Error::CapExceeded`] when `cap` distinct products (default
/// [`DEFAULT_PRODUCT_CAP`]) are reached first.
pub fn exponent(s: &MatrixSet, cap: Option<usize>) -> Result<ExponentResult> {
    let cap = cap.unwrap_or(DEFAULT_PRODUCT_CAP);
    with_repr(
        s.n(),
        || exponent_with::<Packed<u64>>(s, cap),
        || exponent_with::<Packed<u128>>(s, cap),
        || exponent_with::<BoolMatrix>(s, cap),
    )
}

fn exponent_with<R: ProductRepr>(s: &MatrixSet, cap: usize) -> Result<ExponentResult> {
    let mut search = Search::<R>::new(s);
    match search.run(cap, true) {
        Outcome::Positive(idx) => {
            let witness = search.word(idx);
            Ok(ExponentResult { exponent: witness.len(), witness, products_explored: search.elems.len() })
        }
        Outcome::Closed => Err(Error::NotPrimitive),
        Outcome::Capped => Err(Error::CapExceeded { products_seen: search.elems.len() }),
    }
}

pub fn is_primitive(s: &MatrixSet, cap: Option<usize>) -> Result<bool> {
    match exponent(s, cap) {
        Ok(_) => Ok(true),
        Err(Error::NotPrimitive) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Full closure under right multiplication by the generators, up to `cap` elements.
pub fn semigroup_closure(s: &MatrixSet, cap: Option<usize>) -> SemigroupClosure {
    let cap = cap.unwrap_or(DEFAULT_PRODUCT_CAP);
    with_repr(
        s.n(),
        || closure_with::<Packed<u64>>(s, cap),
        || closure_with::<Packed<u128>>(s, cap),
        || closure_with::<BoolMatrix>(s, cap),
    )
}

fn closure_with<R: ProductRepr>(s: &MatrixSet, cap: usize) -> SemigroupClosure {
    let mut search = Search::<R>::new(s);
    let truncated = matches!(search.run(cap, false), Outcome::Capped);
    let n = s.n();
    let mut layers = Vec::new();
    let mut start = 0;
    for &end in &search.layer_ends {
        layers.push(start..end);
        start = end;
    }
    if truncated && start < search.elems.len() {
        layers.push(start..search.elems.len());
    }
    SemigroupClosure {
        elements: search.elems.iter().map(|e| e.unpack(n)).collect(),
        words: (0..search.elems.len()).map(|i| search.word(i)).collect(),
        layers,
        truncated,
    }
}

/// True iff the left-to-right product of `word` is all ones. Invalid indices give false.
pub fn verify_witness(s: &MatrixSet, word: &[usize]) -> bool {
    s.product_of(word).is_ok_and(|p| p.is_positive())
}

/// A nontrivial partition of the basis on which every matrix acts as a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PvCertificate {
    pub partition: Partition,
    /// `perms[m][i]` is the part that matrix `m` sends part `i` into.
    pub perms: Vec<Vec<usize>>,
}

/// Searches for a partition into at least two parts on which every matrix acts as a
/// permutation. For irreducible sets without zero rows or columns the set is
/// primitive exactly when none exists.
///
/// Partitions are enumerated in restricted-growth-string order, so this is only
/// practical up to `max_n` (default [`PV_MAX_N`]).
pub fn pv_partition_test(s: &MatrixSet, max_n: Option<usize>) -> Result<Option<PvCertificate>> {
    if let Some(bad) = s.matrices().iter().position(|m| !m.is_nz()) {
        return Err(Error::PreconditionViolated(format!("matrix {bad} has a zero row or column")));
    }
    if !s.is_irreducible() {
        return Err(Error::PreconditionViolated("matrix set is reducible".into()));
    }
    let max = max_n.unwrap_or(PV_MAX_N);
    if s.n() > max {
        return Err(Error::TooLarge { n: s.n(), max });
    }
    for rgs in SetPartitions::new(s.n()) {
        if rgs.iter().all(|&b| b == 0) {
            continue;
        }
        let partition = Partition::from_labels(&rgs);
        let perms: Option<Vec<Vec<usize>>> =
            s.matrices().iter().map(|m| m.acts_as_permutation(&partition)).collect();
        if let Some(perms) = perms {
            return Ok(Some(PvCertificate { partition, perms }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolmat::tests::example_set;

    fn wielandt(n: usize) -> BoolMatrix {
        BoolMatrix::wielandt(n).unwrap()
    }

    // independent oracle: smallest k with M^k positive, by repeated naive products
    fn power_oracle(m: &BoolMatrix) -> Option<usize> {
        let n = m.n();
        let mut p = m.clone();
        for k in 1..=(n * n) {
            if (0..n).all(|i| (0..n).all(|j| p.get(i, j))) {
                return Some(k);
            }
            let mut next = BoolMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    next.set(i, j, (0..n).any(|t| p.get(i, t) && m.get(t, j)));
                }
            }
            p = next;
        }
        None
    }

    #[test]
    fn example_set_exponent() {
        let r = exponent(&example_set(), None).unwrap();
        assert_eq!(r.exponent, 4);
        assert_eq!(r.witness, vec![0, 1, 0, 1]);
    }

    #[test]
    fn all_ones_has_exponent_one() {
        let s = MatrixSet::new(vec![BoolMatrix::all_ones(4)]).unwrap();
        assert_eq!(exponent(&s, None).unwrap().exponent, 1);
    }

    #[test]
    fn wielandt_matches_power_oracle() {
        for n in 3..=6 {
            let m = wielandt(n);
            let expected = power_oracle(&m).unwrap();
            assert_eq!(expected, n * n - 2 * n + 2);
            let s = MatrixSet::new(vec![m]).unwrap();
            assert_eq!(exponent(&s, None).unwrap().exponent, expected);
        }
    }

    #[test]
    fn imprimitive_examples() {
        let perms = MatrixSet::new(vec![
            BoolMatrix::from_function(&[1, 2, 0]).unwrap(),
            BoolMatrix::from_function(&[1, 0, 2]).unwrap(),
        ])
        .unwrap();
        assert!(!is_primitive(&perms, None).unwrap());
        let id = MatrixSet::new(vec![BoolMatrix::identity(3)]).unwrap();
        assert!(!is_primitive(&id, None).unwrap());
        assert!(is_primitive(&example_set(), None).unwrap());
    }

    #[test]
    fn cap_is_reported() {
        let s = MatrixSet::new(vec![wielandt(6)]).unwrap();
        assert_eq!(exponent(&s, Some(5)).unwrap_err(), Error::CapExceeded { products_seen: 5 });
    }

    #[test]
    fn witness_checks() {
        let s = example_set();
        assert!(verify_witness(&s, &[0, 1, 0, 1]));
        assert!(!verify_witness(&s, &[0, 0, 0, 0]));
        assert!(!verify_witness(&s, &[]));
        assert!(!verify_witness(&s, &[0, 7]));
    }

    #[test]
    fn closure_layers_and_minimality() {
        let s = example_set();
        let c = semigroup_closure(&s, None);
        assert!(!c.truncated);
        let e = exponent(&s, None).unwrap().exponent;
        for (len, layer) in c.layers.iter().enumerate() {
            for idx in layer.clone() {
                assert_eq!(c.words[idx].len(), len + 1);
                assert_eq!(s.product_of(&c.words[idx]).unwrap(), c.elements[idx]);
                if len + 1 < e {
                    assert!(!c.elements[idx].is_positive());
                }
            }
        }
        // closed under right multiplication by generators
        for el in &c.elements {
            for g in s.matrices() {
                assert!(c.elements.contains(&el.product(g).unwrap()));
            }
        }
    }

    #[test]
    fn representations_agree() {
        // 9x9 goes through the u128 path, 12x12 through the row-vector path
        for n in [8, 9, 12] {
            let s = MatrixSet::new(vec![wielandt(n)]).unwrap();
            let r = exponent(&s, None).unwrap();
            assert_eq!(r.exponent, n * n - 2 * n + 2);
            assert!(verify_witness(&s, &r.witness));
        }
    }

    #[test]
    fn pv_examples() {
        let s = MatrixSet::new(vec![
            BoolMatrix::from_function(&[1, 2, 3, 0]).unwrap(),
            BoolMatrix::identity(4),
        ])
        .unwrap();
        let cert = pv_partition_test(&s, None).unwrap().unwrap();
        for (m, perm) in s.matrices().iter().zip(&cert.perms) {
            assert_eq!(m.acts_as_permutation(&cert.partition).as_ref(), Some(perm));
        }

        let mut m2 = example_set().matrices()[1].clone();
        m2.set(0, 0, true);
        let filled = MatrixSet::new(vec![example_set().matrices()[0].clone(), m2]).unwrap();
        // M1 has a zero column, so the precondition fails
        assert!(matches!(pv_partition_test(&filled, None), Err(Error::PreconditionViolated(_))));

        let nz = MatrixSet::new(vec![
            BoolMatrix::from_rows(&[[0, 1, 0], [0, 1, 1], [1, 0, 1]]).unwrap(),
            BoolMatrix::from_rows(&[[1, 0, 0], [0, 1, 1], [1, 1, 0]]).unwrap(),
        ])
        .unwrap();
        assert!(is_primitive(&nz, None).unwrap());
        assert_eq!(pv_partition_test(&nz, None).unwrap(), None);
    }
}
