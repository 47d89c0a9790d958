//! The constructions themselves, without certificates.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::automata::{careful_threshold, check_class_c, PartialAutomaton, Threshold};
use crate::boolmat::{bits, BoolMatrix, MatrixSet};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::primitivity::is_primitive;

/// Default bound on the number of selection functions derived from one matrix.
pub const DEFAULT_LETTER_CAP: usize = 20_000;

/// Number of selection functions of `m`: the product of row degrees, zero rows
/// counting as 1.
pub fn selection_count(m: &BoolMatrix) -> u128 {
    m.rows()
        .iter()
        .try_fold(1u128, |acc, r| acc.checked_mul(r.count_ones().max(1) as u128))
        .unwrap_or(u128::MAX)
}

/// All selection functions of `m`: row `i` picks one of its positive entries, or is
/// undefined when the row is zero. Ordered as an odometer with the last row fastest.
pub fn selection_letters(m: &BoolMatrix, cap: usize) -> Result<Vec<Vec<Option<usize>>>> {
    let required = selection_count(m);
    if required > cap as u128 {
        return Err(Error::LetterCapExceeded { required });
    }
    let options: Vec<Vec<usize>> = m.rows().iter().map(|&r| bits(r).collect()).collect();
    let n = m.n();
    let mut idx = vec![0usize; n];
    let mut out = Vec::with_capacity(required as usize);
    loop {
        out.push((0..n).map(|i| options[i].get(idx[i]).copied()).collect());
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if idx[i] + 1 < options[i].len() {
                idx[i] += 1;
                break;
            }
            idx[i] = 0;
        }
    }
}

/// Partial automaton whose letters are the selection functions of a matrix set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedAutomaton {
    pub automaton: PartialAutomaton,
    /// Index of the first matrix that produced each letter.
    pub origin: Vec<usize>,
}

impl DerivedAutomaton {
    /// Matrix indices spelling the same path as `word`.
    pub fn matrix_word(&self, word: &[usize]) -> Vec<usize> {
        word.iter().map(|&l| self.origin[l]).collect()
    }
}

/// Letters of all matrices in order, identical functions kept once.
pub fn derive_automaton(s: &MatrixSet, letter_cap: usize) -> Result<DerivedAutomaton> {
    let mut seen: HashMap<Vec<Option<usize>>, usize> = HashMap::new();
    let mut letters = Vec::new();
    let mut origin = Vec::new();
    for (mi, m) in s.matrices().iter().enumerate() {
        for letter in selection_letters(m, letter_cap)? {
            if seen.contains_key(&letter) {
                continue;
            }
            seen.insert(letter.clone(), letters.len());
            letters.push(letter);
            origin.push(mi);
        }
    }
    Ok(DerivedAutomaton { automaton: PartialAutomaton::new(s.n(), letters)?, origin })
}

pub fn matrixset_to_partial(s: &MatrixSet, letter_cap: usize) -> Result<PartialAutomaton> {
    Ok(derive_automaton(s, letter_cap)?.automaton)
}

/// Adjacency matrices of the letters followed by the rank-one matrices `e_k^T e`
/// (row `k` all ones) for `k = 0..n`.
pub fn partial_to_matrixset(a: &PartialAutomaton) -> MatrixSet {
    let n = a.n();
    let mut ms: Vec<BoolMatrix> = (0..a.alphabet_size()).map(|l| a.adjacency_matrix(l)).collect();
    for k in 0..n {
        let mut e = BoolMatrix::zeros(n);
        for j in 0..n {
            e.set(k, j, true);
        }
        ms.push(e);
    }
    MatrixSet::new(ms).expect("nonempty, common dimension")
}

/// A positive product `P Q R` built from shortest careful words of the two derived
/// automata and a shortest path between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sandwich {
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    pub r: Vec<usize>,
    /// Positive column of `P`, where `Q` starts.
    pub column: usize,
    /// Positive row of `R`, where `Q` ends.
    pub row: usize,
    pub car_a: Threshold,
    pub car_b: Threshold,
}

impl Sandwich {
    pub fn product(&self) -> Vec<usize> {
        [&self.p[..], &self.q[..], &self.r[..]].concat()
    }
}

pub fn sandwich_decomposition(s: &MatrixSet, letter_cap: usize) -> Result<Sandwich> {
    if !is_primitive(s, None)? {
        return Err(Error::NotPrimitive);
    }
    let a = derive_automaton(s, letter_cap)?;
    let b = derive_automaton(&s.transpose(), letter_cap)?;
    sandwich_from(s, &a, &b)
}

pub(crate) fn sandwich_from(s: &MatrixSet, a: &DerivedAutomaton, b: &DerivedAutomaton) -> Result<Sandwich> {
    let car_a = careful_threshold(&a.automaton)?;
    let car_b = careful_threshold(&b.automaton)?;
    let p = a.matrix_word(car_a.witness.letters());
    let mut r = b.matrix_word(car_b.witness.letters());
    r.reverse();
    let pm = s.product_of(&p)?;
    let rm = s.product_of(&r)?;
    let column = pm
        .positive_column()
        .ok_or_else(|| Error::PreconditionViolated("P has no positive column".into()))?;
    let row = rm
        .positive_row()
        .ok_or_else(|| Error::PreconditionViolated("R has no positive row".into()))?;
    let q = shortest_path(s, column, row)
        .ok_or_else(|| Error::PreconditionViolated(format!("no path from {column} to {row}")))?;
    Ok(Sandwich { p, q, r, column, row, car_a, car_b })
}

/// Matrix indices along a shortest path from `from` to `to` in the union digraph;
/// each edge is labelled by the least matrix containing it.
pub fn shortest_path(s: &MatrixSet, from: usize, to: usize) -> Option<Vec<usize>> {
    let n = s.n();
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = 1u64 << from;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut path = Vec::new();
            let mut v = to;
            while v != from {
                let (p, m) = prev[v].expect("visited");
                path.push(m);
                v = p;
            }
            path.reverse();
            return Some(path);
        }
        for (mi, m) in s.matrices().iter().enumerate() {
            for v in bits(m.row(u) & !seen) {
                seen |= 1 << v;
                prev[v] = Some((u, mi));
                queue.push_back(v);
            }
        }
    }
    None
}

/// Letter adjacency matrices with the sink row filled with ones.
pub fn sink_to_nz(a: &PartialAutomaton) -> Result<MatrixSet> {
    a.require_complete()?;
    if a.n() == 1 {
        let m = BoolMatrix::from_rows(&[[1u8, 1], [1, 0]]).expect("fixed 2x2");
        return MatrixSet::new(vec![m]);
    }
    let sink = a.find_sink().ok_or(Error::NoSink)?;
    crate::automata::reset_threshold(a)?;
    let ms = (0..a.alphabet_size())
        .map(|l| {
            let mut m = a.adjacency_matrix(l);
            for j in 0..a.n() {
                m.set(sink, j, true);
            }
            m
        })
        .collect();
    MatrixSet::new(ms)
}

/// One matrix per block: the OR of the block's letter adjacency matrices.
pub fn classc_to_nz(a: &PartialAutomaton, p: &Partition) -> Result<MatrixSet> {
    check_class_c(a, p)?;
    let ms = p
        .parts()
        .iter()
        .map(|block| {
            block
                .iter()
                .fold(BoolMatrix::zeros(a.n()), |acc, &l| acc.or(&a.adjacency_matrix(l)).expect("same n"))
        })
        .collect();
    MatrixSet::new(ms)
}

/// Complete automaton from an NZ set with letters grouped by source matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupedAutomaton {
    pub automaton: PartialAutomaton,
    pub partition: Partition,
}

/// Automata from `s` and from its transpose, letters grouped by matrix.
///
/// Identical functions coming from different matrices are kept as separate letters
/// so that each matrix keeps its own block.
pub fn nz_to_classc_automata(
    s: &MatrixSet,
    letter_cap: usize,
) -> Result<(GroupedAutomaton, GroupedAutomaton)> {
    if let Some(index) = s.matrices().iter().position(|m| !m.is_nz()) {
        return Err(Error::NotNz { index });
    }
    Ok((grouped(s, letter_cap)?, grouped(&s.transpose(), letter_cap)?))
}

fn grouped(s: &MatrixSet, letter_cap: usize) -> Result<GroupedAutomaton> {
    let mut letters = Vec::new();
    let mut parts = Vec::new();
    for m in s.matrices() {
        let family = selection_letters(m, letter_cap)?;
        parts.push((letters.len()..letters.len() + family.len()).collect());
        letters.extend(family);
    }
    let partition = Partition::new(letters.len(), parts)?;
    Ok(GroupedAutomaton { automaton: PartialAutomaton::new(s.n(), letters)?, partition })
}

/// Complete automaton with letter multiplicities making it Eulerian.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedAutomaton {
    pub automaton: PartialAutomaton,
    pub weights: Vec<u64>,
    /// Common line sum of the permutation cover of each matrix.
    pub h: Vec<u64>,
}

/// Automata from `s` and its transpose; a selection function `f` of `M` gets
/// multiplicity `prod_i D[i][f(i)]` for the permutation cover `D` of `M`.
pub fn totalsupport_to_eulerian(
    s: &MatrixSet,
    letter_cap: usize,
) -> Result<(WeightedAutomaton, WeightedAutomaton)> {
    if s.matrices().iter().any(|m| !m.has_total_support()) {
        return Err(Error::NoTotalSupport);
    }
    Ok((weighted(s, letter_cap)?, weighted(&s.transpose(), letter_cap)?))
}

fn weighted(s: &MatrixSet, letter_cap: usize) -> Result<WeightedAutomaton> {
    let mut letters = Vec::new();
    let mut weights = Vec::new();
    let mut h = Vec::new();
    for m in s.matrices() {
        let pattern = m.doubly_stochastic_pattern()?;
        h.push(pattern.h);
        for letter in selection_letters(m, letter_cap)? {
            let w = letter.iter().enumerate().try_fold(1u64, |acc, (i, t)| {
                acc.checked_mul(pattern.d[i][t.expect("NZ row")])
            });
            weights.push(w.ok_or_else(|| Error::OutOfRange("letter multiplicity overflows u64".into()))?);
            letters.push(letter);
        }
    }
    Ok(WeightedAutomaton { automaton: PartialAutomaton::new(s.n(), letters)?, weights, h })
}
