//! Complete and partial deterministic automata over a finite alphabet.
//!
//! States are `0..n` and state sets are `u64` bitmasks, so `n <= 64`. Letters are
//! partial transformations; a complete automaton is one with no undefined entry.

mod class_c;
mod greedy;
mod sync;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::boolmat::{bits, full_mask, BoolMatrix};
use crate::error::{Error, Result};

pub use class_c::{check_class_c, class_c_partition, CLASS_C_MAX_ALPHABET};
pub use greedy::{greedy_careful_word, GreedyOptions, GreedyResult, GreedyStep};
pub use sync::{careful_threshold, reset_threshold, Threshold};

/// Largest supported state count.
pub const MAX_STATES: usize = 64;

/// A set of states as a bitmask.
pub type StateSet = u64;

/// A sequence of letter indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialAutomaton {
    n: usize,
    letters: Vec<Vec<Option<usize>>>,
    // defined[l] = states on which letter l is defined
    defined: Vec<StateSet>,
}

impl PartialAutomaton {
    pub fn new(n: usize, letters: Vec<Vec<Option<usize>>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("automaton needs at least one state".into()));
        }
        if n > MAX_STATES {
            return Err(Error::TooLarge { n, max: MAX_STATES });
        }
        if letters.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut defined = Vec::with_capacity(letters.len());
        for letter in &letters {
            if letter.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: letter.len() });
            }
            let mut mask = 0u64;
            for (q, target) in letter.iter().enumerate() {
                if let Some(t) = *target {
                    if t >= n {
                        return Err(Error::IndexOutOfRange { index: t, limit: n });
                    }
                    mask |= 1 << q;
                }
            }
            defined.push(mask);
        }
        Ok(PartialAutomaton { n, letters, defined })
    }

    /// Complete automaton from total transition tables.
    pub fn complete(n: usize, letters: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(n, letters.into_iter().map(|l| l.into_iter().map(Some).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Vec<Option<usize>>] {
        &self.letters
    }

    pub fn letter(&self, l: usize) -> &[Option<usize>] {
        &self.letters[l]
    }

    #[inline]
    pub fn delta(&self, q: usize, l: usize) -> Option<usize> {
        self.letters[l][q]
    }

    pub fn all_states(&self) -> StateSet {
        full_mask(self.n)
    }

    /// Set of states on which letter `l` is defined.
    pub fn defined_on(&self, l: usize) -> StateSet {
        self.defined[l]
    }

    pub fn is_complete(&self) -> bool {
        let full = self.all_states();
        self.defined.iter().all(|&d| d == full)
    }

    pub(crate) fn require_complete(&self) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(Error::NotComplete)
        }
    }

    /// Image of `set` under letter `l`, or `None` when `l` is undefined somewhere on `set`.
    #[inline]
    pub fn image(&self, set: StateSet, l: usize) -> Option<StateSet> {
        if set & !self.defined[l] != 0 {
            return None;
        }
        let letter = &self.letters[l];
        Some(bits(set).fold(0, |acc, q| acc | (1u64 << letter[q].unwrap())))
    }

    /// Adjacency matrix of letter `l`: entry `(i, j)` set iff `i . l = j`.
    pub fn adjacency_matrix(&self, l: usize) -> BoolMatrix {
        let rows = self.letters[l].iter().map(|t| t.map_or(0, |j| 1u64 << j)).collect();
        BoolMatrix::from_row_bits(self.n, rows).expect("letter targets are in range")
    }

    /// Image of `set` under `word`, applied letter by letter.
    ///
    /// Fails with [`Error::UndefinedTransition`] naming the least current state and
    /// the word position at which a letter is undefined.
    pub fn apply_word(&self, set: StateSet, word: &Word) -> Result<StateSet> {
        if set & !self.all_states() != 0 {
            return Err(Error::IndexOutOfRange { index: 63 - set.leading_zeros() as usize, limit: self.n });
        }
        let mut cur = set;
        for (position, &l) in word.0.iter().enumerate() {
            if l >= self.letters.len() {
                return Err(Error::IndexOutOfRange { index: l, limit: self.letters.len() });
            }
            cur = match self.image(cur, l) {
                Some(next) => next,
                None => {
                    let state = (cur & !self.defined[l]).trailing_zeros() as usize;
                    return Err(Error::UndefinedTransition { state, position });
                }
            };
        }
        Ok(cur)
    }

    /// Each state's image under a word defined on all of `Q`.
    pub(crate) fn word_map(&self, word: &Word) -> Result<Vec<usize>> {
        (0..self.n)
            .map(|q| self.apply_word(1 << q, word).map(|s| s.trailing_zeros() as usize))
            .collect()
    }

    /// Least state fixed by every letter.
    pub fn find_sink(&self) -> Option<usize> {
        (0..self.n).find(|&q| self.letters.iter().all(|l| l[q] == Some(q)))
    }

    /// Weighted Eulerian test: every state's in-degree equals the common out-degree
    /// (the total letter weight). Without weights every letter counts once.
    pub fn is_eulerian(&self, weights: Option<&[u64]>) -> Result<bool> {
        self.require_complete()?;
        let weights: Vec<u128> = match weights {
            Some(w) => {
                if w.len() != self.letters.len() {
                    return Err(Error::DimensionMismatch { expected: self.letters.len(), found: w.len() });
                }
                if w.contains(&0) {
                    return Err(Error::OutOfRange("letter weights must be positive".into()));
                }
                w.iter().map(|&x| x as u128).collect()
            }
            None => vec![1; self.letters.len()],
        };
        let out_degree: u128 = weights.iter().sum();
        let mut in_degree = vec![0u128; self.n];
        for (letter, &w) in self.letters.iter().zip(&weights) {
            for t in letter {
                in_degree[t.expect("complete")] += w;
            }
        }
        Ok(in_degree.iter().all(|&d| d == out_degree))
    }

    /// The automaton with an extra identity letter appended.
    pub fn with_identity_letter(&self) -> Self {
        let mut letters = self.letters.clone();
        letters.push((0..self.n).map(Some).collect());
        PartialAutomaton::new(self.n, letters).expect("identity letter is valid")
    }

    /// Parses the `.paut` text format: a header line `n k`, then `k` lines of `n`
    /// tokens, each a 0-based target state or `-` for undefined.
    pub fn from_paut(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let nums: Vec<&str> = header.split_whitespace().collect();
        if nums.len() != 2 {
            return Err(Error::Parse(format!("header must be `n k`, got `{header}`")));
        }
        let parse_usize = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse(format!("not a nonnegative integer: `{s}`")))
        };
        let n = parse_usize(nums[0])?;
        let k = parse_usize(nums[1])?;
        let mut letters = Vec::with_capacity(k);
        for idx in 0..k {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {k} letter lines, found {idx}")))?;
            let letter = line
                .split_whitespace()
                .map(|tok| if tok == "-" { Ok(None) } else { parse_usize(tok).map(Some) })
                .collect::<Result<Vec<_>>>()?;
            if letter.len() != n {
                return Err(Error::Parse(format!(
                    "letter {idx} has {} tokens, expected {n}",
                    letter.len()
                )));
            }
            letters.push(letter);
        }
        if let Some(extra) = lines.next() {
            return Err(Error::Parse(format!("unexpected trailing line `{extra}`")));
        }
        Self::new(n, letters)
    }

    pub fn to_paut(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.letters.len());
        for letter in &self.letters {
            let toks: Vec<String> =
                letter.iter().map(|t| t.map_or_else(|| "-".to_string(), |s| s.to_string())).collect();
            out.push_str(&toks.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for PartialAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialAutomaton({:?})", self.to_paut())
    }
}

#[derive(Serialize, Deserialize)]
struct RawAutomaton {
    n: usize,
    letters: Vec<Vec<Option<usize>>>,
}

impl Serialize for PartialAutomaton {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawAutomaton { n: self.n, letters: self.letters.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartialAutomaton {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawAutomaton::deserialize(d)?;
        PartialAutomaton::new(raw.n, raw.letters).map_err(serde::de::Error::custom)
    }
}

/// The Černý automaton in the usual survey convention: letter `a` (index 0) is the
/// identity except `0 -> 1`, letter `b` (index 1) is the cyclic shift `i -> i+1 mod n`.
pub fn cerny(n: usize) -> Result<PartialAutomaton> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("cerny automaton needs n >= 2, got {n}")));
    }
    let a = (0..n).map(|i| if i == 0 { 1 } else { i }).collect();
    let b = (0..n).map(|i| (i + 1) % n).collect();
    PartialAutomaton::complete(n, vec![a, b])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_word_keeps_set() {
        let a = cerny(4).unwrap();
        assert_eq!(a.apply_word(0b1011, &Word::empty()).unwrap(), 0b1011);
    }

    #[test]
    fn cerny4_known_reset_word() {
        let a = cerny(4).unwrap();
        // (a b^3)^2 a
        let w = Word(vec![0, 1, 1, 1, 0, 1, 1, 1, 0]);
        let img = a.apply_word(a.all_states(), &w).unwrap();
        assert_eq!(img, 0b0010);
        let alt = Word(vec![1, 0, 1, 0, 1, 0, 1, 0, 1]);
        assert!(a.apply_word(a.all_states(), &alt).unwrap().count_ones() > 1);
    }

    #[test]
    fn undefined_transition_reported() {
        let a = PartialAutomaton::new(3, vec![vec![Some(1), None, Some(0)]]).unwrap();
        let err = a.apply_word(0b111, &Word(vec![0])).unwrap_err();
        assert_eq!(err, Error::UndefinedTransition { state: 1, position: 0 });
        // careful on {0, 2}: 0 -> 1, 2 -> 0, then 1 is undefined at position 1
        let err = a.apply_word(0b101, &Word(vec![0, 0])).unwrap_err();
        assert_eq!(err, Error::UndefinedTransition { state: 1, position: 1 });
    }

    #[test]
    fn cerny_shape() {
        for n in 2..8 {
            let c = cerny(n).unwrap();
            assert_eq!(c.alphabet_size(), 2);
            assert!(c.is_complete());
        }
        assert!(cerny(1).is_err());
    }

    #[test]
    fn eulerian_examples() {
        let perms = PartialAutomaton::complete(3, vec![vec![1, 2, 0], vec![0, 2, 1]]).unwrap();
        assert!(perms.is_eulerian(None).unwrap());
        let c3 = cerny(3).unwrap();
        assert!(!c3.is_eulerian(None).unwrap());
        let partial = PartialAutomaton::new(2, vec![vec![Some(0), None]]).unwrap();
        assert_eq!(partial.is_eulerian(None).unwrap_err(), Error::NotComplete);
    }

    #[test]
    fn weighted_eulerian() {
        // letters: constant-to-0, constant-to-1 with equal weight balance in-degrees
        let a = PartialAutomaton::complete(2, vec![vec![0, 0], vec![1, 1]]).unwrap();
        assert!(a.is_eulerian(None).unwrap());
        assert!(!a.is_eulerian(Some(&[2, 1])).unwrap());
        assert!(a.is_eulerian(Some(&[3, 3])).unwrap());
    }

    #[test]
    fn sink_examples() {
        let a = PartialAutomaton::complete(3, vec![vec![2, 2, 2], vec![1, 0, 2]]).unwrap();
        assert_eq!(a.find_sink(), Some(2));
        assert_eq!(cerny(4).unwrap().find_sink(), None);
        let id = PartialAutomaton::complete(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(id.find_sink(), Some(0));
    }

    #[test]
    fn paut_format() {
        let text = "3 2\n1 - 0\n2 2 2\n";
        let a = PartialAutomaton::from_paut(text).unwrap();
        assert_eq!(a.delta(1, 0), None);
        assert_eq!(a.delta(0, 1), Some(2));
        assert_eq!(a.to_paut(), text);
        assert!(!a.is_complete());
        assert!(PartialAutomaton::from_paut("3 1\n0 1\n").is_err());
        assert!(PartialAutomaton::from_paut("2 1\n0 2\n").is_err());
        assert!(PartialAutomaton::from_paut("2 1\n0 x\n").is_err());
        assert!(PartialAutomaton::from_paut("2 2\n0 1\n").is_err());
    }

    #[test]
    fn adjacency_of_partial_letter() {
        let a = PartialAutomaton::new(3, vec![vec![Some(1), None, Some(1)]]).unwrap();
        let m = a.adjacency_matrix(0);
        assert_eq!(m.to_rows(), vec![vec![0, 1, 0], vec![0, 0, 0], vec![0, 1, 0]]);
    }
}
