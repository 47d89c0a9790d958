//! Exact reset and careful-synchronization thresholds by breadth-first search over
//! images of the full state set.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{PartialAutomaton, StateSet, Word};
use crate::error::{Error, Result};

/// A shortest synchronizing word and its length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Threshold {
    pub length: usize,
    pub witness: Word,
    /// Distinct images visited by the search.
    pub sets_explored: usize,
}

/// Outcome of [`shortest_word`]: found, exhausted, or stopped at the node cap.
pub(crate) enum Search {
    Found { word: Word, explored: usize },
    Exhausted,
    Capped,
}

/// BFS from `start` over images under careful application (a letter is usable from
/// `S` only if it is defined on all of `S`). Letters are tried in increasing index
/// order, so the returned word is the lexicographically least among the shortest.
pub(crate) fn shortest_word(
    a: &PartialAutomaton,
    start: StateSet,
    goal: impl Fn(StateSet) -> bool,
    node_cap: usize,
) -> Search {
    if goal(start) {
        return Search::Found { word: Word::empty(), explored: 1 };
    }
    let mut parent: HashMap<StateSet, (StateSet, usize)> = HashMap::new();
    parent.insert(start, (start, usize::MAX));
    let mut queue = VecDeque::from([start]);
    while let Some(set) = queue.pop_front() {
        for l in 0..a.alphabet_size() {
            let Some(next) = a.image(set, l) else { continue };
            if let Entry::Vacant(slot) = parent.entry(next) {
                slot.insert((set, l));
                if goal(next) {
                    let explored = parent.len();
                    return Search::Found { word: rebuild(&parent, start, next), explored };
                }
                if parent.len() >= node_cap {
                    return Search::Capped;
                }
                queue.push_back(next);
            }
        }
    }
    Search::Exhausted
}

fn rebuild(parent: &HashMap<StateSet, (StateSet, usize)>, start: StateSet, end: StateSet) -> Word {
    let mut letters = Vec::new();
    let mut cur = end;
    while cur != start {
        let (prev, l) = parent[&cur];
        letters.push(l);
        cur = prev;
    }
    letters.reverse();
    Word(letters)
}

/// Reset threshold of a complete automaton with a shortest reset word.
pub fn reset_threshold(a: &PartialAutomaton) -> Result<Threshold> {
    a.require_complete()?;
    threshold(a).ok_or(Error::NotSynchronizing)
}

/// Length of a shortest carefully synchronizing word, with a witness.
/// On a complete automaton this coincides with [`reset_threshold`].
pub fn careful_threshold(a: &PartialAutomaton) -> Result<Threshold> {
    threshold(a).ok_or(Error::NotCarefullySynchronizing)
}

fn threshold(a: &PartialAutomaton) -> Option<Threshold> {
    match shortest_word(a, a.all_states(), |s| s.count_ones() == 1, usize::MAX) {
        Search::Found { word, explored } => {
            Some(Threshold { length: word.len(), witness: word, sets_explored: explored })
        }
        Search::Exhausted | Search::Capped => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::cerny;

    #[test]
    fn one_state_has_threshold_zero() {
        let a = PartialAutomaton::complete(1, vec![vec![0]]).unwrap();
        let t = reset_threshold(&a).unwrap();
        assert_eq!(t.length, 0);
        assert!(t.witness.is_empty());
    }

    #[test]
    fn cerny_thresholds() {
        for n in 2..=7 {
            let t = reset_threshold(&cerny(n).unwrap()).unwrap();
            assert_eq!(t.length, (n - 1) * (n - 1), "n = {n}");
        }
    }

    #[test]
    fn permutations_do_not_synchronize() {
        let a = PartialAutomaton::complete(3, vec![vec![1, 2, 0], vec![1, 0, 2]]).unwrap();
        assert_eq!(reset_threshold(&a).unwrap_err(), Error::NotSynchronizing);
    }

    #[test]
    fn reset_requires_complete() {
        let a = PartialAutomaton::new(2, vec![vec![Some(0), None]]).unwrap();
        assert_eq!(reset_threshold(&a).unwrap_err(), Error::NotComplete);
    }

    #[test]
    fn careful_equals_reset_on_cerny() {
        let c = cerny(5).unwrap();
        assert_eq!(careful_threshold(&c).unwrap(), reset_threshold(&c).unwrap());
    }

    #[test]
    fn no_admissible_first_letter() {
        let a = PartialAutomaton::new(
            3,
            vec![vec![Some(0), Some(0), None], vec![None, Some(1), Some(1)]],
        )
        .unwrap();
        assert_eq!(careful_threshold(&a).unwrap_err(), Error::NotCarefullySynchronizing);
    }

    #[test]
    fn careful_word_avoids_undefined() {
        // letter 0 is undefined on 2, so letter 2 has to clear state 2 first
        let a = PartialAutomaton::new(
            3,
            vec![
                vec![Some(0), Some(0), None],
                vec![Some(1), Some(2), Some(0)],
                vec![Some(0), Some(1), Some(1)],
            ],
        )
        .unwrap();
        let t = careful_threshold(&a).unwrap();
        assert_eq!(t.witness, Word(vec![2, 0]));
        let img = a.apply_word(a.all_states(), &t.witness).unwrap();
        assert_eq!(img.count_ones(), 1);
        // brute force over all words up to the found length
        let k = a.alphabet_size();
        for len in 0..t.length {
            for code in 0..k.pow(len as u32) {
                let mut c = code;
                let w: Vec<usize> = (0..len).map(|_| { let l = c % k; c /= k; l }).collect();
                if let Ok(s) = a.apply_word(a.all_states(), &Word(w)) {
                    assert_ne!(s.count_ones(), 1);
                }
            }
        }
    }
}
