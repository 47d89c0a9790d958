//! Iterative construction of a carefully synchronizing word by shrinking the image
//! bound `k` in blocks of `ell` steps.
//!
//! Starting from a letter `u` defined everywhere that merges two states, each round
//! replaces `u_k` by `u_k t_1 u_k t_2 u_k ... t_ell u_k`, where every `t_s` is a
//! shortest word keeping the composite defined on all states and bringing the image
//! down to at most `k - s` states.

use serde::{Deserialize, Serialize};

use super::sync::{shortest_word, Search};
use super::{PartialAutomaton, Word};
use crate::boolmat::bits;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyOptions {
    /// Block sizes `ell`, consumed one per round; the last entry repeats.
    /// Each value is clamped to `k - 1`.
    pub schedule: Vec<usize>,
    /// Node cap for each inner search for a `t` word.
    pub step_cap: usize,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions { schedule: vec![1], step_cap: 1 << 22 }
    }
}

/// One round of the procedure: from bound `k` to `k - ell`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyStep {
    pub k: usize,
    pub ell: usize,
    /// `|u_k|` at the start of the round.
    pub u_len: usize,
    /// `|t_k^{k-s+1}|` for `s = 1..=ell`.
    pub t_lengths: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyResult {
    pub word: Word,
    pub trace: Vec<GreedyStep>,
}

impl GreedyResult {
    /// `(k, |u_k|)` for every bound reached, ending with `(1, |u_1|)` unless `n = 1`.
    pub fn word_lengths(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self.trace.iter().map(|s| (s.k, s.u_len)).collect();
        if let Some(last) = self.trace.last() {
            out.push((last.k - last.ell, self.word.len()));
        } else if !self.word.is_empty() {
            out.push((1, self.word.len()));
        }
        out
    }
}

pub fn greedy_careful_word(a: &PartialAutomaton, opts: &GreedyOptions) -> Result<GreedyResult> {
    if opts.schedule.is_empty() || opts.schedule.contains(&0) {
        return Err(Error::OutOfRange("schedule entries must be positive and nonempty".into()));
    }
    let n = a.n();
    if n == 1 {
        return Ok(GreedyResult { word: Word::empty(), trace: Vec::new() });
    }
    let full = a.all_states();
    let first = (0..a.alphabet_size())
        .find(|&l| a.image(full, l).is_some_and(|img| img != full))
        .ok_or_else(|| Error::ProcedureStuck {
            k: n,
            reason: "no letter is defined on every state and merges two of them".into(),
        })?;

    let mut u = Word(vec![first]);
    let mut k = n - 1;
    let mut trace = Vec::new();
    let mut round = 0;
    while k > 1 {
        let ell = opts.schedule[round.min(opts.schedule.len() - 1)].min(k - 1);
        round += 1;
        // u is defined on all of Q, so it acts as a total map on states
        let u_map = a.word_map(&u)?;
        let through_u = |set: u64| -> u64 {
            bits(set).fold(0, |acc, q| acc | (1u64 << u_map[q]))
        };
        let mut cur = u.clone();
        let mut t_lengths = Vec::with_capacity(ell);
        for s in 1..=ell {
            let bound = (k - s) as u32;
            let from = a.apply_word(full, &cur)?;
            let t = match shortest_word(a, from, |y| through_u(y).count_ones() <= bound, opts.step_cap) {
                Search::Found { word, .. } => word,
                Search::Exhausted => {
                    return Err(Error::ProcedureStuck {
                        k,
                        reason: format!("no word brings the image to at most {bound} states"),
                    })
                }
                Search::Capped => {
                    return Err(Error::ProcedureStuck {
                        k,
                        reason: format!("inner search exceeded {} images", opts.step_cap),
                    })
                }
            };
            t_lengths.push(t.len());
            cur.0.extend_from_slice(&t.0);
            cur.0.extend_from_slice(&u.0);
        }
        trace.push(GreedyStep { k, ell, u_len: u.len(), t_lengths });
        u = cur;
        k -= ell;
    }
    Ok(GreedyResult { word: u, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{careful_threshold, cerny, reset_threshold};

    #[test]
    fn one_state_gives_empty_word() {
        let a = PartialAutomaton::complete(1, vec![vec![0]]).unwrap();
        let r = greedy_careful_word(&a, &GreedyOptions::default()).unwrap();
        assert!(r.word.is_empty());
    }

    #[test]
    fn cerny4_word_synchronizes() {
        let a = cerny(4).unwrap();
        let r = greedy_careful_word(&a, &GreedyOptions::default()).unwrap();
        let img = a.apply_word(a.all_states(), &r.word).unwrap();
        assert_eq!(img.count_ones(), 1);
        assert!(r.word.len() >= reset_threshold(&a).unwrap().length);
        assert_eq!(r.trace.len(), 2);
    }

    #[test]
    fn ell_one_bound_on_cerny() {
        for n in 3..=8 {
            let a = cerny(n).unwrap();
            let r = greedy_careful_word(&a, &GreedyOptions::default()).unwrap();
            for (k, len) in r.word_lengths() {
                if 2 * k >= n {
                    let bound = (n - k) << (n - k - 1);
                    assert!(len <= bound, "n={n} k={k} |u_k|={len} > {bound}");
                }
            }
        }
    }

    #[test]
    fn larger_blocks_still_synchronize() {
        let a = cerny(6).unwrap();
        let opts = GreedyOptions { schedule: vec![3, 2], ..Default::default() };
        let r = greedy_careful_word(&a, &opts).unwrap();
        assert_eq!(r.trace.iter().map(|s| s.ell).collect::<Vec<_>>(), vec![3, 1]);
        assert_eq!(a.apply_word(a.all_states(), &r.word).unwrap().count_ones(), 1);
    }

    #[test]
    fn partial_automaton() {
        let a = PartialAutomaton::new(
            3,
            vec![vec![Some(0), Some(0), None], vec![Some(1), Some(2), Some(0)], vec![Some(0), Some(0), Some(1)]],
        )
        .unwrap();
        let r = greedy_careful_word(&a, &GreedyOptions::default()).unwrap();
        assert_eq!(a.apply_word(a.all_states(), &r.word).unwrap().count_ones(), 1);
        assert!(r.word.len() >= careful_threshold(&a).unwrap().length);
    }

    #[test]
    fn stuck_without_first_letter() {
        let a = PartialAutomaton::complete(2, vec![vec![1, 0]]).unwrap();
        assert!(matches!(
            greedy_careful_word(&a, &GreedyOptions::default()),
            Err(Error::ProcedureStuck { .. })
        ));
    }

    #[test]
    fn rejects_zero_schedule() {
        let a = cerny(3).unwrap();
        let opts = GreedyOptions { schedule: vec![0], ..Default::default() };
        assert!(greedy_careful_word(&a, &opts).is_err());
    }
}
