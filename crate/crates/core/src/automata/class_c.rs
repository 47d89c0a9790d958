//! Alphabet partitions witnessing membership in class C.
//!
//! A block of letters qualifies when (1) every state is the target of some letter in
//! the block, and (2) the block's distinct letter functions realize every
//! combination of per-state targets, i.e. their number equals the product over
//! states of the number of distinct targets.

use std::collections::HashSet;

use super::PartialAutomaton;
use crate::error::{Error, Result};
use crate::partition::{Partition, SetPartitions};

/// Largest alphabet for which [`class_c_partition`] enumerates set partitions.
pub const CLASS_C_MAX_ALPHABET: usize = 12;

/// Searches alphabet partitions coarsest first (fewest blocks), and within a block
/// count in restricted-growth-string order; returns the first qualifying one.
pub fn class_c_partition(a: &PartialAutomaton) -> Result<Option<Partition>> {
    a.require_complete()?;
    let m = a.alphabet_size();
    if m > CLASS_C_MAX_ALPHABET {
        return Err(Error::AlphabetTooLarge { size: m, max: CLASS_C_MAX_ALPHABET });
    }
    // cache block verdicts by letter bitmask; many partitions share blocks
    let mut verdicts: std::collections::HashMap<u32, bool> = Default::default();
    for k in 1..=m {
        for rgs in SetPartitions::with_blocks(m, k) {
            let p = Partition::from_labels(&rgs);
            let ok = p.parts().iter().all(|block| {
                let key = block.iter().fold(0u32, |acc, &l| acc | (1 << l));
                *verdicts.entry(key).or_insert_with(|| block_reason(a, block).is_none())
            });
            if ok {
                return Ok(Some(p));
            }
        }
    }
    Ok(None)
}

/// Checks both class C conditions for every block of `p`; the error names the
/// first failing block and condition.
pub fn check_class_c(a: &PartialAutomaton, p: &Partition) -> Result<()> {
    a.require_complete()?;
    if p.n() != a.alphabet_size() {
        return Err(Error::NotClassC(format!(
            "partition covers {} letters, automaton has {}",
            p.n(),
            a.alphabet_size()
        )));
    }
    for (i, block) in p.parts().iter().enumerate() {
        if let Some(reason) = block_reason(a, block) {
            return Err(Error::NotClassC(format!("block {i} {block:?}: {reason}")));
        }
    }
    Ok(())
}

fn block_reason(a: &PartialAutomaton, block: &[usize]) -> Option<String> {
    let n = a.n();
    // options[q] = targets of state q under letters of the block
    let mut options = vec![0u64; n];
    for &l in block {
        for (q, t) in a.letter(l).iter().enumerate() {
            options[q] |= 1 << t.expect("complete automaton");
        }
    }
    let covered = options.iter().fold(0u64, |acc, &o| acc | o);
    if covered != a.all_states() {
        let missing = (!covered & a.all_states()).trailing_zeros();
        return Some(format!("state {missing} is not the target of any letter"));
    }
    let distinct: HashSet<&[Option<usize>]> = block.iter().map(|&l| a.letter(l)).collect();
    let combos = options
        .iter()
        .try_fold(1u128, |acc, o| acc.checked_mul(o.count_ones() as u128));
    if combos != Some(distinct.len() as u128) {
        return Some(format!(
            "{} distinct letters cannot realize {} target combinations",
            distinct.len(),
            combos.map_or_else(|| "overflowing".to_string(), |c| c.to_string())
        ));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::cerny;

    #[test]
    fn single_permutation_qualifies_whole() {
        let a = PartialAutomaton::complete(3, vec![vec![1, 2, 0]]).unwrap();
        assert_eq!(class_c_partition(&a).unwrap(), Some(Partition::whole(1)));
    }

    #[test]
    fn cerny_alone_has_no_partition() {
        for n in 3..=4 {
            assert_eq!(class_c_partition(&cerny(n).unwrap()).unwrap(), None);
        }
    }

    #[test]
    fn cerny_with_identity() {
        // letters a = 0, b = 1, c = 2
        for n in 3..=6 {
            let a = cerny(n).unwrap().with_identity_letter();
            let p = class_c_partition(&a).unwrap().unwrap();
            assert_eq!(p.parts(), &[vec![0, 2], vec![1]]);
            // a on its own never reaches state 0
            let other = Partition::new(3, vec![vec![0], vec![1, 2]]).unwrap();
            assert!(check_class_c(&a, &other).is_err());
        }
    }

    #[test]
    fn full_transformation_monoid_block() {
        // all 4 maps on 2 states in one block
        let a = PartialAutomaton::complete(2, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]])
            .unwrap();
        assert_eq!(class_c_partition(&a).unwrap(), Some(Partition::whole(4)));
    }

    #[test]
    fn rejects_large_alphabet() {
        let letters = vec![vec![0, 1]; 13];
        let a = PartialAutomaton::complete(2, letters).unwrap();
        assert_eq!(
            class_c_partition(&a).unwrap_err(),
            Error::AlphabetTooLarge { size: 13, max: CLASS_C_MAX_ALPHABET }
        );
    }
}
