//! Set partitions of `0..n` and their enumeration in restricted-growth-string order.
//!
//! The same type carries partitions of states, of basis vectors and of alphabet
//! indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition of `0..n` into nonempty, pairwise disjoint parts.
///
/// Parts are stored sorted internally and ordered by their least element, so two
/// partitions compare equal exactly when they describe the same set partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct Partition {
    n: usize,
    parts: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n: usize, parts: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut parts = parts;
        for part in &mut parts {
            if part.is_empty() {
                return Err(Error::InvalidPartition("empty part".into()));
            }
            part.sort_unstable();
            for &x in part.iter() {
                if x >= n {
                    return Err(Error::InvalidPartition(format!("element {x} outside 0..{n}")));
                }
                if seen[x] {
                    return Err(Error::InvalidPartition(format!("element {x} repeated")));
                }
                seen[x] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidPartition(format!("element {missing} not covered")));
        }
        parts.sort_unstable_by_key(|p| p[0]);
        Ok(Partition { n, parts })
    }

    /// Builds the partition whose blocks are the classes of equal labels.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut order: Vec<usize> = Vec::new();
        let mut parts: Vec<Vec<usize>> = Vec::new();
        for (x, &label) in labels.iter().enumerate() {
            match order.iter().position(|&l| l == label) {
                Some(p) => parts[p].push(x),
                None => {
                    order.push(label);
                    parts.push(vec![x]);
                }
            }
        }
        Partition { n: labels.len(), parts }
    }

    pub fn singletons(n: usize) -> Self {
        Partition { n, parts: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn whole(n: usize) -> Self {
        let parts = if n == 0 { Vec::new() } else { vec![(0..n).collect()] };
        Partition { n, parts }
    }

    /// Size of the ground set.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    /// `block_of()[x]` is the index of the part containing `x`.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (b, part) in self.parts.iter().enumerate() {
            for &x in part {
                out[x] = b;
            }
        }
        out
    }

    /// True iff `set` meets every part at most once.
    pub fn is_partial_transversal(&self, set: &[usize]) -> bool {
        let block = self.block_of();
        let mut hit = vec![false; self.parts.len()];
        let mut seen = vec![false; self.n];
        for &x in set {
            if x >= self.n || seen[x] {
                return false;
            }
            seen[x] = true;
            if std::mem::replace(&mut hit[block[x]], true) {
                return false;
            }
        }
        true
    }

    /// True iff `set` meets every part exactly once.
    pub fn is_transversal(&self, set: &[usize]) -> bool {
        set.len() == self.parts.len() && self.is_partial_transversal(set)
    }
}

impl TryFrom<Vec<Vec<usize>>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<Vec<usize>>) -> Result<Self> {
        let n = parts.iter().map(Vec::len).sum();
        Partition::new(n, parts)
    }
}

impl From<Partition> for Vec<Vec<usize>> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

/// Iterator over all set partitions of `0..n`, yielded as restricted growth
/// strings (`rgs[0] = 0`, `rgs[i] <= 1 + max(rgs[..i])`) in lexicographic order.
///
/// With [`SetPartitions::with_blocks`] only partitions with exactly `k` blocks
/// are produced, still in lexicographic order.
#[derive(Debug, Clone)]
pub struct SetPartitions {
    rgs: Vec<usize>,
    // prefix_max[i] = max(rgs[..=i])
    prefix_max: Vec<usize>,
    max_label: usize,
    exact_blocks: Option<usize>,
    started: bool,
    done: bool,
}

impl SetPartitions {
    pub fn new(n: usize) -> Self {
        SetPartitions {
            rgs: vec![0; n],
            prefix_max: vec![0; n],
            max_label: n.saturating_sub(1),
            exact_blocks: None,
            started: false,
            done: false,
        }
    }

    pub fn with_blocks(n: usize, k: usize) -> Self {
        let mut it = SetPartitions::new(n);
        if k == 0 || k > n {
            it.done = n != 0 || k != 0;
        }
        it.max_label = k.saturating_sub(1);
        it.exact_blocks = Some(k);
        it
    }

    fn advance(&mut self) -> bool {
        let n = self.rgs.len();
        let mut i = n;
        while i > 1 {
            i -= 1;
            let bound = (self.prefix_max[i - 1] + 1).min(self.max_label);
            if self.rgs[i] < bound {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return true;
            }
        }
        false
    }

    fn blocks(&self) -> usize {
        self.prefix_max.last().map_or(0, |m| m + 1)
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        loop {
            if self.done {
                return None;
            }
            if self.started {
                if !self.advance() {
                    self.done = true;
                    return None;
                }
            } else {
                self.started = true;
            }
            match self.exact_blocks {
                Some(k) if self.blocks() != k => continue,
                _ => return Some(self.rgs.clone()),
            }
        }
    }
}

/// Bell number B(n), computed with the Bell triangle. Saturates at `u64::MAX`.
pub fn bell(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last.saturating_add(x));
        }
        row = next;
    }
    row[0]
}
