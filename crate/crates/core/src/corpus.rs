//! Seeded instance generators.
//!
//! The stream is driven by `ChaCha8Rng::seed_from_u64(seed)` from `rand_chacha`.
//! Each instance draws, in order: its dimension `n` uniformly from `n_min..=n_max`,
//! its matrix or letter count uniformly from `letters_min..=letters_max`, then its
//! entries row by row. Rejected draws (a zero row, no synchronization) consume
//! randomness and are redrawn, so the stream depends only on the spec.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automata::{cerny, reset_threshold, PartialAutomaton, MAX_STATES};
use crate::boolmat::{BoolMatrix, MatrixSet};
use crate::error::{Error, Result};
use crate::reductions::Instance;

/// Redraws allowed for a single matrix or automaton before giving up.
const MAX_REDRAWS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Family {
    /// Random matrices with no zero row or column.
    RandomNzSet,
    /// Random matrices, no structural guarantee.
    RandomSet,
    /// Random partial automata; `undefined` is the chance of a missing transition.
    RandomPartialAut,
    /// Complete synchronizing automata with a sink state.
    RandomSinkAut,
    /// Each matrix is the entrywise OR of random permutation matrices.
    RandomTotalSupportSet,
    Cerny,
    CernyPlusIdentity,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::RandomNzSet,
        Family::RandomSet,
        Family::RandomPartialAut,
        Family::RandomSinkAut,
        Family::RandomTotalSupportSet,
        Family::Cerny,
        Family::CernyPlusIdentity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::RandomNzSet => "RANDOM_NZ_SET",
            Family::RandomSet => "RANDOM_SET",
            Family::RandomPartialAut => "RANDOM_PARTIAL_AUT",
            Family::RandomSinkAut => "RANDOM_SINK_AUT",
            Family::RandomTotalSupportSet => "RANDOM_TOTAL_SUPPORT_SET",
            Family::Cerny => "CERNY",
            Family::CernyPlusIdentity => "CERNY_PLUS_IDENTITY",
        }
    }

    pub fn emits_matrices(self) -> bool {
        matches!(self, Family::RandomNzSet | Family::RandomSet | Family::RandomTotalSupportSet)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(&norm))
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub family: Family,
    pub n_min: usize,
    pub n_max: usize,
    pub count: usize,
    pub seed: u64,
    /// Matrices per set or letters per automaton.
    pub letters_min: usize,
    pub letters_max: usize,
    /// Probability of a one entry in random matrices.
    pub density: f64,
    /// Probability of an undefined transition in random partial automata.
    pub undefined: f64,
    /// Permutations ORed into each total-support matrix.
    pub perms_min: usize,
    pub perms_max: usize,
}

impl CorpusSpec {
    pub fn new(family: Family, n: usize, count: usize, seed: u64) -> Self {
        CorpusSpec {
            family,
            n_min: n,
            n_max: n,
            count,
            seed,
            letters_min: 2,
            letters_max: 2,
            density: 0.4,
            undefined: 0.2,
            perms_min: 2,
            perms_max: 3,
        }
    }

    pub fn with_n_range(mut self, n_min: usize, n_max: usize) -> Self {
        self.n_min = n_min;
        self.n_max = n_max;
        self
    }

    pub fn with_letters(mut self, min: usize, max: usize) -> Self {
        self.letters_min = min;
        self.letters_max = max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::OutOfRange(msg));
        let min_n = if matches!(self.family, Family::Cerny | Family::CernyPlusIdentity) { 2 } else { 1 };
        if self.n_min < min_n || self.n_min > self.n_max {
            return bad(format!("n range {}..={} (minimum {min_n})", self.n_min, self.n_max));
        }
        if self.n_max > MAX_STATES {
            return Err(Error::TooLarge { n: self.n_max, max: MAX_STATES });
        }
        if self.letters_min == 0 || self.letters_min > self.letters_max {
            return bad(format!("letter range {}..={}", self.letters_min, self.letters_max));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return bad(format!("density {} outside (0, 1]", self.density));
        }
        if !(0.0..1.0).contains(&self.undefined) {
            return bad(format!("undefined probability {} outside [0, 1)", self.undefined));
        }
        if self.perms_min == 0 || self.perms_min > self.perms_max {
            return bad(format!("permutation range {}..={}", self.perms_min, self.perms_max));
        }
        Ok(())
    }
}

/// Endless instance stream for a spec; `count` is ignored here.
pub struct Corpus {
    spec: CorpusSpec,
    rng: ChaCha8Rng,
    index: usize,
}

impl Corpus {
    pub fn new(spec: &CorpusSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Corpus { spec: spec.clone(), rng: ChaCha8Rng::seed_from_u64(spec.seed), index: 0 })
    }

    fn next_instance(&mut self) -> Result<Instance> {
        let sp = &self.spec;
        let i = self.index;
        self.index += 1;
        match sp.family {
            Family::Cerny | Family::CernyPlusIdentity => {
                let n = sp.n_min + i % (sp.n_max - sp.n_min + 1);
                let c = cerny(n)?;
                return Ok(Instance::Automaton(if sp.family == Family::Cerny { c } else { c.with_identity_letter() }));
            }
            _ => {}
        }
        let rng = &mut self.rng;
        let n = rng.gen_range(sp.n_min..=sp.n_max);
        let k = rng.gen_range(sp.letters_min..=sp.letters_max);
        match sp.family {
            Family::RandomNzSet => {
                let ms = (0..k).map(|_| redraw(|| Some(random_matrix(rng, n, sp.density)).filter(BoolMatrix::is_nz)));
                Ok(Instance::Matrices(MatrixSet::new(ms.collect::<Result<_>>()?)?))
            }
            Family::RandomSet => {
                let ms = (0..k).map(|_| random_matrix(rng, n, sp.density)).collect();
                Ok(Instance::Matrices(MatrixSet::new(ms)?))
            }
            Family::RandomTotalSupportSet => {
                let ms = (0..k)
                    .map(|_| {
                        let r = rng.gen_range(sp.perms_min..=sp.perms_max);
                        let mut m = BoolMatrix::zeros(n);
                        for _ in 0..r {
                            let mut perm: Vec<usize> = (0..n).collect();
                            perm.shuffle(rng);
                            for (i, &j) in perm.iter().enumerate() {
                                m.set(i, j, true);
                            }
                        }
                        m
                    })
                    .collect();
                Ok(Instance::Matrices(MatrixSet::new(ms)?))
            }
            Family::RandomPartialAut => {
                let letters = (0..k)
                    .map(|_| {
                        (0..n)
                            .map(|_| if rng.gen_bool(sp.undefined) { None } else { Some(rng.gen_range(0..n)) })
                            .collect()
                    })
                    .collect();
                Ok(Instance::Automaton(PartialAutomaton::new(n, letters)?))
            }
            Family::RandomSinkAut => {
                let a = redraw(|| {
                    let sink = rng.gen_range(0..n);
                    let letters = (0..k)
                        .map(|_| (0..n).map(|q| if q == sink { sink } else { rng.gen_range(0..n) }).collect())
                        .collect();
                    let a = PartialAutomaton::complete(n, letters).expect("valid targets");
                    reset_threshold(&a).is_ok().then_some(a)
                })?;
                Ok(Instance::Automaton(a))
            }
            Family::Cerny | Family::CernyPlusIdentity => unreachable!(),
        }
    }
}

impl Iterator for Corpus {
    type Item = Result<Instance>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.next_instance())
    }
}

/// The first `spec.count` instances.
pub fn generate(spec: &CorpusSpec) -> Result<Vec<Instance>> {
    Corpus::new(spec)?.take(spec.count).collect()
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, density: f64) -> BoolMatrix {
    let mut m = BoolMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(density) {
                m.set(i, j, true);
            }
        }
    }
    m
}

fn redraw<T>(mut draw: impl FnMut() -> Option<T>) -> Result<T> {
    (0..MAX_REDRAWS)
        .find_map(|_| draw())
        .ok_or_else(|| Error::OutOfRange(format!("no acceptable instance in {MAX_REDRAWS} draws")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        for family in Family::ALL {
            let spec = CorpusSpec::new(family, 4, 5, 42).with_n_range(3, 5);
            assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap(), "{family}");
        }
        let a = generate(&CorpusSpec::new(Family::RandomSet, 4, 5, 1)).unwrap();
        let b = generate(&CorpusSpec::new(Family::RandomSet, 4, 5, 2)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn cerny_family() {
        let v = generate(&CorpusSpec::new(Family::Cerny, 4, 1, 0)).unwrap();
        assert_eq!(v, vec![Instance::Automaton(cerny(4).unwrap())]);
        let v = generate(&CorpusSpec::new(Family::CernyPlusIdentity, 3, 2, 0).with_n_range(3, 4)).unwrap();
        assert_eq!(v[1].as_automaton().unwrap().alphabet_size(), 3);
        assert_eq!(v[1].n(), 4);
    }

    #[test]
    fn total_support_by_construction() {
        let spec = CorpusSpec::new(Family::RandomTotalSupportSet, 4, 20, 7);
        for inst in generate(&spec).unwrap() {
            assert!(inst.as_matrices().unwrap().matrices().iter().all(BoolMatrix::has_total_support));
        }
    }

    #[test]
    fn sink_automata_by_construction() {
        let spec = CorpusSpec::new(Family::RandomSinkAut, 5, 20, 7).with_letters(2, 3);
        for inst in generate(&spec).unwrap() {
            let a = inst.as_automaton().unwrap();
            assert!(a.find_sink().is_some());
            assert!(reset_threshold(a).is_ok());
        }
    }

    #[test]
    fn nz_sets_and_ranges() {
        let spec = CorpusSpec::new(Family::RandomNzSet, 0, 30, 3).with_n_range(2, 4).with_letters(1, 3);
        for inst in generate(&spec).unwrap() {
            let s = inst.as_matrices().unwrap();
            assert!(s.all_nz());
            assert!((2..=4).contains(&s.n()) && (1..=3).contains(&s.len()));
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(CorpusSpec::new(Family::Cerny, 1, 1, 0).validate().is_err());
        let mut s = CorpusSpec::new(Family::RandomSet, 3, 1, 0);
        s.density = 0.0;
        assert!(s.validate().is_err());
        assert!(CorpusSpec::new(Family::RandomSet, 65, 1, 0).validate().is_err());
        assert_eq!("random-sink-aut".parse::<Family>().unwrap(), Family::RandomSinkAut);
    }
}
