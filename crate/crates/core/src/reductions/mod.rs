//! Constructions between matrix sets and automata, each available bare or wrapped in
//! a certificate that can be re-verified from its stored witnesses.

mod certificate;
mod construct;

pub use certificate::{
    certify, certify_classc2nz, certify_m2pa, certify_nz2classc, certify_pa2m, certify_sandwich,
    certify_sink2nz, certify_ts2euler, Inequality, Instance, LinExpr, NamedInstance, RecheckReport,
    ReduceOptions, ReductionCertificate, ReductionKind, Relation, Stat, StatOrigin, Witness, WitnessData,
};
pub use construct::{
    classc_to_nz, derive_automaton, matrixset_to_partial, nz_to_classc_automata, partial_to_matrixset,
    sandwich_decomposition, selection_count, selection_letters, shortest_path, sink_to_nz,
    totalsupport_to_eulerian, DerivedAutomaton, GroupedAutomaton, Sandwich, WeightedAutomaton,
    DEFAULT_LETTER_CAP,
};
