//! Self-contained certificates for the constructions.
//!
//! A certificate stores the source and target instances, named witnesses (words,
//! partitions, multiplicities), named integer statistics each with the recipe that
//! recomputes it, and linear inequalities between statistics. [`ReductionCertificate::recheck`]
//! rebuilds the targets and replays everything from the stored data alone.

use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::construct::{
    classc_to_nz, derive_automaton, nz_to_classc_automata, partial_to_matrixset, sandwich_from,
    sink_to_nz, totalsupport_to_eulerian, DEFAULT_LETTER_CAP,
};
use crate::automata::{
    careful_threshold, check_class_c, class_c_partition, reset_threshold, PartialAutomaton, Word,
};
use crate::boolmat::MatrixSet;
use crate::bounds::catalog_value;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::primitivity::exponent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReductionKind {
    /// Matrix set to partial automaton.
    #[serde(rename = "M2PA")]
    M2pa,
    /// Partial automaton to matrix set.
    #[serde(rename = "PA2M")]
    Pa2m,
    /// Positive product from careful words of the set and of its transpose.
    #[serde(rename = "SANDWICH")]
    Sandwich,
    /// Automaton with a sink to an NZ set.
    #[serde(rename = "SINK2NZ")]
    Sink2nz,
    /// Class C automaton to an NZ set.
    #[serde(rename = "CLASSC2NZ")]
    Classc2nz,
    /// NZ set to a pair of class C automata.
    #[serde(rename = "NZ2CLASSC")]
    Nz2classc,
    /// Total-support set to a pair of Eulerian automata.
    #[serde(rename = "TS2EULER")]
    Ts2euler,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 7] = [
        ReductionKind::M2pa,
        ReductionKind::Pa2m,
        ReductionKind::Sandwich,
        ReductionKind::Sink2nz,
        ReductionKind::Classc2nz,
        ReductionKind::Nz2classc,
        ReductionKind::Ts2euler,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::M2pa => "M2PA",
            ReductionKind::Pa2m => "PA2M",
            ReductionKind::Sandwich => "SANDWICH",
            ReductionKind::Sink2nz => "SINK2NZ",
            ReductionKind::Classc2nz => "CLASSC2NZ",
            ReductionKind::Nz2classc => "NZ2CLASSC",
            ReductionKind::Ts2euler => "TS2EULER",
        }
    }

    /// Whether the source instance is a matrix set (otherwise an automaton).
    pub fn takes_matrices(self) -> bool {
        matches!(
            self,
            ReductionKind::M2pa | ReductionKind::Sandwich | ReductionKind::Nz2classc | ReductionKind::Ts2euler
        )
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ReductionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReductionKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown reduction kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Instance {
    Matrices(MatrixSet),
    Automaton(PartialAutomaton),
}

impl Instance {
    pub fn n(&self) -> usize {
        match self {
            Instance::Matrices(s) => s.n(),
            Instance::Automaton(a) => a.n(),
        }
    }

    /// Matrix count or alphabet size.
    pub fn size(&self) -> usize {
        match self {
            Instance::Matrices(s) => s.len(),
            Instance::Automaton(a) => a.alphabet_size(),
        }
    }

    pub fn as_matrices(&self) -> Option<&MatrixSet> {
        match self {
            Instance::Matrices(s) => Some(s),
            Instance::Automaton(_) => None,
        }
    }

    pub fn as_automaton(&self) -> Option<&PartialAutomaton> {
        match self {
            Instance::Automaton(a) => Some(a),
            Instance::Matrices(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedInstance {
    pub name: String,
    #[serde(flatten)]
    pub instance: Instance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessData {
    /// Matrix indices whose product is all ones.
    PositiveProduct { word: Vec<usize> },
    /// Matrix indices whose product has an all-ones column.
    PositiveColumn { word: Vec<usize>, column: usize },
    /// Matrix indices whose product has an all-ones row.
    PositiveRow { word: Vec<usize>, row: usize },
    /// Matrix indices whose product has a nonzero entry.
    PositiveEntry { word: Vec<usize>, row: usize, column: usize },
    /// Word of a complete automaton mapping all states to one.
    ResetWord { word: Word },
    /// Careful word mapping all states to one.
    CarefulWord { word: Word },
    /// Alphabet partition meeting both class C conditions.
    ClassCPartition { partition: Partition },
    /// Letter multiplicities under which the automaton is Eulerian.
    EulerianWeights { weights: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub name: String,
    /// Name of the instance the witness refers to.
    pub instance: String,
    /// Claimed to be a shortest witness of its kind.
    pub minimal: bool,
    #[serde(flatten)]
    pub data: WitnessData,
}

impl Witness {
    pub fn length(&self) -> Option<usize> {
        match &self.data {
            WitnessData::PositiveProduct { word }
            | WitnessData::PositiveColumn { word, .. }
            | WitnessData::PositiveRow { word, .. }
            | WitnessData::PositiveEntry { word, .. } => Some(word.len()),
            WitnessData::ResetWord { word } | WitnessData::CarefulWord { word } => Some(word.len()),
            WitnessData::ClassCPartition { .. } | WitnessData::EulerianWeights { .. } => None,
        }
    }
}

/// How a statistic is recomputed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "origin", rename_all = "snake_case")]
pub enum StatOrigin {
    /// State count or matrix dimension.
    Dimension { instance: String },
    /// Matrix count or alphabet size.
    Size { instance: String },
    /// Number of NZ matrices.
    NzCount { instance: String },
    WitnessLength { witness: String },
    /// 1 when the witness replays successfully, else 0.
    WitnessHolds { witness: String },
    Max { of: Vec<String> },
    /// Catalog bound evaluated at the dimension of an instance.
    Catalog { entry: String, instance: String },
    /// Line sum of the permutation cover of one matrix.
    CoverSum { instance: String, matrix: usize },
    Constant { constant: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stat {
    pub name: String,
    pub value: i64,
    #[serde(flatten)]
    pub origin: StatOrigin,
}

/// `constant + sum(coef * stat)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinExpr {
    pub terms: Vec<(i64, String)>,
    pub constant: i64,
}

impl LinExpr {
    pub fn new(terms: &[(i64, &str)], constant: i64) -> Self {
        LinExpr { terms: terms.iter().map(|&(c, s)| (c, s.to_string())).collect(), constant }
    }

    pub fn stat(name: &str) -> Self {
        LinExpr::new(&[(1, name)], 0)
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, (c, name)) in self.terms.iter().enumerate() {
            let sign = if *c < 0 { "-" } else if i > 0 { "+" } else { "" };
            if !out.is_empty() {
                out.push(' ');
            }
            if !sign.is_empty() {
                out.push_str(sign);
                if i > 0 {
                    out.push(' ');
                }
            }
            if c.abs() != 1 {
                out.push_str(&format!("{}*", c.abs()));
            }
            out.push_str(name);
        }
        if self.constant != 0 || out.is_empty() {
            if out.is_empty() {
                out = self.constant.to_string();
            } else {
                let sign = if self.constant < 0 { '-' } else { '+' };
                out.push_str(&format!(" {sign} {}", self.constant.abs()));
            }
        }
        f.write_str(&out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub statement: String,
    pub lhs: LinExpr,
    pub relation: Relation,
    pub rhs: LinExpr,
    pub lhs_value: i64,
    pub rhs_value: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionCertificate {
    pub kind: ReductionKind,
    pub letter_cap: usize,
    /// The source instance comes first, named `source`.
    pub instances: Vec<NamedInstance>,
    pub source_stats: Vec<Stat>,
    pub target_stats: Vec<Stat>,
    pub witnesses: Vec<Witness>,
    pub inequalities_checked: Vec<Inequality>,
    pub notes: Vec<String>,
}

/// Problems found by [`ReductionCertificate::recheck`]; empty means the certificate holds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecheckReport {
    pub problems: Vec<String>,
}

impl RecheckReport {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReduceOptions {
    pub letter_cap: usize,
    /// Distinct-product cap for exponent searches.
    pub product_cap: Option<usize>,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions { letter_cap: DEFAULT_LETTER_CAP, product_cap: None }
    }
}

impl ReductionCertificate {
    pub fn source(&self) -> &Instance {
        &self.instances[0].instance
    }

    pub fn instance(&self, name: &str) -> Option<&Instance> {
        self.instances.iter().find(|i| i.name == name).map(|i| &i.instance)
    }

    pub fn witness(&self, name: &str) -> Option<&Witness> {
        self.witnesses.iter().find(|w| w.name == name)
    }

    pub fn stat(&self, name: &str) -> Option<i64> {
        self.source_stats.iter().chain(&self.target_stats).find(|s| s.name == name).map(|s| s.value)
    }

    /// Every recorded inequality holds.
    pub fn all_pass(&self) -> bool {
        self.inequalities_checked.iter().all(|i| i.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Rebuilds the targets from the source, replays every witness, recomputes every
    /// statistic and re-evaluates every inequality. With `exact`, witnesses marked
    /// minimal are also checked against a fresh shortest-witness search.
    pub fn recheck(&self, exact: bool) -> RecheckReport {
        let mut problems = Vec::new();
        if let Err(e) = self.rebuild() {
            problems.push(format!("rebuild: {e}"));
        }
        for w in &self.witnesses {
            match replay(self, w) {
                Ok(true) => {}
                Ok(false) => problems.push(format!("witness {}: replay failed", w.name)),
                Err(e) => problems.push(format!("witness {}: {e}", w.name)),
            }
            if exact && w.minimal {
                match shortest_length(self, w) {
                    Ok(len) if Some(len) == w.length() => {}
                    Ok(len) => problems.push(format!(
                        "witness {}: length {:?} but shortest is {len}",
                        w.name,
                        w.length()
                    )),
                    Err(e) => problems.push(format!("witness {}: {e}", w.name)),
                }
            }
        }
        for s in self.source_stats.iter().chain(&self.target_stats) {
            match eval_origin(self, &s.origin) {
                Ok(v) if v == s.value => {}
                Ok(v) => problems.push(format!("stat {}: stored {} but recomputed {v}", s.name, s.value)),
                Err(e) => problems.push(format!("stat {}: {e}", s.name)),
            }
        }
        for ineq in &self.inequalities_checked {
            match (eval_expr(self, &ineq.lhs), eval_expr(self, &ineq.rhs)) {
                (Ok(l), Ok(r)) => {
                    let pass = ineq.relation.holds(l, r);
                    if (l, r, pass) != (ineq.lhs_value, ineq.rhs_value, ineq.pass) {
                        problems.push(format!(
                            "inequality {}: stored ({}, {}, {}) but recomputed ({l}, {r}, {pass})",
                            ineq.name, ineq.lhs_value, ineq.rhs_value, ineq.pass
                        ));
                    }
                    if !pass {
                        problems.push(format!("inequality {} fails: {l} vs {r}", ineq.name));
                    }
                }
                (Err(e), _) | (_, Err(e)) => problems.push(format!("inequality {}: {e}", ineq.name)),
            }
        }
        RecheckReport { problems }
    }

    fn rebuild(&self) -> std::result::Result<(), String> {
        let cap = self.letter_cap;
        let matrices = |name: &str| -> std::result::Result<&MatrixSet, String> {
            self.instance(name).and_then(Instance::as_matrices).ok_or(format!("missing matrix set {name}"))
        };
        let automaton = |name: &str| -> std::result::Result<&PartialAutomaton, String> {
            self.instance(name)
                .and_then(Instance::as_automaton)
                .ok_or(format!("missing automaton {name}"))
        };
        let expect = |name: &str, built: Instance| -> std::result::Result<(), String> {
            match self.instance(name) {
                Some(stored) if *stored == built => Ok(()),
                Some(_) => Err(format!("instance {name} differs from the rebuilt one")),
                None => Err(format!("missing instance {name}")),
            }
        };
        let s = |e: Error| e.to_string();
        match self.kind {
            ReductionKind::M2pa => {
                let d = derive_automaton(matrices("source")?, cap).map_err(s)?;
                expect("target", Instance::Automaton(d.automaton))
            }
            ReductionKind::Pa2m => {
                expect("target", Instance::Matrices(partial_to_matrixset(automaton("source")?)))
            }
            ReductionKind::Sandwich => {
                let src = matrices("source")?;
                let a = derive_automaton(src, cap).map_err(s)?;
                let b = derive_automaton(&src.transpose(), cap).map_err(s)?;
                expect("a", Instance::Automaton(a.automaton.clone()))?;
                expect("b", Instance::Automaton(b.automaton.clone()))?;
                self.check_sandwich_words(&a, &b)
            }
            ReductionKind::Sink2nz => {
                expect("target", Instance::Matrices(sink_to_nz(automaton("source")?).map_err(s)?))
            }
            ReductionKind::Classc2nz => {
                let Some(WitnessData::ClassCPartition { partition }) = self.witness("partition").map(|w| &w.data)
                else {
                    return Err("missing partition witness".into());
                };
                let built = classc_to_nz(automaton("source")?, partition).map_err(s)?;
                expect("target", Instance::Matrices(built))
            }
            ReductionKind::Nz2classc => {
                let (a, b) = nz_to_classc_automata(matrices("source")?, cap).map_err(s)?;
                expect("a", Instance::Automaton(a.automaton))?;
                expect("b", Instance::Automaton(b.automaton))?;
                for (w, p) in [("partition_a", a.partition), ("partition_b", b.partition)] {
                    match self.witness(w).map(|w| &w.data) {
                        Some(WitnessData::ClassCPartition { partition }) if *partition == p => {}
                        _ => return Err(format!("witness {w} is not the grouping by matrix")),
                    }
                }
                Ok(())
            }
            ReductionKind::Ts2euler => {
                let (a, b) = totalsupport_to_eulerian(matrices("source")?, cap).map_err(s)?;
                expect("a", Instance::Automaton(a.automaton))?;
                expect("b", Instance::Automaton(b.automaton))?;
                for (w, weights) in [("weights_a", a.weights), ("weights_b", b.weights)] {
                    match self.witness(w).map(|w| &w.data) {
                        Some(WitnessData::EulerianWeights { weights: stored }) if *stored == weights => {}
                        _ => return Err(format!("witness {w} differs from the computed multiplicities")),
                    }
                }
                Ok(())
            }
        }
    }

    /// P and R spell the careful words of the derived automata, Q joins P's positive
    /// column to R's positive row, and the full product is P Q R.
    fn check_sandwich_words(
        &self,
        a: &super::construct::DerivedAutomaton,
        b: &super::construct::DerivedAutomaton,
    ) -> std::result::Result<(), String> {
        let word = |name: &str| self.witness(name).map(|w| &w.data);
        let (Some(WitnessData::CarefulWord { word: wa }), Some(WitnessData::CarefulWord { word: wb })) =
            (word("car_a"), word("car_b"))
        else {
            return Err("missing careful words".into());
        };
        let (
            Some(WitnessData::PositiveColumn { word: p, column }),
            Some(WitnessData::PositiveEntry { word: q, row: qi, column: qj }),
            Some(WitnessData::PositiveRow { word: r, row }),
            Some(WitnessData::PositiveProduct { word: pqr }),
        ) = (word("p"), word("q"), word("r"), word("pqr"))
        else {
            return Err("missing P, Q, R or PQR".into());
        };
        if *p != a.matrix_word(wa.letters()) {
            return Err("P does not spell the careful word of a".into());
        }
        let mut rr = b.matrix_word(wb.letters());
        rr.reverse();
        if *r != rr {
            return Err("R does not spell the reversed careful word of b".into());
        }
        if (qi, qj) != (column, row) {
            return Err("Q does not join P's column to R's row".into());
        }
        if *pqr != [&p[..], &q[..], &r[..]].concat() {
            return Err("PQR is not the concatenation".into());
        }
        Ok(())
    }
}

fn replay(c: &ReductionCertificate, w: &Witness) -> std::result::Result<bool, String> {
    let inst = c.instance(&w.instance).ok_or(format!("unknown instance {}", w.instance))?;
    let product = |word: &[usize]| -> std::result::Result<crate::boolmat::BoolMatrix, String> {
        let s = inst.as_matrices().ok_or("witness needs a matrix set")?;
        if let Some(&bad) = word.iter().find(|&&i| i >= s.len()) {
            return Err(format!("matrix index {bad} out of range"));
        }
        s.product_of(word).map_err(|e| e.to_string())
    };
    let automaton = || inst.as_automaton().ok_or("witness needs an automaton".to_string());
    let n = inst.n();
    Ok(match &w.data {
        WitnessData::PositiveProduct { word } => product(word)?.is_positive(),
        WitnessData::PositiveColumn { word, column } => {
            *column < n && (0..n).all(|i| product(word).map(|m| m.get(i, *column)).unwrap_or(false))
        }
        WitnessData::PositiveRow { word, row } => {
            let m = product(word)?;
            *row < n && (0..n).all(|j| m.get(*row, j))
        }
        WitnessData::PositiveEntry { word, row, column } => {
            *row < n && *column < n && product(word)?.get(*row, *column)
        }
        WitnessData::ResetWord { word } | WitnessData::CarefulWord { word } => {
            let a = automaton()?;
            if matches!(w.data, WitnessData::ResetWord { .. }) && !a.is_complete() {
                return Ok(false);
            }
            if let Some(&bad) = word.letters().iter().find(|&&l| l >= a.alphabet_size()) {
                return Err(format!("letter {bad} out of range"));
            }
            a.apply_word(a.all_states(), word).map(|s| s.count_ones() == 1).unwrap_or(false)
        }
        WitnessData::ClassCPartition { partition } => check_class_c(automaton()?, partition).is_ok(),
        WitnessData::EulerianWeights { weights } => {
            automaton()?.is_eulerian(Some(weights)).map_err(|e| e.to_string())?
        }
    })
}

fn shortest_length(c: &ReductionCertificate, w: &Witness) -> std::result::Result<usize, String> {
    let inst = c.instance(&w.instance).ok_or(format!("unknown instance {}", w.instance))?;
    let s = |e: Error| e.to_string();
    match (&w.data, inst) {
        (WitnessData::PositiveProduct { .. }, Instance::Matrices(m)) => {
            Ok(exponent(m, None).map_err(s)?.exponent)
        }
        (WitnessData::ResetWord { .. }, Instance::Automaton(a)) => Ok(reset_threshold(a).map_err(s)?.length),
        (WitnessData::CarefulWord { .. }, Instance::Automaton(a)) => Ok(careful_threshold(a).map_err(s)?.length),
        _ => Err("minimality is only defined for products and synchronizing words".into()),
    }
}

fn eval_origin(c: &ReductionCertificate, origin: &StatOrigin) -> std::result::Result<i64, String> {
    let inst = |name: &str| c.instance(name).ok_or(format!("unknown instance {name}"));
    let to_i64 = |v: usize| i64::try_from(v).map_err(|e| e.to_string());
    match origin {
        StatOrigin::Dimension { instance } => to_i64(inst(instance)?.n()),
        StatOrigin::Size { instance } => to_i64(inst(instance)?.size()),
        StatOrigin::NzCount { instance } => {
            let s = inst(instance)?.as_matrices().ok_or("not a matrix set")?;
            to_i64(s.matrices().iter().filter(|m| m.is_nz()).count())
        }
        StatOrigin::WitnessLength { witness } => {
            let w = c.witness(witness).ok_or(format!("unknown witness {witness}"))?;
            to_i64(w.length().ok_or("witness has no length")?)
        }
        StatOrigin::WitnessHolds { witness } => {
            let w = c.witness(witness).ok_or(format!("unknown witness {witness}"))?;
            Ok(replay(c, w)? as i64)
        }
        StatOrigin::Max { of } => of
            .iter()
            .map(|name| c.stat(name).ok_or(format!("unknown stat {name}")))
            .try_fold(i64::MIN, |acc, v| v.map(|v| acc.max(v))),
        StatOrigin::Catalog { entry, instance } => catalog_value(entry, inst(instance)?.n())
            .ok_or(format!("unknown catalog entry {entry}"))?
            .to_i64()
            .ok_or_else(|| "catalog value does not fit i64".to_string()),
        StatOrigin::CoverSum { instance, matrix } => {
            let s = inst(instance)?.as_matrices().ok_or("not a matrix set")?;
            let m = s.get(*matrix).ok_or(format!("no matrix {matrix}"))?;
            let h = m.doubly_stochastic_pattern().map_err(|e| e.to_string())?.h;
            i64::try_from(h).map_err(|e| e.to_string())
        }
        StatOrigin::Constant { constant } => Ok(*constant),
    }
}

fn eval_expr(c: &ReductionCertificate, e: &LinExpr) -> std::result::Result<i64, String> {
    e.terms.iter().try_fold(e.constant, |acc, (coef, name)| {
        let v = c.stat(name).ok_or(format!("unknown stat {name}"))?;
        Ok(acc + coef * v)
    })
}

struct Builder {
    cert: ReductionCertificate,
}

impl Builder {
    fn new(kind: ReductionKind, letter_cap: usize, source: Instance) -> Self {
        Builder {
            cert: ReductionCertificate {
                kind,
                letter_cap,
                instances: vec![NamedInstance { name: "source".into(), instance: source }],
                source_stats: Vec::new(),
                target_stats: Vec::new(),
                witnesses: Vec::new(),
                inequalities_checked: Vec::new(),
                notes: Vec::new(),
            },
        }
    }

    fn instance(&mut self, name: &str, instance: Instance) {
        self.cert.instances.push(NamedInstance { name: name.into(), instance });
    }

    fn witness(&mut self, name: &str, instance: &str, minimal: bool, data: WitnessData) {
        self.cert.witnesses.push(Witness { name: name.into(), instance: instance.into(), minimal, data });
    }

    fn stat(&mut self, target: bool, name: &str, origin: StatOrigin) {
        let value = eval_origin(&self.cert, &origin).expect("statistic of a freshly built certificate");
        let stat = Stat { name: name.into(), value, origin };
        if target {
            self.cert.target_stats.push(stat);
        } else {
            self.cert.source_stats.push(stat);
        }
    }

    fn source_stat(&mut self, name: &str, origin: StatOrigin) {
        self.stat(false, name, origin)
    }

    fn target_stat(&mut self, name: &str, origin: StatOrigin) {
        self.stat(true, name, origin)
    }

    fn length_stat(&mut self, target: bool, witness: &str) {
        self.stat(target, witness, StatOrigin::WitnessLength { witness: witness.into() })
    }

    fn check(&mut self, name: &str, lhs: LinExpr, relation: Relation, rhs: LinExpr) {
        let l = eval_expr(&self.cert, &lhs).expect("known stats");
        let r = eval_expr(&self.cert, &rhs).expect("known stats");
        self.cert.inequalities_checked.push(Inequality {
            name: name.into(),
            statement: format!("{lhs} {} {rhs}", relation.symbol()),
            lhs,
            relation,
            rhs,
            lhs_value: l,
            rhs_value: r,
            pass: relation.holds(l, r),
        });
    }

    fn note(&mut self, text: impl Into<String>) {
        self.cert.notes.push(text.into());
    }

    /// Adds a shortest positive product of `instance` as witness `name`; returns
    /// false (with a note) when the set is not primitive.
    fn exponent(&mut self, target: bool, name: &str, instance: &str, cap: Option<usize>) -> Result<bool> {
        let s = self.cert.instance(instance).and_then(Instance::as_matrices).expect("matrix instance");
        match exponent(s, cap) {
            Ok(r) => {
                self.witness(name, instance, true, WitnessData::PositiveProduct { word: r.witness });
                self.length_stat(target, name);
                Ok(true)
            }
            Err(Error::NotPrimitive) => {
                self.note(format!("{instance} is not primitive"));
                Ok(false)
            }
            Err(e) => Err(e),
        }
    }

    fn reset(&mut self, target: bool, name: &str, instance: &str) -> Result<bool> {
        let a = self.cert.instance(instance).and_then(Instance::as_automaton).expect("automaton instance");
        match reset_threshold(a) {
            Ok(t) => {
                self.witness(name, instance, true, WitnessData::ResetWord { word: t.witness });
                self.length_stat(target, name);
                Ok(true)
            }
            Err(Error::NotSynchronizing) => {
                self.note(format!("{instance} is not synchronizing"));
                Ok(false)
            }
            Err(e) => Err(e),
        }
    }

    fn careful(&mut self, target: bool, name: &str, instance: &str) -> Result<bool> {
        let a = self.cert.instance(instance).and_then(Instance::as_automaton).expect("automaton instance");
        match careful_threshold(a) {
            Ok(t) => {
                self.witness(name, instance, true, WitnessData::CarefulWord { word: t.witness });
                self.length_stat(target, name);
                Ok(true)
            }
            Err(Error::NotCarefullySynchronizing) => {
                self.note(format!("{instance} is not carefully synchronizing"));
                Ok(false)
            }
            Err(e) => Err(e),
        }
    }

    fn finish(self) -> ReductionCertificate {
        self.cert
    }
}

fn dim(instance: &str) -> StatOrigin {
    StatOrigin::Dimension { instance: instance.into() }
}

fn size(instance: &str) -> StatOrigin {
    StatOrigin::Size { instance: instance.into() }
}

use LinExpr as E;
use Relation::{Eq as EQ, Le as LE};

pub fn certify_m2pa(s: &MatrixSet, opts: &ReduceOptions) -> Result<ReductionCertificate> {
    let d = derive_automaton(s, opts.letter_cap)?;
    let mut b = Builder::new(ReductionKind::M2pa, opts.letter_cap, Instance::Matrices(s.clone()));
    b.instance("target", Instance::Automaton(d.automaton));
    b.source_stat("n", dim("source"));
    b.source_stat("matrices", size("source"));
    b.target_stat("letters", size("target"));
    let primitive = b.exponent(false, "exp", "source", opts.product_cap)?;
    let careful = b.careful(true, "car", "target")?;
    if primitive && careful {
        b.check("car_le_exp", E::stat("car"), LE, E::stat("exp"));
    } else if primitive {
        b.note("a primitive set must give a carefully synchronizing automaton");
    }
    Ok(b.finish())
}

pub fn certify_pa2m(a: &PartialAutomaton, opts: &ReduceOptions) -> Result<ReductionCertificate> {
    let mut b = Builder::new(ReductionKind::Pa2m, opts.letter_cap, Instance::Automaton(a.clone()));
    b.instance("target", Instance::Matrices(partial_to_matrixset(a)));
    b.source_stat("n", dim("source"));
    b.source_stat("letters", size("source"));
    b.target_stat("matrices", size("target"));
    let careful = b.careful(false, "car", "source")?;
    let primitive = b.exponent(true, "exp", "target", opts.product_cap)?;
    if careful && primitive {
        b.check("car_le_exp", E::stat("car"), LE, E::stat("exp"));
        b.check("exp_eq_car_plus_1", E::stat("exp"), EQ, E::new(&[(1, "car")], 1));
    }
    Ok(b.finish())
}

pub fn certify_sandwich(s: &MatrixSet, opts: &ReduceOptions) -> Result<ReductionCertificate> {
    let mut b = Builder::new(ReductionKind::Sandwich, opts.letter_cap, Instance::Matrices(s.clone()));
    b.source_stat("n", dim("source"));
    if !b.exponent(false, "exp", "source", opts.product_cap)? {
        return Err(Error::NotPrimitive);
    }
    let da = derive_automaton(s, opts.letter_cap)?;
    let db = derive_automaton(&s.transpose(), opts.letter_cap)?;
    let sw = sandwich_from(s, &da, &db)?;
    b.instance("a", Instance::Automaton(da.automaton));
    b.instance("b", Instance::Automaton(db.automaton));
    b.witness("car_a", "a", true, WitnessData::CarefulWord { word: sw.car_a.witness.clone() });
    b.witness("car_b", "b", true, WitnessData::CarefulWord { word: sw.car_b.witness.clone() });
    b.witness("p", "source", false, WitnessData::PositiveColumn { word: sw.p.clone(), column: sw.column });
    b.witness(
        "q",
        "source",
        false,
        WitnessData::PositiveEntry { word: sw.q.clone(), row: sw.column, column: sw.row },
    );
    b.witness("r", "source", false, WitnessData::PositiveRow { word: sw.r.clone(), row: sw.row });
    b.witness("pqr", "source", false, WitnessData::PositiveProduct { word: sw.product() });
    for w in ["car_a", "car_b"] {
        b.length_stat(true, w);
    }
    b.target_stat("car_max", StatOrigin::Max { of: vec!["car_a".into(), "car_b".into()] });
    for w in ["p", "q", "r", "pqr"] {
        b.length_stat(false, w);
    }
    b.check("p_le_car_a", E::stat("p"), LE, E::stat("car_a"));
    b.check("r_le_car_b", E::stat("r"), LE, E::stat("car_b"));
    b.check("q_le_n_minus_1", E::stat("q"), LE, E::new(&[(1, "n")], -1));
    b.check("pqr_eq_sum", E::stat("pqr"), EQ, E::new(&[(1, "p"), (1, "q"), (1, "r")], 0));
    let mut pqr = "pqr";
    if s.n() == 1 {
        // all careful words are empty, and the exponent only counts nonempty products
        b.source_stat("one", StatOrigin::Constant { constant: 1 });
        b.source_stat("pqr_nonempty", StatOrigin::Max { of: vec!["pqr".into(), "one".into()] });
        b.note("one state: compared against the shortest nonempty product");
        pqr = "pqr_nonempty";
    }
    b.check("exp_le_pqr", E::stat("exp"), LE, E::stat(pqr));
    b.check("pqr_le_car_sum", E::stat("pqr"), LE, E::new(&[(1, "car_a"), (1, "car_b"), (1, "n")], -1));
    b.check("pqr_le_2car_max", E::stat("pqr"), LE, E::new(&[(2, "car_max"), (1, "n")], -1));
    Ok(b.finish())
}

pub fn certify_sink2nz(a: &PartialAutomaton, opts: &ReduceOptions) -> Result<ReductionCertificate> {
    let target = sink_to_nz(a)?;
    let mut b = Builder::new(ReductionKind::Sink2nz, opts.letter_cap, Instance::Automaton(a.clone()));
    b.instance("target", Instance::Matrices(target));
    b.source_stat("n", dim("source"));
    b.source_stat("letters", size("source"));
    b.target_stat("matrices", size("target"));
    b.target_stat("nz", StatOrigin::NzCount { instance: "target".into() });
    b.reset(false, "rt", "source")?;
    let mut rt = "rt";
    if a.n() == 1 {
        // the empty word resets a one-state automaton, but the fixed 2x2 target has
        // exponent 2, which matches counting nonempty reset words only
        b.source_stat("one", StatOrigin::Constant { constant: 1 });
        b.source_stat("rt_nonempty", StatOrigin::Max { of: vec!["rt".into(), "one".into()] });
        b.note("one state: compared against the shortest nonempty reset word");
        rt = "rt_nonempty";
    }
    if !b.exponent(true, "exp", "target", opts.product_cap)? {
        b.note("the sink construction must give a primitive set");
    } else {
        b.check("exp_eq_rt_plus_1", E::stat("exp"), EQ, E::new(&[(1, rt)], 1));
    }
    b.check("all_nz", E::stat("nz"), EQ, E::stat("matrices"));
    Ok(b.finish())
}

/// With `partition = None` the first qualifying partition is searched for.
pub fn certify_classc2nz(
    a: &PartialAutomaton,
    partition: Option<&Partition>,
    opts: &ReduceOptions,
) -> Result<ReductionCertificate> {
    let p = match partition {
        Some(p) => p.clone(),
        None => class_c_partition(a)?.ok_or_else(|| Error::NotClassC("no alphabet partition qualifies".into()))?,
    };
    let target = classc_to_nz(a, &p)?;
    let mut b = Builder::new(ReductionKind::Classc2nz, opts.letter_cap, Instance::Automaton(a.clone()));
    b.instance("target", Instance::Matrices(target));
    b.witness("partition", "source", false, WitnessData::ClassCPartition { partition: p });
    b.source_stat("n", dim("source"));
    b.source_stat("letters", size("source"));
    b.target_stat("matrices", size("target"));
    b.target_stat("nz", StatOrigin::NzCount { instance: "target".into() });
    let sync = b.reset(false, "rt", "source")?;
    let primitive = b.exponent(true, "exp", "target", opts.product_cap)?;
    if sync && primitive {
        b.check("rt_le_exp", E::stat("rt"), LE, E::stat("exp"));
    }
    b.check("all_nz", E::stat("nz"), EQ, E::stat("matrices"));
    Ok(b.finish())
}

pub fn certify_nz2classc(s: &MatrixSet, opts: &ReduceOptions) -> Result<ReductionCertificate> {
    let (ga, gb) = nz_to_classc_automata(s, opts.letter_cap)?;
    let mut b = Builder::new(ReductionKind::Nz2classc, opts.letter_cap, Instance::Matrices(s.clone()));
    b.instance("a", Instance::Automaton(ga.automaton));
    b.instance("b", Instance::Automaton(gb.automaton));
    b.witness("partition_a", "a", false, WitnessData::ClassCPartition { partition: ga.partition });
    b.witness("partition_b", "b", false, WitnessData::ClassCPartition { partition: gb.partition });
    b.source_stat("n", dim("source"));
    b.source_stat("matrices", size("source"));
    b.target_stat("letters_a", size("a"));
    b.target_stat("letters_b", size("b"));
    let primitive = b.exponent(false, "exp", "source", opts.product_cap)?;
    let sa = b.reset(true, "rt_a", "a")?;
    let sb = b.reset(true, "rt_b", "b")?;
    if primitive && sa && sb {
        b.check("exp_le_rt_sum", E::stat("exp"), LE, E::new(&[(1, "rt_a"), (1, "rt_b"), (1, "n")], -1));
    }
    Ok(b.finish())
}

pub fn certify_ts2euler(s: &MatrixSet, opts: &ReduceOptions) -> Result<ReductionCertificate> {
    let (wa, wb) = totalsupport_to_eulerian(s, opts.letter_cap)?;
    let mut b = Builder::new(ReductionKind::Ts2euler, opts.letter_cap, Instance::Matrices(s.clone()));
    b.instance("a", Instance::Automaton(wa.automaton));
    b.instance("b", Instance::Automaton(wb.automaton));
    b.witness("weights_a", "a", false, WitnessData::EulerianWeights { weights: wa.weights });
    b.witness("weights_b", "b", false, WitnessData::EulerianWeights { weights: wb.weights });
    b.source_stat("n", dim("source"));
    b.source_stat("matrices", size("source"));
    for i in 0..s.len() {
        b.source_stat(&format!("h_{i}"), StatOrigin::CoverSum { instance: "source".into(), matrix: i });
    }
    b.target_stat("letters_a", size("a"));
    b.target_stat("letters_b", size("b"));
    b.target_stat("eulerian_a", StatOrigin::WitnessHolds { witness: "weights_a".into() });
    b.target_stat("eulerian_b", StatOrigin::WitnessHolds { witness: "weights_b".into() });
    b.source_stat("kari", StatOrigin::Catalog { entry: "kari".into(), instance: "source".into() });
    b.source_stat("total_support", StatOrigin::Catalog { entry: "total_support".into(), instance: "source".into() });
    b.check("a_eulerian", E::stat("eulerian_a"), EQ, E::new(&[], 1));
    b.check("b_eulerian", E::stat("eulerian_b"), EQ, E::new(&[], 1));
    let primitive = b.exponent(false, "exp", "source", opts.product_cap)?;
    let sa = b.reset(true, "rt_a", "a")?;
    let sb = b.reset(true, "rt_b", "b")?;
    if sa {
        b.check("rt_a_le_kari", E::stat("rt_a"), LE, E::stat("kari"));
    }
    if sb {
        b.check("rt_b_le_kari", E::stat("rt_b"), LE, E::stat("kari"));
    }
    if primitive && sa && sb {
        let sum = E::new(&[(1, "rt_a"), (1, "rt_b"), (1, "n")], -1);
        b.check("exp_le_rt_sum", E::stat("exp"), LE, sum.clone());
        b.check("rt_sum_le_total_support", sum, LE, E::stat("total_support"));
        b.check("exp_le_total_support", E::stat("exp"), LE, E::stat("total_support"));
    }
    Ok(b.finish())
}

/// Runs the reduction `kind` on `source`.
pub fn certify(kind: ReductionKind, source: &Instance, opts: &ReduceOptions) -> Result<ReductionCertificate> {
    let wrong = || {
        Error::PreconditionViolated(format!(
            "{kind} expects {} input",
            if kind.takes_matrices() { "a matrix set" } else { "an automaton" }
        ))
    };
    match (kind, source) {
        (ReductionKind::M2pa, Instance::Matrices(s)) => certify_m2pa(s, opts),
        (ReductionKind::Sandwich, Instance::Matrices(s)) => certify_sandwich(s, opts),
        (ReductionKind::Nz2classc, Instance::Matrices(s)) => certify_nz2classc(s, opts),
        (ReductionKind::Ts2euler, Instance::Matrices(s)) => certify_ts2euler(s, opts),
        (ReductionKind::Pa2m, Instance::Automaton(a)) => certify_pa2m(a, opts),
        (ReductionKind::Sink2nz, Instance::Automaton(a)) => certify_sink2nz(a, opts),
        (ReductionKind::Classc2nz, Instance::Automaton(a)) => certify_classc2nz(a, None, opts),
        _ => Err(wrong()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::cerny;
    use crate::boolmat::tests::example_set;
    use crate::boolmat::BoolMatrix;

    fn opts() -> ReduceOptions {
        ReduceOptions::default()
    }

    fn assert_sound(c: &ReductionCertificate) {
        let r = c.recheck(true);
        assert!(r.ok(), "{:?}", r.problems);
        assert!(c.all_pass());
        let back = ReductionCertificate::from_json(&c.to_json()).unwrap();
        assert_eq!(&back, c);
    }

    #[test]
    fn m2pa_example_set() {
        let c = certify_m2pa(&example_set(), &opts()).unwrap();
        assert_eq!(c.stat("letters"), Some(6));
        assert_eq!(c.stat("exp"), Some(4));
        assert_sound(&c);
    }

    #[test]
    fn sandwich_example_set() {
        let c = certify_sandwich(&example_set(), &opts()).unwrap();
        assert_eq!(c.inequalities_checked.len(), 7);
        assert_sound(&c);
    }

    #[test]
    fn pa2m_cerny() {
        let c = certify_pa2m(&cerny(3).unwrap(), &opts()).unwrap();
        assert_eq!(c.stat("car"), Some(4));
        assert_eq!(c.stat("exp"), Some(5));
        assert_sound(&c);
    }

    #[test]
    fn sink2nz_small() {
        let a = PartialAutomaton::complete(3, vec![vec![1, 1, 2], vec![0, 2, 2]]).unwrap();
        let c = certify_sink2nz(&a, &opts()).unwrap();
        assert_sound(&c);
    }

    #[test]
    fn sink2nz_one_state() {
        let a = PartialAutomaton::complete(1, vec![vec![0], vec![0]]).unwrap();
        let c = certify_sink2nz(&a, &opts()).unwrap();
        assert_eq!((c.stat("rt"), c.stat("exp")), (Some(0), Some(2)));
        assert_sound(&c);
    }

    #[test]
    fn classc2nz_cerny_identity() {
        let a = cerny(4).unwrap().with_identity_letter();
        let c = certify_classc2nz(&a, None, &opts()).unwrap();
        assert_eq!(c.stat("rt"), Some(9));
        assert!(c.stat("exp").unwrap() >= 9);
        assert_sound(&c);
    }

    #[test]
    fn nz2classc_all_ones() {
        let s = MatrixSet::new(vec![BoolMatrix::all_ones(2)]).unwrap();
        let c = certify_nz2classc(&s, &opts()).unwrap();
        assert_eq!((c.stat("rt_a"), c.stat("rt_b")), (Some(1), Some(1)));
        assert_sound(&c);
    }

    #[test]
    fn ts2euler_permutation_is_vacuous() {
        let s = MatrixSet::new(vec![BoolMatrix::from_function(&[1, 2, 0]).unwrap()]).unwrap();
        let c = certify_ts2euler(&s, &opts()).unwrap();
        assert_eq!(c.stat("exp"), None);
        assert_eq!(c.inequalities_checked.len(), 2);
        assert_sound(&c);
    }

    #[test]
    fn tampering_is_detected() {
        let mut c = certify_sandwich(&example_set(), &opts()).unwrap();
        if let Some(w) = c.witnesses.iter_mut().find(|w| w.name == "pqr") {
            w.data = WitnessData::PositiveProduct { word: vec![0, 0, 0, 0] };
        }
        assert!(!c.recheck(false).ok());

        let mut c = certify_m2pa(&example_set(), &opts()).unwrap();
        c.target_stats[0].value += 1;
        assert!(!c.recheck(false).ok());

        let mut c = certify_m2pa(&example_set(), &opts()).unwrap();
        c.inequalities_checked[0].pass = false;
        assert!(!c.recheck(false).ok());
    }

    #[test]
    fn minimality_checked_when_exact() {
        let mut c = certify_m2pa(&example_set(), &opts()).unwrap();
        // a longer positive product still replays but is not shortest
        let w = c.witnesses.iter_mut().find(|w| w.name == "exp").unwrap();
        w.data = WitnessData::PositiveProduct { word: vec![0, 1, 0, 1, 0, 1] };
        for s in c.source_stats.iter_mut().filter(|s| s.name == "exp") {
            s.value = 6;
        }
        c.inequalities_checked[0].rhs_value = 6;
        assert!(c.recheck(false).ok());
        assert!(!c.recheck(true).ok());
    }

    #[test]
    fn wrong_input_type() {
        let inst = Instance::Automaton(cerny(3).unwrap());
        assert!(matches!(certify(ReductionKind::M2pa, &inst, &opts()), Err(Error::PreconditionViolated(_))));
        assert_eq!("sandwich".parse::<ReductionKind>().unwrap(), ReductionKind::Sandwich);
    }

    #[test]
    fn lin_expr_display() {
        assert_eq!(E::new(&[(1, "a"), (1, "b"), (1, "n")], -1).to_string(), "a + b + n - 1");
        assert_eq!(E::new(&[(2, "m")], 0).to_string(), "2*m");
        assert_eq!(E::new(&[], 1).to_string(), "1");
    }
}
