//! Verification harness: runs one claim over a seeded corpus and aggregates the
//! outcome per instance.
//!
//! Each instance ends up in exactly one of: passed, failed, rejected (a product,
//! letter or enumeration cap was hit), or filtered (it does not meet the claim's
//! precondition, e.g. an imprimitive set for the sandwich bound). Filtered draws are
//! counted but are not attempts; the harness keeps drawing until `count` instances
//! have been attempted or `count * DRAW_FACTOR` draws were made.
//!
//! CSV reports have the fixed columns
//! `claim,index,n,size,outcome,measured,relation,bound,micros,detail`;
//! `micros` is empty when timing is off.

use std::fmt;
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::automata::{careful_threshold, greedy_careful_word, reset_threshold, GreedyOptions};
use crate::boolmat::{BoolMatrix, MatrixSet};
use crate::bounds::transversal_check;
use crate::corpus::{Corpus, CorpusSpec, Family};
use crate::error::{Error, Result};
use crate::primitivity::{exponent, is_primitive, pv_partition_test};
use crate::reductions::{
    certify_nz2classc, certify_pa2m, certify_sandwich, certify_sink2nz, certify_ts2euler, Instance,
    ReduceOptions, ReductionCertificate,
};

/// Draw budget per requested instance.
pub const DRAW_FACTOR: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Claim {
    /// Sink automaton: the exponent of the derived NZ set is `rt + 1`.
    SinkEquality,
    /// Partial automaton plus rank-one rows: the exponent is `car + 1`.
    CarefulEquality,
    /// Primitive set: `|PQR| <= 2 max(car_a, car_b) + n - 1`.
    Sandwich,
    /// Primitive NZ set: `exp <= rt_a + rt_b + n - 1` for the grouped automata.
    ClassC,
    /// Primitive total-support set: Eulerian automata, `rt <= n^2 - 3n + 3`,
    /// `exp <= 2n^2 - 5n + 5`.
    TotalSupport,
    /// Transversal bounds for every `n` in range.
    Transversal,
    /// Greedy careful word with blocks of one: `|u_k| <= (n-k) 2^(n-k-1)` for `2k >= n`.
    Greedy,
    /// `rt = (n-1)^2` for the Černý automaton.
    Cerny,
    /// Single Wielandt matrix: exponent `n^2 - 2n + 2 <= (n-1)^2 + 1`.
    Wielandt,
    /// The partition test agrees with the exponent search on irreducible NZ sets.
    PvOracle,
}

impl Claim {
    pub const ALL: [Claim; 10] = [
        Claim::SinkEquality,
        Claim::CarefulEquality,
        Claim::Sandwich,
        Claim::ClassC,
        Claim::TotalSupport,
        Claim::Transversal,
        Claim::Greedy,
        Claim::Cerny,
        Claim::Wielandt,
        Claim::PvOracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Claim::SinkEquality => "SINK_EQUALITY",
            Claim::CarefulEquality => "CAREFUL_EQUALITY",
            Claim::Sandwich => "SANDWICH",
            Claim::ClassC => "CLASS_C",
            Claim::TotalSupport => "TOTAL_SUPPORT",
            Claim::Transversal => "TRANSVERSAL",
            Claim::Greedy => "GREEDY",
            Claim::Cerny => "CERNY",
            Claim::Wielandt => "WIELANDT",
            Claim::PvOracle => "PV_ORACLE",
        }
    }

    /// Claims that sweep `n_min..=n_max` instead of drawing from a corpus.
    pub fn sweeps_n(self) -> bool {
        matches!(self, Claim::Transversal | Claim::Cerny | Claim::Wielandt)
    }

    /// The corpus this claim runs on by default.
    pub fn default_spec(self, n_min: usize, n_max: usize, count: usize, seed: u64) -> CorpusSpec {
        let family = match self {
            Claim::SinkEquality => Family::RandomSinkAut,
            Claim::CarefulEquality | Claim::Greedy => Family::RandomPartialAut,
            Claim::Sandwich | Claim::ClassC | Claim::PvOracle => Family::RandomNzSet,
            Claim::TotalSupport => Family::RandomTotalSupportSet,
            Claim::Cerny => Family::Cerny,
            Claim::Transversal | Claim::Wielandt => Family::RandomSet,
        };
        let mut spec = CorpusSpec::new(family, n_max, count, seed).with_n_range(n_min, n_max);
        match self {
            Claim::SinkEquality | Claim::CarefulEquality | Claim::Greedy => spec = spec.with_letters(2, 3),
            _ => {}
        }
        if self == Claim::Greedy {
            spec.undefined = 0.0;
        }
        spec
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        Claim::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(&norm))
            .ok_or_else(|| Error::Parse(format!("unknown claim {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub index: usize,
    pub n: usize,
    /// Matrix count or alphabet size.
    pub size: usize,
    pub outcome: Outcome,
    pub measured: Option<i64>,
    pub relation: String,
    pub bound: Option<i64>,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub micros: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub detail: String,
    pub instance: Option<Instance>,
    pub certificate: Option<ReductionCertificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: Claim,
    pub spec: CorpusSpec,
    pub requested: usize,
    pub attempted: usize,
    pub passed: usize,
    pub failed: usize,
    pub rejected: usize,
    pub filtered: usize,
    pub rows: Vec<ReportRow>,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generated_unix: Option<u64>,
}

impl VerificationReport {
    /// Nothing failed, nothing was rejected, and every requested instance was attempted.
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.rejected == 0 && self.attempted == self.requested
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["claim", "index", "n", "size", "outcome", "measured", "relation", "bound", "micros", "detail"])
            .expect("in-memory write");
        let opt = |v: Option<i64>| v.map_or_else(String::new, |v| v.to_string());
        for r in &self.rows {
            let outcome = match r.outcome {
                Outcome::Pass => "pass",
                Outcome::Fail => "fail",
                Outcome::Rejected => "rejected",
            };
            w.write_record([
                self.claim.name().to_string(),
                r.index.to_string(),
                r.n.to_string(),
                r.size.to_string(),
                outcome.to_string(),
                opt(r.measured),
                r.relation.clone(),
                opt(r.bound),
                r.micros.map_or_else(String::new, |m| m.to_string()),
                r.detail.clone(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        format!(
            "{}: attempted {} of {}, passed {}, failed {}, rejected {}, filtered {}",
            self.claim, self.attempted, self.requested, self.passed, self.failed, self.rejected, self.filtered
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub reduce: ReduceOptions,
    /// Record wall times and a generation timestamp.
    pub timing: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { reduce: ReduceOptions::default(), timing: true }
    }
}

enum Verdict {
    Pass { measured: Option<i64>, relation: &'static str, bound: Option<i64>, detail: String },
    Fail { measured: Option<i64>, relation: &'static str, bound: Option<i64>, detail: String, cert: Option<ReductionCertificate> },
    Rejected(String),
    Filtered,
}

fn from_error(e: Error) -> Verdict {
    match e {
        Error::CapExceeded { .. } | Error::LetterCapExceeded { .. } | Error::TooLarge { .. } => {
            Verdict::Rejected(e.to_string())
        }
        e => Verdict::Fail { measured: None, relation: "", bound: None, detail: e.to_string(), cert: None },
    }
}

/// Rechecks `cert` from its stored witnesses (including minimality) and requires the
/// named inequalities to be present and passing; `main` supplies the reported values.
fn judge(cert: ReductionCertificate, required: &[&str], main: &str) -> Verdict {
    let report = cert.recheck(true);
    let mut problems = report.problems;
    for name in required {
        if !cert.inequalities_checked.iter().any(|i| i.name == *name) {
            problems.push(format!("inequality {name} missing"));
        }
    }
    let (measured, relation, bound) = cert
        .inequalities_checked
        .iter()
        .find(|i| i.name == main)
        .map(|i| (Some(i.lhs_value), i.relation.symbol(), Some(i.rhs_value)))
        .unwrap_or((None, "", None));
    if problems.is_empty() {
        Verdict::Pass { measured, relation, bound, detail: String::new() }
    } else {
        Verdict::Fail { measured, relation, bound, detail: problems.join("; "), cert: Some(cert) }
    }
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return from_error(e),
        }
    };
}

fn primitive_or_filtered(s: &MatrixSet, opts: &VerifyOptions) -> std::result::Result<(), Verdict> {
    match exponent(s, opts.reduce.product_cap) {
        Ok(_) => Ok(()),
        Err(Error::NotPrimitive) => Err(Verdict::Filtered),
        Err(e) => Err(from_error(e)),
    }
}

fn run_instance(claim: Claim, inst: &Instance, opts: &VerifyOptions) -> Verdict {
    let ro = &opts.reduce;
    match (claim, inst) {
        (Claim::SinkEquality, Instance::Automaton(a)) => {
            let cert = attempt!(certify_sink2nz(a, ro));
            judge(cert, &["exp_eq_rt_plus_1", "all_nz"], "exp_eq_rt_plus_1")
        }
        (Claim::CarefulEquality, Instance::Automaton(a)) => {
            match careful_threshold(a) {
                Err(Error::NotCarefullySynchronizing) => return Verdict::Filtered,
                Err(e) => return from_error(e),
                Ok(_) => {}
            }
            let cert = attempt!(certify_pa2m(a, ro));
            judge(cert, &["car_le_exp", "exp_eq_car_plus_1"], "exp_eq_car_plus_1")
        }
        (Claim::Sandwich, Instance::Matrices(s)) => {
            if let Err(v) = primitive_or_filtered(s, opts) {
                return v;
            }
            let cert = attempt!(certify_sandwich(s, ro));
            judge(cert, &["pqr_le_car_sum", "pqr_le_2car_max", "q_le_n_minus_1"], "pqr_le_2car_max")
        }
        (Claim::ClassC, Instance::Matrices(s)) => {
            if !s.all_nz() {
                return Verdict::Filtered;
            }
            if let Err(v) = primitive_or_filtered(s, opts) {
                return v;
            }
            let cert = attempt!(certify_nz2classc(s, ro));
            judge(cert, &["exp_le_rt_sum"], "exp_le_rt_sum")
        }
        (Claim::TotalSupport, Instance::Matrices(s)) => {
            if !s.matrices().iter().all(BoolMatrix::has_total_support) {
                return Verdict::Filtered;
            }
            if let Err(v) = primitive_or_filtered(s, opts) {
                return v;
            }
            let cert = attempt!(certify_ts2euler(s, ro));
            judge(
                cert,
                &[
                    "a_eulerian",
                    "b_eulerian",
                    "rt_a_le_kari",
                    "rt_b_le_kari",
                    "exp_le_rt_sum",
                    "rt_sum_le_total_support",
                    "exp_le_total_support",
                ],
                "exp_le_total_support",
            )
        }
        (Claim::Greedy, Instance::Automaton(a)) => {
            if !a.is_complete() {
                return Verdict::Filtered;
            }
            let rt = match reset_threshold(a) {
                Ok(t) => t.length,
                Err(Error::NotSynchronizing) => return Verdict::Filtered,
                Err(e) => return from_error(e),
            };
            let r = attempt!(greedy_careful_word(a, &GreedyOptions::default()));
            greedy_verdict(a.n(), rt, a.apply_word(a.all_states(), &r.word), &r.word_lengths(), r.word.len())
        }
        (Claim::PvOracle, Instance::Matrices(s)) => {
            if !s.all_nz() || !s.is_irreducible() {
                return Verdict::Filtered;
            }
            let pv = attempt!(pv_partition_test(s, None));
            let prim = attempt!(is_primitive(s, ro.product_cap));
            let agree = pv.is_none() == prim;
            let v = |b: bool| Some(b as i64);
            if agree {
                Verdict::Pass { measured: v(pv.is_none()), relation: "=", bound: v(prim), detail: String::new() }
            } else {
                Verdict::Fail {
                    measured: v(pv.is_none()),
                    relation: "=",
                    bound: v(prim),
                    detail: format!("partition test {:?} vs primitive {prim}", pv.map(|c| c.partition)),
                    cert: None,
                }
            }
        }
        _ => Verdict::Rejected(format!("{claim} does not apply to this instance type")),
    }
}

fn greedy_verdict(
    n: usize,
    rt: usize,
    image: Result<u64>,
    lengths: &[(usize, usize)],
    len: usize,
) -> Verdict {
    let mut problems = Vec::new();
    match image {
        Ok(img) if img.count_ones() == 1 => {}
        Ok(img) => problems.push(format!("word leaves {} states", img.count_ones())),
        Err(e) => problems.push(e.to_string()),
    }
    if len < rt {
        problems.push(format!("word length {len} below the reset threshold {rt}"));
    }
    let mut checked = 0i64;
    let mut held = 0i64;
    for &(k, uk) in lengths {
        if 2 * k >= n && k < n {
            checked += 1;
            let bound = ((n - k) as u128) << (n - k - 1);
            if (uk as u128) <= bound {
                held += 1;
            } else {
                problems.push(format!("|u_{k}| = {uk} > {bound}"));
            }
        }
    }
    if problems.is_empty() {
        Verdict::Pass { measured: Some(held), relation: "=", bound: Some(checked), detail: format!("|u_1| = {len}") }
    } else {
        Verdict::Fail { measured: Some(held), relation: "=", bound: Some(checked), detail: problems.join("; "), cert: None }
    }
}

fn sweep_instance(claim: Claim, n: usize, opts: &VerifyOptions) -> Verdict {
    match claim {
        Claim::Transversal => {
            let r = attempt!(transversal_check(n));
            let failures: Vec<String> = r.failures().map(|c| format!("{c:?}")).collect();
            let measured = Some(r.checks.len() as i64 - failures.len() as i64);
            let bound = Some(r.checks.len() as i64);
            if r.passed {
                Verdict::Pass { measured, relation: "=", bound, detail: format!("exhaustive: {}", r.exhaustive) }
            } else {
                Verdict::Fail { measured, relation: "=", bound, detail: failures.join("; "), cert: None }
            }
        }
        Claim::Cerny => {
            let a = attempt!(crate::automata::cerny(n));
            let rt = attempt!(reset_threshold(&a)).length as i64;
            let expected = ((n - 1) * (n - 1)) as i64;
            equality(rt, expected)
        }
        Claim::Wielandt => {
            let m = attempt!(BoolMatrix::wielandt(n));
            let s = attempt!(MatrixSet::new(vec![m]));
            let e = attempt!(exponent(&s, opts.reduce.product_cap)).exponent as i64;
            let n = n as i64;
            let expected = n * n - 2 * n + 2;
            let ceiling = (n - 1) * (n - 1) + 1;
            if e > ceiling {
                return Verdict::Fail {
                    measured: Some(e),
                    relation: "<=",
                    bound: Some(ceiling),
                    detail: "above the single-matrix bound".into(),
                    cert: None,
                };
            }
            equality(e, expected)
        }
        _ => Verdict::Rejected(format!("{claim} is not a sweep")),
    }
}

fn equality(measured: i64, expected: i64) -> Verdict {
    if measured == expected {
        Verdict::Pass { measured: Some(measured), relation: "=", bound: Some(expected), detail: String::new() }
    } else {
        Verdict::Fail {
            measured: Some(measured),
            relation: "=",
            bound: Some(expected),
            detail: format!("expected {expected}, got {measured}"),
            cert: None,
        }
    }
}

/// Runs `claim` over the corpus described by `spec` (or over `spec.n_min..=spec.n_max`
/// for sweep claims, where `count` is ignored).
pub fn verify(claim: Claim, spec: &CorpusSpec, opts: &VerifyOptions) -> Result<VerificationReport> {
    spec.validate()?;
    let start = Instant::now();
    let mut report = VerificationReport {
        claim,
        spec: spec.clone(),
        requested: if claim.sweeps_n() { spec.n_max - spec.n_min + 1 } else { spec.count },
        attempted: 0,
        passed: 0,
        failed: 0,
        rejected: 0,
        filtered: 0,
        rows: Vec::new(),
        failures: Vec::new(),
        wall_ms: None,
        generated_unix: None,
    };
    let record = |report: &mut VerificationReport, n: usize, size: usize, inst: Option<Instance>, v: Verdict, micros: Option<u64>| {
        let index = report.attempted;
        let (outcome, measured, relation, bound, detail) = match v {
            Verdict::Filtered => {
                report.filtered += 1;
                return;
            }
            Verdict::Pass { measured, relation, bound, detail } => {
                report.passed += 1;
                (Outcome::Pass, measured, relation, bound, detail)
            }
            Verdict::Rejected(detail) => {
                report.rejected += 1;
                (Outcome::Rejected, None, "", None, detail)
            }
            Verdict::Fail { measured, relation, bound, detail, cert } => {
                report.failed += 1;
                report.failures.push(Failure { index, detail: detail.clone(), instance: inst, certificate: cert });
                (Outcome::Fail, measured, relation, bound, detail)
            }
        };
        report.attempted += 1;
        report.rows.push(ReportRow { index, n, size, outcome, measured, relation: relation.into(), bound, detail, micros });
    };
    let timed = |f: &mut dyn FnMut() -> Verdict| -> (Verdict, Option<u64>) {
        let t = Instant::now();
        let v = f();
        (v, opts.timing.then(|| t.elapsed().as_micros() as u64))
    };

    if claim.sweeps_n() {
        for n in spec.n_min..=spec.n_max {
            let (v, micros) = timed(&mut || sweep_instance(claim, n, opts));
            record(&mut report, n, 1, None, v, micros);
        }
    } else {
        let mut corpus = Corpus::new(spec)?;
        let mut draws = 0;
        while report.attempted < spec.count && draws < spec.count.saturating_mul(DRAW_FACTOR) {
            draws += 1;
            let inst = corpus.next().expect("endless stream")?;
            let (v, micros) = timed(&mut || run_instance(claim, &inst, opts));
            record(&mut report, inst.n(), inst.size(), Some(inst), v, micros);
        }
    }
    if opts.timing {
        report.wall_ms = Some(start.elapsed().as_millis() as u64);
        report.generated_unix = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
    }
    Ok(report)
}
