//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Seeds, corpus sizes and time limits are fixed here. All comparisons are exact.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use primset::automata::{cerny, class_c_partition, reset_threshold};
use primset::boolmat::{BoolMatrix, MatrixSet};
use primset::bounds::{transversal_check, TRANSVERSAL_EXHAUSTIVE_MAX};
use primset::partition::Partition;
use primset::primitivity::{exponent, is_primitive, pv_partition_test};
use primset::reductions::classc_to_nz;
use primset::verify::{verify, Claim, VerificationReport, VerifyOptions};

type Outcome = Result<String, String>;

fn example_set() -> MatrixSet {
    let m1 = BoolMatrix::from_rows(&[[0u8, 1, 0], [0, 1, 1], [0, 0, 1]]).unwrap();
    let m2 = BoolMatrix::from_rows(&[[0u8, 0, 0], [0, 1, 1], [1, 1, 0]]).unwrap();
    MatrixSet::new(vec![m1, m2]).unwrap()
}

fn opts() -> VerifyOptions {
    VerifyOptions { timing: false, ..Default::default() }
}

fn report_outcome(r: VerificationReport) -> Outcome {
    if r.ok() {
        Ok(r.summary())
    } else {
        let first = r.failures.first().map(|f| format!("; first failure #{}: {}", f.index, f.detail));
        Err(format!("{}{}", r.summary(), first.unwrap_or_default()))
    }
}

fn c1_example_exponent() -> Outcome {
    let t = Instant::now();
    let r = exponent(&example_set(), None).map_err(|e| e.to_string())?;
    let took = t.elapsed();
    if r.exponent != 4 || r.witness != [0, 1, 0, 1] {
        return Err(format!("exponent {} witness {:?}", r.exponent, r.witness));
    }
    if took >= Duration::from_secs(1) {
        return Err(format!("took {took:?}"));
    }
    Ok(format!("exponent 4, witness M1 M2 M1 M2, {took:?}"))
}

fn c2_cerny_thresholds() -> Outcome {
    let mut got = Vec::new();
    for n in 3..=7 {
        let t = Instant::now();
        let rt = reset_threshold(&cerny(n).unwrap()).map_err(|e| e.to_string())?.length;
        let took = t.elapsed();
        if rt != (n - 1) * (n - 1) || took >= Duration::from_secs(5) {
            return Err(format!("n = {n}: rt {rt} in {took:?}"));
        }
        got.push(rt);
    }
    Ok(format!("rt = {got:?}"))
}

fn c3_sink_equality() -> Outcome {
    report_outcome(verify(Claim::SinkEquality, &Claim::SinkEquality.default_spec(2, 6, 100, 3), &opts()).unwrap())
}

fn c4_careful_equality() -> Outcome {
    let spec = Claim::CarefulEquality.default_spec(2, 5, 50, 4);
    report_outcome(verify(Claim::CarefulEquality, &spec, &opts()).unwrap())
}

fn c5_sandwich() -> Outcome {
    report_outcome(verify(Claim::Sandwich, &Claim::Sandwich.default_spec(2, 4, 50, 5), &opts()).unwrap())
}

fn c6_total_support() -> Outcome {
    let spec = Claim::TotalSupport.default_spec(2, 5, 100, 6);
    report_outcome(verify(Claim::TotalSupport, &spec, &opts()).unwrap())
}

fn c7_transversal() -> Outcome {
    for n in 1..=30 {
        let r = transversal_check(n).map_err(|e| e.to_string())?;
        if !r.passed {
            return Err(format!("n = {n}: {:?}", r.failures().next()));
        }
        if (n <= TRANSVERSAL_EXHAUSTIVE_MAX) != r.exhaustive {
            return Err(format!("n = {n}: exhaustive flag {}", r.exhaustive));
        }
    }
    Ok(format!("n = 1..=30 pass, exhaustive up to {TRANSVERSAL_EXHAUSTIVE_MAX}"))
}

// naive repeated squaring-free powers, independent of the closure search
fn power_exponent(m: &BoolMatrix) -> Option<usize> {
    let n = m.n();
    let mut p = m.clone();
    for k in 1..=n * n {
        if (0..n).all(|i| (0..n).all(|j| p.get(i, j))) {
            return Some(k);
        }
        let mut next = BoolMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                next.set(i, j, (0..n).any(|t| p.get(i, t) && m.get(t, j)));
            }
        }
        p = next;
    }
    None
}

fn c8_wielandt() -> Outcome {
    for n in 3..=6 {
        let m = BoolMatrix::wielandt(n).unwrap();
        let oracle = power_exponent(&m);
        let e = exponent(&MatrixSet::new(vec![m]).unwrap(), None).map_err(|e| e.to_string())?.exponent;
        if Some(e) != oracle || e != n * n - 2 * n + 2 || e > (n - 1) * (n - 1) + 1 {
            return Err(format!("n = {n}: exponent {e}, oracle {oracle:?}"));
        }
    }
    let r = verify(Claim::Wielandt, &Claim::Wielandt.default_spec(3, 6, 0, 0), &opts()).unwrap();
    report_outcome(r).map(|s| format!("n^2 - 2n + 2 for n = 3..=6; {s}"))
}

fn c9_pv_oracle() -> Outcome {
    let all: Vec<BoolMatrix> = (0u64..512)
        .map(|code| BoolMatrix::from_row_bits(3, (0..3).map(|i| (code >> (3 * i)) & 7).collect()).unwrap())
        .collect();
    let (mut pairs, mut imprimitive) = (0, 0);
    for (i, a) in all.iter().enumerate() {
        for b in &all[i..] {
            let s = MatrixSet::new(vec![a.clone(), b.clone()]).unwrap();
            if !s.all_nz() || !s.is_irreducible() {
                continue;
            }
            pairs += 1;
            let pv = pv_partition_test(&s, None).map_err(|e| e.to_string())?;
            let prim = is_primitive(&s, None).map_err(|e| e.to_string())?;
            if pv.is_none() != prim {
                return Err(format!("disagreement on {a:?} {b:?}"));
            }
            imprimitive += usize::from(!prim);
        }
    }
    Ok(format!("{pairs} irreducible NZ pairs agree ({imprimitive} imprimitive)"))
}

fn c10_greedy() -> Outcome {
    report_outcome(verify(Claim::Greedy, &Claim::Greedy.default_spec(3, 10, 25, 10), &opts()).unwrap())
}

fn c11_class_c_example() -> Outcome {
    let a = cerny(4).unwrap().with_identity_letter();
    let p = class_c_partition(&a).map_err(|e| e.to_string())?.ok_or("no partition found")?;
    // letters a = 0, b = 1, c = 2
    let expected = Partition::new(3, vec![vec![0, 2], vec![1]]).unwrap();
    if p != expected {
        return Err(format!("partition {:?}", p.parts()));
    }
    let s = classc_to_nz(&a, &p).map_err(|e| e.to_string())?;
    let e = exponent(&s, None).map_err(|e| e.to_string())?.exponent;
    if !s.all_nz() || e < 9 {
        return Err(format!("NZ {} exponent {e}", s.all_nz()));
    }
    Ok(format!("partition {{a,c}},{{b}}; NZ set with exponent {e} >= 9"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("example set exponent", c1_example_exponent),
        ("Cerny reset thresholds", c2_cerny_thresholds),
        ("sink construction exp = rt + 1", c3_sink_equality),
        ("careful construction exp = car + 1", c4_careful_equality),
        ("sandwich product bound", c5_sandwich),
        ("total support bounds", c6_total_support),
        ("transversal bounds", c7_transversal),
        ("Wielandt exponent", c8_wielandt),
        ("partition test vs exponent search", c9_pv_oracle),
        ("greedy careful word bound", c10_greedy),
        ("class C example partition", c11_class_c_example),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let took = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{took:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{took:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
