use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::json;

use primset::automata::{careful_threshold, reset_threshold, PartialAutomaton};
use primset::bounds::bound_catalog;
use primset::corpus::{generate, CorpusSpec, Family};
use primset::primitivity::{exponent, is_primitive, pv_partition_test};
use primset::reductions::{certify, Instance, ReduceOptions, ReductionKind};
use primset::verify::{verify, Claim, VerifyOptions};
use primset::MatrixSet;

const EXIT_PROPERTY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "primset", version, about = "Exponents of primitive matrix sets and synchronizing automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exponent of a matrix set (JSON) with a shortest positive product
    Exp {
        file: PathBuf,
        /// Stop after this many distinct products
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Reset threshold of a complete automaton (.paut)
    Rt { file: PathBuf },
    /// Careful reset threshold of a partial automaton (.paut)
    Car { file: PathBuf },
    /// Primitivity of a matrix set
    Primitive {
        file: PathBuf,
        /// Also run the partition test and print a certificate when one exists
        #[arg(long)]
        pv: bool,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Apply a reduction and print its certificate
    Reduce {
        /// One of M2PA, PA2M, SANDWICH, SINK2NZ, CLASSC2NZ, NZ2CLASSC, TS2EULER
        kind: ReductionKind,
        file: PathBuf,
        #[arg(long)]
        letter_cap: Option<usize>,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Catalog of closed-form bounds at a given size
    Bounds {
        #[arg(long)]
        n: usize,
    },
    /// Write a seeded corpus, one file per instance
    Gen {
        family: Family,
        #[arg(long)]
        n: usize,
        /// Smallest size; defaults to --n
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Letters per automaton or matrices per set, as MIN or MIN..MAX
        #[arg(long)]
        letters: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a claim on a seeded corpus
    Verify {
        claim: Claim,
        #[arg(long)]
        n: usize,
        /// Smallest size; defaults to --n for sweeps and 2 otherwise
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
        /// Omit wall times and the generation timestamp so reports are reproducible
        #[arg(long)]
        no_timestamp: bool,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_matrices(path: &Path) -> anyhow::Result<MatrixSet> {
    Ok(MatrixSet::from_json(&read(path)?)?)
}

fn load_automaton(path: &Path) -> anyhow::Result<PartialAutomaton> {
    Ok(PartialAutomaton::from_paut(&read(path)?)?)
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value"));
}

fn parse_range(s: &str) -> anyhow::Result<(usize, usize)> {
    let parse = |t: &str| t.trim().parse::<usize>().with_context(|| format!("bad number {t:?}"));
    match s.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b.trim_start_matches('='))?)),
        None => {
            let v = parse(s)?;
            Ok((v, v))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Exp { file, cap } => {
            let s = load_matrices(&file)?;
            match exponent(&s, cap) {
                Ok(r) => {
                    print_json(&json!({
                        "exponent": r.exponent,
                        "witness": r.witness,
                        "products_explored": r.products_explored,
                    }));
                    Ok(0)
                }
                Err(primset::Error::NotPrimitive) => {
                    print_json(&json!({ "primitive": false }));
                    Ok(EXIT_PROPERTY)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Rt { file } => threshold(&file, "rt"),
        Command::Car { file } => threshold(&file, "car"),
        Command::Primitive { file, pv, cap } => {
            let s = load_matrices(&file)?;
            let primitive = is_primitive(&s, cap)?;
            let mut out = json!({ "primitive": primitive });
            if pv {
                match pv_partition_test(&s, None) {
                    Ok(cert) => out["pv_certificate"] = json!(cert),
                    Err(primset::Error::PreconditionViolated(why)) => out["pv_skipped"] = json!(why),
                    Err(e) => return Err(e.into()),
                }
            }
            print_json(&out);
            Ok(if primitive { 0 } else { EXIT_PROPERTY })
        }
        Command::Reduce { kind, file, letter_cap, cap } => {
            let instance = if kind.takes_matrices() {
                Instance::Matrices(load_matrices(&file)?)
            } else {
                Instance::Automaton(load_automaton(&file)?)
            };
            let mut opts = ReduceOptions::default();
            if let Some(c) = letter_cap {
                opts.letter_cap = c;
            }
            if cap.is_some() {
                opts.product_cap = cap;
            }
            let cert = certify(kind, &instance, &opts)?;
            println!("{}", cert.to_json());
            let recheck = cert.recheck(false);
            for p in &recheck.problems {
                eprintln!("recheck: {p}");
            }
            Ok(if cert.all_pass() && recheck.ok() { 0 } else { EXIT_PROPERTY })
        }
        Command::Bounds { n } => {
            let rows = bound_catalog(n)?;
            let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
            let fwidth = rows.iter().map(|r| r.formula.len()).max().unwrap_or(0);
            println!("n = {n}");
            for r in &rows {
                println!("{:<width$}  {:<fwidth$}  {}", r.name, r.formula, r.value);
            }
            println!("{}", serde_json::to_string(&json!({ "n": n, "bounds": rows }))?);
            Ok(0)
        }
        Command::Gen { family, n, n_min, count, seed, letters, out } => {
            let mut spec = CorpusSpec::new(family, n, count, seed).with_n_range(n_min.unwrap_or(n), n);
            if let Some(l) = letters {
                let (lo, hi) = parse_range(&l)?;
                spec = spec.with_letters(lo, hi);
            }
            let instances = generate(&spec)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let stem = family.name().to_ascii_lowercase();
            for (i, inst) in instances.iter().enumerate() {
                let (ext, text) = match inst {
                    Instance::Matrices(s) => ("json", s.to_json()),
                    Instance::Automaton(a) => ("paut", a.to_paut()),
                };
                let path = out.join(format!("{stem}_{i:04}.{ext}"));
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            fs::write(out.join("corpus.json"), serde_json::to_string_pretty(&spec)?)?;
            eprintln!("wrote {} instances to {}", instances.len(), out.display());
            Ok(0)
        }
        Command::Verify { claim, n, n_min, samples, seed, json, csv, no_timestamp } => {
            let n_min = n_min.unwrap_or(if claim.sweeps_n() { n } else { 2.min(n) });
            let spec = claim.default_spec(n_min, n, samples, seed);
            let opts = VerifyOptions { timing: !no_timestamp, ..Default::default() };
            let report = verify(claim, &spec, &opts)?;
            if json {
                println!("{}", report.to_json());
            } else if csv {
                print!("{}", report.to_csv());
            } else {
                println!("{}", report.summary());
                for f in &report.failures {
                    println!("  #{}: {}", f.index, f.detail);
                }
            }
            Ok(if report.failed > 0 {
                EXIT_PROPERTY
            } else if report.rejected > 0 {
                EXIT_CAP
            } else if !report.ok() {
                EXIT_PROPERTY
            } else {
                0
            })
        }
    }
}

fn threshold(file: &Path, label: &str) -> anyhow::Result<u8> {
    let a = load_automaton(file)?;
    let r = if label == "rt" { reset_threshold(&a) } else { careful_threshold(&a) };
    match r {
        Ok(t) => {
            print_json(&json!({ label: t.length, "witness": t.witness, "sets_explored": t.sets_explored }));
            Ok(0)
        }
        Err(e @ (primset::Error::NotSynchronizing | primset::Error::NotCarefullySynchronizing)) => {
            print_json(&json!({ label: null, "reason": e.to_string() }));
            Ok(EXIT_PROPERTY)
        }
        Err(e) => Err(e.into()),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use primset::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::CapExceeded { .. } | E::TooLarge { .. } | E::LetterCapExceeded { .. } | E::AlphabetTooLarge { .. }) => {
            EXIT_CAP
        }
        Some(E::NotPrimitive | E::NotSynchronizing | E::NotCarefullySynchronizing | E::ProcedureStuck { .. }) => {
            EXIT_PROPERTY
        }
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
