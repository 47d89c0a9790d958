//! Transversal counting and the closed-form bound catalog.
//!
//! All counts are arbitrary precision; `2^(n^2)` overflows fixed width already at
//! `n = 8`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
pub use crate::partition::Partition;
use crate::partition::SetPartitions;

/// Number of transversals: the product of the part sizes.
pub fn transversal_count(p: &Partition) -> BigUint {
    p.parts().iter().map(|part| BigUint::from(part.len())).product()
}

/// Elementary symmetric polynomial `e_size(d_1, ..., d_k)` via the recurrence
/// `e_l(d_1..d_k) = e_l(d_1..d_{k-1}) + d_k * e_{l-1}(d_1..d_{k-1})`.
pub fn elementary_symmetric(values: &[usize], size: usize) -> BigUint {
    let mut e = vec![BigUint::zero(); size + 1];
    e[0] = BigUint::one();
    for &d in values {
        for l in (1..=size).rev() {
            let add = &e[l - 1] * d;
            e[l] += add;
        }
    }
    e.swap_remove(size)
}

/// Number of partial transversals of the given size.
pub fn partial_transversal_count(p: &Partition, size: usize) -> Result<BigUint> {
    if size > p.len() {
        return Err(Error::OutOfRange(format!(
            "partial transversal size {size} exceeds the {} parts",
            p.len()
        )));
    }
    Ok(elementary_symmetric(&p.part_sizes(), size))
}

/// Part sizes of the balanced partition of `n` elements into `k` parts.
pub fn balanced_sizes(n: usize, k: usize) -> Vec<usize> {
    let (q, r) = (n / k, n % k);
    (0..k).map(|i| if i < r { q + 1 } else { q }).collect()
}

/// Largest transversal count over partitions of an `n`-set into `k` parts,
/// attained by the balanced partition.
pub fn max_transversals(n: usize, k: usize) -> Result<BigUint> {
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    Ok(balanced_sizes(n, k).into_iter().map(BigUint::from).product())
}

/// Per-round length bound `(n - k) * 2^(n - k - 1)` for `1 <= k <= n - 1`.
pub fn greedy_round_bound(n: usize, k: usize) -> Result<BigUint> {
    if k == 0 || k >= n {
        return Err(Error::OutOfRange(format!("need 1 <= k < n, got n = {n}, k = {k}")));
    }
    Ok(BigUint::from(n - k) << (n - k - 1))
}

pub fn binomial(n: usize, j: usize) -> BigUint {
    if j > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..j {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn pow(base: u32, exp: usize) -> BigUint {
    num_traits::pow(BigUint::from(base), exp)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundValue {
    Exact(BigUint),
    /// Growth-order reference values that are not integers in general.
    Real(f64),
}

impl BoundValue {
    pub fn as_exact(&self) -> Option<&BigUint> {
        match self {
            BoundValue::Exact(v) => Some(v),
            BoundValue::Real(_) => None,
        }
    }
}

impl std::fmt::Display for BoundValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundValue::Exact(v) => write!(f, "{v}"),
            BoundValue::Real(x) => write!(f, "{x:.6e}"),
        }
    }
}

/// Exact values serialize as JSON numbers while they fit in `u64`, as decimal
/// strings beyond that.
impl Serialize for BoundValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BoundValue::Exact(v) => match v.to_u64() {
                Some(x) => s.serialize_u64(x),
                None => s.serialize_str(&v.to_string()),
            },
            BoundValue::Real(x) => s.serialize_f64(*x),
        }
    }
}

pub(crate) fn serialize_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    BoundValue::Exact(v.clone()).serialize(s)
}

#[derive(Debug, Clone, Copy)]
pub struct BoundCatalogEntry {
    pub name: &'static str,
    pub formula: &'static str,
    pub eval: fn(usize) -> BoundValue,
}

fn poly(f: impl Fn(i128) -> i128, n: usize) -> BoundValue {
    let v = f(n as i128);
    BoundValue::Exact(BigUint::from(u128::try_from(v).expect("catalog polynomial is nonnegative for n >= 1")))
}

pub const CATALOG: &[BoundCatalogEntry] = &[
    BoundCatalogEntry {
        name: "wielandt",
        formula: "(n-1)^2 + 1",
        eval: |n| poly(|n| (n - 1) * (n - 1) + 1, n),
    },
    BoundCatalogEntry { name: "cerny", formula: "(n-1)^2", eval: |n| poly(|n| (n - 1) * (n - 1), n) },
    BoundCatalogEntry { name: "pin", formula: "(n^3 - n)/6", eval: |n| poly(|n| (n * n * n - n) / 6, n) },
    BoundCatalogEntry { name: "kari", formula: "n^2 - 3n + 3", eval: |n| poly(|n| n * n - 3 * n + 3, n) },
    BoundCatalogEntry {
        name: "total_support",
        formula: "2n^2 - 5n + 5",
        eval: |n| poly(|n| 2 * n * n - 5 * n + 5, n),
    },
    BoundCatalogEntry {
        name: "nz_cubic",
        formula: "(n^3 + 2n - 3)/3",
        eval: |n| poly(|n| (n * n * n + 2 * n - 3) / 3, n),
    },
    BoundCatalogEntry {
        name: "closure_upper",
        formula: "2^(n^2)",
        eval: |n| BoundValue::Exact(BigUint::one() << (n * n)),
    },
    BoundCatalogEntry {
        name: "gazdag_order",
        formula: "n^2 * 4^(n/3)",
        eval: |n| BoundValue::Real((n * n) as f64 * 4f64.powf(n as f64 / 3.0)),
    },
    BoundCatalogEntry {
        name: "martyugin_order",
        formula: "3^(n/3)",
        eval: |n| BoundValue::Real(3f64.powf(n as f64 / 3.0)),
    },
    BoundCatalogEntry {
        name: "limit_rate",
        formula: "3^(n/3)",
        eval: |n| BoundValue::Real(3f64.powf(n as f64 / 3.0)),
    },
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub name: &'static str,
    pub formula: &'static str,
    pub value: BoundValue,
}

pub fn bound_catalog(n: usize) -> Result<Vec<BoundRow>> {
    if n == 0 {
        return Err(Error::OutOfRange("bound catalog needs n >= 1".into()));
    }
    Ok(CATALOG
        .iter()
        .map(|e| BoundRow { name: e.name, formula: e.formula, value: (e.eval)(n) })
        .collect())
}

/// Exact value of a named integer catalog entry.
pub fn catalog_value(name: &str, n: usize) -> Option<BigUint> {
    let entry = CATALOG.iter().find(|e| e.name == name)?;
    if n == 0 {
        return None;
    }
    (entry.eval)(n).as_exact().cloned()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransversalCheck {
    /// 0 = balanced partition is the exhaustive maximizer; 1..=4 the four bounds.
    pub part: u8,
    pub k: usize,
    pub j: Option<usize>,
    #[serde(serialize_with = "serialize_big")]
    pub lhs: BigUint,
    pub relation: &'static str,
    #[serde(serialize_with = "serialize_big")]
    pub rhs: BigUint,
    pub pass: bool,
    /// Partition attaining `lhs` when it came from enumeration.
    pub witness: Option<Partition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransversalReport {
    pub n: usize,
    /// Whether all set partitions were enumerated (parts 0 and 4).
    pub exhaustive: bool,
    pub checks: Vec<TransversalCheck>,
    pub passed: bool,
}

impl TransversalReport {
    pub fn failures(&self) -> impl Iterator<Item = &TransversalCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Largest `n` for which [`transversal_check`] enumerates every set partition.
pub const TRANSVERSAL_EXHAUSTIVE_MAX: usize = 9;

/// Checks the four transversal bounds for every `k` in `1..=n`.
///
/// Parts 1 to 3 use the balanced maximizer. Up to [`TRANSVERSAL_EXHAUSTIVE_MAX`] all set
/// partitions are enumerated to confirm the maximizer and to check the
/// partial-transversal bound (part 4) for every `j` in `0..k`.
pub fn transversal_check(n: usize) -> Result<TransversalReport> {
    if n == 0 {
        return Err(Error::OutOfRange("transversal_check needs n >= 1".into()));
    }
    let mut checks = Vec::new();
    let t: Vec<BigUint> = (1..=n).map(|k| max_transversals(n, k)).collect::<Result<_>>()?;
    for k in 1..=n {
        let tk = &t[k - 1];
        let check = |part, lhs: BigUint, relation, rhs: BigUint| TransversalCheck {
            part,
            k,
            j: None,
            pass: lhs <= rhs,
            lhs,
            relation,
            rhs,
            witness: None,
        };
        checks.push(check(1, tk.clone(), "<=", BigUint::one() << (n - k)));
        if 3 * k >= n && 2 * k <= n {
            checks.push(check(2, tk.clone(), "<=", pow(2, 3 * k - n) * pow(3, n - 2 * k)));
        }
        if 3 * k <= n {
            // T <= 3^(n/3)  <=>  T^3 <= 3^n
            checks.push(check(3, num_traits::pow(tk.clone(), 3), "^3 <=", pow(3, n)));
        }
    }

    let exhaustive = n <= TRANSVERSAL_EXHAUSTIVE_MAX;
    if exhaustive {
        // best[k-1] = (max transversal count, witness); partial[k-1][size] likewise
        let mut best: Vec<Option<(BigUint, Vec<usize>)>> = vec![None; n];
        let mut partial: Vec<Vec<Option<(BigUint, Vec<usize>)>>> =
            (1..=n).map(|k| vec![None; k + 1]).collect();
        for rgs in SetPartitions::new(n) {
            let k = rgs.iter().max().unwrap() + 1;
            let mut sizes = vec![0usize; k];
            for &b in &rgs {
                sizes[b] += 1;
            }
            let full: BigUint = sizes.iter().map(|&d| BigUint::from(d)).product();
            if best[k - 1].as_ref().is_none_or(|(v, _)| full > *v) {
                best[k - 1] = Some((full, rgs.clone()));
            }
            for size in 0..=k {
                let e = elementary_symmetric(&sizes, size);
                let slot = &mut partial[k - 1][size];
                if slot.as_ref().is_none_or(|(v, _)| e > *v) {
                    *slot = Some((e, rgs.clone()));
                }
            }
        }
        for k in 1..=n {
            let (max, rgs) = best[k - 1].clone().expect("every k in 1..=n is realized");
            checks.push(TransversalCheck {
                part: 0,
                k,
                j: None,
                pass: max == t[k - 1],
                lhs: max,
                relation: "==",
                rhs: t[k - 1].clone(),
                witness: Some(Partition::from_labels(&rgs)),
            });
            for j in 0..k {
                let (lhs, rgs) = partial[k - 1][k - j].clone().expect("realized");
                let rhs = binomial(n, j) * &t[k - 1];
                checks.push(TransversalCheck {
                    part: 4,
                    k,
                    j: Some(j),
                    pass: lhs <= rhs,
                    lhs,
                    relation: "<=",
                    rhs,
                    witness: Some(Partition::from_labels(&rgs)),
                });
            }
        }
    }
    let passed = checks.iter().all(|c| c.pass);
    Ok(TransversalReport { n, exhaustive, checks, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_partial_transversals(p: &Partition, size: usize) -> usize {
        let n = p.n();
        (0u32..1 << n)
            .filter(|s| s.count_ones() as usize == size)
            .filter(|s| {
                let set: Vec<usize> = (0..n).filter(|&i| s >> i & 1 == 1).collect();
                p.is_partial_transversal(&set)
            })
            .count()
    }

    fn example() -> Partition {
        Partition::new(5, vec![vec![0, 1], vec![2, 3], vec![4]]).unwrap()
    }

    #[test]
    fn transversal_examples() {
        assert_eq!(transversal_count(&example()), BigUint::from(4u32));
        assert_eq!(brute_partial_transversals(&example(), 3), 4);
        assert_eq!(transversal_count(&Partition::singletons(6)), BigUint::one());
        assert_eq!(transversal_count(&Partition::whole(6)), BigUint::from(6u32));
    }

    #[test]
    fn partial_transversal_examples() {
        let p = example();
        assert_eq!(brute_partial_transversals(&p, 2), 8);
        assert_eq!(partial_transversal_count(&p, 2).unwrap(), BigUint::from(8u32));
        assert_eq!(partial_transversal_count(&p, 0).unwrap(), BigUint::one());
        assert_eq!(partial_transversal_count(&p, 3).unwrap(), transversal_count(&p));
        assert!(partial_transversal_count(&p, 4).is_err());
    }

    #[test]
    fn counts_match_brute_force_exhaustively() {
        for n in 1..=7 {
            for rgs in SetPartitions::new(n) {
                let p = Partition::from_labels(&rgs);
                for size in 0..=p.len() {
                    let brute = brute_partial_transversals(&p, size);
                    assert_eq!(partial_transversal_count(&p, size).unwrap(), BigUint::from(brute));
                }
            }
        }
    }

    #[test]
    fn max_transversal_examples() {
        assert_eq!(max_transversals(5, 2).unwrap(), BigUint::from(6u32));
        assert_eq!(max_transversals(7, 7).unwrap(), BigUint::one());
        assert_eq!(max_transversals(6, 2).unwrap(), BigUint::from(9u32));
        assert!(max_transversals(3, 4).is_err());
        assert!(max_transversals(3, 0).is_err());
    }

    #[test]
    fn catalog_values() {
        let get = |n, name: &str| catalog_value(name, n).unwrap().to_u64().unwrap();
        assert_eq!(get(4, "cerny"), 9);
        assert_eq!(get(4, "kari"), 7);
        assert_eq!(get(4, "total_support"), 17);
        assert_eq!(get(4, "wielandt"), 10);
        assert_eq!(get(1, "cerny"), 0);
        assert_eq!(get(1, "wielandt"), 1);
        assert_eq!(get(3, "nz_cubic"), 10);
        assert_eq!(get(3, "total_support"), 8);
        assert_eq!(get(5, "pin"), 20);
        assert_eq!(catalog_value("closure_upper", 8).unwrap(), BigUint::one() << 64);
        assert!(catalog_value("limit_rate", 3).is_none());
        assert_eq!(bound_catalog(4).unwrap().len(), CATALOG.len());
    }

    #[test]
    fn catalog_json_snapshot() {
        let json = serde_json::to_string(&bound_catalog(3).unwrap()).unwrap();
        assert!(json.starts_with(r#"[{"name":"wielandt","formula":"(n-1)^2 + 1","value":5}"#));
        let big = serde_json::to_string(&BoundValue::Exact(BigUint::one() << 81)).unwrap();
        assert_eq!(big, "\"2417851639229258349412352\"");
    }

    #[test]
    fn transversal_small_cases() {
        let r = transversal_check(1).unwrap();
        assert!(r.passed);
        let r = transversal_check(6).unwrap();
        assert!(r.passed);
        let tight = r.checks.iter().find(|c| c.part == 2 && c.k == 2).unwrap();
        assert_eq!(tight.lhs, BigUint::from(9u32));
        assert_eq!(tight.rhs, BigUint::from(9u32));
    }

    #[test]
    fn greedy_bound_values() {
        assert_eq!(greedy_round_bound(5, 4).unwrap(), BigUint::one());
        assert_eq!(greedy_round_bound(5, 2).unwrap(), BigUint::from(12u32));
        assert!(greedy_round_bound(5, 5).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(9, 4), BigUint::from(126u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
    }
}
