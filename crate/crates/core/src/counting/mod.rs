//! Point counting over GF(p^n): naive cell enumeration, the slice solver for
//! type (1,1,1,2) intersections in Gr(2,5), and the quadric solver for
//! (2,3) intersections in P^4.

mod kernel;
mod naive;
mod p4;
mod slice;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use naive::count_naive;
pub use p4::count_p4;
pub use slice::{count_slice, fixing_sets, FixingSet};

use crate::ffield::FieldError;
use crate::geometry::{Ambient, GeometryError, SurfaceSpec};
use crate::mpoly::PolyError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("work estimate {needed} exceeds the budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("field of order {0} has no tables; counting needs q <= 2^20")]
    FieldTooLarge(u64),
    #[error("strategy `{strategy}` does not apply to {ambient} surfaces")]
    WrongAmbient { strategy: Strategy, ambient: Ambient },
    #[error("spec must have positive characteristic")]
    NeedsPositiveCharacteristic,
    #[error("no fixing set of size <= 2 for cell ({0}, {1}) and the naive fallback is over budget")]
    StrategyFailure(usize, usize),
    #[error("no count table for `{0}`")]
    UnknownTable(String),
    #[error("count table parse error: {0}")]
    TableParse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Naive,
    Slice,
    P4,
}

impl Strategy {
    pub fn default_for(ambient: Ambient) -> Strategy {
        match ambient {
            Ambient::GrassmannCi => Strategy::Slice,
            Ambient::P4Ci => Strategy::P4,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Naive => "naive",
            Strategy::Slice => "slice",
            Strategy::P4 => "p4",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Strategy::Naive),
            "slice" => Ok(Strategy::Slice),
            "p4" => Ok(Strategy::P4),
            other => Err(format!("unknown strategy `{other}` (naive, slice, p4)")),
        }
    }
}

/// Work partitioning and budget. The budget bounds the number of enumerated
/// points (naive), fixed-parameter assignments times line enumerations
/// (slice) or coordinate tuples (p4).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountOptions {
    pub parts: usize,
    pub budget: u128,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { parts: 64, budget: 10_000_000_000 }
    }
}

/// Number of GF(p^n)-points for n in a range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub surface: String,
    pub p: u32,
    pub entries: Vec<(u32, u128)>,
}

impl CountTable {
    pub fn new(surface: &str, p: u32, mut entries: Vec<(u32, u128)>) -> Self {
        entries.sort();
        CountTable { surface: surface.to_string(), p, entries }
    }

    pub fn get(&self, n: u32) -> Option<u128> {
        self.entries.iter().find(|e| e.0 == n).map(|e| e.1)
    }

    /// Consecutive counts N_1..N_k, if the table starts at n = 1 without gaps.
    pub fn prefix(&self) -> Vec<u128> {
        self.entries
            .iter()
            .enumerate()
            .take_while(|(i, e)| e.0 as usize == i + 1)
            .map(|(_, e)| e.1)
            .collect()
    }

    /// Entries violating |N_n - 1 - p^(2n)| <= 22 p^n.
    pub fn weil_violations(&self) -> Vec<u32> {
        self.entries
            .iter()
            .filter(|(n, count)| {
                let pn = (self.p as i128).pow(*n);
                (*count as i128 - 1 - pn * pn).abs() > 22 * pn
            })
            .map(|e| e.0)
            .collect()
    }

    /// Pairs (d, n) with d | n but N_d > N_n.
    pub fn divisibility_violations(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for &(d, nd) in &self.entries {
            for &(n, nn) in &self.entries {
                if d < n && n % d == 0 && nd > nn {
                    out.push((d, n));
                }
            }
        }
        out
    }

    pub fn is_consistent(&self) -> bool {
        self.weil_violations().is_empty() && self.divisibility_violations().is_empty()
    }

    pub fn parse(text: &str) -> Result<Self, CountError> {
        let err = |m: &str| CountError::TableParse(m.to_string());
        let mut name = None;
        let mut p = None;
        let mut entries = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            if let Some(v) = line.strip_prefix("name=") {
                name = Some(v.trim().to_string());
            } else if let Some(v) = line.strip_prefix("p=") {
                p = Some(v.trim().parse::<u32>().map_err(|_| err("bad p"))?);
            } else {
                let mut it = line.split_whitespace();
                let n = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| err(line))?;
                let c = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| err(line))?;
                entries.push((n, c));
            }
        }
        Ok(CountTable::new(&name.ok_or_else(|| err("missing name"))?, p.ok_or_else(|| err("missing p"))?, entries))
    }
}

const COUNT_FIXTURES: [(&str, &str); 3] = [
    ("s3", include_str!("../../fixtures/s3.counts")),
    ("x2", include_str!("../../fixtures/x2.counts")),
    ("x3", include_str!("../../fixtures/x3.counts")),
];

/// The published count table of a fixture surface.
pub fn fixture_table(name: &str) -> Result<CountTable, CountError> {
    let text = COUNT_FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| CountError::UnknownTable(name.to_string()))?;
    CountTable::parse(text)
}

/// Counts with the given strategy.
pub fn count(spec: &SurfaceSpec, n: u32, strategy: Strategy, opts: &CountOptions) -> Result<u128, CountError> {
    match strategy {
        Strategy::Naive => count_naive(spec, n, opts),
        Strategy::Slice => count_slice(spec, n, opts),
        Strategy::P4 => count_p4(spec, n, opts),
    }
}

/// Counts for every n in `ns`, in order.
pub fn count_table(
    spec: &SurfaceSpec,
    ns: impl IntoIterator<Item = u32>,
    strategy: Strategy,
    opts: &CountOptions,
) -> Result<CountTable, CountError> {
    let entries = ns
        .into_iter()
        .map(|n| count(spec, n, strategy, opts).map(|c| (n, c)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CountTable::new(&spec.name, spec.characteristic, entries))
}

fn check_budget(needed: u128, opts: &CountOptions) -> Result<(), CountError> {
    if needed > opts.budget {
        return Err(CountError::BudgetExceeded { needed, budget: opts.budget });
    }
    Ok(())
}

/// Sums `f(lo, hi)` over a split of 0..total into `parts` contiguous ranges
/// processed in parallel. The result does not depend on `parts`.
fn par_ranges(total: u64, parts: usize, f: impl Fn(u64, u64) -> u128 + Sync) -> u128 {
    let parts = (parts.max(1) as u64).min(total.max(1));
    (0..parts)
        .into_par_iter()
        .map(|k| {
            let lo = (total as u128 * k as u128 / parts as u128) as u64;
            let hi = (total as u128 * (k + 1) as u128 / parts as u128) as u64;
            if lo < hi { f(lo, hi) } else { 0 }
        })
        .sum()
}

fn spec_field(spec: &SurfaceSpec, n: u32) -> Result<crate::GaloisField, CountError> {
    if spec.characteristic == 0 {
        return Err(CountError::NeedsPositiveCharacteristic);
    }
    Ok(crate::GaloisField::new(spec.characteristic, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::load_fixture;
    use crate::grassmann::{plucker_vars, PLUCKER_PAIRS};
    use crate::{IntPoly, Integers};
    use num_traits::ToPrimitive;

    fn eval_mod(f: &IntPoly, x: &[i64], p: i64) -> i64 {
        f.terms()
            .map(|(m, c)| {
                let c = c.to_i64().unwrap().rem_euclid(p);
                m.exps().iter().zip(x).fold(c, |acc, (&e, &xi)| acc * xi.pow(e as u32) % p)
            })
            .sum::<i64>()
            % p
    }

    fn vanishes(spec: &SurfaceSpec, x: &[i64], p: i64) -> bool {
        spec.forms().iter().all(|f| eval_mod(f, x, p) == 0)
    }

    /// Counts 2-planes of GF(p)^5 on the surface by running over all
    /// ordered pairs of vectors.
    fn brute_grassmann(spec: &SurfaceSpec) -> u128 {
        let p = spec.characteristic as i64;
        let q5 = p.pow(5);
        let vec_of = |mut k: i64| {
            let mut v = [0i64; 5];
            for x in &mut v {
                *x = k % p;
                k /= p;
            }
            v
        };
        let mut pairs = 0u128;
        for a in 0..q5 {
            let u = vec_of(a);
            for b in 0..q5 {
                let v = vec_of(b);
                let x: Vec<i64> = PLUCKER_PAIRS
                    .iter()
                    .map(|&(i, j)| (u[i - 1] * v[j - 1] - u[j - 1] * v[i - 1]).rem_euclid(p))
                    .collect();
                if x.iter().any(|&c| c != 0) && vanishes(spec, &x, p) {
                    pairs += 1;
                }
            }
        }
        let q = p as u128;
        pairs / ((q * q - 1) * (q * q - q))
    }

    /// Counts points of P^4 over GF(p) on the surface.
    fn brute_p4(spec: &SurfaceSpec) -> u128 {
        let p = spec.characteristic as i64;
        let mut affine = 0u128;
        for k in 1..p.pow(5) {
            let mut x = [0i64; 5];
            let mut r = k;
            for c in &mut x {
                *c = r % p;
                r /= p;
            }
            if vanishes(spec, &x, p) {
                affine += 1;
            }
        }
        affine / (p as u128 - 1)
    }

    fn control(p: u32) -> SurfaceSpec {
        let v = plucker_vars();
        let parse = |s: &str| IntPoly::parse(Integers::new(), v.clone(), s).unwrap();
        SurfaceSpec::new(
            "control",
            Ambient::GrassmannCi,
            p,
            vec![parse("x13"), parse("x14"), parse("x15")],
            parse("x12^2"),
            None,
        )
        .unwrap()
    }

    #[test]
    fn s3_low_degree_counts() {
        let s3 = load_fixture("s3").unwrap();
        let opts = CountOptions::default();
        assert_eq!(brute_grassmann(&s3), 16);
        assert_eq!(count_naive(&s3, 1, &opts).unwrap(), 16);
        assert_eq!(count_naive(&s3, 2, &opts).unwrap(), 94);
        assert_eq!(count_slice(&s3, 1, &opts).unwrap(), 16);
        assert_eq!(count_slice(&s3, 2, &opts).unwrap(), 94);
    }

    #[test]
    fn p4_low_degree_counts() {
        let opts = CountOptions::default();
        let x2 = load_fixture("x2").unwrap();
        let x3 = load_fixture("x3").unwrap();
        assert_eq!(brute_p4(&x2), 7);
        assert_eq!(brute_p4(&x3), 15);
        assert_eq!(count_naive(&x2, 1, &opts).unwrap(), 7);
        assert_eq!(count_p4(&x2, 1, &opts).unwrap(), 7);
        assert_eq!(count_p4(&x3, 1, &opts).unwrap(), 15);
    }

    #[test]
    fn strategies_agree() {
        let opts = CountOptions::default();
        let s3 = load_fixture("s3").unwrap();
        assert_eq!(count_naive(&s3, 3, &opts).unwrap(), count_slice(&s3, 3, &opts).unwrap());
        for name in ["x2", "x3"] {
            let spec = load_fixture(name).unwrap();
            for n in 1..=4 {
                assert_eq!(count_naive(&spec, n, &opts).unwrap(), count_p4(&spec, n, &opts).unwrap(), "{name} {n}");
            }
        }
    }

    #[test]
    fn control_matches_subspace_enumeration() {
        let opts = CountOptions::default();
        for p in [2, 3] {
            let spec = control(p);
            let expected = brute_grassmann(&spec);
            assert_eq!(count_naive(&spec, 1, &opts).unwrap(), expected, "p = {p}");
            assert_eq!(count_slice(&spec, 1, &opts).unwrap(), expected, "p = {p}");
        }
        // the control over GF(4) and GF(9) against the naive enumeration
        for p in [2, 3] {
            let spec = control(p);
            assert_eq!(count_naive(&spec, 2, &opts).unwrap(), count_slice(&spec, 2, &opts).unwrap());
        }
    }

    #[test]
    fn big_cell_fixing_set() {
        let s3 = load_fixture("s3").unwrap();
        let sets = fixing_sets(&s3).unwrap();
        let big = sets.iter().find(|s| s.pivots == (1, 2)).unwrap();
        assert_eq!(big.fixed, vec!["a", "d"]);
        assert_eq!(big.free, vec!["b", "c", "e", "f"]);
        assert_eq!(sets.len(), 10);
    }

    #[test]
    fn counts_do_not_depend_on_partitioning() {
        let s3 = load_fixture("s3").unwrap();
        let x3 = load_fixture("x3").unwrap();
        let with = |parts| CountOptions { parts, ..CountOptions::default() };
        let a = count_slice(&s3, 3, &with(1)).unwrap();
        let b = count_p4(&x3, 3, &with(1)).unwrap();
        for parts in [2, 8] {
            assert_eq!(count_slice(&s3, 3, &with(parts)).unwrap(), a);
            assert_eq!(count_p4(&x3, 3, &with(parts)).unwrap(), b);
        }
    }

    #[test]
    fn budget_and_ambient_errors() {
        let s3 = load_fixture("s3").unwrap();
        let x2 = load_fixture("x2").unwrap();
        let tiny = CountOptions { parts: 1, budget: 10 };
        assert!(matches!(count_naive(&s3, 2, &tiny), Err(CountError::BudgetExceeded { .. })));
        assert!(matches!(count_p4(&s3, 1, &tiny), Err(CountError::WrongAmbient { .. })));
        assert!(matches!(count_slice(&x2, 1, &tiny), Err(CountError::WrongAmbient { .. })));
    }

    #[test]
    fn fixture_tables_are_consistent() {
        for name in ["s3", "x2", "x3"] {
            let t = fixture_table(name).unwrap();
            assert_eq!(t.entries.len(), 10);
            assert!(t.is_consistent(), "{name}");
        }
        let s3 = fixture_table("s3").unwrap();
        assert_eq!(s3.get(10), Some(3486840049));
        assert_eq!(s3.prefix().len(), 10);
    }

    #[test]
    fn invariant_checks_detect_violations() {
        let bad = CountTable::new("bad", 3, vec![(1, 100), (2, 94)]);
        assert_eq!(bad.weil_violations(), vec![1]);
        assert_eq!(bad.divisibility_violations(), vec![(1, 2)]);
    }

    #[test]
    fn partition_sum_is_invariant() {
        let f = |lo: u64, hi: u64| (lo..hi).map(|i| (i * i % 7) as u128).sum();
        let a = par_ranges(1000, 1, f);
        assert_eq!(a, par_ranges(1000, 2, f));
        assert_eq!(a, par_ranges(1000, 8, f));
        assert_eq!(a, par_ranges(1000, 5000, f));
    }
}
