//! From point counts to a Picard-rank upper bound: Lefschetz traces, Newton's
//! identities, division by the known factor (t - 1)^k, completion through the
//! functional equation and cyclotomic detection of roots of unity.
//!
//! All arithmetic is exact over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::counting::CountTable;
use crate::mpoly::cyclotomic;
use crate::{RatUniPoly, Rationals};

/// Second Betti number of a K3 surface.
pub const K3_H2: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZetaError {
    #[error("count table has no entry for n = {0}")]
    MissingCount(u32),
    #[error("need {need} consecutive counts from n = 1, have {have}")]
    TooFewCounts { need: usize, have: usize },
    #[error("{have} traces supplied for a degree-{degree} polynomial")]
    TooManyTraces { have: usize, degree: usize },
    #[error("known factor (t - 1)^{k} exceeds the degree {h2}")]
    BadFactor { k: usize, h2: usize },
    #[error("count invariant violated: {0}")]
    Invariant(String),
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Normalized Frobenius traces s_n = (N_n - 1 - p^(2n)) / p^n for n = 1..=max.
pub fn traces_from_counts(table: &CountTable, max: u32) -> Result<Vec<BigRational>, ZetaError> {
    let p = BigInt::from(table.p);
    (1..=max)
        .map(|n| {
            let count = table.get(n).ok_or(ZetaError::MissingCount(n))?;
            let pn = p.pow(n);
            let num = BigInt::from(count) - 1 - &pn * &pn;
            Ok(BigRational::new(num, pn))
        })
        .collect()
}

/// Coefficients a_1..a_m of the monic degree-`degree` polynomial whose roots
/// have power sums s_1..s_m, by Newton's identities
/// n a_n = -(s_n + sum_{i<n} a_i s_{n-i}).
pub fn newton_coeffs(traces: &[BigRational], degree: usize) -> Result<Vec<BigRational>, ZetaError> {
    if traces.len() > degree {
        return Err(ZetaError::TooManyTraces { have: traces.len(), degree });
    }
    let mut a: Vec<BigRational> = Vec::with_capacity(traces.len());
    for n in 1..=traces.len() {
        let mut acc = traces[n - 1].clone();
        for i in 1..n {
            acc += &a[i - 1] * &traces[n - i - 1];
        }
        a.push(-acc / rat(n as i64));
    }
    Ok(a)
}

/// Power sums s_1..s_m of the roots of t^d + a_1 t^(d-1) + ... (inverse of
/// [`newton_coeffs`]); `a` lists a_1..a_d.
pub fn power_sums(a: &[BigRational], m: usize) -> Vec<BigRational> {
    let coeff = |i: usize| if i <= a.len() { a[i - 1].clone() } else { BigRational::zero() };
    let mut s: Vec<BigRational> = Vec::with_capacity(m);
    for n in 1..=m {
        let mut acc = coeff(n) * rat(n as i64);
        for i in 1..n {
            acc += coeff(i) * &s[n - i - 1];
        }
        s.push(-acc);
    }
    s
}

/// Leading coefficients c_1..c_m of P(t) / (t - 1)^k, given those of P.
pub fn divide_known_factor(a: &[BigRational], k: usize) -> Vec<BigRational> {
    let mut c: Vec<BigRational> = a.to_vec();
    for _ in 0..k {
        // dividing by (t - 1): c'_n = c_n + c'_{n-1} with c'_0 = 1
        if let Some(first) = c.first_mut() {
            *first += rat(1);
        }
        for n in 1..c.len() {
            let prev = c[n - 1].clone();
            c[n] += prev;
        }
    }
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Symmetric => "symmetric",
            Parity::Antisymmetric => "antisymmetric",
        })
    }
}

/// Completions of t^d + c_1 t^(d-1) + ... + c_d from its top half through
/// t^d Q(1/t) = +-Q(t). The antisymmetric one is admissible only when the
/// middle coefficient (d even) vanishes. Returns `None` when fewer than
/// floor(d/2) coefficients are given.
pub fn functional_equation_complete(c: &[BigRational], degree: usize) -> Option<Vec<(Parity, RatUniPoly)>> {
    let half = degree / 2;
    if c.len() < half {
        return None;
    }
    let mut out = Vec::new();
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        let sign = if parity == Parity::Symmetric { rat(1) } else { rat(-1) };
        // top[i] = coefficient of t^(degree - i), top[0] = 1
        let mut top = vec![BigRational::zero(); degree + 1];
        top[0] = rat(1);
        top[1..=half].clone_from_slice(&c[..half]);
        if degree.is_multiple_of(2) && parity == Parity::Antisymmetric && !top[half].is_zero() {
            continue;
        }
        for i in 0..=half {
            if degree - i > half {
                top[degree - i] = &sign * &top[i];
            }
        }
        let coeffs = (0..=degree).map(|e| top[degree - e].clone()).collect();
        out.push((parity, RatUniPoly::new(Rationals::new(), coeffs)));
    }
    Some(out)
}

/// Euler's totient.
pub fn totient(m: u64) -> u64 {
    let mut n = m;
    let mut out = m;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            while n.is_multiple_of(d) {
                n /= d;
            }
            out -= out / d;
        }
        d += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// Total multiplicity of the roots of `q` that are roots of unity: every
/// cyclotomic Φ_m with φ(m) <= deg q is divided out as often as it divides.
pub fn count_unit_roots(q: &RatUniPoly) -> usize {
    let Some(deg) = q.degree() else { return 0 };
    let mut rest = q.clone();
    let mut count = 0;
    // φ(m) >= sqrt(m / 2), so m <= 2 deg^2 covers every candidate
    for m in 1..=(2 * deg * deg).max(2) as u64 {
        let phi = totient(m) as usize;
        if phi > rest.degree().unwrap_or(0) {
            continue;
        }
        let cyc = cyclotomic(m as u32);
        while let Ok(next) = rest.div_exact(&cyc) {
            rest = next;
            count += phi;
        }
    }
    count
}

/// One admissible completion with its unit-root count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub parity: Parity,
    pub q: RatUniPoly,
    pub unit_roots: usize,
}

/// Everything the rank bound is derived from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilData {
    pub surface: String,
    pub p: u32,
    pub h2: usize,
    /// Independent Frobenius-invariant classes known in advance.
    pub k: usize,
    pub traces: Vec<BigRational>,
    pub a: Vec<BigRational>,
    pub c: Vec<BigRational>,
    pub candidates: Vec<Candidate>,
}

impl WeilData {
    /// Maximum unit-root count over the admissible completions.
    pub fn unit_roots(&self) -> usize {
        self.candidates.iter().map(|c| c.unit_roots).max().unwrap_or(0)
    }

    /// Upper bound for the geometric Picard rank.
    pub fn rank_upper_bound(&self) -> usize {
        self.k + self.unit_roots()
    }

    /// The rank, when the upper bound meets the known lower bound k.
    pub fn rank(&self) -> Option<usize> {
        (self.rank_upper_bound() == self.k).then_some(self.k)
    }

    pub fn is_ambiguous(&self) -> bool {
        self.candidates.len() > 1
    }

    /// Violations of the integrality and Weil-bound invariants.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let p = BigInt::from(self.p);
        for (i, s) in self.traces.iter().enumerate() {
            let n = i as u32 + 1;
            let pn = BigRational::from_integer(p.pow(n));
            if !(s * &pn).is_integer() {
                out.push(format!("p^{n} s_{n} is not an integer"));
            }
            if s.abs() > rat(self.h2 as i64) {
                out.push(format!("|s_{n}| exceeds {}", self.h2));
            }
        }
        for (i, a) in self.a.iter().enumerate() {
            let n = i as u32 + 1;
            if !(a * BigRational::from_integer(p.pow(n))).is_integer() {
                out.push(format!("p^{n} a_{n} is not an integer"));
            }
        }
        out
    }
}

/// Runs the whole pipeline on the counts N_1..N_m with m = floor((h2 - k) / 2).
pub fn rank_bound(table: &CountTable, k: usize) -> Result<WeilData, ZetaError> {
    rank_bound_with(table, k, K3_H2)
}

pub fn rank_bound_with(table: &CountTable, k: usize, h2: usize) -> Result<WeilData, ZetaError> {
    if k > h2 {
        return Err(ZetaError::BadFactor { k, h2 });
    }
    let degree = h2 - k;
    let m = degree / 2;
    let have = table.prefix().len();
    if have < m {
        return Err(ZetaError::TooFewCounts { need: m, have });
    }
    let traces = traces_from_counts(table, m as u32)?;
    let a = newton_coeffs(&traces, h2)?;
    let c = divide_known_factor(&a, k);
    let completions = functional_equation_complete(&c, degree).expect("enough coefficients");
    let candidates = completions
        .into_iter()
        .map(|(parity, q)| {
            let unit_roots = count_unit_roots(&q);
            Candidate { parity, q, unit_roots }
        })
        .collect();
    let data = WeilData { surface: table.surface.clone(), p: table.p, h2, k, traces, a, c, candidates };
    if let Some(v) = data.invariant_violations().into_iter().next() {
        return Err(ZetaError::Invariant(v));
    }
    Ok(data)
}

/// Count table of a hypothetical surface whose normalized Frobenius
/// characteristic polynomial is `poly` (monic, degree h2): N_n = 1 + p^(2n) +
/// p^n s_n. Fails if some count is not a nonnegative integer.
pub fn counts_from_polynomial(name: &str, p: u32, poly: &RatUniPoly, max: u32) -> Option<CountTable> {
    let d = poly.degree()?;
    if !poly.leading()?.is_one() {
        return None;
    }
    let a: Vec<BigRational> = (1..=d).map(|i| poly.coeff(d - i)).collect();
    let s = power_sums(&a, max as usize);
    let pb = BigInt::from(p);
    let mut entries = Vec::new();
    for (i, sn) in s.iter().enumerate() {
        let n = i as u32 + 1;
        let pn = pb.pow(n);
        let val = BigRational::from_integer(&pn * &pn + 1) + sn * BigRational::from_integer(pn);
        if !val.is_integer() || val.is_negative() {
            return None;
        }
        let v: u128 = val.to_integer().try_into().ok()?;
        entries.push((n, v));
    }
    Some(CountTable::new(name, p, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::fixture_table;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn poly(cs: &[i64]) -> RatUniPoly {
        RatUniPoly::from_i64s(Rationals::new(), cs)
    }

    #[test]
    fn traces_of_fixtures() {
        let s3 = fixture_table("s3").unwrap();
        let t = traces_from_counts(&s3, 2).unwrap();
        assert_eq!(t, vec![r(2, 1), r(4, 3)]);
        let x2 = fixture_table("x2").unwrap();
        assert_eq!(traces_from_counts(&x2, 1).unwrap(), vec![r(1, 1)]);
        assert_eq!(traces_from_counts(&x2, 11), Err(ZetaError::MissingCount(11)));
    }

    #[test]
    fn newton_small_cases() {
        let a = newton_coeffs(&[r(3, 1), r(3, 1), r(3, 1)], 3).unwrap();
        assert_eq!(a, vec![r(-3, 1), r(3, 1), r(-1, 1)]);
        let a = newton_coeffs(&[r(2, 1), r(4, 3)], 22).unwrap();
        assert_eq!(a, vec![r(-2, 1), r(4, 3)]);
        assert!(newton_coeffs(&vec![r(1, 1); 3], 2).is_err());
        assert_eq!(power_sums(&[r(-3, 1), r(3, 1), r(-1, 1)], 4), vec![r(3, 1); 4]);
    }

    #[test]
    fn division_by_known_factor() {
        // (t - 1)^2 (t^2 + 1) = t^4 - 2t^3 + 2t^2 - 2t + 1
        let a = [r(-2, 1), r(2, 1), r(-2, 1), r(1, 1)];
        assert_eq!(divide_known_factor(&a, 2), vec![r(0, 1), r(1, 1), r(0, 1), r(0, 1)]);
        assert_eq!(divide_known_factor(&a, 0), a.to_vec());
    }

    #[test]
    fn s3_pipeline() {
        let data = rank_bound(&fixture_table("s3").unwrap(), 2).unwrap();
        let expected = [(0, 1), (1, 3), (2, 3), (-1, 3), (1, 1), (0, 1), (2, 3), (2, 3), (-1, 3), (1, 1)];
        let expected: Vec<BigRational> = expected.iter().map(|&(n, d)| r(n, d)).collect();
        assert_eq!(data.c, expected);
        for c in &data.c {
            assert!((c * r(3, 1)).is_integer());
        }
        assert_eq!(data.candidates.len(), 1);
        let q = &data.candidates[0].q;
        assert_eq!(q.reversed(20), *q);
        assert!(!q.eval(&r(1, 1)).is_zero());
        assert!(!q.eval(&r(-1, 1)).is_zero());
        assert_eq!(data.unit_roots(), 0);
        assert_eq!(data.rank_upper_bound(), 2);
        assert_eq!(data.rank(), Some(2));
    }

    #[test]
    fn completion_contract() {
        let mut c = vec![r(0, 1); 10];
        c[9] = r(1, 1);
        let out = functional_equation_complete(&c, 20).unwrap();
        assert_eq!(out.len(), 1);
        let mut expected = vec![0i64; 21];
        expected[0] = 1;
        expected[10] = 1;
        expected[20] = 1;
        assert_eq!(out[0].1, poly(&expected));
        let out = functional_equation_complete(&vec![r(0, 1); 10], 20).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].0, Parity::Antisymmetric);
        assert!(functional_equation_complete(&vec![r(0, 1); 9], 20).is_none());
    }

    #[test]
    fn unit_root_counts() {
        assert_eq!(count_unit_roots(&poly(&[-1, 0, 1])), 2);
        assert_eq!(count_unit_roots(&poly(&[1, 0, -1, 0, 1])), 4);
        assert_eq!(count_unit_roots(&poly(&[1, 1, 1])), 2);
        assert_eq!(count_unit_roots(&poly(&[1, -3, 1])), 0);
        // (t - 1)^3 (t^2 + 3)
        let f = poly(&[-1, 1]).pow(3).mul(&poly(&[3, 0, 1]));
        assert_eq!(count_unit_roots(&f), 3);
        assert_eq!(totient(66), 20);
        assert_eq!(totient(1), 1);
    }

    #[test]
    fn p4_fixture_bounds() {
        for name in ["x2", "x3"] {
            let data = rank_bound(&fixture_table(name).unwrap(), 2).unwrap();
            assert_eq!(data.rank_upper_bound(), 2, "{name}");
        }
    }

    #[test]
    fn synthetic_roots_of_unity() {
        // normalized eigenvalues: all 20th roots of unity and 1, 1
        let p = 3;
        let poly22 = poly(&[-1, 1]).pow(2).mul(&{
            let mut c = vec![0i64; 21];
            c[0] = -1;
            c[20] = 1;
            poly(&c)
        });
        let table = counts_from_polynomial("synthetic", p, &poly22, 10).unwrap();
        let data = rank_bound(&table, 2).unwrap();
        assert!(data.is_ambiguous());
        assert_eq!(data.rank_upper_bound(), 22);
    }
}
