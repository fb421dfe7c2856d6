//! Sparse multivariate polynomials over a [`Ring`], a text parser for the
//! fixture syntax, dense univariate polynomials and cyclotomic polynomials.

mod parse;
pub mod uni;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ring::{Rationals, Ring};

pub use parse::ParseError;
pub use uni::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("polynomials live over different variable sets")]
    VariableSetMismatch,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Exponent vector. Ordered graded-lexicographically: total degree first,
/// then lexicographically with the first variable largest.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn new(exps: Vec<u16>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shared, ordered variable names.
pub type Vars = Arc<[String]>;

pub fn vars(names: &[&str]) -> Vars {
    names.iter().map(|s| s.to_string()).collect::<Vec<_>>().into()
}

/// Sparse polynomial: a map from exponent vectors to nonzero coefficients.
#[derive(Clone)]
pub struct MultiPoly<R: Ring> {
    ring: R,
    vars: Vars,
    terms: BTreeMap<Monomial, R::Elem>,
}

impl<R: Ring> MultiPoly<R> {
    pub fn zero(ring: R, vars: Vars) -> Self {
        MultiPoly { ring, vars, terms: BTreeMap::new() }
    }

    pub fn constant(ring: R, vars: Vars, c: R::Elem) -> Self {
        let mut p = Self::zero(ring, vars);
        let one = Monomial::one(p.nvars());
        p.add_term(one, c);
        p
    }

    pub fn one(ring: R, vars: Vars) -> Self {
        let c = ring.one();
        Self::constant(ring, vars, c)
    }

    /// The variable with index `i`.
    pub fn var(ring: R, vars: Vars, i: usize) -> Self {
        let mut p = Self::zero(ring, vars);
        let m = Monomial::var(p.nvars(), i);
        let one = p.ring.one();
        p.add_term(m, one);
        p
    }

    pub fn var_named(ring: R, vars: Vars, name: &str) -> Result<Self, PolyError> {
        let i = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(Self::var(ring, vars, i))
    }

    pub fn from_terms(
        ring: R,
        vars: Vars,
        terms: impl IntoIterator<Item = (Vec<u16>, R::Elem)>,
    ) -> Self {
        let mut p = Self::zero(ring, vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.nvars(), "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    /// Parses the fixture syntax, e.g. `x12*x34 + x23*x14 - x13*x24`.
    pub fn parse(ring: R, vars: Vars, text: &str) -> Result<Self, PolyError> {
        Ok(parse::parse(ring, vars, text)?)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &R::Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> R::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: R::Elem) {
        if self.ring.is_zero(&c) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = self.ring.add(o.get(), &c);
                if self.ring.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var] as u32).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &R::Elem)> {
        self.terms.iter().next_back()
    }

    fn same_vars(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variable sets"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_vars(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), self.ring.neg(c)))
            .collect();
        MultiPoly { ring: self.ring.clone(), vars: self.vars.clone(), terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_vars(other);
        let mut out = Self::zero(self.ring.clone(), self.vars.clone());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), self.ring.mul(ca, cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.vars.clone());
        for (m, a) in &self.terms {
            out.add_term(m.clone(), self.ring.mul(a, c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.ring.clone(), self.vars.clone());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.vars.clone());
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.0.clone();
            m2[i] -= 1;
            out.add_term(Monomial(m2), self.ring.mul(c, &self.ring.from_i64(e as i64)));
        }
        out
    }

    /// Value at a point, using per-variable power tables.
    pub fn evaluate(&self, point: &[R::Elem]) -> Result<R::Elem, PolyError> {
        if point.len() != self.nvars() {
            return Err(PolyError::DimensionMismatch { expected: self.nvars(), got: point.len() });
        }
        let r = &self.ring;
        let powers: Vec<Vec<R::Elem>> = (0..self.nvars())
            .map(|i| {
                let d = self.degree_in(i) as usize;
                let mut pw = Vec::with_capacity(d + 1);
                pw.push(r.one());
                for k in 0..d {
                    pw.push(r.mul(&pw[k], &point[i]));
                }
                pw
            })
            .collect();
        let mut acc = r.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = r.mul(&t, &powers[i][e as usize]);
                }
            }
            acc = r.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Replaces every variable by the corresponding image; all images share
    /// one variable set, which becomes the variable set of the result.
    pub fn compose(&self, images: &[Self]) -> Result<Self, PolyError> {
        if images.len() != self.nvars() {
            return Err(PolyError::DimensionMismatch { expected: self.nvars(), got: images.len() });
        }
        let target = match images.first() {
            Some(p) => p.vars.clone(),
            None => self.vars.clone(),
        };
        if images.iter().any(|p| p.vars != target) {
            return Err(PolyError::VariableSetMismatch);
        }
        let mut cache: Vec<Vec<Self>> = images
            .iter()
            .map(|p| vec![Self::one(self.ring.clone(), target.clone()), p.clone()])
            .collect();
        let mut out = Self::zero(self.ring.clone(), target.clone());
        for (m, c) in &self.terms {
            let mut t = Self::constant(self.ring.clone(), target.clone(), c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap().mul(&images[i]);
                    cache[i].push(next);
                }
                t = t.mul(&cache[i][e as usize]);
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Substitutes the named variables. Images must share one variable set
    /// (the target); every unassigned variable must also exist in the target.
    pub fn substitute(&self, assignment: &[(&str, Self)]) -> Result<Self, PolyError> {
        for (name, _) in assignment {
            if self.var_index(name).is_none() {
                return Err(PolyError::UnknownVariable(name.to_string()));
            }
        }
        let target = match assignment.first() {
            Some((_, p)) => p.vars.clone(),
            None => self.vars.clone(),
        };
        if assignment.iter().any(|(_, p)| p.vars != target) {
            return Err(PolyError::VariableSetMismatch);
        }
        let images = self
            .vars
            .iter()
            .map(|v| match assignment.iter().find(|(n, _)| n == v) {
                Some((_, p)) => Ok(p.clone()),
                None => Self::var_named(self.ring.clone(), target.clone(), v),
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.compose(&images)
    }

    /// Re-expresses the polynomial over another variable set by name. Variables
    /// that do not occur may be dropped.
    pub fn rebase(&self, vars: Vars) -> Result<Self, PolyError> {
        let used = self.support_vars();
        let map = (0..self.nvars())
            .map(|i| {
                let pos = vars.iter().position(|v| *v == self.vars[i]);
                match pos {
                    None if used.contains(&i) => Err(PolyError::UnknownVariable(self.vars[i].clone())),
                    _ => Ok(pos),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Self::zero(self.ring.clone(), vars);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; out.nvars()];
            for (i, &k) in m.0.iter().enumerate() {
                if let Some(j) = map[i] {
                    e[j] += k;
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Coefficient-wise map into another ring (e.g. reduction mod p).
    pub fn map_coeffs<S: Ring>(&self, ring: S, f: impl Fn(&R::Elem) -> S::Elem) -> MultiPoly<S> {
        let mut out = MultiPoly::zero(ring, self.vars.clone());
        for (m, c) in &self.terms {
            let v = f(c);
            out.add_term(m.clone(), v);
        }
        out
    }

    /// Variables that occur in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }
}

impl<R: Ring> PartialEq for MultiPoly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.terms == other.terms
    }
}

impl<R: Ring> Eq for MultiPoly<R> {}

impl<R: Ring> fmt::Debug for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

/// Prints in the fixture syntax, highest graded-lex term first.
impl<R: Ring> fmt::Display for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let r = &self.ring;
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let mut cs = format!("{}", r.show(c));
            let negative = cs.starts_with('-');
            if negative {
                cs.remove(0);
            }
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            let has_vars = m.degree() > 0;
            if cs.contains(['+', '-', '/']) && has_vars {
                cs = format!("({cs})");
            }
            let mut wrote = false;
            if cs != "1" || !has_vars {
                write!(f, "{cs}")?;
                wrote = true;
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                wrote = true;
                write!(f, "{}", self.vars[i])?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// The m-th cyclotomic polynomial, by dividing `t^m - 1` by `Φ_d` for the
/// proper divisors d of m.
pub fn cyclotomic(m: u32) -> UniPoly<Rationals> {
    assert!(m >= 1, "cyclotomic index must be positive");
    let q = Rationals::new();
    let mut f = UniPoly::monomial(q, num_rational::BigRational::from_integer(1.into()), m as usize)
        .sub(&UniPoly::one(q));
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        f = f.div_exact(&cyclotomic(d)).expect("cyclotomic factors divide t^m - 1");
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::GaloisField;
    use crate::ring::Integers;
    use num_bigint::BigInt;

    fn zpoly(vs: &[&str], s: &str) -> MultiPoly<Integers> {
        MultiPoly::parse(Integers::new(), vars(vs), s).unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        let vs = ["x12", "x13", "x14", "x23", "x24", "x34"];
        let p = zpoly(&vs, "x12*x34 + x23*x14 - x13*x24");
        assert_eq!(p.num_terms(), 3);
        let again = zpoly(&vs, &p.to_string());
        assert_eq!(p, again);
        let q = zpoly(&vs, "2x12x34 - 3 x14^2 + (x12 + x13)^2");
        assert_eq!(q, zpoly(&vs, "x12^2 + 2*x12*x13 + x13^2 + 2*x12*x34 - 3*x14^2"));
        assert!(MultiPoly::parse(Integers::new(), vars(&vs), "x12 + y").is_err());
        assert!(MultiPoly::parse(Integers::new(), vars(&vs), "x12 +").is_err());
    }

    #[test]
    fn evaluate_examples() {
        let f2 = GaloisField::new(2, 1).unwrap();
        let vs = vars(&["x12", "x13", "x14", "x15", "x23", "x24", "x25", "x34", "x35", "x45"]);
        let g1 = MultiPoly::parse(f2.clone(), vs.clone(), "x12*x34 + x23*x14 - x13*x24").unwrap();
        let mut pt = vec![f2.zero(); 10];
        pt[0] = f2.one();
        pt[7] = f2.one();
        assert_eq!(g1.evaluate(&pt).unwrap(), f2.one());
        assert_eq!(g1.evaluate(&[f2.zero(); 10]).unwrap(), f2.zero());
        let l1 = MultiPoly::parse(f2.clone(), vs, "x12 + x15 + x24 + x34").unwrap();
        let mut pt = vec![f2.zero(); 10];
        pt[0] = f2.one();
        pt[3] = f2.one();
        assert_eq!(l1.evaluate(&pt).unwrap(), f2.zero());
        assert!(l1.evaluate(&pt[..3]).is_err());
    }

    #[test]
    fn substitute_examples() {
        let z = Integers::new();
        let vs = vars(&["x", "y"]);
        let p = zpoly(&["x", "y"], "x*y + x");
        let one = MultiPoly::one(z, vs.clone());
        assert_eq!(p.substitute(&[("x", one)]).unwrap(), zpoly(&["x", "y"], "y + 1"));
        let ts = vars(&["t"]);
        let t = MultiPoly::var(z, ts.clone(), 0);
        let d = zpoly(&["x", "y"], "x - y");
        assert!(d.substitute(&[("x", t.clone()), ("y", t.clone())]).unwrap().is_zero());
        assert!(matches!(
            d.substitute(&[("w", t)]),
            Err(PolyError::UnknownVariable(_))
        ));
        let cell = vars(&["a", "b", "c", "d", "e", "f"]);
        let ae_bd = MultiPoly::parse(z, cell.clone(), "a*e - b*d").unwrap();
        let minor = MultiPoly::parse(z, vars(&["r13", "r14", "r23", "r24"]), "r13*r24 - r14*r23")
            .unwrap();
        let images = ["a", "b", "d", "e"]
            .iter()
            .map(|n| MultiPoly::var_named(z, cell.clone(), n).unwrap())
            .collect::<Vec<_>>();
        assert_eq!(minor.compose(&images).unwrap(), ae_bd);
    }

    #[test]
    fn graded_lex_order() {
        let p = zpoly(&["x", "y", "z"], "z^3 + x*y + x^2 + y");
        let order: Vec<Vec<u16>> = p.terms().map(|(m, _)| m.exps().to_vec()).collect();
        assert_eq!(order, vec![vec![0, 1, 0], vec![1, 1, 0], vec![2, 0, 0], vec![0, 0, 3]]);
        let lead = p.leading().unwrap().0.exps().to_vec();
        assert_eq!(lead, vec![0, 0, 3]);
        assert_eq!(p.degree(), Some(3));
        assert!(!p.is_homogeneous());
        assert_eq!(p.coeff(&Monomial::new(vec![2, 0, 0])), BigInt::from(1));
    }

    #[test]
    fn cyclotomic_examples() {
        let q = Rationals::new();
        assert_eq!(cyclotomic(1), UniPoly::from_i64s(q, &[-1, 1]));
        assert_eq!(cyclotomic(2), UniPoly::from_i64s(q, &[1, 1]));
        assert_eq!(cyclotomic(12), UniPoly::from_i64s(q, &[1, 0, -1, 0, 1]));
        let f = UniPoly::from_i64s(q, &[1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic(12).gcd(&f).unwrap(), f);
    }
}
