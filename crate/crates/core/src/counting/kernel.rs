//! Table-based arithmetic helpers for the counting loops: compiled
//! polynomials, trace and Artin–Schreier tables, and fast root counting of
//! low-degree univariate polynomials.

use crate::ffield::{univariate_root_count, GaloisField, TableView};
use crate::mpoly::UniPoly;
use crate::FqPoly;

use super::CountError;

pub(crate) const MAX_DEG: usize = 4;

/// Up to this many variables per compiled polynomial.
pub(crate) const MAX_CVARS: usize = 6;

/// A polynomial over the field with raw (log) coefficients.
#[derive(Clone, Debug, Default)]
pub(crate) struct CPoly {
    pub terms: Vec<(u32, [u8; MAX_CVARS])>,
}

impl CPoly {
    /// Compiles `p`, reading the exponents of the variables in `keep` (in
    /// that order); other variables are ignored.
    pub fn from_poly(p: &FqPoly, keep: &[usize]) -> CPoly {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let mut e = [0u8; MAX_CVARS];
                for (k, &v) in keep.iter().enumerate() {
                    e[k] = m.exps()[v] as u8;
                }
                (c.raw(), e)
            })
            .collect();
        CPoly { terms }
    }

    /// Evaluates with `pw[v][e]` = e-th power of variable v.
    #[inline]
    pub fn eval(&self, t: &TableView, pw: &[[u32; MAX_DEG + 1]]) -> u32 {
        let mut acc = t.zero();
        for (c, e) in &self.terms {
            let mut v = *c;
            for (k, &ek) in e.iter().enumerate().take(pw.len()) {
                if ek != 0 {
                    v = t.mul(v, pw[k][ek as usize]);
                }
            }
            acc = t.add(acc, v);
        }
        acc
    }
}

#[inline]
pub(crate) fn powers(t: &TableView, x: u32) -> [u32; MAX_DEG + 1] {
    let mut out = [0u32; MAX_DEG + 1];
    for e in 1..=MAX_DEG {
        out[e] = t.mul(out[e - 1], x);
    }
    out
}

/// Mixed-radix counter over raw field values with cached powers; digit 0 is
/// the fastest.
pub(crate) struct Odometer {
    q: u64,
    pub digits: Vec<u32>,
    pub pw: Vec<[u32; MAX_DEG + 1]>,
}

impl Odometer {
    pub fn new(t: &TableView, len: usize, start: u64) -> Self {
        let q = t.order as u64 + 1;
        let mut rest = start;
        let digits: Vec<u32> = (0..len)
            .map(|_| {
                let d = (rest % q) as u32;
                rest /= q;
                d
            })
            .collect();
        let pw = digits.iter().map(|&d| powers(t, d)).collect();
        Odometer { q, digits, pw }
    }

    #[inline]
    pub fn advance(&mut self, t: &TableView) {
        for i in 0..self.digits.len() {
            self.digits[i] += 1;
            if self.digits[i] as u64 == self.q {
                self.digits[i] = 0;
                self.pw[i] = powers(t, 0);
            } else {
                self.pw[i] = powers(t, self.digits[i]);
                return;
            }
        }
    }
}

/// Small univariate polynomial of degree <= MAX_DEG (coefficients low to high).
pub(crate) type Small = [u32; MAX_DEG + 1];

pub(crate) struct Kernel<'a> {
    pub field: &'a GaloisField,
    pub t: TableView<'a>,
    pub p: u32,
    pub q: u64,
    /// Absolute trace of each raw element, as an integer in 0..p.
    trace: Vec<u8>,
    /// Characteristic 2: raw gamma -> raw s with s^2 + s = gamma (u32::MAX if none).
    as_root: Vec<u32>,
}

impl<'a> Kernel<'a> {
    pub fn new(field: &'a GaloisField) -> Result<Self, CountError> {
        let t = field.table_view().ok_or(CountError::FieldTooLarge(field.order()))?;
        let p = field.characteristic();
        let n = field.degree();
        let order = t.order;
        let mut trace = vec![0u8; order as usize + 1];
        for l in 0..order {
            let mut acc = t.zero();
            let mut x = l;
            for _ in 0..n {
                acc = t.add(acc, x);
                x = t.pow(x, p);
            }
            trace[l as usize] = field.packed(field.from_raw(acc)) as u8;
        }
        let mut as_root = Vec::new();
        if p == 2 {
            as_root = vec![u32::MAX; order as usize + 1];
            for s in 0..=order {
                let g = t.add(t.mul(s, s), s);
                if as_root[g as usize] == u32::MAX {
                    as_root[g as usize] = s;
                }
            }
        }
        Ok(Kernel { field, t, p, q: field.order(), trace, as_root })
    }

    #[inline]
    pub fn trace(&self, a: u32) -> u8 {
        self.trace[a as usize]
    }

    /// A square root, if one exists.
    #[inline]
    pub fn sqrt(&self, a: u32) -> Option<u32> {
        let t = &self.t;
        if t.is_zero(a) {
            return Some(a);
        }
        if self.p == 2 {
            return Some(if a.is_multiple_of(2) { a / 2 } else { (a + t.order) / 2 });
        }
        if a.is_multiple_of(2) {
            Some(a / 2)
        } else {
            None
        }
    }

    /// Distinct roots in the field of `a w^2 + b w + c`; `None` means every
    /// element is a root.
    #[inline]
    pub fn quadratic_roots(&self, a: u32, b: u32, c: u32) -> Option<([u32; 2], usize)> {
        let t = &self.t;
        let z = t.zero();
        if t.is_zero(a) {
            if t.is_zero(b) {
                return if t.is_zero(c) { None } else { Some(([z, z], 0)) };
            }
            return Some(([t.neg(t.mul(c, t.inv(b))), z], 1));
        }
        if self.p == 2 {
            if t.is_zero(b) {
                let r = self.sqrt(t.mul(c, t.inv(a))).expect("char 2 squares");
                return Some(([r, z], 1));
            }
            // w = (b/a) s with s^2 + s = a c / b^2
            let ba = t.mul(b, t.inv(a));
            let g = t.mul(t.mul(a, c), t.inv(t.mul(b, b)));
            let s = self.as_root[g as usize];
            if s == u32::MAX {
                return Some(([z, z], 0));
            }
            return Some(([t.mul(ba, s), t.mul(ba, t.add(s, 0))], 2));
        }
        let two_a = t.add(a, a);
        let disc = t.sub(t.mul(b, b), t.mul(t.add(two_a, two_a), c));
        let inv2a = t.inv(two_a);
        if t.is_zero(disc) {
            return Some(([t.neg(t.mul(b, inv2a)), z], 1));
        }
        match self.sqrt(disc) {
            None => Some(([z, z], 0)),
            Some(r) => {
                let nb = t.neg(b);
                Some(([t.mul(t.add(nb, r), inv2a), t.mul(t.sub(nb, r), inv2a)], 2))
            }
        }
    }

    /// Number of distinct roots in the field of g (coefficients low to high,
    /// degree `deg` with nonzero leading coefficient, deg >= 1).
    pub fn count_roots(&self, g: &[u32], deg: usize) -> u64 {
        let t = &self.t;
        match deg {
            1 => 1,
            2 => match self.quadratic_roots(g[2], g[1], g[0]) {
                Some((_, k)) => k as u64,
                None => self.q,
            },
            3 if self.p == 3 => {
                let li = t.inv(g[3]);
                self.char3_cubic(t.mul(g[2], li), t.mul(g[1], li), t.mul(g[0], li))
            }
            _ => self.count_roots_generic(&g[..=deg]),
        }
    }

    /// Distinct roots of t^3 + a t^2 + b t + c in characteristic 3.
    fn char3_cubic(&self, a: u32, b: u32, c: u32) -> u64 {
        let t = &self.t;
        if t.is_zero(a) {
            return self.char3_additive(b, c);
        }
        // t = u + b/a removes the linear term: u^3 + a u^2 + c'
        let r = t.mul(b, t.inv(a));
        let r2 = t.mul(r, r);
        let c2 = t.add(t.add(t.mul(r2, r), t.mul(a, r2)), t.add(t.mul(b, r), c));
        if t.is_zero(c2) {
            return 2;
        }
        // u = 1/s: s^3 + (a/c') s + 1/c'
        let ci = t.inv(c2);
        self.char3_additive(t.mul(a, ci), ci)
    }

    /// Distinct roots of t^3 + b t + c in characteristic 3.
    fn char3_additive(&self, b: u32, c: u32) -> u64 {
        let t = &self.t;
        if t.is_zero(b) {
            return 1;
        }
        match self.sqrt(t.neg(b)) {
            None => 1,
            Some(beta) => {
                // t = beta u: u^3 - u = -c / beta^3
                let g = t.neg(t.mul(c, t.inv(t.pow(beta, 3))));
                if self.trace(g) == 0 {
                    3
                } else {
                    0
                }
            }
        }
    }

    fn count_roots_generic(&self, g: &[u32]) -> u64 {
        let f = self.field;
        let poly = UniPoly::new(f.clone(), g.iter().map(|&r| f.from_raw(r)).collect());
        univariate_root_count(&poly, false).expect("nonzero polynomial").count as u64
    }
}
