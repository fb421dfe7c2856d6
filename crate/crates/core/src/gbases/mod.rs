//! Gröbner bases over finite fields (Buchberger with Gebauer–Möller pair
//! pruning and the normal selection strategy), dimension and degree of the
//! associated affine scheme, normal forms, elimination, and bivariate
//! factorization.

mod factor;
mod mono;

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub use factor::factor_bivariate;
pub use mono::{MonomialOrder, MAX_VARS};
use mono::Mono;

use crate::ffield::FieldError;
use crate::linalg::Matrix;
use crate::mpoly::{Monomial, MultiPoly, PolyError, Vars};
use crate::ring::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GbError {
    #[error("resources exceeded: {resource} limit {limit}")]
    ResourcesExceeded { resource: &'static str, limit: usize },
    #[error("at most {MAX_VARS} variables are supported, got {0}")]
    TooManyVariables(usize),
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("ideal is positive dimensional (dimension {0})")]
    PositiveDimensional(i64),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("factorization failed: {0}")]
    FactorizationFailed(&'static str),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Ceilings that turn runaway computations into [`GbError::ResourcesExceeded`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GbLimits {
    /// S-pairs reduced.
    pub max_pairs: usize,
    /// Pending pairs at any time.
    pub max_queue: usize,
    /// Terms of any intermediate polynomial.
    pub max_terms: usize,
    /// Standard monomials enumerated for a quotient basis.
    pub max_standard: usize,
}

impl Default for GbLimits {
    fn default() -> Self {
        GbLimits { max_pairs: 200_000, max_queue: 500_000, max_terms: 500_000, max_standard: 100_000 }
    }
}

/// Ideal given by generators over a field, with a monomial order.
#[derive(Clone, Debug)]
pub struct IdealPresentation<F: Field> {
    field: F,
    vars: Vars,
    gens: Vec<MultiPoly<F>>,
    order: MonomialOrder,
    limits: GbLimits,
}

impl<F: Field> IdealPresentation<F> {
    /// Zero generators are dropped; all generators are rebased onto `vars`.
    pub fn new(field: F, vars: Vars, gens: Vec<MultiPoly<F>>) -> Result<Self, GbError> {
        if vars.len() > MAX_VARS {
            return Err(GbError::TooManyVariables(vars.len()));
        }
        let gens = gens
            .into_iter()
            .filter(|g| !g.is_zero())
            .map(|g| g.rebase(vars.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IdealPresentation { field, vars, gens, order: MonomialOrder::GrevLex, limits: GbLimits::default() })
    }

    pub fn with_order(mut self, order: MonomialOrder) -> Self {
        self.order = order;
        self
    }

    pub fn with_limits(mut self, limits: GbLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn generators(&self) -> &[MultiPoly<F>] {
        &self.gens
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn groebner_basis(&self) -> Result<GroebnerBasis<F>, GbError> {
        let eng = Engine { f: &self.field, ord: self.order, limits: self.limits };
        let gens = self.gens.iter().map(|g| eng.pack(g)).collect::<Result<Vec<_>, _>>()?;
        let polys = eng.buchberger(gens)?;
        Ok(GroebnerBasis {
            field: self.field.clone(),
            vars: self.vars.clone(),
            order: self.order,
            limits: self.limits,
            polys,
        })
    }
}

impl<F: Field> fmt::Display for IdealPresentation<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gens.is_empty() {
            return write!(f, "<0>");
        }
        write!(f, "<")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

type Poly<E> = Vec<(Mono, E)>;

/// Reduced Gröbner basis: monic, sorted by increasing leading monomial.
#[derive(Clone, Debug)]
pub struct GroebnerBasis<F: Field> {
    field: F,
    vars: Vars,
    order: MonomialOrder,
    limits: GbLimits,
    polys: Vec<Poly<F::Elem>>,
}

impl<F: Field> GroebnerBasis<F> {
    fn engine(&self) -> Engine<'_, F> {
        Engine { f: &self.field, ord: self.order, limits: self.limits }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polys(&self) -> Vec<MultiPoly<F>> {
        self.polys.iter().map(|p| self.engine().unpack(p, &self.vars)).collect()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        let n = self.vars.len();
        self.polys.iter().map(|p| Monomial::new(p[0].0.exps(n))).collect()
    }

    pub fn contains_one(&self) -> bool {
        self.polys.iter().any(|p| p[0].0.deg == 0)
    }

    /// Krull dimension of V(I) from the leading monomials (maximal size of a
    /// set of variables containing no leading-monomial support); −1 if 1 ∈ I.
    pub fn dimension(&self) -> i64 {
        if self.contains_one() {
            return -1;
        }
        let n = self.vars.len();
        let supports: Vec<u32> = self.polys.iter().map(|p| p[0].0.support() as u32).collect();
        let mut best = 0;
        for u in 0u32..(1 << n) {
            let size = u.count_ones();
            if size > best && supports.iter().all(|&s| s & !u != 0) {
                best = size;
            }
        }
        best as i64
    }

    /// Standard monomials, in breadth-first order from 1.
    fn standard(&self) -> Result<Vec<Mono>, GbError> {
        let dim = self.dimension();
        if dim > 0 {
            return Err(GbError::PositiveDimensional(dim));
        }
        if dim < 0 {
            return Ok(Vec::new());
        }
        let lms: Vec<Mono> = self.polys.iter().map(|p| p[0].0).collect();
        let n = self.vars.len();
        let mut seen = HashSet::from([Mono::ONE]);
        let mut queue = VecDeque::from([Mono::ONE]);
        let mut out = Vec::new();
        while let Some(m) = queue.pop_front() {
            out.push(m);
            if out.len() > self.limits.max_standard {
                return Err(GbError::ResourcesExceeded {
                    resource: "standard monomials",
                    limit: self.limits.max_standard,
                });
            }
            for i in 0..n {
                let next = m.mul(Mono::var(i)).ok_or(GbError::ExponentOverflow)?;
                if !lms.iter().any(|l| l.divides(next)) && seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        Ok(out)
    }

    pub fn standard_monomials(&self) -> Result<Vec<Monomial>, GbError> {
        let n = self.vars.len();
        Ok(self.standard()?.into_iter().map(|m| Monomial::new(m.exps(n))).collect())
    }

    /// Dimension of the quotient ring (degree of the 0-dimensional scheme).
    pub fn quotient_dimension(&self) -> Result<usize, GbError> {
        Ok(self.standard()?.len())
    }

    pub fn normal_form(&self, f: &MultiPoly<F>) -> Result<MultiPoly<F>, GbError> {
        let eng = self.engine();
        let p = eng.pack(&f.rebase(self.vars.clone())?)?;
        let refs: Vec<&Poly<F::Elem>> = self.polys.iter().collect();
        Ok(eng.unpack(&eng.reduce(p, &refs)?, &self.vars))
    }

    pub fn contains(&self, f: &MultiPoly<F>) -> Result<bool, GbError> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Matrices of multiplication by each listed variable on the quotient,
    /// in the basis of standard monomials (column j = image of basis j).
    pub fn multiplication_matrices(&self, var_indices: &[usize]) -> Result<Vec<Matrix<F>>, GbError> {
        let basis = self.standard()?;
        let index: HashMap<Mono, usize> = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let eng = self.engine();
        let refs: Vec<&Poly<F::Elem>> = self.polys.iter().collect();
        let n = basis.len();
        var_indices
            .iter()
            .map(|&v| {
                let mut mat = Matrix::zeros(self.field.clone(), n, n);
                for (j, b) in basis.iter().enumerate() {
                    let m = b.mul(Mono::var(v)).ok_or(GbError::ExponentOverflow)?;
                    let nf = eng.reduce(vec![(m, self.field.one())], &refs)?;
                    for (t, c) in nf {
                        mat.set(index[&t], j, c);
                    }
                }
                Ok(mat)
            })
            .collect()
    }
}

impl<F: Field> fmt::Display for GroebnerBasis<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, g) in self.polys().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

pub fn groebner_basis<F: Field>(ideal: &IdealPresentation<F>) -> Result<GroebnerBasis<F>, GbError> {
    ideal.groebner_basis()
}

pub fn contains_one<F: Field>(ideal: &IdealPresentation<F>) -> Result<bool, GbError> {
    Ok(ideal.groebner_basis()?.contains_one())
}

pub fn ideal_dimension<F: Field>(ideal: &IdealPresentation<F>) -> Result<i64, GbError> {
    Ok(ideal.groebner_basis()?.dimension())
}

pub fn quotient_dimension<F: Field>(ideal: &IdealPresentation<F>) -> Result<usize, GbError> {
    ideal.groebner_basis()?.quotient_dimension()
}

/// Generators of I ∩ k[keep], via a block order eliminating the other
/// variables. The result uses `keep` (in the given order) as its variables.
pub fn eliminate<F: Field>(
    ideal: &IdealPresentation<F>,
    keep: &[&str],
) -> Result<IdealPresentation<F>, GbError> {
    for k in keep {
        if !ideal.vars.iter().any(|v| v == k) {
            return Err(PolyError::UnknownVariable(k.to_string()).into());
        }
    }
    let elim: Vec<&str> =
        ideal.vars.iter().map(|s| s.as_str()).filter(|v| !keep.contains(v)).collect();
    let order: Vec<&str> = elim.iter().chain(keep.iter()).copied().collect();
    let all = crate::mpoly::vars(&order);
    let block = IdealPresentation::new(ideal.field.clone(), all, ideal.gens.clone())?
        .with_order(MonomialOrder::Block(elim.len()))
        .with_limits(ideal.limits);
    let gb = block.groebner_basis()?;
    let kept = crate::mpoly::vars(keep);
    let elim_mask: u16 = ((1u32 << elim.len()) - 1) as u16;
    let gens = gb
        .polys
        .iter()
        .filter(|p| p.iter().all(|(m, _)| m.support() & elim_mask == 0))
        .map(|p| gb.engine().unpack(p, &gb.vars).rebase(kept.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IdealPresentation::new(ideal.field.clone(), kept, gens)?.with_limits(ideal.limits))
}

struct Engine<'a, F: Field> {
    f: &'a F,
    ord: MonomialOrder,
    limits: GbLimits,
}

#[derive(Clone, Copy, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Mono,
}

impl<F: Field> Engine<'_, F> {
    fn pack(&self, p: &MultiPoly<F>) -> Result<Poly<F::Elem>, GbError> {
        let mut out = p
            .terms()
            .map(|(m, c)| Mono::from_exps(m.exps()).map(|m| (m, c.clone())).ok_or(GbError::ExponentOverflow))
            .collect::<Result<Vec<_>, _>>()?;
        out.sort_by(|a, b| self.ord.cmp(&b.0, &a.0));
        Ok(out)
    }

    fn unpack(&self, p: &Poly<F::Elem>, vars: &Vars) -> MultiPoly<F> {
        let n = vars.len();
        MultiPoly::from_terms(
            self.f.clone(),
            vars.clone(),
            p.iter().map(|(m, c)| (m.exps(n), c.clone())),
        )
    }

    fn monic(&self, mut p: Poly<F::Elem>) -> Poly<F::Elem> {
        if let Some((_, lc)) = p.first() {
            if !self.f.is_one(lc) {
                let inv = self.f.inv(lc).expect("leading coefficient is nonzero");
                for t in p.iter_mut() {
                    t.1 = self.f.mul(&t.1, &inv);
                }
            }
        }
        p
    }

    /// `a - c * m * b`, both sorted decreasingly.
    fn sub_mul(
        &self,
        a: &[(Mono, F::Elem)],
        c: &F::Elem,
        m: Mono,
        b: &[(Mono, F::Elem)],
    ) -> Result<Poly<F::Elem>, GbError> {
        let f = self.f;
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let mut bj = None;
        loop {
            if bj.is_none() && j < b.len() {
                let (bm, bc) = &b[j];
                bj = Some((bm.mul(m).ok_or(GbError::ExponentOverflow)?, f.mul(c, bc)));
            }
            match (i < a.len(), &bj) {
                (false, None) => break,
                (true, None) => {
                    out.extend_from_slice(&a[i..]);
                    break;
                }
                (false, Some((bm, bc))) => {
                    out.push((*bm, f.neg(bc)));
                    bj = None;
                    j += 1;
                }
                (true, Some((bm, bc))) => match self.ord.cmp(&a[i].0, bm) {
                    Ordering::Greater => {
                        out.push(a[i].clone());
                        i += 1;
                    }
                    Ordering::Less => {
                        out.push((*bm, f.neg(bc)));
                        bj = None;
                        j += 1;
                    }
                    Ordering::Equal => {
                        let s = f.sub(&a[i].1, bc);
                        if !f.is_zero(&s) {
                            out.push((*bm, s));
                        }
                        i += 1;
                        bj = None;
                        j += 1;
                    }
                },
            }
        }
        if out.len() > self.limits.max_terms {
            return Err(GbError::ResourcesExceeded { resource: "terms", limit: self.limits.max_terms });
        }
        Ok(out)
    }

    /// Full reduction modulo monic polynomials.
    fn reduce(&self, p: Poly<F::Elem>, basis: &[&Poly<F::Elem>]) -> Result<Poly<F::Elem>, GbError> {
        let mut done: Poly<F::Elem> = Vec::new();
        let mut cur = p;
        let mut start = 0;
        while start < cur.len() {
            let (m, c) = cur[start].clone();
            match basis.iter().find(|g| g[0].0.divides(m)) {
                Some(g) => {
                    cur = self.sub_mul(&cur[start + 1..], &c, m.div(g[0].0), &g[1..])?;
                    start = 0;
                }
                None => {
                    done.push((m, c));
                    start += 1;
                }
            }
        }
        Ok(done)
    }

    fn spoly(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>, lcm: Mono) -> Result<Poly<F::Elem>, GbError> {
        let ma = lcm.div(a[0].0);
        let mb = lcm.div(b[0].0);
        let left: Poly<F::Elem> = a[1..]
            .iter()
            .map(|(m, c)| m.mul(ma).map(|m| (m, c.clone())).ok_or(GbError::ExponentOverflow))
            .collect::<Result<_, _>>()?;
        self.sub_mul(&left, &self.f.one(), mb, &b[1..])
    }

    fn buchberger(&self, mut gens: Vec<Poly<F::Elem>>) -> Result<Vec<Poly<F::Elem>>, GbError> {
        gens.sort_by(|a, b| self.ord.cmp(&a[0].0, &b[0].0));
        let mut store: Vec<Poly<F::Elem>> = Vec::new();
        let mut active: Vec<usize> = Vec::new();
        let mut pairs: Vec<Pair> = Vec::new();
        for g in gens {
            let refs: Vec<&Poly<F::Elem>> = active.iter().map(|&i| &store[i]).collect();
            let h = self.reduce(g, &refs)?;
            if !h.is_empty() {
                self.update(self.monic(h), &mut store, &mut active, &mut pairs)?;
            }
        }
        let mut processed = 0;
        while !pairs.is_empty() {
            if active.iter().any(|&i| store[i][0].0.deg == 0) {
                break;
            }
            let k = (0..pairs.len())
                .min_by(|&a, &b| self.ord.cmp(&pairs[a].lcm, &pairs[b].lcm))
                .expect("nonempty");
            let pr = pairs.swap_remove(k);
            processed += 1;
            if processed > self.limits.max_pairs {
                return Err(GbError::ResourcesExceeded { resource: "pairs", limit: self.limits.max_pairs });
            }
            let s = self.spoly(&store[pr.i], &store[pr.j], pr.lcm)?;
            let refs: Vec<&Poly<F::Elem>> = active.iter().map(|&i| &store[i]).collect();
            let h = self.reduce(s, &refs)?;
            if !h.is_empty() {
                self.update(self.monic(h), &mut store, &mut active, &mut pairs)?;
            }
        }
        if active.iter().any(|&i| store[i][0].0.deg == 0) {
            return Ok(vec![vec![(Mono::ONE, self.f.one())]]);
        }
        let mut basis: Vec<Poly<F::Elem>> = active.iter().map(|&i| store[i].clone()).collect();
        for k in 0..basis.len() {
            let p = std::mem::take(&mut basis[k]);
            let others: Vec<&Poly<F::Elem>> =
                basis.iter().enumerate().filter(|(j, q)| *j != k && !q.is_empty()).map(|(_, q)| q).collect();
            let head = p[0].clone();
            let mut tail = self.reduce(p[1..].to_vec(), &others)?;
            tail.insert(0, head);
            basis[k] = tail;
        }
        basis.sort_by(|a, b| self.ord.cmp(&a[0].0, &b[0].0));
        Ok(basis)
    }

    /// Gebauer–Möller update with the new polynomial `h`.
    fn update(
        &self,
        h: Poly<F::Elem>,
        store: &mut Vec<Poly<F::Elem>>,
        active: &mut Vec<usize>,
        pairs: &mut Vec<Pair>,
    ) -> Result<(), GbError> {
        let hi = store.len();
        let hm = h[0].0;
        store.push(h);
        let cands: Vec<Pair> =
            active.iter().map(|&g| Pair { i: g, j: hi, lcm: store[g][0].0.lcm(hm) }).collect();
        let mut keep = vec![true; cands.len()];
        for a in 0..cands.len() {
            let ga = store[cands[a].i][0].0;
            if ga.coprime(hm) {
                continue;
            }
            // drop if another candidate's lcm divides this one; among equal
            // lcms keep only the last
            let dominated = (0..cands.len()).any(|b| {
                b != a
                    && keep[b]
                    && cands[b].lcm.divides(cands[a].lcm)
                    && (cands[b].lcm != cands[a].lcm || b > a)
            });
            if dominated {
                keep[a] = false;
            }
        }
        pairs.retain(|p| {
            !(hm.divides(p.lcm)
                && store[p.i][0].0.lcm(hm) != p.lcm
                && store[p.j][0].0.lcm(hm) != p.lcm)
        });
        for (a, c) in cands.into_iter().enumerate() {
            if keep[a] && !store[c.i][0].0.coprime(hm) {
                pairs.push(c);
            }
        }
        if pairs.len() > self.limits.max_queue {
            return Err(GbError::ResourcesExceeded { resource: "pair queue", limit: self.limits.max_queue });
        }
        active.retain(|&g| !hm.divides(store[g][0].0));
        active.push(hi);
        Ok(())
    }
}
