//! Slice solver for type (1,1,1,2) intersections in Gr(2,5).
//!
//! In each Schubert cell a small set S of parameters is fixed so that the
//! three linear forms become affine-linear in the remaining parameters U.
//! For each assignment of S the affine system is solved; the quadric is then
//! evaluated on the Plücker coordinates along each solution line, giving a
//! univariate polynomial of degree <= 4 whose roots are counted.

use crate::geometry::{Ambient, SurfaceSpec};
use crate::grassmann::{enumerate_cells, Entry, Parametrization, PLUCKER_PAIRS};
use crate::{FqPoly, GaloisField};

use super::kernel::{powers, CPoly, Kernel, Odometer, Small, MAX_CVARS, MAX_DEG};
use super::naive::{count_chart, Chart};
use super::{check_budget, par_ranges, spec_field, CountError, CountOptions, Strategy};

const MAX_U: usize = 6;

/// Polynomials in a closed-form fiber: the s-coefficients and D.
const NC: usize = MAX_DEG + 2;

/// Fixed and free parameters chosen for one Schubert cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixingSet {
    pub pivots: (usize, usize),
    pub fixed: Vec<String>,
    pub free: Vec<String>,
}

#[derive(Clone, Copy)]
enum Slot {
    Zero,
    One,
    Fixed(usize),
    Free(usize),
}

/// Product term of a Plücker coordinate on a cell: sign and one or two slots.
type MinorTerm = (bool, Slot, Option<Slot>);

struct CellPlan {
    /// Terms of each Plücker coordinate the quadric uses.
    minors: Vec<(usize, Vec<MinorTerm>)>,
    nfixed: usize,
    nfree: usize,
    /// coef[i][k]: coefficient of free parameter k in linear form i, as a
    /// polynomial in the fixed parameters; column `nfree` is the constant.
    coef: Vec<Vec<CPoly>>,
    generic: Option<GenericFiber>,
}

/// Closed form of the fibers over two fixed parameters (s0, s1) where the
/// affine system has a fixed 3x3 pivot block with determinant D(s0, s1) != 0.
/// Then the fiber is a line with coordinate s, and D^4 times the quadric
/// along it is sum_i G_i(s0, s1) s^i.
struct GenericFiber {
    /// tables[c][j][k]: coefficient of y^j x^k in G_c (c <= MAX_DEG) or in
    /// D (c = MAX_DEG + 1), raw, where y is the fixed parameter `inner` and x
    /// the other one. The G_c may be divided by a common power of D.
    tables: Vec<Vec<Vec<u32>>>,
    inner: usize,
}

fn det3(m: [[&FqPoly; 3]; 3]) -> FqPoly {
    let minor = |i: usize, j: usize, k: usize, l: usize| m[i][k].mul(m[j][l]).sub(&m[i][l].mul(m[j][k]));
    m[0][0]
        .mul(&minor(1, 2, 1, 2))
        .sub(&m[0][1].mul(&minor(1, 2, 0, 2)))
        .add(&m[0][2].mul(&minor(1, 2, 0, 1)))
}

impl GenericFiber {
    fn build(
        linear: &[FqPoly],
        quadric: &FqPoly,
        params: &[String],
        fixed: &[usize],
        free: &[usize],
        slots: &[[Slot; 5]; 2],
    ) -> Result<Option<Self>, CountError> {
        if fixed.len() != 2 || free.len() != 4 {
            return Ok(None);
        }
        let field = quadric.ring().clone();
        let mut names: Vec<&str> = params.iter().map(String::as_str).collect();
        names.push("s");
        let vs = crate::mpoly::vars(&names);
        let sv = names.len() - 1;
        let zero = FqPoly::zero(field.clone(), vs.clone());
        let var = |k: usize| FqPoly::var(field.clone(), vs.clone(), k);
        // a[i][col]: coefficient of free parameter col (col = 4: constant)
        let mut a = vec![vec![zero.clone(); 5]; 3];
        for (i, l) in linear.iter().enumerate() {
            for (m, c) in l.rebase(vs.clone())?.terms() {
                let mut e = m.exps().to_vec();
                let col = free.iter().position(|&v| e[v] > 0).unwrap_or(4);
                if col < 4 {
                    e[free[col]] = 0;
                }
                a[i][col].add_term(crate::mpoly::Monomial::new(e), *c);
            }
        }
        let Some((piv, fc, d)) = (0..4).rev().find_map(|fc| {
            let piv: Vec<usize> = (0..4).filter(|&c| c != fc).collect();
            let d = det3(std::array::from_fn(|i| std::array::from_fn(|j| &a[i][piv[j]])));
            (!d.is_zero()).then_some((piv, fc, d))
        }) else {
            return Ok(None);
        };
        let rhs: Vec<FqPoly> = (0..3).map(|i| a[i][fc].mul(&var(sv)).add(&a[i][4]).neg()).collect();
        let numerators: Vec<FqPoly> = (0..3)
            .map(|k| det3(std::array::from_fn(|i| std::array::from_fn(|j| if j == k { &rhs[i] } else { &a[i][piv[j]] }))))
            .collect();
        let entry = |s: Slot| match s {
            Slot::Zero => zero.clone(),
            Slot::One => d.clone(),
            Slot::Fixed(i) => var(fixed[i]).mul(&d),
            Slot::Free(k) if k == fc => var(sv).mul(&d),
            Slot::Free(k) => numerators[piv.iter().position(|&p| p == k).expect("pivot")].clone(),
        };
        let rows = slots.map(|row| row.map(entry));
        let x: Vec<FqPoly> = PLUCKER_PAIRS
            .iter()
            .map(|&(i, j)| rows[0][i - 1].mul(&rows[1][j - 1]).sub(&rows[0][j - 1].mul(&rows[1][i - 1])))
            .collect();
        let g = quadric.compose(&x)?;
        let mut coeffs = vec![zero.clone(); MAX_DEG + 1];
        for (m, c) in g.terms() {
            let mut e = m.exps().to_vec();
            let i = std::mem::take(&mut e[sv]) as usize;
            coeffs[i].add_term(crate::mpoly::Monomial::new(e), *c);
        }
        // strip common powers of D; D(s0, s1) = 0 is handled exactly anyway
        while coeffs.iter().any(|c| !c.is_zero()) {
            match coeffs.iter().map(|c| div_exact(c, &d)).collect::<Option<Vec<_>>>() {
                Some(next) => coeffs = next,
                None => break,
            }
        }
        coeffs.push(d);
        let deg_in = |v: usize| coeffs.iter().map(|c| c.degree_in(v)).max().unwrap_or(0);
        let inner = if deg_in(fixed[0]) < deg_in(fixed[1]) { 0 } else { 1 };
        let z = field.table_view().expect("tables").zero();
        let tables = coeffs
            .iter()
            .map(|c| {
                let mut t: Vec<Vec<u32>> = Vec::new();
                for (m, coef) in c.terms() {
                    let (j, k) = (m.exps()[fixed[inner]] as usize, m.exps()[fixed[1 - inner]] as usize);
                    if t.len() <= j {
                        t.resize(j + 1, Vec::new());
                    }
                    if t[j].len() <= k {
                        t[j].resize(k + 1, z);
                    }
                    t[j][k] = coef.raw();
                }
                t
            })
            .collect();
        Ok(Some(GenericFiber { tables, inner }))
    }
}

/// Exact quotient f / d, if d divides f.
fn div_exact(f: &FqPoly, d: &FqPoly) -> Option<FqPoly> {
    let field = f.ring().clone();
    let (dm, dc) = d.leading()?;
    let dinv = field.inv(*dc).ok()?;
    let mut r = f.clone();
    let mut quo = FqPoly::zero(field.clone(), f.vars().clone());
    while let Some((m, c)) = r.leading() {
        if !dm.divides(m) {
            return None;
        }
        let e: Vec<u16> = m.exps().iter().zip(dm.exps()).map(|(a, b)| a - b).collect();
        let term = FqPoly::from_terms(field.clone(), f.vars().clone(), [(e, field.mul(*c, dinv))]);
        r = r.sub(&term.mul(d));
        quo = quo.add(&term);
    }
    Some(quo)
}

#[inline]
fn horner(t: &crate::ffield::TableView, coeffs: &[u32], x: u32) -> u32 {
    coeffs.iter().rev().fold(t.zero(), |acc, &c| t.add(t.mul(acc, x), c))
}

/// Quadric in Plücker coordinates, grouped as sum_a x_a * (sum_b c x_b).
struct PluckerQuadric {
    groups: Vec<(usize, Vec<(u32, usize)>)>,
    used: Vec<usize>,
}

impl PluckerQuadric {
    fn new(q: &FqPoly) -> Self {
        let mut groups: Vec<(usize, Vec<(u32, usize)>)> = Vec::new();
        for (m, c) in q.terms() {
            let mut idx = m.exps().iter().enumerate().flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize));
            let a = idx.next().expect("quadric term");
            let b = idx.next().expect("quadric term");
            match groups.iter_mut().find(|g| g.0 == a) {
                Some(g) => g.1.push((c.raw(), b)),
                None => groups.push((a, vec![(c.raw(), b)])),
            }
        }
        let mut used: Vec<usize> = groups.iter().flat_map(|(a, bs)| Some(*a).into_iter().chain(bs.iter().map(|x| x.1))).collect();
        used.sort();
        used.dedup();
        PluckerQuadric { groups, used }
    }
}

/// Smallest parameter subset (size <= 2, lexicographically first) after
/// whose assignment every polynomial is affine-linear in the others.
fn find_fixing_set(linear: &[FqPoly], dim: usize) -> Option<Vec<usize>> {
    let affine_after = |s: &[usize]| {
        linear.iter().all(|l| {
            l.terms().all(|(m, _)| {
                m.exps().iter().enumerate().filter(|(v, _)| !s.contains(v)).map(|(_, &e)| e as u32).sum::<u32>() <= 1
            })
        })
    };
    let mut candidates: Vec<Vec<usize>> = vec![vec![]];
    candidates.extend((0..dim).map(|a| vec![a]));
    candidates.extend((0..dim).flat_map(|a| (a + 1..dim).map(move |b| vec![a, b])));
    candidates.into_iter().find(|s| affine_after(s))
}

enum Plan {
    Slice(CellPlan),
    Naive(Chart),
}

fn minor_terms(slots: &[[Slot; 5]; 2], i: usize, j: usize) -> Vec<MinorTerm> {
    let mut out = Vec::new();
    for (neg, p, q) in [(false, slots[0][i], slots[1][j]), (true, slots[0][j], slots[1][i])] {
        match (p, q) {
            (Slot::Zero, _) | (_, Slot::Zero) => {}
            (Slot::One, s) | (s, Slot::One) => out.push((neg, s, None)),
            (a, b) => out.push((neg, a, Some(b))),
        }
    }
    out
}

fn plan_cells(forms: &[FqPoly], used: &[usize], generic: bool) -> Result<Vec<((usize, usize), Plan)>, CountError> {
    let mut out = Vec::new();
    for cell in enumerate_cells() {
        let d = cell.dim();
        let linear: Vec<FqPoly> = forms[..3].iter().map(|f| cell.pullback(f)).collect::<Result<_, _>>()?;
        let Some(fixed) = find_fixing_set(&linear, d) else {
            let keep: Vec<usize> = (0..d).collect();
            let rest = vec![CPoly::from_poly(&cell.pullback(&forms[3])?, &keep)];
            let lin = linear.iter().map(|l| CPoly::from_poly(l, &keep)).collect();
            out.push((cell.pivots(), Plan::Naive(Chart { nfree: d, linear: lin, rest })));
            continue;
        };
        let free: Vec<usize> = (0..d).filter(|v| !fixed.contains(v)).collect();
        let slots = cell.template().map(|row| {
            row.map(|e| match e {
                Entry::Zero => Slot::Zero,
                Entry::One => Slot::One,
                Entry::Param(k) => match fixed.iter().position(|&v| v == k) {
                    Some(i) => Slot::Fixed(i),
                    None => Slot::Free(free.iter().position(|&v| v == k).expect("partition")),
                },
            })
        });
        let coef = linear
            .iter()
            .map(|l| {
                let mut row = vec![CPoly::default(); free.len() + 1];
                for (m, c) in l.terms() {
                    let col = free.iter().position(|&v| m.exps()[v] > 0).unwrap_or(free.len());
                    let mut e = [0u8; MAX_CVARS];
                    for (slot, &v) in e.iter_mut().zip(&fixed) {
                        *slot = m.exps()[v] as u8;
                    }
                    row[col].terms.push((c.raw(), e));
                }
                row
            })
            .collect();
        let fiber = if generic {
            let params: Vec<String> = cell.param_vars().iter().map(|v| v.to_string()).collect();
            GenericFiber::build(&linear, &forms[3], &params, &fixed, &free, &slots)?
        } else {
            None
        };
        let minors = used
            .iter()
            .map(|&idx| {
                let (i, j) = PLUCKER_PAIRS[idx];
                (idx, minor_terms(&slots, i - 1, j - 1))
            })
            .collect();
        out.push((
            cell.pivots(),
            Plan::Slice(CellPlan { minors, nfixed: fixed.len(), nfree: free.len(), coef, generic: fiber }),
        ));
    }
    Ok(out)
}

/// The fixing set chosen in each Schubert cell (computed over GF(p)).
pub fn fixing_sets(spec: &SurfaceSpec) -> Result<Vec<FixingSet>, CountError> {
    check_grassmann(spec)?;
    let field = spec_field(spec, 1)?;
    let forms = spec.forms_over(&field)?;
    let mut out = Vec::new();
    for cell in enumerate_cells() {
        let linear: Vec<FqPoly> = forms[..3].iter().map(|f| cell.pullback(f)).collect::<Result<_, _>>()?;
        let names = cell.param_vars();
        if let Some(fixed) = find_fixing_set(&linear, cell.dim()) {
            let free = (0..cell.dim()).filter(|v| !fixed.contains(v)).map(|v| names[v].to_string()).collect();
            let fixed = fixed.iter().map(|&v| names[v].to_string()).collect();
            out.push(FixingSet { pivots: cell.pivots(), fixed, free });
        }
    }
    Ok(out)
}

fn check_grassmann(spec: &SurfaceSpec) -> Result<(), CountError> {
    if spec.ambient != Ambient::GrassmannCi {
        return Err(CountError::WrongAmbient { strategy: Strategy::Slice, ambient: spec.ambient });
    }
    Ok(())
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(t: &crate::ffield::TableView, m: &mut [[u32; MAX_U + 1]; 3], ncols: usize) -> ([usize; 3], usize) {
    let mut pivots = [0; 3];
    let mut r = 0;
    for c in 0..ncols {
        if r == 3 {
            break;
        }
        let Some(p) = (r..3).find(|&i| !t.is_zero(m[i][c])) else { continue };
        m.swap(r, p);
        let inv = t.inv(m[r][c]);
        for x in &mut m[r][c..ncols] {
            *x = t.mul(*x, inv);
        }
        for i in 0..3 {
            if i != r && !t.is_zero(m[i][c]) {
                let f = m[i][c];
                for j in c..ncols {
                    m[i][j] = t.sub(m[i][j], t.mul(f, m[r][j]));
                }
            }
        }
        pivots[r] = c;
        r += 1;
    }
    (pivots, r)
}

struct Solver<'a> {
    k: &'a Kernel<'a>,
    quadric: &'a PluckerQuadric,
}

impl Solver<'_> {
    /// Points with the fixed parameters set to `sigma` (raw values).
    fn count_fiber(&self, plan: &CellPlan, sigma: &[u32], spw: &[[u32; MAX_DEG + 1]]) -> u64 {
        let t = &self.k.t;
        let nu = plan.nfree;
        let mut m = [[t.zero(); MAX_U + 1]; 3];
        for (i, row) in plan.coef.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                m[i][j] = c.eval(t, spw);
            }
        }
        let (pivots, rank) = rref(t, &mut m, nu + 1);
        let pivots = &pivots[..rank];
        if pivots.last() == Some(&nu) {
            return 0;
        }
        let mut free = [0usize; MAX_U];
        let mut nf = 0;
        for c in (0..nu).filter(|c| !pivots.contains(c)) {
            free[nf] = c;
            nf += 1;
        }
        let free = &free[..nf];
        // u_k = alpha_k + beta_k s, where s is the last free parameter and
        // the other free parameters run over all values
        let mut alpha = [t.zero(); MAX_U];
        let mut beta = [t.zero(); MAX_U];
        let mut total = 0u64;
        let outer = if nf == 0 { 0 } else { nf - 1 };
        let mut odo = Odometer::new(t, outer, 0);
        for _ in 0..self.k.q.pow(outer as u32) {
            for (j, &f) in free.iter().enumerate() {
                if j < outer {
                    alpha[f] = odo.digits[j];
                    beta[f] = t.zero();
                } else {
                    alpha[f] = t.zero();
                    beta[f] = 0;
                }
            }
            for (r, &pc) in pivots.iter().enumerate() {
                let mut a = t.neg(m[r][nu]);
                for (j, &f) in free.iter().enumerate().take(outer) {
                    a = t.sub(a, t.mul(m[r][f], odo.digits[j]));
                }
                alpha[pc] = a;
                beta[pc] = if nf == 0 { t.zero() } else { t.neg(m[r][free[outer]]) };
            }
            let g = self.quadric_on_line(plan, sigma, &alpha, &beta);
            total += if nf == 0 { u64::from(t.is_zero(g[0])) } else { self.roots(&g) };
            odo.advance(t);
        }
        total
    }

    fn quadric_on_line(&self, plan: &CellPlan, sigma: &[u32], alpha: &[u32], beta: &[u32]) -> Small {
        let t = &self.k.t;
        let z = t.zero();
        let entry = |s: Slot| match s {
            Slot::Zero => (z, z),
            Slot::One => (0, z),
            Slot::Fixed(i) => (sigma[i], z),
            Slot::Free(k) => (alpha[k], beta[k]),
        };
        let mut x = [[z; 3]; 10];
        for (idx, terms) in &plan.minors {
            let mut acc = [z; 3];
            for &(neg, p, q) in terms {
                let (a0, a1) = entry(p);
                let v = match q {
                    None => [a0, a1, z],
                    Some(q) => {
                        let (b0, b1) = entry(q);
                        [t.mul(a0, b0), t.add(t.mul(a0, b1), t.mul(a1, b0)), t.mul(a1, b1)]
                    }
                };
                for e in 0..3 {
                    acc[e] = if neg { t.sub(acc[e], v[e]) } else { t.add(acc[e], v[e]) };
                }
            }
            x[*idx] = acc;
        }
        let mut g = [z; MAX_DEG + 1];
        for (a, bs) in &self.quadric.groups {
            let mut l = [z; 3];
            for &(c, b) in bs {
                for e in 0..3 {
                    l[e] = t.add(l[e], t.mul(c, x[b][e]));
                }
            }
            let xa = &x[*a];
            for i in 0..3 {
                if t.is_zero(xa[i]) {
                    continue;
                }
                for j in 0..3 {
                    g[i + j] = t.add(g[i + j], t.mul(xa[i], l[j]));
                }
            }
        }
        g
    }

    fn roots(&self, g: &Small) -> u64 {
        let t = &self.k.t;
        match (0..=MAX_DEG).rev().find(|&d| !t.is_zero(g[d])) {
            None => self.k.q,
            Some(0) => 0,
            Some(d) => self.k.count_roots(g, d),
        }
    }
}

fn count_cells(field: &GaloisField, spec: &SurfaceSpec, opts: &CountOptions, generic: bool) -> Result<u128, CountError> {
    let q = field.order() as u128;
    let forms = spec.forms_over(field)?;
    let quadric = PluckerQuadric::new(&forms[3]);
    let plans = plan_cells(&forms, &quadric.used, generic)?;
    let needed: u128 = plans
        .iter()
        .map(|(_, p)| match p {
            Plan::Slice(c) => q.pow(c.nfixed as u32),
            Plan::Naive(c) => q.pow(c.nfree as u32),
        })
        .sum();
    check_budget(needed, opts)?;
    let kernel = Kernel::new(field)?;
    let solver = Solver { k: &kernel, quadric: &quadric };
    let mut total = 0u128;
    for (_, plan) in &plans {
        total += match plan {
            Plan::Naive(chart) => count_chart(&kernel, chart, opts.parts),
            Plan::Slice(plan @ CellPlan { generic: Some(g), .. }) => count_generic(&solver, plan, g, opts.parts),
            Plan::Slice(plan) => par_ranges(kernel.q.pow(plan.nfixed as u32), opts.parts, |lo, hi| {
                let mut odo = Odometer::new(&kernel.t, plan.nfixed, lo);
                let mut acc = 0u128;
                for _ in lo..hi {
                    acc += solver.count_fiber(plan, &odo.digits, &odo.pw) as u128;
                    odo.advance(&kernel.t);
                }
                acc
            }),
        };
    }
    Ok(total)
}

/// Exact number of GF(p^n)-points of a type (1,1,1,2) intersection in
/// Gr(2,5), in O(q^2) fibers per cell.
pub fn count_slice(spec: &SurfaceSpec, n: u32, opts: &CountOptions) -> Result<u128, CountError> {
    check_grassmann(spec)?;
    let field = spec_field(spec, n)?;
    count_cells(&field, spec, opts, true)
}

/// Sums the fibers over q^2 assignments, using the closed form where the
/// pivot determinant is nonzero.
fn count_generic(solver: &Solver, plan: &CellPlan, g: &GenericFiber, parts: usize) -> u128 {
    let k = solver.k;
    let t = &k.t;
    let q = k.q;
    let rows = g.tables.iter().map(Vec::len).max().unwrap_or(0);
    par_ranges(q * q, parts, |lo, hi| {
        let mut acc = 0u128;
        let mut s0 = u32::MAX;
        // h[j][c]: coefficient of s1^j in polynomial c at the current s0,
        // laid out so that all polynomials are evaluated in lockstep
        let mut h = vec![[t.zero(); NC]; rows];
        for idx in lo..hi {
            let (x0, x1) = ((idx / q) as u32, (idx % q) as u32);
            if x0 != s0 {
                s0 = x0;
                for (c, table) in g.tables.iter().enumerate() {
                    for (j, hj) in h.iter_mut().enumerate() {
                        hj[c] = table.get(j).map_or(t.zero(), |row| horner(t, row, x0));
                    }
                }
            }
            let mut v = [t.zero(); NC];
            for hj in h.iter().rev() {
                for c in 0..NC {
                    v[c] = t.add(t.mul(v[c], x1), hj[c]);
                }
            }
            if t.is_zero(v[MAX_DEG + 1]) {
                let sigma = if g.inner == 1 { [x0, x1] } else { [x1, x0] };
                let spw = sigma.map(|x| powers(t, x));
                acc += solver.count_fiber(plan, &sigma, &spw) as u128;
                continue;
            }
            let mut poly = [t.zero(); MAX_DEG + 1];
            poly.copy_from_slice(&v[..=MAX_DEG]);
            acc += solver.roots(&poly) as u128;
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::load_fixture;

    #[test]
    fn closed_form_fibers_match_the_exact_solver() {
        let s3 = load_fixture("s3").unwrap();
        let opts = CountOptions::default();
        for n in 1..=4 {
            let field = spec_field(&s3, n).unwrap();
            let fast = count_cells(&field, &s3, &opts, true).unwrap();
            let exact = count_cells(&field, &s3, &opts, false).unwrap();
            assert_eq!(fast, exact, "n = {n}");
        }
    }
}
