//! Factorization of bivariate polynomials over finite fields: squarefree
//! splitting with p-th root descent, specialization y = y0 (in an extension
//! field if needed), univariate factorization, Hensel lifting in y - y0 and
//! subset recombination. Factors found over an extension are folded back by
//! Frobenius orbits.

use super::GbError;
use crate::ffield::roots::factor_univariate;
use crate::ffield::{FieldElement, GaloisField};
use crate::mpoly::{MultiPoly, PolyError, UniPoly, Vars};

type E = FieldElement;
type Up = UniPoly<GaloisField>;
/// Polynomial in x whose coefficients are polynomials in y.
type Bi = Vec<Up>;

const MAX_EXTENSION_ORDER: u64 = 1 << 16;

fn up(f: &GaloisField, c: Vec<E>) -> Up {
    UniPoly::new(f.clone(), c)
}

fn trim(mut a: Bi) -> Bi {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn deg_x(a: &Bi) -> Option<usize> {
    a.len().checked_sub(1)
}

fn deg_y(a: &Bi) -> usize {
    a.iter().filter_map(|c| c.degree()).max().unwrap_or(0)
}

fn add(f: &GaloisField, a: &Bi, b: &Bi) -> Bi {
    let n = a.len().max(b.len());
    let z = Up::zero(f.clone());
    trim((0..n).map(|i| a.get(i).unwrap_or(&z).add(b.get(i).unwrap_or(&z))).collect())
}

fn neg(a: &Bi) -> Bi {
    a.iter().map(|c| c.neg()).collect()
}

fn mul(f: &GaloisField, a: &Bi, b: &Bi) -> Bi {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Up::zero(f.clone()); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    trim(out)
}

fn scale(a: &Bi, c: &Up) -> Bi {
    trim(a.iter().map(|x| x.mul(c)).collect())
}

fn is_constant(a: &Bi) -> bool {
    a.len() <= 1 && a.first().is_none_or(|c| c.degree().unwrap_or(0) == 0)
}

/// Exact quotient a / b in K[y][x], or `None` if b does not divide a.
fn div_exact(f: &GaloisField, a: &Bi, b: &Bi) -> Option<Bi> {
    let db = deg_x(b)?;
    let lb = &b[db];
    let mut r = a.clone();
    if r.len() < b.len() {
        return if r.is_empty() { Some(Vec::new()) } else { None };
    }
    let mut q = vec![Up::zero(f.clone()); r.len() - db];
    while let Some(dr) = deg_x(&r) {
        if dr < db {
            return None;
        }
        let (qc, rem) = r[dr].divrem(lb).ok()?;
        if !rem.is_zero() {
            return None;
        }
        let mut sh = vec![Up::zero(f.clone()); dr - db];
        sh.extend(b.iter().map(|c| c.mul(&qc)));
        r = add(f, &r, &neg(&sh));
        q[dr - db] = qc;
    }
    Some(trim(q))
}

fn content(f: &GaloisField, a: &Bi) -> Up {
    let mut g = Up::zero(f.clone());
    for c in a {
        g = if g.is_zero() { c.monic() } else { g.gcd(c).expect("not both zero") };
        if g.degree() == Some(0) {
            break;
        }
    }
    g
}

fn primitive_part(f: &GaloisField, a: &Bi) -> Bi {
    let c = content(f, a);
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|x| x.div_exact(&c).expect("content divides")).collect()
}

/// Scales so the leading coefficient (top x-degree, then top y-degree) is 1.
fn normalize(a: &Bi) -> Bi {
    match a.last().and_then(|c| c.leading().copied()) {
        Some(lc) => {
            let f = a[0].ring().clone();
            let inv = f.inv(lc).expect("nonzero");
            a.iter().map(|c| c.scale(&inv)).collect()
        }
        None => a.clone(),
    }
}

fn pseudo_rem(f: &GaloisField, a: &Bi, b: &Bi) -> Bi {
    let db = deg_x(b).expect("nonzero divisor");
    let lb = b[db].clone();
    let mut r = a.clone();
    while let Some(dr) = deg_x(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let mut sh = vec![Up::zero(f.clone()); dr - db];
        sh.extend(b.iter().map(|c| c.mul(&lr)));
        r = add(f, &scale(&r, &lb), &neg(&sh));
    }
    r
}

fn gcd(f: &GaloisField, a: &Bi, b: &Bi) -> Bi {
    if a.is_empty() {
        return normalize(b);
    }
    if b.is_empty() {
        return normalize(a);
    }
    let c = content(f, a).gcd(&content(f, b)).expect("nonzero");
    let (mut x, mut y) = (primitive_part(f, a), primitive_part(f, b));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = pseudo_rem(f, &x, &y);
        x = y;
        y = primitive_part(f, &r);
    }
    normalize(&scale(&primitive_part(f, &x), &c))
}

fn d_dx(f: &GaloisField, a: &Bi) -> Bi {
    trim(a.iter().enumerate().skip(1).map(|(i, c)| c.scale(&f.from_int(i as i64))).collect())
}

fn d_dy(a: &Bi) -> Bi {
    trim(a.iter().map(|c| c.derivative()).collect())
}

/// p-th root of a polynomial with both partial derivatives zero.
fn pth_root(f: &GaloisField, a: &Bi) -> Bi {
    let p = f.characteristic() as usize;
    let n = f.degree();
    let root = |c: E| f.frobenius_pow(c, n - 1);
    trim(
        a.iter()
            .step_by(p)
            .map(|c| up(f, c.coeffs().iter().step_by(p).map(|&v| root(v)).collect()))
            .collect(),
    )
}

fn to_bi(p: &MultiPoly<GaloisField>) -> Bi {
    let f = p.ring().clone();
    let dx = p.degree_in(0) as usize;
    let dy = p.degree_in(1) as usize;
    let mut grid = vec![vec![f.zero(); dy + 1]; dx + 1];
    for (m, c) in p.terms() {
        grid[m.exps()[0] as usize][m.exps()[1] as usize] = *c;
    }
    trim(grid.into_iter().map(|row| up(&f, row)).collect())
}

fn from_bi(f: &GaloisField, vars: &Vars, a: &Bi) -> MultiPoly<GaloisField> {
    let mut terms = Vec::new();
    for (i, c) in a.iter().enumerate() {
        for (j, v) in c.coeffs().iter().enumerate() {
            if !f.is_zero(*v) {
                terms.push((vec![i as u16, j as u16], *v));
            }
        }
    }
    MultiPoly::from_terms(f.clone(), vars.clone(), terms)
}

fn map_field(a: &Bi, target: &GaloisField, g: impl Fn(E) -> E) -> Bi {
    a.iter().map(|c| up(target, c.coeffs().iter().map(|&v| g(v)).collect())).collect()
}

/// Substitutes y -> y + s in every coefficient.
fn shift_y(f: &GaloisField, a: &Bi, s: E) -> Bi {
    let lin = up(f, vec![s, f.one()]);
    a.iter()
        .map(|c| {
            c.coeffs().iter().rev().fold(Up::zero(f.clone()), |acc, &v| {
                acc.mul(&lin).add(&Up::constant(f.clone(), v))
            })
        })
        .collect()
}

/// Linear change of variables used to reach a direction in which every
/// factor is separable.
#[derive(Clone, Copy, Debug)]
enum Change {
    Swap,
    /// (x, y) -> (x, y + c x)
    Shear(E),
}

fn apply_change(f: &GaloisField, a: &Bi, ch: Change, inverse: bool) -> Bi {
    let vars = crate::mpoly::vars(&["x", "y"]);
    let p = from_bi(f, &vars, a);
    let x = MultiPoly::var(f.clone(), vars.clone(), 0);
    let y = MultiPoly::var(f.clone(), vars.clone(), 1);
    let images = match ch {
        Change::Swap => vec![y, x],
        Change::Shear(c) => {
            let c = if inverse { f.neg(c) } else { c };
            vec![x.clone(), y.add(&x.scale(&c))]
        }
    };
    to_bi(&p.compose(&images).expect("two images"))
}

/// True iff a (primitive, squarefree) has no factor inseparable in x.
fn separable_in_x(f: &GaloisField, a: &Bi) -> bool {
    let dx = d_dx(f, a);
    !dx.is_empty() && deg_x(&gcd(f, a, &dx)) == Some(0)
}

fn univariate_factors(c: &Up) -> Result<Vec<Up>, GbError> {
    if c.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    Ok(factor_univariate(c)?.into_iter().map(|(g, _)| g).collect())
}

/// Irreducible factors of a squarefree polynomial.
fn split_squarefree(f: &GaloisField, s: &Bi) -> Result<Vec<Bi>, GbError> {
    let mut out: Vec<Bi> = univariate_factors(&content(f, s))?.into_iter().map(|g| vec![g]).collect();
    let p = primitive_part(f, s);
    if deg_x(&p).unwrap_or(0) == 0 {
        return Ok(out);
    }
    if separable_in_x(f, &p) {
        out.extend(lift_and_recombine(f, &p)?);
        return Ok(out);
    }
    let mut changes = vec![Change::Swap];
    changes.extend(f.elements().filter(|&c| !f.is_zero(c)).map(Change::Shear));
    for ch in changes {
        let t = apply_change(f, &p, ch, false);
        let tp = primitive_part(f, &t);
        if deg_x(&tp).unwrap_or(0) > 0 && !separable_in_x(f, &tp) {
            continue;
        }
        let mut parts: Vec<Bi> = univariate_factors(&content(f, &t))?.into_iter().map(|g| vec![g]).collect();
        if deg_x(&tp).unwrap_or(0) > 0 {
            parts.extend(lift_and_recombine(f, &tp)?);
        }
        for g in parts {
            out.push(normalize(&apply_change(f, &g, ch, true)));
        }
        return Ok(out);
    }
    Err(GbError::FactorizationFailed("no separable direction over the base field"))
}

/// Smallest extension of `k` (possibly `k` itself) containing y0 with
/// lc(y0) != 0 and a(x, y0) squarefree of full degree.
fn choose_specialization(k: &GaloisField, a: &Bi) -> Result<(GaloisField, E), GbError> {
    let p = k.characteristic();
    let n = k.degree();
    let dx = deg_x(a).expect("nonzero");
    for m in 1.. {
        let big = GaloisField::new(p, n * m)?;
        if big.order() > MAX_EXTENSION_ORDER {
            break;
        }
        let emb = big.embedding_from(k)?;
        let al = map_field(a, &big, |v| emb.apply(v));
        let hit = big.elements().find(|&y0| {
            if m > 1 && emb.preimage(y0).is_some() {
                return false;
            }
            if big.is_zero(al[dx].eval(&y0)) {
                return false;
            }
            let u = up(&big, al.iter().map(|c| c.eval(&y0)).collect());
            u.gcd(&u.derivative()).map(|g| g.degree() == Some(0)).unwrap_or(false)
        });
        if let Some(y0) = hit {
            return Ok((big, y0));
        }
    }
    Err(GbError::FactorizationFailed("no good specialization point"))
}

/// Truncated power series coefficient grid: s[i][j] = coeff of x^i t^j.
type Series = Vec<Vec<E>>;

fn series_mul(f: &GaloisField, a: &Series, b: &Series, prec: usize) -> Series {
    let mut out = vec![vec![f.zero(); prec]; a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            let row = &mut out[i + j];
            for (s, &u) in ai.iter().enumerate() {
                if f.is_zero(u) {
                    continue;
                }
                for (t, &v) in bj.iter().enumerate().take(prec - s) {
                    row[s + t] = f.add(row[s + t], f.mul(u, v));
                }
            }
        }
    }
    out
}

fn series_inverse(f: &GaloisField, c: &Up, prec: usize) -> Vec<E> {
    let a: Vec<E> = (0..prec).map(|i| c.coeff(i)).collect();
    let inv0 = f.inv(a[0]).expect("unit constant term");
    let mut b = vec![f.zero(); prec];
    b[0] = inv0;
    for k in 1..prec {
        let mut s = f.zero();
        for i in 1..=k {
            s = f.add(s, f.mul(a[i], b[k - i]));
        }
        b[k] = f.neg(f.mul(s, inv0));
    }
    b
}

/// Inverse of a modulo m (coprime, m nonconstant).
fn inv_mod(a: &Up, m: &Up) -> Up {
    let f = a.ring().clone();
    let (mut r0, mut r1) = (m.clone(), a.rem(m).expect("nonzero modulus"));
    let (mut s0, mut s1) = (Up::zero(f.clone()), Up::one(f.clone()));
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1).expect("nonzero");
        r0 = std::mem::replace(&mut r1, r);
        let s = s0.sub(&q.mul(&s1));
        s0 = std::mem::replace(&mut s1, s);
    }
    let c = f.inv(*r0.leading().expect("gcd is a unit")).expect("nonzero");
    s0.scale(&c).rem(m).expect("nonzero modulus")
}

/// Irreducible factors over `k` of a primitive squarefree polynomial that is
/// separable in x.
fn lift_and_recombine(k: &GaloisField, a: &Bi) -> Result<Vec<Bi>, GbError> {
    let dx = deg_x(a).expect("nonzero");
    if dx == 1 {
        return Ok(vec![normalize(a)]);
    }
    let (big, y0) = choose_specialization(k, a)?;
    let emb = big.embedding_from(k)?;
    let f = &big;
    let shifted = shift_y(f, &map_field(a, f, |v| emb.apply(v)), y0);
    let u0 = up(f, shifted.iter().map(|c| c.coeff(0)).collect());
    let facs: Vec<Up> = factor_univariate(&u0)?.into_iter().map(|(g, _)| g).collect();
    let mut found: Vec<Bi> = Vec::new();
    if facs.len() == 1 {
        found.push(shifted);
    } else {
        let prec = 2 * deg_y(a) + 2;
        let lcinv = series_inverse(f, &shifted[dx], prec);
        let lcs: Series = vec![lcinv];
        let grid: Series =
            shifted.iter().map(|c| (0..prec).map(|j| c.coeff(j)).collect()).collect();
        let target = series_mul(f, &grid, &lcs, prec);
        let mut lifted: Vec<Series> = facs
            .iter()
            .map(|g| {
                g.coeffs()
                    .iter()
                    .map(|&v| {
                        let mut row = vec![f.zero(); prec];
                        row[0] = v;
                        row
                    })
                    .collect()
            })
            .collect();
        let cofactors: Vec<Up> = (0..facs.len())
            .map(|i| {
                let q = facs
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .fold(Up::one(f.clone()), |acc, (_, g)| acc.mul(g));
                inv_mod(&q, &facs[i])
            })
            .collect();
        for step in 1..prec {
            let prod = lifted[1..]
                .iter()
                .fold(lifted[0].clone(), |acc, g| series_mul(f, &acc, g, step + 1));
            let err = up(
                f,
                (0..dx)
                    .map(|i| f.sub(target[i][step], prod.get(i).map_or(f.zero(), |r| r[step])))
                    .collect(),
            );
            if err.is_zero() {
                continue;
            }
            for (i, g) in lifted.iter_mut().enumerate() {
                let delta = err.mul(&cofactors[i]).rem(&facs[i])?;
                for (d, &v) in delta.coeffs().iter().enumerate() {
                    g[d][step] = f.add(g[d][step], v);
                }
            }
        }
        let mut rest = shifted.clone();
        let mut pending: Vec<usize> = (0..lifted.len()).collect();
        let mut size = 1;
        while 2 * size <= pending.len() {
            let mut hit = None;
            for subset in combinations(&pending, size) {
                let lc = &rest[deg_x(&rest).expect("nonzero")];
                let lcser: Series = vec![(0..prec).map(|j| lc.coeff(j)).collect()];
                let prod = subset.iter().fold(lcser, |acc, &i| series_mul(f, &acc, &lifted[i], prec));
                let cand = primitive_part(f, &trim(prod.into_iter().map(|row| up(f, row)).collect()));
                if let Some(q) = div_exact(f, &rest, &cand) {
                    hit = Some((subset, cand, q));
                    break;
                }
            }
            match hit {
                Some((subset, cand, q)) => {
                    found.push(cand);
                    rest = q;
                    pending.retain(|i| !subset.contains(i));
                }
                None => size += 1,
            }
        }
        found.push(rest);
    }
    let found: Vec<Bi> = found.iter().map(|g| normalize(&shift_y(f, g, f.neg(y0)))).collect();
    if big.same_field(k) {
        return Ok(found);
    }
    let kq = k.degree();
    let frob = |g: &Bi| map_field(g, f, |v| f.frobenius_pow(v, kq));
    let mut used = vec![false; found.len()];
    let mut out = Vec::new();
    for i in 0..found.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut prod = found[i].clone();
        let mut cur = frob(&found[i]);
        while cur != found[i] {
            let j = found.iter().position(|g| *g == cur).ok_or(GbError::FactorizationFailed("orbit"))?;
            used[j] = true;
            prod = mul(f, &prod, &cur);
            cur = frob(&cur);
        }
        let back = prod
            .iter()
            .map(|c| {
                c.coeffs()
                    .iter()
                    .map(|&v| emb.preimage(v))
                    .collect::<Option<Vec<_>>>()
                    .map(|cs| up(k, cs))
            })
            .collect::<Option<Bi>>()
            .ok_or(GbError::FactorizationFailed("orbit product not over the base field"))?;
        out.push(normalize(&back));
    }
    Ok(out)
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, items[i]);
            out.push(rest);
        }
    }
    out
}

fn factor_rec(f: &GaloisField, a: &Bi) -> Result<Vec<(Bi, u32)>, GbError> {
    let mut out: Vec<(Bi, u32)> = Vec::new();
    if is_constant(a) {
        return Ok(out);
    }
    let d = gcd(f, a, &gcd(f, &d_dx(f, a), &d_dy(a)));
    let sep = div_exact(f, a, &d).expect("gcd divides");
    let mut rest = a.clone();
    if !is_constant(&sep) {
        for g in split_squarefree(f, &sep)? {
            let mut e = 0;
            while let Some(q) = div_exact(f, &rest, &g) {
                rest = q;
                e += 1;
            }
            out.push((g, e));
        }
    }
    if !is_constant(&rest) {
        let p = f.characteristic();
        for (g, e) in factor_rec(f, &pth_root(f, &rest))? {
            out.push((g, e * p));
        }
    }
    Ok(out)
}

/// Irreducible factors with multiplicities of a nonzero polynomial in two
/// variables over GF(p^k). Factors are scaled so their leading coefficient
/// (graded lex) is 1; the product of factor^multiplicity equals the input up
/// to a nonzero constant.
pub fn factor_bivariate(
    poly: &MultiPoly<GaloisField>,
) -> Result<Vec<(MultiPoly<GaloisField>, u32)>, GbError> {
    if poly.nvars() != 2 {
        return Err(PolyError::DimensionMismatch { expected: 2, got: poly.nvars() }.into());
    }
    if poly.is_zero() {
        return Err(GbError::ZeroPolynomial);
    }
    let f = poly.ring().clone();
    let mut out: Vec<(MultiPoly<GaloisField>, u32)> = factor_rec(&f, &to_bi(poly))?
        .into_iter()
        .map(|(g, e)| {
            let m = from_bi(&f, poly.vars(), &g);
            let lc = *m.leading().expect("nonzero").1;
            (m.scale(&f.inv(lc).expect("nonzero")), e)
        })
        .collect();
    let mut merged: Vec<(MultiPoly<GaloisField>, u32)> = Vec::new();
    for (g, e) in out.drain(..) {
        match merged.iter_mut().find(|(h, _)| *h == g) {
            Some(x) => x.1 += e,
            None => merged.push((g, e)),
        }
    }
    merged.sort_by_cached_key(|(g, e)| (g.degree(), g.to_string(), *e));
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::vars;

    fn parse(f: &GaloisField, s: &str) -> MultiPoly<GaloisField> {
        MultiPoly::parse(f.clone(), vars(&["x", "y"]), s).unwrap()
    }

    fn product(f: &GaloisField, facs: &[(MultiPoly<GaloisField>, u32)]) -> MultiPoly<GaloisField> {
        facs.iter().fold(MultiPoly::one(f.clone(), vars(&["x", "y"])), |acc, (g, e)| acc.mul(&g.pow(*e)))
    }

    fn same_up_to_unit(f: &GaloisField, a: &MultiPoly<GaloisField>, b: &MultiPoly<GaloisField>) -> bool {
        let la = *a.leading().unwrap().1;
        let lb = *b.leading().unwrap().1;
        a.scale(&f.inv(la).unwrap()) == b.scale(&f.inv(lb).unwrap())
    }

    #[test]
    fn examples() {
        let f2 = GaloisField::new(2, 1).unwrap();
        let r = factor_bivariate(&parse(&f2, "x^2 + y^2")).unwrap();
        assert_eq!(r, vec![(parse(&f2, "x + y"), 2)]);
        let r = factor_bivariate(&parse(&f2, "x^2 + x*y + y^2")).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].1, 1);
        let f4 = GaloisField::new(2, 2).unwrap();
        let r = factor_bivariate(&parse(&f4, "x^2 + x*y + y^2")).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|(g, e)| g.degree() == Some(1) && *e == 1));
        assert!(same_up_to_unit(&f4, &product(&f4, &r), &parse(&f4, "x^2 + x*y + y^2")));
    }

    #[test]
    fn products_round_trip() {
        let f4 = GaloisField::new(2, 2).unwrap();
        let cases = [
            "(x^3 + y^2 + 1)*(x*y + 1)^2*(y + 1)",
            "(x^2 + y)*(y^2 + x)",
            "(x^4 + x*y^3 + y + 1)*(x^2 + x*y + y^2 + 1)*x^3",
            "(x^5 + y^5 + x*y + 1)*(x + y^2)",
        ];
        for c in cases {
            let p = parse(&f4, c);
            let r = factor_bivariate(&p).unwrap();
            assert!(same_up_to_unit(&f4, &product(&f4, &r), &p), "{c}: {r:?}");
        }
        let f3 = GaloisField::new(3, 1).unwrap();
        let p = parse(&f3, "(x^2 + 1)*(y^3 - y + x)*(x + y)^3");
        let r = factor_bivariate(&p).unwrap();
        assert!(same_up_to_unit(&f3, &product(&f3, &r), &p));
        let degs: Vec<(Option<u32>, u32)> = r.iter().map(|(g, e)| (g.degree(), *e)).collect();
        assert_eq!(degs, vec![(Some(1), 3), (Some(2), 1), (Some(3), 1)]);
    }

    #[test]
    fn combination_enumeration() {
        assert_eq!(combinations(&[4, 5, 6], 2), vec![vec![4, 5], vec![4, 6], vec![5, 6]]);
        assert_eq!(combinations(&[1, 2], 1), vec![vec![1], vec![2]]);
        assert_eq!(combinations(&[1, 2, 3], 3), vec![vec![1, 2, 3]]);
    }
}
