//! Root counting and factorization of univariate polynomials over GF(q).

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{FieldElement, FieldError, GaloisField};
use crate::mpoly::UniPoly;

type Poly = UniPoly<GaloisField>;

/// Exhaustive evaluation is used below this field order.
const EXHAUSTIVE_LIMIT: u64 = 256;

/// Number of distinct roots in GF(q), optionally with the roots themselves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootReport {
    pub count: usize,
    pub roots: Option<Vec<FieldElement>>,
}

/// `X^(q^k) mod f` by repeated q-th powering.
fn x_pow_qk(f: &Poly, k: u32) -> Result<Poly, FieldError> {
    let field = f.ring().clone();
    let q = field.order();
    let mut h = UniPoly::t(field).rem(f)?;
    for _ in 0..k {
        h = h.powmod(q, f)?;
    }
    Ok(h)
}

/// Counts distinct roots in GF(q) as `deg gcd(f, X^q - X)`.
pub fn univariate_root_count(f: &Poly, also_list: bool) -> Result<RootReport, FieldError> {
    if f.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let count = split_part(f)?.degree().unwrap_or(0);
    let roots = if also_list { Some(univariate_roots(f)?) } else { None };
    Ok(RootReport { count, roots })
}

/// `gcd(f, X^q - X)`: the product of the distinct linear factors of f.
fn split_part(f: &Poly) -> Result<Poly, FieldError> {
    let f = f.monic();
    if f.degree() == Some(0) {
        return Ok(f);
    }
    let h = x_pow_qk(&f, 1)?;
    f.gcd(&h.sub(&UniPoly::t(f.ring().clone())))
}

/// Distinct roots in GF(q), sorted by packed value.
pub fn univariate_roots(f: &Poly) -> Result<Vec<FieldElement>, FieldError> {
    if f.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let field = f.ring().clone();
    let mut roots = if field.order() <= EXHAUSTIVE_LIMIT {
        field.elements().filter(|x| field.is_zero(f.eval(x))).collect()
    } else {
        let g = split_part(f)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut out = Vec::new();
        for lin in equal_degree_split(&g, 1, &mut rng)? {
            // lin = X + c
            out.push(field.neg(lin.coeff(0)));
        }
        out
    };
    roots.sort_by_key(|&r| field.packed(r));
    Ok(roots)
}

/// Random splitting polynomial for equal-degree factorization: in odd
/// characteristic `a^((q^d - 1)/2) - 1`, in characteristic 2 the trace map
/// `a + a^2 + ... + a^(2^(m d - 1))`.
fn splitter(f: &Poly, d: u32, a: &Poly) -> Result<Poly, FieldError> {
    let field = f.ring().clone();
    if field.characteristic() == 2 {
        let m = field.degree() * d;
        let mut acc = a.rem(f)?;
        let mut cur = acc.clone();
        for _ in 1..m {
            cur = cur.mul(&cur).rem(f)?;
            acc = acc.add(&cur);
        }
        Ok(acc)
    } else {
        let qd = BigUint::from(field.order()).pow(d);
        let e = (qd - 1u32) >> 1;
        Ok(a.powmod_big(&e, f)?.sub(&UniPoly::one(field)))
    }
}

/// Splits a monic squarefree `f` whose irreducible factors all have degree `d`.
fn equal_degree_split(f: &Poly, d: u32, rng: &mut ChaCha8Rng) -> Result<Vec<Poly>, FieldError> {
    let deg = f.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(Vec::new());
    }
    if deg == d as usize {
        return Ok(vec![f.monic()]);
    }
    let field = f.ring().clone();
    loop {
        let coeffs = (0..deg).map(|_| field.random(rng)).collect();
        let a = UniPoly::new(field.clone(), coeffs);
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let s = splitter(f, d, &a)?;
        let g = f.gcd(&s)?;
        let gd = g.degree().unwrap_or(0);
        if gd > 0 && gd < deg {
            let h = f.div_exact(&g)?;
            let mut out = equal_degree_split(&g, d, rng)?;
            out.extend(equal_degree_split(&h.monic(), d, rng)?);
            return Ok(out);
        }
    }
}

/// Irreducible monic factors of a squarefree polynomial (distinct-degree then
/// equal-degree splitting), sorted by degree then coefficients.
pub fn factor_squarefree(f: &Poly) -> Result<Vec<Poly>, FieldError> {
    if f.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let field = f.ring().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0xfac7);
    let mut rest = f.monic();
    let mut out = Vec::new();
    let x = UniPoly::t(field.clone());
    let mut h = x.rem(&rest).unwrap_or_else(|_| x.clone());
    let mut d = 1u32;
    while rest.degree().unwrap_or(0) >= 2 * d as usize {
        h = h.powmod(field.order(), &rest)?;
        let g = rest.gcd(&h.sub(&x))?;
        if g.degree().unwrap_or(0) > 0 {
            out.extend(equal_degree_split(&g, d, &mut rng)?);
            rest = rest.div_exact(&g)?.monic();
            h = h.rem(&rest)?;
        }
        d += 1;
    }
    if rest.degree().unwrap_or(0) > 0 {
        out.push(rest);
    }
    sort_factors(&field, &mut out);
    Ok(out)
}

fn sort_factors(field: &GaloisField, fs: &mut [Poly]) {
    fs.sort_by_key(|p| {
        (
            p.degree(),
            p.coeffs().iter().map(|&c| field.packed(c)).collect::<Vec<_>>(),
        )
    });
}

/// p-th root of a polynomial whose derivative vanishes.
fn pth_root(f: &Poly) -> Poly {
    let field = f.ring().clone();
    let p = field.characteristic() as usize;
    let n = field.degree();
    let cs = f
        .coeffs()
        .iter()
        .step_by(p)
        .map(|&c| field.frobenius_pow(c, n - 1))
        .collect();
    UniPoly::new(field, cs)
}

/// Squarefree decomposition: pairs (squarefree factor, multiplicity).
fn squarefree_decomposition(f: &Poly) -> Result<Vec<(Poly, u32)>, FieldError> {
    let p = f.ring().characteristic();
    let mut out = Vec::new();
    let f = f.monic();
    if f.degree().unwrap_or(0) == 0 {
        return Ok(out);
    }
    let df = f.derivative();
    if df.is_zero() {
        for (g, m) in squarefree_decomposition(&pth_root(&f))? {
            out.push((g, m * p));
        }
        return Ok(out);
    }
    let mut c = f.gcd(&df)?;
    let mut w = f.div_exact(&c)?;
    let mut i = 1u32;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(&c)?;
        let z = w.div_exact(&y)?;
        if z.degree().unwrap_or(0) > 0 {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w)?;
    }
    if c.degree().unwrap_or(0) > 0 {
        for (g, m) in squarefree_decomposition(&pth_root(&c))? {
            out.push((g, m * p));
        }
    }
    Ok(out)
}

/// Complete factorization into monic irreducibles with multiplicities.
pub fn factor_univariate(f: &Poly) -> Result<Vec<(Poly, u32)>, FieldError> {
    if f.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let field = f.ring().clone();
    let mut out: Vec<(Poly, u32)> = Vec::new();
    for (g, m) in squarefree_decomposition(f)? {
        for h in factor_squarefree(&g)? {
            match out.iter_mut().find(|(k, _)| *k == h) {
                Some(e) => e.1 += m,
                None => out.push((h, m)),
            }
        }
    }
    out.sort_by_key(|(p, m)| {
        (
            p.degree(),
            p.coeffs().iter().map(|&c| field.packed(c)).collect::<Vec<_>>(),
            *m,
        )
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(f: &GaloisField, packed: &[u32]) -> Poly {
        UniPoly::new(f.clone(), packed.iter().map(|&v| f.from_packed(v)).collect())
    }

    #[test]
    fn root_count_examples() {
        let f3 = GaloisField::new(3, 1).unwrap();
        let r = univariate_root_count(&poly(&f3, &[2, 0, 1]), true).unwrap();
        assert_eq!(r.count, 2);
        assert_eq!(r.roots.unwrap(), vec![f3.from_int(1), f3.from_int(2)]);
        assert_eq!(univariate_root_count(&poly(&f3, &[1, 0, 1]), false).unwrap().count, 0);

        let f2 = GaloisField::new(2, 1).unwrap();
        assert_eq!(univariate_root_count(&poly(&f2, &[1, 1, 1]), false).unwrap().count, 0);
        let f4 = GaloisField::new(2, 2).unwrap();
        let r = univariate_root_count(&poly(&f4, &[1, 1, 1]), true).unwrap();
        assert_eq!(r.count, 2);
        assert_eq!(r.roots.unwrap(), vec![f4.from_packed(2), f4.from_packed(3)]);
        assert!(univariate_root_count(&UniPoly::zero(f4), false).is_err());
    }

    #[test]
    fn roots_in_large_field_by_splitting() {
        let f = GaloisField::new(3, 7).unwrap();
        let rs: Vec<_> = [5u32, 17, 400, 1000].iter().map(|&v| f.from_packed(v)).collect();
        let mut p = UniPoly::one(f.clone());
        for &r in &rs {
            p = p.mul(&UniPoly::new(f.clone(), vec![f.neg(r), f.one()]));
        }
        p = p.mul(&poly(&f, &[1, 0, 1]).pow(2));
        let found = univariate_roots(&p).unwrap();
        let mut want = rs.clone();
        want.sort_by_key(|&r| f.packed(r));
        let extra: Vec<_> = f
            .elements()
            .filter(|x| f.is_zero(poly(&f, &[1, 0, 1]).eval(x)))
            .collect();
        assert!(extra.is_empty());
        assert_eq!(found, want);
    }

    #[test]
    fn factorization_multiplies_back() {
        let f = GaloisField::new(2, 2).unwrap();
        let a = poly(&f, &[1, 1, 0, 1]);
        let b = poly(&f, &[2, 1]);
        let c = poly(&f, &[1, 1, 1, 1, 1]);
        let prod = a.mul(&b).mul(&b).mul(&c).mul(&poly(&f, &[0, 1]).pow(4));
        let fs = factor_univariate(&prod).unwrap();
        let mut back = UniPoly::one(f.clone());
        for (g, m) in &fs {
            back = back.mul(&g.pow(*m as u64));
        }
        assert_eq!(back, prod.monic());
        assert!(fs.iter().any(|(g, m)| *g == poly(&f, &[0, 1]) && *m == 4));
    }
}
