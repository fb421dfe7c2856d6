//! Exact arithmetic in GF(p^n).
//!
//! Fields of order at most a configurable limit (2^20 by default) store
//! Zech-logarithm tables: an element is its discrete logarithm with respect to
//! a fixed generator, multiplication is addition of logarithms and addition
//! goes through the table `zech[k] = log(1 + g^k)`. Larger fields pack the
//! coefficient vector over GF(p) into a base-p integer.

mod moduli;
pub mod roots;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::ring::{Field, Ring};

pub use roots::{
    factor_squarefree, factor_univariate, univariate_root_count, univariate_roots, RootReport,
};

/// Fields up to this order get Zech-logarithm tables.
pub const DEFAULT_ZECH_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("modulus is not a monic irreducible polynomial of degree {0}")]
    NotIrreducible(u32),
    #[error("no stored modulus for GF({p}^{n})")]
    NoModulus { p: u32, n: u32 },
    #[error("field order {p}^{n} does not fit in 32 bits")]
    TooLarge { p: u32, n: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial division is not exact")]
    NotDivisible,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("GF({p}^{d}) does not embed in GF({q}^{n})")]
    IncompatibleFields { p: u32, d: u32, q: u32, n: u32 },
    #[error("element {0} is out of range")]
    OutOfRange(u64),
}

/// An element of a [`GaloisField`]. The encoding depends on the field: a
/// discrete logarithm in table mode, a packed coefficient vector otherwise.
/// Use [`GaloisField::packed`] for a representation-independent value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FieldElement(u32);

impl FieldElement {
    pub fn raw(self) -> u32 {
        self.0
    }
}

struct ZechTables {
    /// `exp[k]` = packed value of `g^k`, for `k < q - 1`.
    exp: Vec<u32>,
    /// `log[v]` = discrete log of the packed value `v` (entry 0 unused).
    log: Vec<u32>,
    /// `zech[k]` = log of `1 + g^k`, or the zero sentinel.
    zech: Vec<u32>,
    /// `q - 1`, also the encoding of zero.
    order: u32,
    /// Logarithm of `-1`.
    neg_one: u32,
}

/// Immutable description of GF(p^n) with its tables.
pub struct FieldSpec {
    p: u32,
    n: u32,
    q: u64,
    modulus: Vec<u32>,
    generator_packed: u32,
    zech: Option<ZechTables>,
    embeddings: Mutex<HashMap<Vec<u32>, Arc<Embedding>>>,
}

/// Shared handle to a finite field; cheap to clone.
#[derive(Clone)]
pub struct GaloisField(Arc<FieldSpec>);

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn checked_order(p: u32, n: u32) -> Result<u64, FieldError> {
    let q = (p as u64).checked_pow(n).ok_or(FieldError::TooLarge { p, n })?;
    if q > u32::MAX as u64 {
        return Err(FieldError::TooLarge { p, n });
    }
    Ok(q)
}

// Arithmetic on coefficient vectors over GF(p), used while tables are built
// and in packed mode.

fn unpack(mut v: u32, p: u32, n: usize, out: &mut [u32]) {
    for d in out.iter_mut().take(n) {
        *d = v % p;
        v /= p;
    }
}

fn pack(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0u32, |acc, &d| acc * p + d)
}

fn packed_add(a: u32, b: u32, p: u32, n: usize) -> u32 {
    if p == 2 {
        return a ^ b;
    }
    let (mut a, mut b) = (a, b);
    let mut out = 0u32;
    let mut scale = 1u32;
    for i in 0..n {
        let d = (a % p + b % p) % p;
        out += d * scale;
        a /= p;
        b /= p;
        if i + 1 < n {
            scale *= p;
        }
    }
    out
}

fn packed_neg(a: u32, p: u32, n: usize) -> u32 {
    if p == 2 {
        return a;
    }
    let mut digits = [0u32; 32];
    unpack(a, p, n, &mut digits);
    for d in digits.iter_mut().take(n) {
        *d = (p - *d) % p;
    }
    pack(&digits[..n], p)
}

fn packed_mul(a: u32, b: u32, p: u32, modulus: &[u32]) -> u32 {
    let n = modulus.len() - 1;
    let mut da = [0u32; 32];
    let mut db = [0u32; 32];
    unpack(a, p, n, &mut da);
    unpack(b, p, n, &mut db);
    let p64 = p as u64;
    let mut prod = [0u64; 64];
    for i in 0..n {
        if da[i] == 0 {
            continue;
        }
        for j in 0..n {
            prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p64;
        }
    }
    for k in (n..2 * n.max(1) - 1).rev() {
        let c = prod[k] % p64;
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &m) in modulus.iter().enumerate().take(n) {
            let idx = k - n + i;
            prod[idx] = (prod[idx] + (p64 - c) * m as u64) % p64;
        }
    }
    let digits: Vec<u32> = prod[..n].iter().map(|&d| d as u32).collect();
    pack(&digits, p)
}

// Prime-field polynomial helpers for the irreducibility test.

fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = fp_trim(a.to_vec());
    let dm = m.len() - 1;
    let inv = fp_inv(m[dm], p);
    while r.len() > dm {
        let k = r.len() - 1;
        let c = r[k] * inv % p;
        for (i, &mi) in m.iter().enumerate() {
            let idx = k - dm + i;
            r[idx] = (r[idx] + p * p - c * mi % p) % p;
        }
        r = fp_trim(r);
    }
    r
}

fn fp_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    fp_rem(&prod, m, p)
}

fn fp_inv(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = fp_trim(a.to_vec());
    let mut b = fp_trim(b.to_vec());
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Irreducibility test: gcd(f, X^{p^k} - X) = 1 for all k <= n/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let n = modulus.len() - 1;
    if n == 0 || modulus[n] != 1 || modulus.iter().any(|&c| c >= p) {
        return false;
    }
    if n == 1 {
        return true;
    }
    let p64 = p as u64;
    let m: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
    let x = vec![0u64, 1];
    let mut h = x.clone();
    for _ in 1..=n / 2 {
        // h <- h^p mod m
        let mut acc = vec![1u64];
        let mut base = h.clone();
        let mut e = p64;
        while e > 0 {
            if e & 1 == 1 {
                acc = fp_mulmod(&acc, &base, &m, p64);
            }
            base = fp_mulmod(&base, &base, &m, p64);
            e >>= 1;
        }
        h = acc;
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p64 - 1) % p64;
        let g = fp_gcd(&m, &fp_trim(diff), p64);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn least_primitive_root(p: u32) -> u32 {
    if p == 2 {
        return 1;
    }
    let order = p - 1;
    let mut factors = Vec::new();
    let mut m = order;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            factors.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    (2..p)
        .find(|&g| {
            factors.iter().all(|&f| {
                let mut r = 1u64;
                let mut b = g as u64;
                let mut e = (order / f) as u64;
                while e > 0 {
                    if e & 1 == 1 {
                        r = r * b % p as u64;
                    }
                    b = b * b % p as u64;
                    e >>= 1;
                }
                r != 1
            })
        })
        .expect("a primitive root exists")
}

fn default_modulus(p: u32, n: u32) -> Result<Vec<u32>, FieldError> {
    if let Some(m) = moduli::lookup(p, n) {
        return Ok(m.iter().map(|&c| c as u32).collect());
    }
    if n == 1 {
        let g = least_primitive_root(p);
        return Ok(vec![(p - g) % p, 1]);
    }
    // Small fields outside the stored table: least irreducible modulus.
    let q = checked_order(p, n)?;
    if q > DEFAULT_ZECH_LIMIT {
        return Err(FieldError::NoModulus { p, n });
    }
    let n_us = n as usize;
    for v in 0..(q as u32) {
        let mut m = vec![0u32; n_us + 1];
        unpack(v, p, n_us, &mut m);
        m[n_us] = 1;
        if m[0] != 0 && is_irreducible(&m, p) {
            return Ok(m);
        }
    }
    Err(FieldError::NoModulus { p, n })
}

impl ZechTables {
    fn build(p: u32, modulus: &[u32], q: u64) -> (ZechTables, u32) {
        let n = modulus.len() - 1;
        let order = (q - 1) as u32;
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![u32::MAX; q as usize];
        // Candidate generators in packed order; the stored moduli are
        // primitive, so X (packed p) succeeds at once for n >= 2.
        let mut candidates: Vec<u32> = Vec::new();
        if n >= 2 {
            candidates.push(p);
        } else {
            candidates.push((p - modulus[0]) % p);
        }
        candidates.extend(2..(q as u32));
        let mut generator = 1u32;
        for g in candidates {
            if g == 0 {
                continue;
            }
            let mut cur = 1u32;
            let mut ok = true;
            for (k, slot) in exp.iter_mut().enumerate() {
                if k > 0 && cur == 1 {
                    ok = false;
                    break;
                }
                *slot = cur;
                cur = packed_mul(cur, g, p, modulus);
            }
            if ok && cur == 1 {
                generator = g;
                break;
            }
        }
        if q == 2 {
            generator = 1;
        }
        for (k, &v) in exp.iter().enumerate() {
            log[v as usize] = k as u32;
        }
        let zech = exp
            .iter()
            .map(|&v| {
                let s = packed_add(v, 1, p, n);
                if s == 0 {
                    order
                } else {
                    log[s as usize]
                }
            })
            .collect();
        let neg_one = if p == 2 { 0 } else { order / 2 };
        (ZechTables { exp, log, zech, order, neg_one }, generator)
    }
}

fn field_cache() -> &'static Mutex<HashMap<(u32, u32), GaloisField>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), GaloisField>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl GaloisField {
    /// GF(p^n) with the designated modulus, shared through a process-wide cache.
    pub fn new(p: u32, n: u32) -> Result<Self, FieldError> {
        if let Some(f) = field_cache().lock().unwrap().get(&(p, n)) {
            return Ok(f.clone());
        }
        let modulus = default_modulus(p, n)?;
        let f = Self::with_modulus(p, &modulus, DEFAULT_ZECH_LIMIT)?;
        let mut cache = field_cache().lock().unwrap();
        Ok(cache.entry((p, n)).or_insert(f).clone())
    }

    pub fn prime(p: u32) -> Result<Self, FieldError> {
        Self::new(p, 1)
    }

    /// GF(p^n) for an explicit monic modulus (low to high coefficients);
    /// tables are built when `p^n <= zech_limit`.
    pub fn with_modulus(p: u32, modulus: &[u32], zech_limit: u64) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let n = (modulus.len().max(1) - 1) as u32;
        if n == 0 {
            return Err(FieldError::NotIrreducible(0));
        }
        let q = checked_order(p, n)?;
        if !is_irreducible(modulus, p) {
            return Err(FieldError::NotIrreducible(n));
        }
        let (zech, generator_packed) = if q <= zech_limit {
            let (t, g) = ZechTables::build(p, modulus, q);
            (Some(t), g)
        } else {
            (None, find_generator_packed(p, modulus, q))
        };
        Ok(GaloisField(Arc::new(FieldSpec {
            p,
            n,
            q,
            modulus: modulus.to_vec(),
            generator_packed,
            zech,
            embeddings: Mutex::new(HashMap::new()),
        })))
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.n
    }

    pub fn order(&self) -> u64 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn has_tables(&self) -> bool {
        self.0.zech.is_some()
    }

    pub fn same_field(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p
                && self.0.modulus == other.0.modulus
                && self.0.zech.is_some() == other.0.zech.is_some())
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        match &self.0.zech {
            Some(z) => FieldElement(z.order),
            None => FieldElement(0),
        }
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        match &self.0.zech {
            Some(_) => FieldElement(0),
            None => FieldElement(1),
        }
    }

    #[inline]
    pub fn is_zero(&self, a: FieldElement) -> bool {
        a == self.zero()
    }

    /// The fixed generator of the multiplicative group.
    pub fn generator(&self) -> FieldElement {
        self.from_packed(self.0.generator_packed)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.0.zech {
            Some(z) => {
                let (a, b) = (a.0, b.0);
                if a == z.order {
                    return FieldElement(b);
                }
                if b == z.order {
                    return FieldElement(a);
                }
                let d = if b >= a { b - a } else { b + z.order - a };
                let t = z.zech[d as usize];
                if t == z.order {
                    return FieldElement(z.order);
                }
                let s = a + t;
                FieldElement(if s >= z.order { s - z.order } else { s })
            }
            None => FieldElement(packed_add(a.0, b.0, self.0.p, self.0.n as usize)),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        match &self.0.zech {
            Some(z) => {
                if a.0 == z.order {
                    return a;
                }
                let s = a.0 + z.neg_one;
                FieldElement(if s >= z.order { s - z.order } else { s })
            }
            None => FieldElement(packed_neg(a.0, self.0.p, self.0.n as usize)),
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.0.zech {
            Some(z) => {
                if a.0 == z.order || b.0 == z.order {
                    return FieldElement(z.order);
                }
                let s = a.0 + b.0;
                FieldElement(if s >= z.order { s - z.order } else { s })
            }
            None => FieldElement(packed_mul(a.0, b.0, self.0.p, &self.0.modulus)),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::DivisionByZero);
        }
        match &self.0.zech {
            Some(z) => Ok(FieldElement(if a.0 == 0 { 0 } else { z.order - a.0 })),
            None => Ok(self.pow(a, self.0.q - 2)),
        }
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        match &self.0.zech {
            Some(z) => {
                if a.0 == z.order {
                    return if e == 0 { self.one() } else { a };
                }
                FieldElement(((a.0 as u64 * (e % z.order as u64)) % z.order as u64) as u32)
            }
            None => {
                let mut acc = self.one();
                let mut base = a;
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = self.mul(acc, base);
                    }
                    base = self.mul(base, base);
                    e >>= 1;
                }
                acc
            }
        }
    }

    /// The absolute Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.0.p as u64)
    }

    /// `a -> a^(p^k)`.
    pub fn frobenius_pow(&self, a: FieldElement, k: u32) -> FieldElement {
        (0..k % self.0.n.max(1)).fold(a, |x, _| self.frobenius(x))
    }

    /// Absolute trace to the prime field, returned as an integer in `0..p`.
    pub fn trace(&self, a: FieldElement) -> u32 {
        let mut acc = self.zero();
        let mut x = a;
        for _ in 0..self.0.n {
            acc = self.add(acc, x);
            x = self.frobenius(x);
        }
        self.packed(acc)
    }

    /// Discrete logarithm in table mode.
    #[inline]
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        match &self.0.zech {
            Some(z) if a.0 != z.order => Some(a.0),
            _ => None,
        }
    }

    pub fn is_square(&self, a: FieldElement) -> bool {
        if self.is_zero(a) || self.0.p == 2 {
            return true;
        }
        match self.log(a) {
            Some(l) => l % 2 == 0,
            None => self.pow(a, (self.0.q - 1) / 2) == self.one(),
        }
    }

    /// A square root, if one exists.
    pub fn sqrt(&self, a: FieldElement) -> Option<FieldElement> {
        if self.is_zero(a) {
            return Some(a);
        }
        if self.0.p == 2 {
            return Some(self.pow(a, self.0.q / 2));
        }
        if let Some(l) = self.log(a) {
            return (l % 2 == 0).then_some(FieldElement(l / 2));
        }
        if !self.is_square(a) {
            return None;
        }
        // Tonelli-Shanks on the multiplicative group.
        let q1 = self.0.q - 1;
        let s = q1.trailing_zeros();
        let t = q1 >> s;
        let mut z = self.one();
        for v in 2..self.0.q {
            let c = self.from_packed(v as u32);
            if !self.is_square(c) {
                z = c;
                break;
            }
        }
        let mut m = s;
        let mut c = self.pow(z, t);
        let mut tt = self.pow(a, t);
        let mut r = self.pow(a, t.div_ceil(2));
        while tt != self.one() {
            let mut i = 0;
            let mut x = tt;
            while x != self.one() {
                x = self.mul(x, x);
                i += 1;
            }
            let b = self.pow(c, 1u64 << (m - i - 1));
            m = i;
            c = self.mul(b, b);
            tt = self.mul(tt, c);
            r = self.mul(r, b);
        }
        Some(r)
    }

    /// Reduction of an integer into the prime field.
    pub fn from_int(&self, n: i64) -> FieldElement {
        let p = self.0.p as i64;
        self.from_packed(n.rem_euclid(p) as u32)
    }

    /// Element with coefficient vector given by the base-p digits of `v`.
    #[inline]
    pub fn from_packed(&self, v: u32) -> FieldElement {
        debug_assert!((v as u64) < self.0.q);
        match &self.0.zech {
            Some(z) => {
                if v == 0 {
                    FieldElement(z.order)
                } else {
                    FieldElement(z.log[v as usize])
                }
            }
            None => FieldElement(v),
        }
    }

    pub fn try_from_packed(&self, v: u64) -> Result<FieldElement, FieldError> {
        if v >= self.0.q {
            return Err(FieldError::OutOfRange(v));
        }
        Ok(self.from_packed(v as u32))
    }

    /// Base-p packed coefficient vector (coefficient of X^i is digit i).
    #[inline]
    pub fn packed(&self, a: FieldElement) -> u32 {
        match &self.0.zech {
            Some(z) => {
                if a.0 == z.order {
                    0
                } else {
                    z.exp[a.0 as usize]
                }
            }
            None => a.0,
        }
    }

    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        let n = self.0.n as usize;
        let mut d = vec![0u32; n];
        unpack(self.packed(a), self.0.p, n, &mut d);
        d
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> FieldElement {
        let digits: Vec<u32> = (0..self.0.n as usize)
            .map(|i| coeffs.get(i).copied().unwrap_or(0) % self.0.p)
            .collect();
        self.from_packed(pack(&digits, self.0.p))
    }

    /// All elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.0.q).map(move |v| self.from_packed(v as u32))
    }

    pub fn random<G: rand::Rng + ?Sized>(&self, rng: &mut G) -> FieldElement {
        self.from_packed(rng.gen_range(0..self.0.q) as u32)
    }

    pub fn random_nonzero<G: rand::Rng + ?Sized>(&self, rng: &mut G) -> FieldElement {
        self.from_packed(rng.gen_range(1..self.0.q) as u32)
    }

    /// The same field without tables, for cross-checking table arithmetic.
    pub fn without_tables(&self) -> Self {
        Self::with_modulus(self.0.p, &self.0.modulus, 0).expect("modulus already validated")
    }

    /// Embedding of a subfield GF(p^d), d | n, cached per subfield modulus.
    pub fn embedding_from(&self, sub: &GaloisField) -> Result<Arc<Embedding>, FieldError> {
        let key = sub.0.modulus.clone();
        if let Some(e) = self.0.embeddings.lock().unwrap().get(&key) {
            if e.sub.same_field(sub) {
                return Ok(e.clone());
            }
        }
        let e = Arc::new(Embedding::new(sub, self)?);
        self.0.embeddings.lock().unwrap().insert(key, e.clone());
        Ok(e)
    }

    /// Image of `a` from the subfield `sub` under the registered embedding.
    pub fn embed(&self, sub: &GaloisField, a: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.embedding_from(sub)?.apply(a))
    }

    fn fmt_element(&self, a: FieldElement, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs = self.coeffs(a);
        if self.0.n == 1 {
            return write!(f, "{}", cs[0]);
        }
        let mut first = true;
        for (i, &c) in cs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "a")?,
                (1, c) => write!(f, "{c}*a")?,
                (i, 1) => write!(f, "a^{i}")?,
                (i, c) => write!(f, "{c}*a^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn find_generator_packed(p: u32, modulus: &[u32], q: u64) -> u32 {
    if q == 2 {
        return 1;
    }
    let order = q - 1;
    let mut primes = Vec::new();
    let mut m = order;
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            primes.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    let pw = |mut b: u32, mut e: u64| {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = packed_mul(acc, b, p, modulus);
            }
            b = packed_mul(b, b, p, modulus);
            e >>= 1;
        }
        acc
    };
    let first = if modulus.len() > 2 { p } else { (p - modulus[0]) % p };
    std::iter::once(first)
        .chain(2..q as u32)
        .find(|&g| g != 0 && primes.iter().all(|&r| pw(g, order / r) != 1))
        .expect("finite fields have cyclic unit groups")
}

/// Borrowed Zech tables for inner loops. Elements are raw logarithms with
/// `order` encoding zero, exactly as in [`FieldElement::raw`].
#[derive(Clone, Copy)]
pub struct TableView<'a> {
    zech: &'a [u32],
    pub order: u32,
    pub neg_one: u32,
}

impl TableView<'_> {
    #[inline(always)]
    pub fn zero(&self) -> u32 {
        self.order
    }

    #[inline(always)]
    pub fn is_zero(&self, a: u32) -> bool {
        a == self.order
    }

    #[inline(always)]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if a == self.order {
            return b;
        }
        if b == self.order {
            return a;
        }
        let d = if b >= a { b - a } else { b + self.order - a };
        let t = self.zech[d as usize];
        if t == self.order {
            return self.order;
        }
        let s = a + t;
        if s >= self.order { s - self.order } else { s }
    }

    #[inline(always)]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == self.order || b == self.order {
            return self.order;
        }
        let s = a + b;
        if s >= self.order { s - self.order } else { s }
    }

    #[inline(always)]
    pub fn neg(&self, a: u32) -> u32 {
        if a == self.order {
            return a;
        }
        let s = a + self.neg_one;
        if s >= self.order { s - self.order } else { s }
    }

    #[inline(always)]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// Inverse of a nonzero element.
    #[inline(always)]
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != self.order);
        if a == 0 { 0 } else { self.order - a }
    }

    #[inline(always)]
    pub fn pow(&self, a: u32, e: u32) -> u32 {
        if a == self.order {
            return if e == 0 { 0 } else { a };
        }
        ((a as u64 * e as u64) % self.order as u64) as u32
    }
}

impl GaloisField {
    /// Table view, if the field stores Zech tables.
    pub fn table_view(&self) -> Option<TableView<'_>> {
        self.0.zech.as_ref().map(|z| TableView { zech: &z.zech, order: z.order, neg_one: z.neg_one })
    }

    /// Rebuilds an element from a raw encoding obtained via [`FieldElement::raw`].
    pub fn from_raw(&self, raw: u32) -> FieldElement {
        FieldElement(raw)
    }
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.n)
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other)
    }
}

impl Ring for GaloisField {
    type Elem = FieldElement;

    fn zero(&self) -> FieldElement {
        GaloisField::zero(self)
    }
    fn one(&self) -> FieldElement {
        GaloisField::one(self)
    }
    fn is_zero(&self, a: &FieldElement) -> bool {
        GaloisField::is_zero(self, *a)
    }
    fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        GaloisField::add(self, *a, *b)
    }
    fn neg(&self, a: &FieldElement) -> FieldElement {
        GaloisField::neg(self, *a)
    }
    fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        GaloisField::sub(self, *a, *b)
    }
    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        GaloisField::mul(self, *a, *b)
    }
    fn from_i64(&self, n: i64) -> FieldElement {
        self.from_int(n)
    }
    fn characteristic(&self) -> u64 {
        self.0.p as u64
    }
    fn pow(&self, a: &FieldElement, e: u64) -> FieldElement {
        GaloisField::pow(self, *a, e)
    }
    fn fmt_elem(&self, a: &FieldElement, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_element(*a, f)
    }
}

impl Field for GaloisField {
    fn inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        GaloisField::inv(self, *a)
    }
}

/// A field embedding GF(p^d) -> GF(p^n), determined by the image of the
/// subfield's generator class X: the least root (in packed order) of the
/// subfield modulus inside the larger field.
pub struct Embedding {
    sub: GaloisField,
    sup: GaloisField,
    image_of_x: FieldElement,
    powers: Vec<FieldElement>,
    table: Option<Vec<FieldElement>>,
    back: Option<HashMap<FieldElement, FieldElement>>,
}

const EMBED_TABLE_LIMIT: u64 = 1 << 16;

impl Embedding {
    pub fn new(sub: &GaloisField, sup: &GaloisField) -> Result<Self, FieldError> {
        let (p, d, n) = (sub.characteristic(), sub.degree(), sup.degree());
        if p != sup.characteristic() || n % d != 0 {
            return Err(FieldError::IncompatibleFields { p, d, q: sup.characteristic(), n });
        }
        let m = crate::mpoly::UniPoly::new(
            sup.clone(),
            sub.modulus().iter().map(|&c| sup.from_int(c as i64)).collect(),
        );
        let mut roots = univariate_roots(&m)?;
        roots.sort_by_key(|&r| sup.packed(r));
        let image_of_x = *roots.first().ok_or(FieldError::IncompatibleFields {
            p,
            d,
            q: sup.characteristic(),
            n,
        })?;
        let mut powers = Vec::with_capacity(d as usize);
        let mut cur = sup.one();
        for _ in 0..d {
            powers.push(cur);
            cur = sup.mul(cur, image_of_x);
        }
        let mut e = Embedding {
            sub: sub.clone(),
            sup: sup.clone(),
            image_of_x,
            powers,
            table: None,
            back: None,
        };
        if sub.order() <= EMBED_TABLE_LIMIT {
            let table: Vec<FieldElement> = (0..sub.order())
                .map(|v| e.apply_slow(sub.from_packed(v as u32)))
                .collect();
            let back = table
                .iter()
                .enumerate()
                .map(|(v, &img)| (img, sub.from_packed(v as u32)))
                .collect();
            e.table = Some(table);
            e.back = Some(back);
        }
        Ok(e)
    }

    fn apply_slow(&self, a: FieldElement) -> FieldElement {
        let cs = self.sub.coeffs(a);
        cs.iter().zip(&self.powers).fold(self.sup.zero(), |acc, (&c, &pw)| {
            self.sup.add(acc, self.sup.mul(self.sup.from_int(c as i64), pw))
        })
    }

    pub fn apply(&self, a: FieldElement) -> FieldElement {
        match &self.table {
            Some(t) => t[self.sub.packed(a) as usize],
            None => self.apply_slow(a),
        }
    }

    /// Preimage of an element of the image (small subfields only).
    pub fn preimage(&self, b: FieldElement) -> Option<FieldElement> {
        match &self.back {
            Some(m) => m.get(&b).copied(),
            None => {
                // Linear search is acceptable for the rare large case.
                (0..self.sub.order())
                    .map(|v| self.sub.from_packed(v as u32))
                    .find(|&a| self.apply_slow(a) == b)
            }
        }
    }

    pub fn image_of_generator_class(&self) -> FieldElement {
        self.image_of_x
    }

    pub fn source(&self) -> &GaloisField {
        &self.sub
    }

    pub fn target(&self) -> &GaloisField {
        &self.sup
    }
}

/// Convenience wrapper: image of `a` in `target` under the registered embedding.
pub fn ff_embed(
    a: FieldElement,
    source: &GaloisField,
    target: &GaloisField,
) -> Result<FieldElement, FieldError> {
    target.embed(source, a)
}
