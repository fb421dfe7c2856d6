//! Dense univariate polynomials over a [`Ring`].

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero as _;

use crate::ffield::FieldError;
use crate::ring::{Field, Ring};

/// Dense univariate polynomial; `coeffs[i]` is the coefficient of `t^i` and the
/// leading coefficient is nonzero (the zero polynomial has no coefficients).
#[derive(Clone)]
pub struct UniPoly<R: Ring> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

impl<R: Ring> UniPoly<R> {
    pub fn new(ring: R, mut coeffs: Vec<R::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            coeffs.pop();
        }
        UniPoly { ring, coeffs }
    }

    pub fn from_i64s(ring: R, coeffs: &[i64]) -> Self {
        let cs = coeffs.iter().map(|&c| ring.from_i64(c)).collect();
        Self::new(ring, cs)
    }

    pub fn zero(ring: R) -> Self {
        UniPoly { ring, coeffs: Vec::new() }
    }

    pub fn one(ring: R) -> Self {
        let one = ring.one();
        Self::new(ring, vec![one])
    }

    pub fn constant(ring: R, c: R::Elem) -> Self {
        Self::new(ring, vec![c])
    }

    /// `c * t^deg`.
    pub fn monomial(ring: R, c: R::Elem, deg: usize) -> Self {
        let mut coeffs = vec![ring.zero(); deg + 1];
        coeffs[deg] = c;
        Self::new(ring, coeffs)
    }

    /// The polynomial `t`.
    pub fn t(ring: R) -> Self {
        let one = ring.one();
        Self::monomial(ring, one, 1)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R::Elem> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> R::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn leading(&self) -> Option<&R::Elem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| self.ring.is_one(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let cs = (0..n)
            .map(|i| self.ring.add(&self.coeff(i), &other.coeff(i)))
            .collect();
        Self::new(self.ring.clone(), cs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let cs = (0..n)
            .map(|i| self.ring.sub(&self.coeff(i), &other.coeff(i)))
            .collect();
        Self::new(self.ring.clone(), cs)
    }

    pub fn neg(&self) -> Self {
        let cs = self.coeffs.iter().map(|c| self.ring.neg(c)).collect();
        Self::new(self.ring.clone(), cs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ring.clone());
        }
        let r = &self.ring;
        let mut cs = vec![r.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if r.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                cs[i + j] = r.add(&cs[i + j], &r.mul(a, b));
            }
        }
        Self::new(r.clone(), cs)
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let cs = self.coeffs.iter().map(|a| self.ring.mul(a, c)).collect();
        Self::new(self.ring.clone(), cs)
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut cs = vec![self.ring.zero(); k];
        cs.extend(self.coeffs.iter().cloned());
        Self::new(self.ring.clone(), cs)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.ring.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &R::Elem) -> R::Elem {
        let r = &self.ring;
        self.coeffs
            .iter()
            .rev()
            .fold(r.zero(), |acc, c| r.add(&r.mul(&acc, x), c))
    }

    pub fn derivative(&self) -> Self {
        let r = &self.ring;
        let cs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| r.mul(c, &r.from_i64(i as i64)))
            .collect();
        Self::new(r.clone(), cs)
    }

    /// `t^deg * self(1/t)` for the given nominal degree.
    pub fn reversed(&self, deg: usize) -> Self {
        let cs = (0..=deg).map(|i| self.coeff(deg - i)).collect();
        Self::new(self.ring.clone(), cs)
    }

    pub fn map<S: Ring>(&self, ring: S, f: impl Fn(&R::Elem) -> S::Elem) -> UniPoly<S> {
        let cs = self.coeffs.iter().map(f).collect();
        UniPoly::new(ring, cs)
    }
}

impl<F: Field> UniPoly<F> {
    /// Scales to leading coefficient one; the zero polynomial is returned as is.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(lc) => {
                let inv = self.ring.inv(lc).expect("leading coefficient is nonzero");
                self.scale(&inv)
            }
        }
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn divrem(&self, d: &Self) -> Result<(Self, Self), FieldError> {
        let r = &self.ring;
        let dd = d.degree().ok_or(FieldError::DivisionByZero)?;
        let lc_inv = r.inv(d.leading().unwrap())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(r.clone()), self.clone()));
        }
        let mut quot = vec![r.zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = r.mul(&rem[i], &lc_inv);
            if r.is_zero(&c) {
                continue;
            }
            let shift = i - dd;
            for (j, dj) in d.coeffs.iter().enumerate() {
                rem[shift + j] = r.sub(&rem[shift + j], &r.mul(&c, dj));
            }
            quot[shift] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(r.clone(), quot), Self::new(r.clone(), rem)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self, FieldError> {
        Ok(self.divrem(d)?.1)
    }

    /// Exact quotient; errors if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Result<Self, FieldError> {
        let (q, r) = self.divrem(d)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(FieldError::NotDivisible)
        }
    }

    /// Monic greatest common divisor; errors when both inputs are zero.
    pub fn gcd(&self, other: &Self) -> Result<Self, FieldError> {
        if self.is_zero() && other.is_zero() {
            return Err(FieldError::ZeroPolynomial);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// `self^e mod m`.
    pub fn powmod(&self, e: u64, m: &Self) -> Result<Self, FieldError> {
        self.powmod_big(&BigUint::from(e), m)
    }

    pub fn powmod_big(&self, e: &BigUint, m: &Self) -> Result<Self, FieldError> {
        let mut acc = Self::one(self.ring.clone()).rem(m)?;
        if e.is_zero() {
            return Ok(acc);
        }
        let base = self.rem(m)?;
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc).rem(m)?;
            if e.bit(i) {
                acc = acc.mul(&base).rem(m)?;
            }
        }
        Ok(acc)
    }
}

impl<R: Ring> PartialEq for UniPoly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<R: Ring> Eq for UniPoly<R> {}

impl<R: Ring> fmt::Debug for UniPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({self})")
    }
}

impl<R: Ring> fmt::Display for UniPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let r = &self.ring;
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if r.is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let is_one = r.is_one(c);
            if i == 0 || !is_one {
                write!(f, "{}", r.show(c))?;
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Rationals;

    fn q(cs: &[i64]) -> UniPoly<Rationals> {
        UniPoly::from_i64s(Rationals::new(), cs)
    }

    #[test]
    fn division_and_gcd() {
        let f = q(&[-1, 0, 1]);
        let g = q(&[-1, 1]);
        let (quot, rem) = f.divrem(&g).unwrap();
        assert_eq!(quot, q(&[1, 1]));
        assert!(rem.is_zero());
        assert_eq!(f.gcd(&g).unwrap(), g);
        assert_eq!(q(&[1, 0, 1]).gcd(&f).unwrap(), q(&[1]));
        assert!(UniPoly::zero(Rationals::new()).gcd(&UniPoly::zero(Rationals::new())).is_err());
    }

    #[test]
    fn evaluation_and_derivative() {
        let f = q(&[1, 2, 3]);
        assert_eq!(f.eval(&Rationals::new().from_i64(2)), Rationals::new().from_i64(17));
        assert_eq!(f.derivative(), q(&[2, 6]));
        assert_eq!(f.reversed(2), q(&[3, 2, 1]));
        assert_eq!(format!("{}", q(&[1, 0, -1])), "-1*t^2 + 1");
    }
}
