//! Coefficient rings. Polynomials, linear algebra and Gröbner bases are generic
//! over a [`Ring`] context object so the same code runs over the integers, the
//! rationals and finite fields.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::marker::PhantomData;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::ffield::FieldError;

/// A commutative ring with identity. Elements are plain values; all operations
/// go through the context so that finite fields can carry their tables.
pub trait Ring: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// Characteristic of the ring (0 for the integers and rationals).
    fn characteristic(&self) -> u64;
    fn fmt_elem(&self, a: &Self::Elem, f: &mut fmt::Formatter<'_>) -> fmt::Result;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Wraps an element so it can be printed with `{}`.
    fn show<'a>(&'a self, a: &'a Self::Elem) -> ShowElem<'a, Self>
    where
        Self: Sized,
    {
        ShowElem { ring: self, elem: a }
    }
}

/// A field: a ring with inverses of nonzero elements.
pub trait Field: Ring {
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }
}

pub struct ShowElem<'a, R: Ring> {
    ring: &'a R,
    elem: &'a R::Elem,
}

impl<R: Ring> Display for ShowElem<'_, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ring.fmt_elem(self.elem, f)
    }
}

/// Scalars usable through the blanket [`NumRing`] context.
pub trait Scalar:
    num_traits::Num + Clone + Eq + Hash + Debug + Display + Send + Sync + 'static
{
    fn from_i64(n: i64) -> Self;
}

impl Scalar for i64 {
    fn from_i64(n: i64) -> Self {
        n
    }
}

impl Scalar for i128 {
    fn from_i64(n: i64) -> Self {
        n as i128
    }
}

impl Scalar for BigInt {
    fn from_i64(n: i64) -> Self {
        BigInt::from(n)
    }
}

impl<I> Scalar for Ratio<I>
where
    I: Scalar + Integer,
{
    fn from_i64(n: i64) -> Self {
        Ratio::from_integer(I::from_i64(n))
    }
}

/// Ring context for any num-traits scalar (machine integers, big integers,
/// exact rationals).
pub struct NumRing<T>(PhantomData<fn() -> T>);

impl<T> NumRing<T> {
    pub const fn new() -> Self {
        NumRing(PhantomData)
    }
}

impl<T> Default for NumRing<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> Clone for NumRing<T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for NumRing<T> {}

impl<T> PartialEq for NumRing<T> {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl<T> Debug for NumRing<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumRing<{}>", std::any::type_name::<T>())
    }
}

impl<T: Scalar> Ring for NumRing<T> {
    type Elem = T;

    fn zero(&self) -> T {
        T::zero()
    }
    fn one(&self) -> T {
        T::one()
    }
    fn is_zero(&self, a: &T) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &T, b: &T) -> T {
        a.clone() + b.clone()
    }
    fn neg(&self, a: &T) -> T {
        T::zero() - a.clone()
    }
    fn sub(&self, a: &T, b: &T) -> T {
        a.clone() - b.clone()
    }
    fn mul(&self, a: &T, b: &T) -> T {
        a.clone() * b.clone()
    }
    fn from_i64(&self, n: i64) -> T {
        T::from_i64(n)
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn fmt_elem(&self, a: &T, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{a}")
    }
}

impl<I> Field for NumRing<Ratio<I>>
where
    I: Scalar + Integer,
{
    fn inv(&self, a: &Ratio<I>) -> Result<Ratio<I>, FieldError> {
        if a.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(Ratio::one() / a.clone())
        }
    }
}

/// The integers with arbitrary precision.
pub type Integers = NumRing<BigInt>;
/// The rationals as reduced fractions of big integers.
pub type Rationals = NumRing<num_rational::BigRational>;
