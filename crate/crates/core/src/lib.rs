//! Computational checks behind Picard-rank-one certificates for K3 surfaces
//! over the rationals: finite fields, polynomials, Gröbner bases, point
//! counting on Grassmannian and P^4 complete intersections, Weil polynomial
//! reconstruction, rank-2 lattice arithmetic, a hyperplane-section audit and
//! CRT lifting with structured certificates.

pub mod audit;
pub mod counting;
pub mod ffield;
pub mod gbases;
pub mod geometry;
pub mod grassmann;
pub mod lattice;
pub mod liftcert;
pub mod linalg;
pub mod mpoly;
pub mod ring;
pub mod zeta;

pub use ffield::{FieldElement, FieldError, GaloisField};
pub use mpoly::{MultiPoly, UniPoly};
pub use ring::{Field, Integers, NumRing, Rationals, Ring};

/// Polynomials with arbitrary-precision integer coefficients.
pub type IntPoly = MultiPoly<Integers>;
/// Polynomials with exact rational coefficients.
pub type RatPoly = MultiPoly<Rationals>;
/// Polynomials over a finite field.
pub type FqPoly = MultiPoly<GaloisField>;
/// Univariate polynomials with exact rational coefficients.
pub type RatUniPoly = UniPoly<Rationals>;
/// Univariate polynomials over a finite field.
pub type FqUniPoly = UniPoly<GaloisField>;
