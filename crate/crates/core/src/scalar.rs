//! Scalar traits the algebra is generic over.
//!
//! Sparse polynomials drop zero coefficients, certificates compare
//! expansions for equality, and the simplex method branches on signs, so every
//! scalar here must have exact equality and a total order. Floating point
//! types do not qualify and are not supported.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, One, Signed, Zero};

/// A coefficient ring: exact, totally ordered, signed.
///
/// Satisfied by `BigInt`, `BigRational` and the fixed-width `Ratio` types.
pub trait Coeff:
    Clone + Debug + Display + Eq + Hash + Ord + Num + Signed + FromPrimitive + Send + Sync + 'static
{
}

impl<T> Coeff for T where
    T: Clone
        + Debug
        + Display
        + Eq
        + Hash
        + Ord
        + Num
        + Signed
        + FromPrimitive
        + Send
        + Sync
        + 'static
{
}

/// An ordered field of fractions over an integer type.
///
/// The integer view is what lets Pólya expansions and grid scans run in the
/// ring after clearing denominators.
pub trait Field: Coeff {
    type Int: Coeff + Integer;

    fn numer_int(&self) -> Self::Int;
    fn denom_int(&self) -> Self::Int;
    fn from_int(value: Self::Int) -> Self;

    fn from_frac(numer: Self::Int, denom: Self::Int) -> Self {
        Self::from_int(numer) / Self::from_int(denom)
    }

    fn from_i64(value: i64) -> Self {
        <Self as FromPrimitive>::from_i64(value).expect("every field here contains the integers")
    }

    fn from_u64(value: u64) -> Self {
        <Self as FromPrimitive>::from_u64(value).expect("every field here contains the integers")
    }

    /// Smallest integer not below `self`.
    fn ceil_int(&self) -> Self::Int {
        let (q, r) = self.numer_int().div_mod_floor(&self.denom_int());
        if r.is_zero() {
            q
        } else {
            q + Self::Int::one()
        }
    }
}

impl<T> Field for Ratio<T>
where
    T: Coeff + Integer,
    Ratio<T>: Coeff,
{
    type Int = T;

    fn numer_int(&self) -> T {
        self.numer().clone()
    }

    fn denom_int(&self) -> T {
        self.denom().clone()
    }

    fn from_int(value: T) -> Self {
        Ratio::from_integer(value)
    }

    fn from_frac(numer: T, denom: T) -> Self {
        Ratio::new(numer, denom)
    }
}
