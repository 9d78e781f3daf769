//! Exact positivity certificates for polynomials that are strictly positive on
//! compact basic closed semialgebraic sets.
//!
//! Given generators `a = (a1, ..., am)` and a target `f`, the pipelines in
//! [`pipelines`] build explicit, exactly checkable memberships of `f` in
//!
//! * the semiring `S(a)` generated by the `aj` (Handelman, linear `a`),
//! * the quadratic module `M(a)` (Jacobi–Prestel, Putinar),
//! * the preordering `P(a)` (Schmüdgen, from a supplied Stengle pair).
//!
//! Every certificate is a list of terms `λ·p²·a1^k1⋯am^km` whose exact
//! expansion is compared against the target by [`cert::verify`].
//!
//! The algebraic layers ([`poly`], [`lp`], [`polya`], [`bounds`]) are generic
//! over an exact [`Field`]; certificates and pipelines are fixed to
//! [`Rational`].

pub mod bounds;
pub mod cert;
pub mod lp;
pub mod pipelines;
pub mod poly;
pub mod polya;
pub mod scalar;

pub use scalar::{Coeff, Field};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;
pub type Integer = num_bigint::BigInt;

pub type Poly = poly::Polynomial<Rational>;
pub type IntPoly = poly::Polynomial<Integer>;
pub type LinearSystem = lp::LinearSystem<Rational>;
pub type IntervalBox = bounds::IntervalBox<Rational>;

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
