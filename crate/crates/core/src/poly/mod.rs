//! Sparse multivariate polynomials with exact coefficients.

mod context;
mod monomial;
mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::Coeff;

pub(crate) use context::is_identifier;
pub use context::{Ctx, VariableContext};
pub use monomial::Monomial;
pub use text::ParseError;

pub(crate) use context::same_context;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomials live in different variable contexts")]
    ContextMismatch,
    #[error("expected a point with {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("the zero polynomial has no homogenization")]
    ZeroPolynomial,
    #[error("homogenizing form must be linear homogeneous and nonzero")]
    NotLinearHomogeneous,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Total degree. The zero polynomial has degree `NegInfinity`, which sorts
/// below every finite degree and never takes part in arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

/// `Σ c_α X^α` over a [`VariableContext`]; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<T> {
    ctx: Ctx,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Coeff> Polynomial<T> {
    pub fn zero(ctx: &Ctx) -> Self {
        Polynomial {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::constant(ctx, T::one())
    }

    pub fn constant(ctx: &Ctx, c: T) -> Self {
        Self::monomial(ctx, Monomial::one(ctx.len()), c)
    }

    pub fn monomial(ctx: &Ctx, m: Monomial, c: T) -> Self {
        assert_eq!(
            m.nvars(),
            ctx.len(),
            "monomial arity does not match context"
        );
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial {
            ctx: ctx.clone(),
            terms,
        }
    }

    /// The variable at `index`.
    pub fn var(ctx: &Ctx, index: usize) -> Self {
        Self::monomial(ctx, Monomial::var(ctx.len(), index), T::one())
    }

    pub fn var_named(ctx: &Ctx, name: &str) -> Result<Self, PolyError> {
        let i = ctx
            .index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.into()))?;
        Ok(Self::var(ctx, i))
    }

    /// Builds a polynomial from possibly repeated, possibly zero terms.
    pub fn from_terms<I>(ctx: &Ctx, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, T)>,
    {
        let mut map: BTreeMap<Monomial, T> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(
                m.nvars(),
                ctx.len(),
                "monomial arity does not match context"
            );
            accumulate(&mut map, m, c);
        }
        map.retain(|_, c| !c.is_zero());
        Polynomial {
            ctx: ctx.clone(),
            terms: map,
        }
    }

    /// Affine form `c0 + Σ coeffs[i]·X_i`.
    pub fn linear(ctx: &Ctx, coeffs: &[T], c0: T) -> Self {
        assert_eq!(coeffs.len(), ctx.len());
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (Monomial::var(ctx.len(), i), c.clone()))
            .chain(std::iter::once((Monomial::one(ctx.len()), c0)));
        Self::from_terms(ctx, terms)
    }

    /// `X1 + ... + Xd`.
    pub fn sum_of_vars(ctx: &Ctx) -> Self {
        Self::linear(ctx, &vec![T::one(); ctx.len()], T::zero())
    }

    /// `‖X‖² = X1² + ... + Xd²`.
    pub fn norm_sq(ctx: &Ctx) -> Self {
        let n = ctx.len();
        Self::from_terms(
            ctx,
            (0..n).map(|i| {
                let mut e = vec![0; n];
                e[i] = 2;
                (Monomial::new(e), T::one())
            }),
        )
    }

    pub fn context(&self) -> &Ctx {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.ctx.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &T)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, T)> {
        self.terms.into_iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn constant_term(&self) -> T {
        self.coeff(&Monomial::one(self.nvars()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn as_constant(&self) -> Option<T> {
        self.is_constant().then(|| self.constant_term())
    }

    pub fn degree(&self) -> Degree {
        match self.terms.keys().next_back() {
            None => Degree::NegInfinity,
            Some(m) => Degree::Finite(m.degree()),
        }
    }

    /// Degree at most one (the zero polynomial counts as linear).
    pub fn is_linear(&self) -> bool {
        self.degree() <= Degree::Finite(1)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Coefficients `(a, b)` with `self = a·X + b`, or `None` when not linear.
    pub fn linear_parts(&self) -> Option<(Vec<T>, T)> {
        if !self.is_linear() {
            return None;
        }
        let coeffs = (0..self.nvars())
            .map(|i| self.coeff(&Monomial::var(self.nvars(), i)))
            .collect();
        Some((coeffs, self.constant_term()))
    }

    /// Maximum exponent of each variable.
    pub fn max_exponents(&self) -> Vec<u32> {
        let mut out = vec![0; self.nvars()];
        for m in self.terms.keys() {
            for (o, &e) in out.iter_mut().zip(m.exponents()) {
                *o = (*o).max(e);
            }
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, v)| (m.clone(), v.clone() * c.clone()))
            .collect();
        Polynomial {
            ctx: self.ctx.clone(),
            terms,
        }
    }

    pub fn map_coeffs<U: Coeff>(&self, mut f: impl FnMut(&T) -> U) -> Polynomial<U> {
        Polynomial::from_terms(&self.ctx, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    fn check_ctx(&self, other: &Self) -> Result<(), PolyError> {
        if same_context(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(PolyError::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ctx(other)?;
        let (big, small) = if self.terms.len() >= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut terms = big.terms.clone();
        for (m, c) in &small.terms {
            accumulate(&mut terms, m.clone(), c.clone());
        }
        Ok(Polynomial {
            ctx: self.ctx.clone(),
            terms,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ctx(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, m.clone(), -c.clone());
        }
        Ok(Polynomial {
            ctx: self.ctx.clone(),
            terms,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ctx(other)?;
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                accumulate(&mut terms, m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        let out = Polynomial {
            ctx: self.ctx.clone(),
            terms,
        };
        out.debug_check();
        Ok(out)
    }

    /// In-place `self += c·other`.
    pub fn add_scaled(&mut self, other: &Self, c: &T) {
        assert!(
            same_context(&self.ctx, &other.ctx),
            "{}",
            PolyError::ContextMismatch
        );
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            accumulate(&mut self.terms, m.clone(), v.clone() * c.clone());
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one(&self.ctx);
        if n == 0 {
            return result;
        }
        let mut base = self.clone();
        let mut n = n;
        loop {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            base = &base * &base;
        }
        result
    }

    /// Exact value at `point`.
    pub fn evaluate(&self, point: &[T]) -> Result<T, PolyError> {
        if point.len() != self.nvars() {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars(),
                got: point.len(),
            });
        }
        let powers = power_table(point, &self.max_exponents());
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    v = v * powers[i][e as usize].clone();
                }
            }
            acc = acc + v;
        }
        Ok(acc)
    }

    /// Image under `var ↦ replacement`; `replacement` lives in the same context.
    pub fn substitute(&self, var: &str, replacement: &Self) -> Result<Self, PolyError> {
        self.check_ctx(replacement)?;
        let idx = self
            .ctx
            .index_of(var)
            .ok_or_else(|| PolyError::UnknownVariable(var.into()))?;
        let mut by_power: BTreeMap<u32, BTreeMap<Monomial, T>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut e = m.exponents().to_vec();
            let k = std::mem::replace(&mut e[idx], 0);
            by_power
                .entry(k)
                .or_default()
                .insert(Monomial::new(e), c.clone());
        }
        let mut out = Self::zero(&self.ctx);
        let mut power = Self::one(&self.ctx);
        let mut cur = 0;
        for (k, terms) in by_power {
            while cur < k {
                power = &power * replacement;
                cur += 1;
            }
            let part = Polynomial {
                ctx: self.ctx.clone(),
                terms,
            };
            out = &out + &(&part * &power);
        }
        Ok(out)
    }

    /// Simultaneous substitution `X_i ↦ images[i]`, all images sharing `target`.
    pub fn compose(&self, target: &Ctx, images: &[Self]) -> Result<Self, PolyError> {
        if images.len() != self.nvars() {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars(),
                got: images.len(),
            });
        }
        if images.iter().any(|p| !same_context(&p.ctx, target)) {
            return Err(PolyError::ContextMismatch);
        }
        let maxe = self.max_exponents();
        let powers: Vec<Vec<Self>> = images
            .iter()
            .zip(&maxe)
            .map(|(p, &e)| {
                let mut v = vec![Self::one(target)];
                for k in 0..e as usize {
                    let next = &v[k] * p;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut t = Self::constant(target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Re-expresses `self` in a context that contains all of its variable
    /// names (typically an extension).
    pub fn embed(&self, target: &Ctx) -> Result<Self, PolyError> {
        if same_context(&self.ctx, target) {
            return Ok(self.clone());
        }
        let map: Vec<usize> = self
            .ctx
            .names()
            .iter()
            .map(|n| {
                target
                    .index_of(n)
                    .ok_or_else(|| PolyError::UnknownVariable(n.clone()))
            })
            .collect::<Result<_, _>>()?;
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = vec![0; target.len()];
            for (i, &k) in m.exponents().iter().enumerate() {
                e[map[i]] = k;
            }
            (Monomial::new(e), c.clone())
        });
        Ok(Self::from_terms(target, terms))
    }

    /// `l^{deg f}·f(X/l)`: homogeneous of degree `deg f`, equal to `f`
    /// wherever `l = 1`.
    pub fn homogenize(&self, l: &Self) -> Result<Self, PolyError> {
        self.check_ctx(l)?;
        let deg = self.degree().finite().ok_or(PolyError::ZeroPolynomial)?;
        if l.degree() != Degree::Finite(1) || !l.is_homogeneous() {
            return Err(PolyError::NotLinearHomogeneous);
        }
        let mut lpow = vec![Self::one(&self.ctx)];
        for k in 0..deg as usize {
            let next = &lpow[k] * l;
            lpow.push(next);
        }
        let mut out = Self::zero(&self.ctx);
        for (m, c) in &self.terms {
            let shift = (deg - m.degree()) as usize;
            for (m2, c2) in &lpow[shift].terms {
                accumulate(&mut out.terms, m.mul(m2), c.clone() * c2.clone());
            }
        }
        out.debug_check();
        Ok(out)
    }

    #[inline]
    fn debug_check(&self) {
        debug_assert!(
            self.terms.values().all(|c| !c.is_zero()),
            "stored zero coefficient"
        );
    }
}

/// `powers[i][k] = point[i]^k` for `k ≤ maxe[i]`.
pub(crate) fn power_table<T: Coeff>(point: &[T], maxe: &[u32]) -> Vec<Vec<T>> {
    point
        .iter()
        .zip(maxe)
        .map(|(x, &e)| {
            let mut v = vec![T::one()];
            for k in 0..e as usize {
                let next = v[k].clone() * x.clone();
                v.push(next);
            }
            v
        })
        .collect()
}

fn accumulate<T: Coeff>(map: &mut BTreeMap<Monomial, T>, m: Monomial, c: T) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let sum = o.get().clone() + c;
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<T: Coeff> $trait<&Polynomial<T>> for &Polynomial<T> {
            type Output = Polynomial<T>;
            fn $method(self, rhs: &Polynomial<T>) -> Polynomial<T> {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<T: Coeff> $trait<Polynomial<T>> for Polynomial<T> {
            type Output = Polynomial<T>;
            fn $method(self, rhs: Polynomial<T>) -> Polynomial<T> {
                (&self).$method(&rhs)
            }
        }
        impl<T: Coeff> $trait<&Polynomial<T>> for Polynomial<T> {
            type Output = Polynomial<T>;
            fn $method(self, rhs: &Polynomial<T>) -> Polynomial<T> {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl<T: Coeff> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), -c.clone()))
            .collect();
        Polynomial {
            ctx: self.ctx.clone(),
            terms,
        }
    }
}

impl<T: Coeff> Neg for Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        -&self
    }
}

impl<T: Coeff> fmt::Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self} over {:?})", self.ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Poly, Rational};
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn ctx(names: &[&str]) -> Ctx {
        VariableContext::new(names.iter().copied()).unwrap()
    }

    fn p(c: &Ctx, s: &str) -> Poly {
        Poly::parse(c, s).unwrap()
    }

    #[test]
    fn addition_examples() {
        let c = VariableContext::standard(1);
        assert!((p(&c, "X1") + p(&c, "-X1")).is_zero());
        assert_eq!(p(&c, "X1 + 1") + p(&c, "X1 - 1"), p(&c, "2*X1"));
        assert_eq!(p(&c, "1/2*X1^2") + p(&c, "1/3*X1^2"), p(&c, "5/6*X1^2"));
    }

    #[test]
    fn multiplication_examples() {
        let c = VariableContext::standard(1);
        assert_eq!(p(&c, "1 + X1") * p(&c, "1 - X1"), p(&c, "1 - X1^2"));
        assert!((p(&c, "1 + X1") * Poly::zero(&c)).is_zero());
        assert_eq!(
            p(&c, "1 + X1").pow(2) * p(&c, "1 - X1"),
            p(&c, "1 + X1 - X1^2 - X1^3")
        );
        let prod = p(&c, "3*X1^2 + 1") * p(&c, "X1 - 2");
        assert_eq!(prod.degree(), Degree::Finite(3));
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let a = p(&VariableContext::standard(1), "X1");
        let b = p(&ctx(&["Y"]), "Y");
        assert_eq!(a.try_add(&b), Err(PolyError::ContextMismatch));
        assert_eq!(a.try_mul(&b), Err(PolyError::ContextMismatch));
    }

    #[test]
    fn evaluation_examples() {
        let c = VariableContext::standard(2);
        let f = p(&c, "X1^2 - X1*X2 + X2^2");
        assert_eq!(f.evaluate(&[q(1, 2), q(1, 2)]).unwrap(), q(1, 4));
        assert_eq!(
            Poly::one(&c).evaluate(&[q(7, 3), q(-2, 1)]).unwrap(),
            q(1, 1)
        );
        assert_eq!(p(&c, "X1").evaluate(&[q(0, 1), q(5, 1)]).unwrap(), q(0, 1));
        assert_eq!(
            f.evaluate(&[q(1, 1)]),
            Err(PolyError::DimensionMismatch {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn substitution_examples() {
        let c = ctx(&["Z", "t", "X1"]);
        assert_eq!(
            p(&c, "Z^2").substitute("Z", &p(&c, "t - X1")).unwrap(),
            p(&c, "t^2 - 2*t*X1 + X1^2")
        );
        let c = ctx(&["X1", "Y1"]);
        assert_eq!(
            p(&c, "Y1").substitute("Y1", &p(&c, "X1 + 3")).unwrap(),
            p(&c, "X1 + 3")
        );
        assert_eq!(
            p(&c, "X1*Y1").substitute("Y1", &p(&c, "1 - X1")).unwrap(),
            p(&c, "X1 - X1^2")
        );
        assert_eq!(
            p(&c, "X1").substitute("W", &p(&c, "1")),
            Err(PolyError::UnknownVariable("W".into()))
        );
    }

    #[test]
    fn homogenization_examples() {
        let c = VariableContext::standard(2);
        let l = p(&c, "X1 + X2");
        assert_eq!(p(&c, "1 + X1").homogenize(&l).unwrap(), p(&c, "2*X1 + X2"));
        assert_eq!(p(&c, "X1^2").homogenize(&l).unwrap(), p(&c, "X1^2"));
        assert_eq!(p(&c, "-7/2").homogenize(&l).unwrap(), p(&c, "-7/2"));
        assert_eq!(
            Poly::zero(&c).homogenize(&l),
            Err(PolyError::ZeroPolynomial)
        );
        assert_eq!(
            p(&c, "X1").homogenize(&p(&c, "X1 + 1")),
            Err(PolyError::NotLinearHomogeneous)
        );
        assert_eq!(
            p(&c, "X1").homogenize(&p(&c, "X1^2")),
            Err(PolyError::NotLinearHomogeneous)
        );
    }

    #[test]
    fn power_examples() {
        let c = VariableContext::standard(2);
        assert_eq!(p(&c, "X1 + X2").pow(2), p(&c, "X1^2 + 2*X1*X2 + X2^2"));
        assert_eq!(p(&c, "X1 - 5").pow(0), Poly::one(&c));
        assert_eq!(p(&c, "1 - X1").pow(3), p(&c, "1 - 3*X1 + 3*X1^2 - X1^3"));
    }

    #[test]
    fn zero_has_sentinel_degree() {
        let c = VariableContext::standard(1);
        assert_eq!(Poly::zero(&c).degree(), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Finite(0));
        assert_eq!(Poly::one(&c).degree(), Degree::Finite(0));
    }

    #[test]
    fn embedding_and_composition() {
        let small = VariableContext::standard(1);
        let big = small.extend(["Y"]).unwrap();
        let f = p(&small, "X1^2 + 1");
        let g = f.embed(&big).unwrap();
        assert_eq!(g, p(&big, "X1^2 + 1"));
        let images = [p(&big, "X1 + Y")];
        assert_eq!(
            f.compose(&big, &images).unwrap(),
            p(&big, "X1^2 + 2*X1*Y + Y^2 + 1")
        );
    }

    #[test]
    fn generic_over_integer_coefficients() {
        let c = VariableContext::standard(2);
        let f: Polynomial<BigInt> =
            Polynomial::linear(&c, &[BigInt::from(1), BigInt::from(1)], BigInt::from(0));
        let g = f.pow(3);
        assert_eq!(g.coeff(&Monomial::new(vec![2, 1])), BigInt::from(3));
        let h: Polynomial<num_rational::Ratio<i64>> =
            Polynomial::var(&c, 0).scale(&num_rational::Ratio::new(1, 2));
        assert_eq!(
            h.evaluate(&[
                num_rational::Ratio::new(4, 1),
                num_rational::Ratio::new(0, 1)
            ])
            .unwrap(),
            num_rational::Ratio::new(2, 1)
        );
    }
}
