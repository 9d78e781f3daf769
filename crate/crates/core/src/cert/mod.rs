//! Certificates of membership in `S(a)`, `P(a)` and `M(a)`.
//!
//! A certificate is a list of terms `λ·p²·g₁^k₁⋯gₙ^kₙ` over a named
//! [`GeneratorSystem`] together with the polynomial it claims to equal.
//! Nothing is trusted until [`verify`] has expanded it.

mod identities;
mod json;
mod ops;
mod system;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::poly::Ctx;
use crate::{Poly, Rational};

pub use identities::{box_sphere_identity, linear_ball_identity, product_identity, Sign};
pub use json::CertIoError;
pub use ops::{cert_compose, cert_mul_single, StenglePair};
pub use system::{Generator, GeneratorSystem, Provenance};
pub use verify::{
    expand, expand_naive, spot_check, verify, verify_independent, InvalidReason, Verdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Semiring,
    Preordering,
    QuadraticModule,
}

impl Flavor {
    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Semiring => "semiring",
            Flavor::Preordering => "preordering",
            Flavor::QuadraticModule => "quadratic_module",
        }
    }

    /// The smallest flavor whose terms include both inputs' legal terms.
    pub fn join(self, other: Flavor) -> Flavor {
        if self == other {
            self
        } else {
            Flavor::Preordering
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("generator name `{0}` is not an identifier")]
    BadGeneratorName(String),
    #[error("generator `{0}` is declared twice")]
    DuplicateGenerator(String),
    #[error("generator `{0}` is not in the system")]
    UnknownGenerator(String),
    #[error("generator `{0}` names different polynomials in the two systems")]
    GeneratorClash(String),
    #[error("polynomials live in different variable contexts")]
    ContextMismatch,
    #[error("expected a {expected} certificate, got {got}")]
    FlavorMismatch { expected: Flavor, got: Flavor },
    #[error("certificate has a term that is illegal for flavor {0}")]
    IllegalTerm(Flavor),
    #[error("certificates are over different generator systems")]
    SystemMismatch,
    #[error("expected a single-generator system, got {0} generators")]
    NotSingleGenerator(usize),
    #[error("inner target differs from generator `{0}`")]
    TargetMismatch(String),
    #[error("generator `{0}` appears with exponent above 1")]
    ExponentTooLarge(String),
    #[error("term {0} has a negative coefficient")]
    NegativeCoefficient(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("the Stengle identity target·(1+h) = 1+g fails")]
    StengleIdentity,
    #[error("Stengle certificate for {0} is not a valid preordering certificate: {1}")]
    StengleCert(&'static str, String),
}

/// One summand `coeff·square_root²·Π g^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertTerm {
    pub coeff: Rational,
    pub square_root: Poly,
    /// Generator name to exponent; zero exponents are never stored.
    pub exponents: BTreeMap<String, u32>,
}

impl CertTerm {
    pub fn new<I, S>(coeff: Rational, square_root: Poly, exponents: I) -> Self
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (name, k) in exponents {
            if k > 0 {
                *map.entry(name.into()).or_insert(0) += k;
            }
        }
        CertTerm {
            coeff,
            square_root,
            exponents: map,
        }
    }

    /// `coeff·1²·Π g^k`.
    pub fn scalar<I, S>(ctx: &Ctx, coeff: Rational, exponents: I) -> Self
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        Self::new(coeff, Poly::one(ctx), exponents)
    }

    pub fn exponent(&self, name: &str) -> u32 {
        self.exponents.get(name).copied().unwrap_or(0)
    }

    pub fn is_legal(&self, flavor: Flavor) -> bool {
        match flavor {
            Flavor::Semiring => self
                .square_root
                .as_constant()
                .is_some_and(|c| c == num_traits::One::one()),
            Flavor::Preordering => self.exponents.values().all(|&k| k <= 1),
            Flavor::QuadraticModule => {
                self.exponents.len() <= 1 && self.exponents.values().all(|&k| k == 1)
            }
        }
    }

    /// Moves `g^{2j}` factors into the square root: `g^k ↦ (g^{⌊k/2⌋})²·g^{k mod 2}`.
    pub(crate) fn absorb_even_powers(mut self, system: &GeneratorSystem) -> Self {
        let mut root = self.square_root;
        for (name, k) in self.exponents.iter_mut() {
            if *k >= 2 {
                let g = &system.get(name).expect("exponent names a generator").poly;
                root = root * g.pow(*k / 2);
                *k %= 2;
            }
        }
        self.exponents.retain(|_, k| *k > 0);
        self.square_root = root;
        self
    }
}

/// A claimed identity `target = Σ terms` over `system`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub flavor: Flavor,
    pub system: GeneratorSystem,
    pub target: Poly,
    pub terms: Vec<CertTerm>,
}

impl Certificate {
    pub fn new(
        flavor: Flavor,
        system: GeneratorSystem,
        target: Poly,
        terms: Vec<CertTerm>,
    ) -> Self {
        Certificate {
            flavor,
            system,
            target,
            terms,
        }
    }

    pub fn context(&self) -> &Ctx {
        self.system.context()
    }

    /// `1·1²·g`, the membership of a generator in every flavor.
    pub fn generator(
        system: GeneratorSystem,
        name: &str,
        flavor: Flavor,
    ) -> Result<Self, CertError> {
        let g = system
            .get(name)
            .ok_or_else(|| CertError::UnknownGenerator(name.into()))?
            .poly
            .clone();
        let term = CertTerm::scalar(system.context(), num_traits::One::one(), [(name, 1)]);
        Ok(Certificate::new(flavor, system, g, vec![term]))
    }

    /// `target = Σ terms` with the terms built by the caller and all
    /// generators taken from `system`.
    pub fn empty(flavor: Flavor, system: GeneratorSystem) -> Self {
        let zero = Poly::zero(system.context());
        Certificate::new(flavor, system, zero, Vec::new())
    }

    /// Same terms read under another flavor, if every term is legal there.
    pub fn relabel(&self, flavor: Flavor) -> Result<Self, CertError> {
        if self.terms.iter().all(|t| t.is_legal(flavor)) {
            Ok(Certificate {
                flavor,
                ..self.clone()
            })
        } else {
            Err(CertError::IllegalTerm(flavor))
        }
    }

    /// `c·self` for `c ≥ 0`.
    pub fn scaled(&self, c: &Rational) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|_| !num_traits::Zero::is_zero(c))
            .map(|t| CertTerm {
                coeff: &t.coeff * c,
                ..t.clone()
            })
            .collect();
        Certificate {
            terms,
            target: self.target.scale(c),
            ..self.clone()
        }
    }

    /// Appends `other`'s terms; both must share a generator system.
    pub fn add(&mut self, other: &Certificate) -> Result<(), CertError> {
        if self.system != other.system {
            return Err(CertError::SystemMismatch);
        }
        self.target = self
            .target
            .try_add(&other.target)
            .map_err(|_| CertError::ContextMismatch)?;
        self.terms.extend(other.terms.iter().cloned());
        Ok(())
    }

    /// Appends one term, adding its value to the target.
    pub fn push(&mut self, term: CertTerm) {
        let value = verify::term_value(&self.system, &term);
        self.target = &self.target + &value;
        self.terms.push(term);
    }

    /// Generators that occur with a nonzero exponent.
    pub fn used_generators(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .terms
            .iter()
            .flat_map(|t| t.exponents.keys().cloned())
            .collect();
        names.sort();
        names.dedup();
        names
    }
}
