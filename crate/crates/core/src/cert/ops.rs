use num_traits::{One, Signed};

use super::{verify, CertError, CertTerm, Certificate, Flavor, Verdict};
use crate::poly::same_context;
use crate::{Poly, Rational};

/// Product of two quadratic-module certificates over the same single
/// generator `s`. Terms meeting as `s·s` fold `s` into the square root.
pub fn cert_mul_single(c1: &Certificate, c2: &Certificate) -> Result<Certificate, CertError> {
    for c in [c1, c2] {
        if c.flavor != Flavor::QuadraticModule {
            return Err(CertError::FlavorMismatch {
                expected: Flavor::QuadraticModule,
                got: c.flavor,
            });
        }
    }
    if c1.system != c2.system {
        return Err(CertError::SystemMismatch);
    }
    if c1.system.len() != 1 {
        return Err(CertError::NotSingleGenerator(c1.system.len()));
    }
    let s = &c1.system.generators()[0];
    let mut terms = Vec::with_capacity(c1.terms.len() * c2.terms.len());
    for t1 in &c1.terms {
        for t2 in &c2.terms {
            let k = t1.exponent(&s.name) + t2.exponent(&s.name);
            let mut root = &t1.square_root * &t2.square_root;
            if k >= 2 {
                root = &root * &s.poly;
            }
            terms.push(CertTerm::new(
                &t1.coeff * &t2.coeff,
                root,
                [(s.name.clone(), k % 2)],
            ));
        }
    }
    let target = &c1.target * &c2.target;
    Ok(Certificate::new(
        Flavor::QuadraticModule,
        c1.system.clone(),
        target,
        terms,
    ))
}

/// Replaces generator `name` of `outer` by `inner`, a certificate whose
/// target is that generator's polynomial.
///
/// Each outer term `λp²·g·G` (with `G` the remaining factors) becomes the
/// terms `λλ'(pp')²·G·G'`. The result keeps `outer`'s flavor when every
/// term stays legal for it and otherwise is a preordering certificate, with
/// even generator powers folded into the square roots.
pub fn cert_compose(
    outer: &Certificate,
    name: &str,
    inner: &Certificate,
) -> Result<Certificate, CertError> {
    let g = outer
        .system
        .get(name)
        .ok_or_else(|| CertError::UnknownGenerator(name.into()))?;
    if !same_context(outer.context(), inner.context()) {
        return Err(CertError::ContextMismatch);
    }
    if inner.target != g.poly {
        return Err(CertError::TargetMismatch(name.into()));
    }
    for c in [outer, inner] {
        if let Some(i) = c.terms.iter().position(|t| t.coeff.is_negative()) {
            return Err(CertError::NegativeCoefficient(i));
        }
    }
    if outer.terms.iter().any(|t| t.exponent(name) > 1) {
        return Err(CertError::ExponentTooLarge(name.into()));
    }
    let system = outer.system.without(name).merge(&inner.system)?;

    let mut terms = Vec::new();
    for t in &outer.terms {
        if t.exponent(name) == 0 {
            terms.push(t.clone());
            continue;
        }
        let rest = t
            .exponents
            .iter()
            .filter(|(n, _)| n.as_str() != name)
            .map(|(n, &k)| (n.clone(), k));
        let rest: Vec<(String, u32)> = rest.collect();
        for u in &inner.terms {
            let exps = rest
                .iter()
                .cloned()
                .chain(u.exponents.iter().map(|(n, &k)| (n.clone(), k)));
            terms.push(CertTerm::new(
                &t.coeff * &u.coeff,
                &t.square_root * &u.square_root,
                exps,
            ));
        }
    }

    let flavor = if terms.iter().all(|t| t.is_legal(outer.flavor)) {
        outer.flavor
    } else {
        outer.flavor.join(inner.flavor)
    };
    if flavor != Flavor::Semiring {
        terms = terms
            .into_iter()
            .map(|t| t.absorb_even_powers(&system))
            .collect();
    }
    debug_assert!(terms.iter().all(|t| t.is_legal(flavor)));
    Ok(Certificate::new(
        flavor,
        system,
        outer.target.clone(),
        terms,
    ))
}

/// A Stengle pair `(g, h)` in `P(a)` with `target·(1+h) = 1+g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StenglePair {
    pub target: Poly,
    pub g_cert: Certificate,
    pub h_cert: Certificate,
}

impl StenglePair {
    /// Checks the identity and that both certificates are valid preordering
    /// certificates over one generator system.
    pub fn check(&self) -> Result<(), CertError> {
        for (label, c) in [("g", &self.g_cert), ("h", &self.h_cert)] {
            let as_pre = c
                .relabel(Flavor::Preordering)
                .map_err(|e| CertError::StengleCert(label, e.to_string()))?;
            if let Verdict::Invalid(r) = verify(&as_pre) {
                return Err(CertError::StengleCert(label, r.to_string()));
            }
        }
        if self.g_cert.system != self.h_cert.system {
            return Err(CertError::SystemMismatch);
        }
        let ctx = self.g_cert.context();
        if !same_context(self.target.context(), ctx) {
            return Err(CertError::ContextMismatch);
        }
        let one = Poly::one(ctx);
        let lhs = &self.target * &(&one + &self.h_cert.target);
        let rhs = &one + &self.g_cert.target;
        if lhs != rhs {
            return Err(CertError::StengleIdentity);
        }
        Ok(())
    }

    /// `ρ` when the target is `ρ − ‖X‖²`.
    pub fn rho(&self) -> Option<Rational> {
        let ctx = self.target.context();
        let rest = &self.target + &Poly::norm_sq(ctx);
        rest.as_constant().filter(|r| r.is_positive())
    }

    /// `1 + g`, the preordering certificate of `target·(1+h)`.
    pub fn one_plus_g(&self) -> Certificate {
        let mut c = self
            .g_cert
            .relabel(Flavor::Preordering)
            .expect("checked by check()");
        c.push(CertTerm::scalar(
            c.context(),
            Rational::one(),
            std::iter::empty::<(String, u32)>(),
        ));
        c
    }
}
