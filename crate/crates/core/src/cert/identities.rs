//! Closed-form certificates: the product identity, the linear-ball identity
//! and the box-sphere identity.

use num_traits::One;

use super::{CertError, CertTerm, Certificate, Flavor, GeneratorSystem, Provenance};
use crate::poly::Ctx;
use crate::{Poly, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// `A₁⋯Aₙ ± B₁⋯Bₙ = 2^{1−n}·Σ_e Π(Aᵢ + eᵢBᵢ)`, the sum over sign vectors
/// `e ∈ {±1}ⁿ` with an even (`+`) or odd (`−`) number of `−1` entries.
///
/// A semiring certificate over `uᵢ = Aᵢ+Bᵢ` and `vᵢ = Aᵢ−Bᵢ`.
pub fn product_identity(a: &[Poly], b: &[Poly], sign: Sign) -> Result<Certificate, CertError> {
    let n = a.len();
    if n == 0 || b.len() != n {
        return Err(CertError::LengthMismatch(n, b.len()));
    }
    let ctx = a[0].context().clone();
    let rule = || Provenance::derived("product_identity");
    let mut sys = GeneratorSystem::new(&ctx);
    for i in 0..n {
        sys.push(format!("u{}", i + 1), &a[i] + &b[i], rule())?;
        sys.push(format!("v{}", i + 1), &a[i] - &b[i], rule())?;
    }
    let prod = |ps: &[Poly]| ps.iter().fold(Poly::one(&ctx), |acc, p| &acc * p);
    let target = match sign {
        Sign::Plus => prod(a) + prod(b),
        Sign::Minus => prod(a) - prod(b),
    };
    let coeff = Rational::new(1.into(), num_bigint::BigInt::from(2).pow(n as u32 - 1));
    let want_odd = sign == Sign::Minus;
    let mut terms = Vec::with_capacity(1 << (n - 1));
    for mask in 0u64..(1u64 << n) {
        // bit i set: eᵢ = −1
        if (mask.count_ones() % 2 == 1) != want_odd {
            continue;
        }
        let exps = (0..n).map(|i| {
            let name = if mask >> i & 1 == 1 {
                format!("v{}", i + 1)
            } else {
                format!("u{}", i + 1)
            };
            (name, 1)
        });
        terms.push(CertTerm::scalar(&ctx, coeff.clone(), exps));
    }
    Ok(Certificate::new(Flavor::Semiring, sys, target, terms))
}

/// The single-generator system `{s = ρ − ‖X‖²}`.
pub(crate) fn ball_system(ctx: &Ctx, rho: &Rational) -> GeneratorSystem {
    let s = Poly::constant(ctx, rho.clone()) - Poly::norm_sq(ctx);
    GeneratorSystem::new(ctx)
        .with("s", s, Provenance::derived("ball"))
        .expect("fresh system")
}

/// `ρ+1 ± Xᵢ = ½((ρ+1) + (1 ± Xᵢ)² + Σ_{j≠i} Xⱼ² + (ρ − ‖X‖²))` as a
/// quadratic-module certificate over `s = ρ − ‖X‖²`.
pub fn linear_ball_identity(ctx: &Ctx, rho: &Rational, i: usize, sign: Sign) -> Certificate {
    let half = Rational::new(1.into(), 2.into());
    let sys = ball_system(ctx, rho);
    let one = Poly::one(ctx);
    let xi = Poly::var(ctx, i);
    let lin = match sign {
        Sign::Plus => &one + &xi,
        Sign::Minus => &one - &xi,
    };
    let none = || std::iter::empty::<(String, u32)>();
    let mut terms = vec![
        CertTerm::scalar(ctx, &half * (rho + Rational::one()), none()),
        CertTerm::new(half.clone(), lin, none()),
    ];
    for j in (0..ctx.len()).filter(|&j| j != i) {
        terms.push(CertTerm::new(half.clone(), Poly::var(ctx, j), none()));
    }
    terms.push(CertTerm::scalar(ctx, half, [("s", 1)]));
    let c = Poly::constant(ctx, rho + Rational::one());
    let target = match sign {
        Sign::Plus => c + xi,
        Sign::Minus => c - xi,
    };
    Certificate::new(Flavor::QuadraticModule, sys, target, terms)
}

/// `r²d − ‖X‖² = Σᵢ ½r²((1+Xᵢ/r)²(1−Xᵢ/r) + (1−Xᵢ/r)²(1+Xᵢ/r))` over the
/// generators `upᵢ = 1+Xᵢ/r` and `dnᵢ = 1−Xᵢ/r`.
pub fn box_sphere_identity(ctx: &Ctx, r: &Rational) -> Certificate {
    let d = ctx.len();
    let one = Poly::one(ctx);
    let inv = Rational::one() / r;
    let mut sys = GeneratorSystem::new(ctx);
    let mut terms = Vec::with_capacity(2 * d);
    let c = r * r / Rational::from_integer(2.into());
    for i in 0..d {
        let y = Poly::var(ctx, i).scale(&inv);
        let (up, dn) = (&one + &y, &one - &y);
        let (nu, nd) = (format!("up{}", i + 1), format!("dn{}", i + 1));
        sys.push(nu.clone(), up.clone(), Provenance::derived("box"))
            .expect("distinct names");
        sys.push(nd.clone(), dn.clone(), Provenance::derived("box"))
            .expect("distinct names");
        terms.push(CertTerm::new(c.clone(), up, [(nd, 1)]));
        terms.push(CertTerm::new(c.clone(), dn, [(nu, 1)]));
    }
    let target = Poly::constant(ctx, r * r * Rational::from_integer(d.into())) - Poly::norm_sq(ctx);
    Certificate::new(Flavor::QuadraticModule, sys, target, terms)
}
