use std::collections::BTreeMap;

use num_integer::binomial;
use num_traits::{One, Signed, Zero};

use super::PipelineError;
use crate::cert::{
    cert_mul_single, linear_ball_identity, CertTerm, Certificate, Flavor, GeneratorSystem,
    Provenance, Sign,
};
use crate::poly::Ctx;
use crate::{Poly, Rational};

/// `t` with both `t + f` and `t − f` in `M(ρ − ‖X‖²)`, and their certificates.
#[derive(Debug, Clone)]
pub struct BoxBound {
    pub t: Rational,
    pub plus: Certificate,
    pub minus: Certificate,
}

/// `t(f, ρ) = Σ |c_α|·(ρ+1)^{|α|}`.
pub fn t_bound(f: &Poly, rho: &Rational) -> Rational {
    let base = rho + Rational::one();
    f.terms()
        .map(|(m, c)| c.abs() * num_traits::pow(base.clone(), m.degree() as usize))
        .fold(Rational::zero(), |a, b| a + b)
}

/// Certificates of `t ± f` over the single generator `s = ρ − ‖X‖²`.
pub fn box_bound_cert(f: &Poly, rho: &Rational) -> Result<BoxBound, PipelineError> {
    box_bound_named(f, rho, "s")
}

pub(crate) fn ball_system_named(ctx: &Ctx, rho: &Rational, name: &str) -> GeneratorSystem {
    let s = Poly::constant(ctx, rho.clone()) - Poly::norm_sq(ctx);
    GeneratorSystem::new(ctx)
        .with(name, s, Provenance::derived("ball"))
        .expect("fresh system")
}

/// `cert` with its single generator `s` renamed.
fn renamed(cert: Certificate, system: &GeneratorSystem) -> Certificate {
    let name = &system.generators()[0].name;
    let terms = cert
        .terms
        .into_iter()
        .map(|t| {
            let k = t.exponents.values().sum::<u32>();
            CertTerm::new(t.coeff, t.square_root, [(name.clone(), k)])
        })
        .collect();
    Certificate::new(cert.flavor, system.clone(), cert.target, terms)
}

/// Certificates of the linear factors `ρ+1 ± Xⱼ` and their products.
pub(crate) struct FactorCache {
    system: GeneratorSystem,
    factors: Vec<Certificate>,
    products: BTreeMap<Vec<usize>, Certificate>,
}

impl FactorCache {
    pub(crate) fn new(ctx: &Ctx, rho: &Rational, name: &str) -> Self {
        let system = ball_system_named(ctx, rho, name);
        let mut factors = Vec::with_capacity(2 * ctx.len());
        for j in 0..ctx.len() {
            for sign in [Sign::Plus, Sign::Minus] {
                factors.push(renamed(linear_ball_identity(ctx, rho, j, sign), &system));
            }
        }
        FactorCache {
            system,
            factors,
            products: BTreeMap::new(),
        }
    }

    /// Factor `2j` is `ρ+1+Xⱼ` and factor `2j+1` is `ρ+1−Xⱼ`.
    pub(crate) fn with_factors(system: GeneratorSystem, factors: Vec<Certificate>) -> Self {
        FactorCache {
            system,
            factors,
            products: BTreeMap::new(),
        }
    }

    pub(crate) fn factor_poly(&self, i: usize) -> &Poly {
        &self.factors[i].target
    }

    /// Product of the distinct factors in `odd` (sorted).
    pub(crate) fn product(&mut self, odd: &[usize]) -> Result<&Certificate, PipelineError> {
        if !self.products.contains_key(odd) {
            let ctx = self.system.context();
            let unit = CertTerm::scalar(ctx, Rational::one(), std::iter::empty::<(String, u32)>());
            let mut acc = Certificate::new(
                Flavor::QuadraticModule,
                self.system.clone(),
                Poly::one(ctx),
                vec![unit],
            );
            for &i in odd {
                acc = cert_mul_single(&acc, &self.factors[i])?;
            }
            self.products.insert(odd.to_vec(), acc);
        }
        Ok(&self.products[odd])
    }

    /// Appends `weight·Π factorᵢ^{countsᵢ}` to `out`, squaring paired factors
    /// into the root.
    pub(crate) fn push_product(
        &mut self,
        out: &mut Vec<CertTerm>,
        weight: &Rational,
        counts: &[u32],
    ) -> Result<(), PipelineError> {
        let ctx = self.system.context().clone();
        let mut root = Poly::one(&ctx);
        let mut odd = Vec::new();
        for (i, &k) in counts.iter().enumerate() {
            if k >= 2 {
                root = root * self.factor_poly(i).pow(k / 2);
            }
            if k % 2 == 1 {
                odd.push(i);
            }
        }
        let prod = self.product(&odd)?;
        for u in &prod.terms {
            out.push(CertTerm {
                coeff: weight * &u.coeff,
                square_root: &root * &u.square_root,
                exponents: u.exponents.clone(),
            });
        }
        Ok(())
    }

    pub(crate) fn system(&self) -> &GeneratorSystem {
        &self.system
    }
}

pub(crate) fn box_bound_named(
    f: &Poly,
    rho: &Rational,
    name: &str,
) -> Result<BoxBound, PipelineError> {
    if !rho.is_positive() {
        return Err(PipelineError::InvalidParameter(format!(
            "ρ = {rho} must be positive"
        )));
    }
    let ctx = f.context();
    let d = ctx.len();
    let t = t_bound(f, rho);
    let mut cache = FactorCache::new(ctx, rho, name);
    let (mut plus, mut minus) = (Vec::new(), Vec::new());
    let none = || std::iter::empty::<(String, u32)>();

    for (m, c) in f.terms() {
        let n = m.degree();
        if n == 0 {
            let (p, q) = (c.abs() + c, c.abs() - c);
            if !p.is_zero() {
                plus.push(CertTerm::scalar(ctx, p, none()));
            }
            if !q.is_zero() {
                minus.push(CertTerm::scalar(ctx, q, none()));
            }
            continue;
        }
        // (ρ+1)^n ± X^α = 2^{1−n}·Σ_k Π_j C(αⱼ,kⱼ)·(ρ+1+Xⱼ)^{αⱼ−kⱼ}(ρ+1−Xⱼ)^{kⱼ},
        // over k with Σkⱼ even for `+` and odd for `−`.
        let alpha = m.exponents();
        let base = c.abs() / Rational::from_integer(num_bigint::BigInt::from(2).pow(n - 1));
        let mut k = vec![0u32; d];
        loop {
            let minus_count: u32 = k.iter().sum();
            let mut weight = base.clone();
            let mut counts = vec![0u32; 2 * d];
            for j in 0..d {
                weight *= Rational::from_integer(binomial(alpha[j] as u64, k[j] as u64).into());
                counts[2 * j] = alpha[j] - k[j];
                counts[2 * j + 1] = k[j];
            }
            // t + f wants the sign of c; t − f the opposite
            let even = minus_count.is_multiple_of(2);
            let into_plus = even == c.is_positive();
            cache.push_product(
                if into_plus { &mut plus } else { &mut minus },
                &weight,
                &counts,
            )?;

            let Some(j) = (0..d).find(|&j| k[j] < alpha[j]) else {
                break;
            };
            k[j] += 1;
            for kk in &mut k[..j] {
                *kk = 0;
            }
        }
    }

    let system = cache.system().clone();
    let tp = Poly::constant(ctx, t.clone());
    let plus = Certificate::new(Flavor::QuadraticModule, system.clone(), &tp + f, plus);
    let minus = Certificate::new(Flavor::QuadraticModule, system, &tp - f, minus);
    Ok(BoxBound { t, plus, minus })
}

/// `ρ' = ρ(1 + t/2)²` with `t = t(h, ρ)`, and a quadratic-module certificate
/// of `ρ' − ‖X‖²` over `H = h` and `W = (1+h)(ρ − ‖X‖²)`.
pub fn wormann_radius(h: &Poly, rho: &Rational) -> Result<(Rational, Certificate), PipelineError> {
    wormann_named(h, rho, "h", "w")
}

pub(crate) fn wormann_named(
    h: &Poly,
    rho: &Rational,
    hn: &str,
    wn: &str,
) -> Result<(Rational, Certificate), PipelineError> {
    let ctx = h.context();
    let bound = box_bound_named(h, rho, "s")?;
    let t = bound.t;
    let one = Poly::one(ctx);
    let s = Poly::constant(ctx, rho.clone()) - Poly::norm_sq(ctx);
    let w = (&one + h) * s;
    let system = GeneratorSystem::new(ctx)
        .with(hn, h.clone(), Provenance::derived("wormann"))?
        .with(wn, w, Provenance::derived("wormann"))?;

    let none = || std::iter::empty::<(String, u32)>();
    let mut terms = vec![CertTerm::scalar(ctx, Rational::one(), [(wn, 1)])];
    for i in 0..ctx.len() {
        terms.push(CertTerm::new(Rational::one(), Poly::var(ctx, i), [(hn, 1)]));
    }
    // ρ(1+h)(t − h), read off the certificate of t − h over s
    for u in &bound.minus.terms {
        let c = rho * &u.coeff;
        if u.exponents.is_empty() {
            terms.push(CertTerm::new(c.clone(), u.square_root.clone(), none()));
            terms.push(CertTerm::new(c, u.square_root.clone(), [(hn, 1)]));
        } else {
            terms.push(CertTerm::new(c, u.square_root.clone(), [(wn, 1)]));
        }
    }
    let half_t = &t / Rational::from_integer(2.into());
    terms.push(CertTerm::new(
        rho.clone(),
        Poly::constant(ctx, half_t.clone()) - h,
        none(),
    ));

    let rho2 = rho * num_traits::pow(Rational::one() + &half_t, 2);
    let target = Poly::constant(ctx, rho2.clone()) - Poly::norm_sq(ctx);
    Ok((
        rho2,
        Certificate::new(Flavor::QuadraticModule, system, target, terms),
    ))
}
