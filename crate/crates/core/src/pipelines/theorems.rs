use num_traits::{One, Signed, Zero};

use super::ball::wormann_named;
use super::handelman::lp_error;
use super::schweighofer::schweighofer_traced;
use super::transfer::{choose_gamma, domain_transfer, TransferParams};
use super::{
    check_witness, cone_certificate, gate, Certified, PipelineError, ProblemInstance, Trace,
};
use crate::cert::{
    box_sphere_identity, cert_compose, CertTerm, Certificate, Flavor, GeneratorSystem, StenglePair,
};
use crate::lp::{bounding_box, farkas_decompose};
use crate::{IntervalBox, LinearSystem, Poly, Rational};

/// Quadratic-module certificate of `f` over `a`, given linear `l` with
/// certificates `l_certs` of `lⱼ ∈ M(a)` and `{l ≥ 0}` bounded.
pub fn jacobi_prestel_cert(
    instance: &ProblemInstance,
    l: &[Poly],
    l_certs: &[Certificate],
) -> Result<Certified, PipelineError> {
    instance.check()?;
    let mut trace = Trace::default();
    let certificate = jacobi_prestel_traced(instance, l, l_certs, &mut trace)?;
    Ok(Certified { certificate, trace })
}

fn jacobi_prestel_traced(
    instance: &ProblemInstance,
    l: &[Poly],
    l_certs: &[Certificate],
    trace: &mut Trace,
) -> Result<Certificate, PipelineError> {
    const STAGE: &str = "jacobi_prestel";
    let a = &instance.system;
    let ctx = a.context();
    let d = ctx.len();
    if l.len() != l_certs.len() {
        return Err(PipelineError::InvalidWitnessCert(format!(
            "{} linear polynomials but {} certificates",
            l.len(),
            l_certs.len()
        )));
    }
    let mut certs = Vec::with_capacity(l.len());
    for (j, (lj, c)) in l.iter().zip(l_certs).enumerate() {
        let what = format!("l{}", j + 1);
        let c = check_witness(c, a, &what)?;
        if &c.target != lj {
            return Err(PipelineError::InvalidWitnessCert(format!(
                "{what}: certifies {} instead of {lj}",
                c.target
            )));
        }
        if !lj.is_linear() {
            return Err(PipelineError::NotLinear(lj.to_string()));
        }
        certs.push(c);
    }
    if instance.config.short_circuit {
        if let Some(c) = cone_certificate(&instance.target, a, Flavor::QuadraticModule) {
            trace.record(STAGE, 0, &[], Some("cone short-circuit".into()));
            return gate(c, STAGE);
        }
    }

    let lsys = LinearSystem::new(ctx, l.to_vec()).map_err(lp_error)?;
    let bbox = bounding_box(&lsys).map_err(lp_error)?;
    let mut r = bbox
        .iter()
        .flat_map(|(lo, hi)| [lo.abs(), hi.abs()])
        .max()
        .unwrap_or_else(Rational::zero);
    if r.is_zero() {
        r = Rational::one();
    }

    // d − ‖X/R‖² scaled by R², with each 1 ± Xᵢ/R replaced by its M(a) certificate
    let mut rho_cert = box_sphere_identity(ctx, &r);
    let inv = Rational::one() / &r;
    for i in 0..d {
        for (prefix, sign) in [("up", Rational::one()), ("dn", -Rational::one())] {
            let side = Poly::one(ctx) + Poly::var(ctx, i).scale(&(&sign * &inv));
            let w = farkas_decompose(&side, &lsys).map_err(lp_error)?;
            let mut inner = Certificate::empty(Flavor::QuadraticModule, a.clone());
            if !w.multipliers[0].is_zero() {
                inner.push(CertTerm::scalar(
                    ctx,
                    w.multipliers[0].clone(),
                    std::iter::empty::<(String, u32)>(),
                ));
            }
            for (c, lam) in certs.iter().zip(&w.multipliers[1..]) {
                if !lam.is_zero() {
                    inner.add(&c.scaled(lam))?;
                }
            }
            rho_cert = cert_compose(&rho_cert, &format!("{prefix}{}", i + 1), &inner)?;
        }
    }
    let r2 = &r * &r;
    rho_cert.push(CertTerm::scalar(
        ctx,
        r2.clone(),
        std::iter::empty::<(String, u32)>(),
    ));
    let rho = &r2 * Rational::from_integer((d + 1).into());
    let rho_cert = gate(rho_cert, STAGE)?;
    trace.record(STAGE, 1, &[("R", &r), ("rho", &rho)], None);
    let cert = schweighofer_traced(instance, &rho, Some(&rho_cert), trace)?;
    gate(cert.relabel(Flavor::QuadraticModule)?, STAGE)
}

/// `cert` read over `system` as `flavor`; every generator it uses must name
/// the same polynomial there.
fn rehome(
    cert: &Certificate,
    system: &GeneratorSystem,
    flavor: Flavor,
) -> Result<Certificate, String> {
    let c = cert.relabel(flavor).map_err(|e| e.to_string())?;
    for name in c.used_generators() {
        if system.get(&name).map(|g| &g.poly) != c.system.get(&name).map(|g| &g.poly) {
            return Err(format!("generator `{name}` is not an instance generator"));
        }
    }
    Ok(Certificate::new(flavor, system.clone(), c.target, c.terms))
}

/// Preordering certificate of `f` over `a` from a Stengle pair for `ρ − ‖X‖²`.
pub fn schmudgen_cert(
    instance: &ProblemInstance,
    stengle: &StenglePair,
) -> Result<Certified, PipelineError> {
    instance.check()?;
    let mut trace = Trace::default();
    let certificate = schmudgen_traced(instance, stengle, &mut trace)?;
    Ok(Certified { certificate, trace })
}

fn schmudgen_traced(
    instance: &ProblemInstance,
    stengle: &StenglePair,
    trace: &mut Trace,
) -> Result<Certificate, PipelineError> {
    const STAGE: &str = "schmudgen";
    let a = &instance.system;
    let bad = |m: String| PipelineError::InvalidStenglePair(m);
    stengle.check().map_err(|e| bad(e.to_string()))?;
    if !crate::poly::same_context(stengle.target.context(), a.context()) {
        return Err(bad("different variable context".into()));
    }
    let rho = stengle.rho().ok_or_else(|| {
        bad(format!(
            "target {} is not ρ − ‖X‖² with ρ > 0",
            stengle.target
        ))
    })?;
    let g_cert = rehome(&stengle.g_cert, a, Flavor::Preordering).map_err(bad)?;
    let h_cert = rehome(&stengle.h_cert, a, Flavor::Preordering).map_err(bad)?;

    if instance.config.short_circuit {
        if let Some(c) = cone_certificate(&instance.target, a, Flavor::Preordering) {
            trace.record(STAGE, 0, &[], Some("cone short-circuit".into()));
            return gate(c, STAGE);
        }
    }

    let hn = a.fresh_name("h");
    let wn = {
        let mut w = a.fresh_name("w");
        while w == hn {
            w.push('_');
        }
        w
    };
    let (rho2, outer) = wormann_named(&h_cert.target, &rho, &hn, &wn)?;
    let mut one_plus_g = g_cert;
    one_plus_g.push(CertTerm::scalar(
        a.context(),
        Rational::one(),
        std::iter::empty::<(String, u32)>(),
    ));
    let rho_cert = cert_compose(&outer, &wn, &one_plus_g)?;
    let rho_cert = cert_compose(&rho_cert, &hn, &h_cert)?;
    let rho_cert = gate(rho_cert, STAGE)?;
    trace.record(STAGE, 1, &[("rho", &rho), ("rho_prime", &rho2)], None);

    let cert = schweighofer_traced(instance, &rho2, Some(&rho_cert), trace)?;
    gate(cert.relabel(Flavor::Preordering)?, STAGE)
}

/// Smallest positive integer `R` with `R² ≥ radius`.
fn integer_radius(radius: &Rational) -> Rational {
    let mut r = Rational::one();
    while &(&r * &r) < radius {
        r += Rational::one();
    }
    r
}

/// Lattice point with `g ≥ 0` outside the ball of squared radius `radius`.
fn radius_violation(
    g: &Poly,
    radius: &Rational,
    r: &Rational,
    limit: u64,
) -> Option<Vec<Rational>> {
    let d = g.nvars();
    let half_steps = (r + Rational::one()).to_integer();
    let span: u64 = u64::try_from(half_steps * 4u32).ok()?;
    let mut steps = span;
    while steps > 1 && (steps + 1).checked_pow(d as u32).is_none_or(|n| n > limit) {
        steps /= 2;
    }
    let lo = -(r + Rational::one());
    let width = (r + Rational::one()) * Rational::from_integer(2.into());
    let s = Rational::from_integer(steps.into());
    let mut k = vec![0u64; d];
    loop {
        let x: Vec<Rational> = k
            .iter()
            .map(|&ki| &lo + &width * Rational::from_integer(ki.into()) / &s)
            .collect();
        let norm: Rational = x.iter().map(|v| v * v).sum();
        if &norm > radius && !g.evaluate(&x).expect("point matches context").is_negative() {
            return Some(x);
        }
        let j = (0..d).find(|&j| k[j] < steps)?;
        k[j] += 1;
        for kk in &mut k[..j] {
            *kk = 0;
        }
    }
}

/// Quadratic-module certificate of `f` over `a` given `g ∈ M(a)` with
/// `{g ≥ 0}` inside the ball of squared radius `g_radius`.
pub fn putinar_cert(
    instance: &ProblemInstance,
    g_cert: &Certificate,
    g_radius: &Rational,
    stengle_for_g: Option<&StenglePair>,
) -> Result<Certified, PipelineError> {
    instance.check()?;
    let mut trace = Trace::default();
    let certificate = putinar_traced(instance, g_cert, g_radius, stengle_for_g, &mut trace)?;
    Ok(Certified { certificate, trace })
}

fn putinar_traced(
    instance: &ProblemInstance,
    g_cert: &Certificate,
    g_radius: &Rational,
    stengle_for_g: Option<&StenglePair>,
    trace: &mut Trace,
) -> Result<Certificate, PipelineError> {
    const STAGE: &str = "putinar";
    let a = &instance.system;
    let ctx = a.context();
    let f = &instance.target;
    let config = &instance.config;
    let g_cert = check_witness(g_cert, a, "g")?;
    let g = g_cert.target.clone();
    if !g_radius.is_positive() {
        return Err(PipelineError::InvalidParameter(format!(
            "g_radius = {g_radius} must be positive"
        )));
    }
    if config.short_circuit {
        if let Some(c) = cone_certificate(f, a, Flavor::QuadraticModule) {
            trace.record(STAGE, 0, &[], Some("cone short-circuit".into()));
            return gate(c, STAGE);
        }
    }

    if let Some(rho) = (&g + &Poly::norm_sq(ctx))
        .as_constant()
        .filter(|r| r.is_positive())
    {
        trace.record(STAGE, 0, &[("rho", &rho)], Some("ball fast path".into()));
        let cert = schweighofer_traced(instance, &rho, Some(&g_cert), trace)?;
        return gate(cert.relabel(Flavor::QuadraticModule)?, STAGE);
    }

    let stengle = stengle_for_g.ok_or(PipelineError::MissingStenglePair)?;
    let gsys = &stengle.g_cert.system;
    let bad = |m: &str| PipelineError::InvalidStenglePair(m.into());
    if gsys.len() != 1 || gsys.generators()[0].poly != g {
        return Err(bad("the pair must be over the single generator g"));
    }
    let g_name = gsys.generators()[0].name.clone();
    let r = integer_radius(g_radius);
    if let Some(x) = radius_violation(&g, g_radius, &r, config.grid_limit) {
        return Err(PipelineError::InvalidParameter(format!(
            "g ≥ 0 at {}, outside the ball of squared radius {g_radius}",
            super::fmt_point(&x)
        )));
    }
    let bx = IntervalBox::new(vec![(-r.clone(), r.clone()); ctx.len()]).expect("low ≤ high");

    let mut last = String::from("no rounds ran");
    let rounds = if a.is_empty() { 1 } else { config.max_rounds };
    for round in 0..rounds {
        let h = if round == 0 {
            Certificate::empty(Flavor::QuadraticModule, a.clone())
        } else {
            let params = TransferParams {
                gamma: choose_gamma(a, &bx)?,
                eps: config.eps_schedule.shrink(round - 1),
                n: config.transfer_n(round),
            };
            domain_transfer(a, &bx, &params)?
        };
        let sub = instance.retarget(gsys.clone(), f - &h.target);
        let over_g = match schmudgen_traced(&sub, stengle, trace) {
            Ok(c) => c,
            Err(PipelineError::CapExceeded { detail, .. }) => {
                last = format!("round {round}: {detail}");
                continue;
            }
            Err(e) => return Err(e),
        };
        let over_g = over_g.relabel(Flavor::QuadraticModule)?;
        let mut cert = cert_compose(&over_g, &g_name, &g_cert)?;
        cert.add(&h)?;
        trace.record(STAGE, round + 1, &[("R", &r)], None);
        return gate(cert.relabel(Flavor::QuadraticModule)?, STAGE);
    }
    Err(PipelineError::cap(
        STAGE,
        format!("{rounds} rounds, last: {last}"),
    ))
}
