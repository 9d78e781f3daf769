use num_traits::{One, Signed};

use super::ball::{box_bound_named, FactorCache};
use super::handelman::handelman_traced;
use super::transfer::{choose_gamma, domain_transfer, TransferParams};
use super::{cone_certificate, gate, Certified, PipelineError, ProblemInstance, Trace};
use crate::bounds::grid_min;
use crate::cert::{
    cert_compose, verify, CertTerm, Certificate, Flavor, GeneratorSystem, Provenance, Verdict,
};
use crate::{IntervalBox, Poly, Rational};

/// Quadratic-module certificate of `f` over `a ∪ {ρ − ‖X‖²}`, or over `a`
/// alone when a certificate of `ρ − ‖X‖²` is supplied.
pub fn schweighofer_cert(
    instance: &ProblemInstance,
    rho: &Rational,
    rho_cert: Option<&Certificate>,
) -> Result<Certified, PipelineError> {
    instance.check()?;
    let mut trace = Trace::default();
    let certificate = schweighofer_traced(instance, rho, rho_cert, &mut trace)?;
    Ok(Certified { certificate, trace })
}

/// Lattice steps per axis keeping the grid within `limit` points.
fn grid_steps(d: usize, degree: u32, limit: u64) -> u32 {
    let mut steps = (8 * degree.max(1)).min(64);
    while steps > 1
        && (steps as u64 + 1)
            .checked_pow(d as u32)
            .is_none_or(|n| n > limit)
    {
        steps -= 1;
    }
    steps
}

pub(crate) fn schweighofer_traced(
    instance: &ProblemInstance,
    rho: &Rational,
    rho_cert: Option<&Certificate>,
    trace: &mut Trace,
) -> Result<Certificate, PipelineError> {
    const STAGE: &str = "schweighofer";
    let a = &instance.system;
    let f = &instance.target;
    let ctx = a.context();
    let d = ctx.len();
    let config = &instance.config;
    if !rho.is_positive() {
        return Err(PipelineError::InvalidParameter(format!(
            "ρ = {rho} must be positive"
        )));
    }
    let ball = Poly::constant(ctx, rho.clone()) - Poly::norm_sq(ctx);
    if let Some(rc) = rho_cert {
        if rc.target != ball {
            return Err(PipelineError::InvalidWitnessCert(format!(
                "ρ certificate target is not {ball}"
            )));
        }
        if let Verdict::Invalid(r) = verify(rc) {
            return Err(PipelineError::InvalidWitnessCert(format!(
                "ρ certificate: {r}"
            )));
        }
    }
    let mut s_name = String::from("s");
    while a.get(&s_name).is_some() || rho_cert.is_some_and(|rc| rc.system.get(&s_name).is_some()) {
        s_name.push('_');
    }
    let ext = a
        .clone()
        .with(s_name.clone(), ball, Provenance::derived("ball"))?;
    let finish = |cert: Certificate, trace: &mut Trace| -> Result<Certificate, PipelineError> {
        let cert = gate(cert, STAGE)?;
        match rho_cert {
            Some(rc) => {
                let composed = cert_compose(&cert, &s_name, rc)?;
                trace.record("compose_ball", 0, &[("rho", rho)], None);
                gate(composed, STAGE)
            }
            None => Ok(cert),
        }
    };

    if config.short_circuit {
        if let Some(c) = cone_certificate(f, &ext, Flavor::QuadraticModule) {
            trace.record(STAGE, 0, &[("rho", rho)], Some("cone short-circuit".into()));
            return finish(c, trace);
        }
    }

    // Box generators tᵇ + lᵢ over lᵢ ∈ {Xᵢ, 1 − Xᵢ}, each certified in M(s).
    let one = Poly::one(ctx);
    let box_l: Vec<Poly> = (0..d)
        .flat_map(|i| [Poly::var(ctx, i), &one - &Poly::var(ctx, i)])
        .collect();
    let bounds = box_l
        .iter()
        .map(|li| box_bound_named(li, rho, &s_name))
        .collect::<Result<Vec<_>, _>>()?;
    let t = bounds
        .iter()
        .map(|b| b.t.clone())
        .max()
        .unwrap_or_else(Rational::one);
    let mut bsys = GeneratorSystem::new(ctx);
    let mut factors = Vec::with_capacity(2 * d);
    for (i, (li, b)) in box_l.iter().zip(bounds).enumerate() {
        let tp = Poly::constant(ctx, t.clone());
        bsys.push(format!("b{}", i + 1), &tp + li, Provenance::derived("box"))?;
        let mut c = b.plus;
        c.push(CertTerm::scalar(
            ctx,
            &t - &b.t,
            std::iter::empty::<(String, u32)>(),
        ));
        factors.push(c);
    }
    let ball_sys = factors
        .first()
        .map(|c| c.system.clone())
        .unwrap_or_else(|| super::ball::ball_system_named(ctx, rho, &s_name));
    let mut cache = FactorCache::with_factors(ball_sys, factors);
    let bx = IntervalBox::new(vec![(-t.clone(), &t + Rational::one()); d]).expect("low ≤ high");

    let rounds = if a.is_empty() { 1 } else { config.max_rounds };
    let mut last = String::from("no rounds ran");
    for round in 0..rounds {
        let (g, consts) = if round == 0 {
            (Certificate::empty(Flavor::QuadraticModule, a.clone()), None)
        } else {
            let params = TransferParams {
                gamma: choose_gamma(a, &bx)?,
                eps: config.eps_schedule.shrink(round - 1),
                n: config.transfer_n(round),
            };
            (domain_transfer(a, &bx, &params)?, Some(params))
        };
        let residual = f - &g.target;
        let deg = residual.degree().finite().unwrap_or(0);
        if d > 0 {
            let steps = grid_steps(d, deg, config.grid_limit);
            if let Ok((v, at)) = grid_min(&residual, &bx, steps, config.grid_limit) {
                if !v.is_positive() {
                    last = format!(
                        "round {round}: f − g takes {v} at {}",
                        super::fmt_point(&at)
                    );
                    continue;
                }
            }
        }
        let sub = instance.retarget(bsys.clone(), residual);
        let lifted = match handelman_traced(&sub, trace) {
            Ok(c) => c,
            Err(PipelineError::CapExceeded { detail, .. }) => {
                last = format!("round {round}: {detail}");
                continue;
            }
            Err(e) => return Err(e),
        };

        let mut terms = g.terms.clone();
        let names = bsys.names();
        for term in &lifted.terms {
            let counts: Vec<u32> = names.iter().map(|n| term.exponent(n)).collect();
            cache.push_product(&mut terms, &term.coeff, &counts)?;
        }
        match &consts {
            Some(p) => trace.record(
                STAGE,
                round + 1,
                &[
                    ("rho", rho),
                    ("t", &t),
                    ("gamma", &p.gamma),
                    ("eps", &p.eps),
                    ("N", &p.n),
                ],
                None,
            ),
            None => trace.record(STAGE, round + 1, &[("rho", rho), ("t", &t)], None),
        }
        return finish(
            Certificate::new(Flavor::QuadraticModule, ext.clone(), f.clone(), terms),
            trace,
        );
    }
    Err(PipelineError::cap(
        STAGE,
        format!("{rounds} rounds, last: {last}"),
    ))
}
