use num_traits::{One, Signed, Zero};

use super::main_lemma::main_lemma_traced;
use super::{cone_certificate, gate, Certified, PipelineError, ProblemInstance, Trace};
use crate::cert::{CertTerm, Certificate, Flavor};
use crate::lp::{bounding_box, farkas_decompose, is_empty, lp_optimize, LpError, LpOutcome, Sense};
use crate::{LinearSystem, Poly, Rational};

/// Semiring certificate of `f` over linear generators `a` whose polyhedron
/// is nonempty and bounded.
pub fn handelman_cert(instance: &ProblemInstance) -> Result<Certified, PipelineError> {
    instance.check()?;
    let mut trace = Trace::default();
    let certificate = handelman_traced(instance, &mut trace)?;
    Ok(Certified { certificate, trace })
}

pub(super) fn lp_error(e: LpError) -> PipelineError {
    match e {
        LpError::NotLinear(p) => PipelineError::NotLinear(p),
        LpError::EmptyPolyhedron => PipelineError::EmptyPolyhedron,
        LpError::Unbounded => PipelineError::UnboundedPolyhedron,
        LpError::ContextMismatch => PipelineError::ContextMismatch,
        LpError::NotRepresentable => {
            PipelineError::InvalidParameter("Farkas decomposition failed".into())
        }
    }
}

pub(crate) fn handelman_traced(
    instance: &ProblemInstance,
    trace: &mut Trace,
) -> Result<Certificate, PipelineError> {
    const STAGE: &str = "handelman";
    let a = &instance.system;
    let f = &instance.target;
    let ctx = a.context();
    for g in a.generators() {
        if !g.poly.is_linear() {
            return Err(PipelineError::NotLinear(g.name.clone()));
        }
    }
    let sys = LinearSystem::new(ctx, a.polys()).map_err(lp_error)?;
    if is_empty(&sys) {
        return Err(PipelineError::EmptyPolyhedron);
    }
    if instance.config.short_circuit {
        if let Some(c) = cone_certificate(f, a, Flavor::Semiring) {
            trace.record(STAGE, 0, &[], Some("cone short-circuit".into()));
            return gate(c, STAGE);
        }
    }
    let bbox = bounding_box(&sys).map_err(lp_error)?;

    // lᵢ = Xᵢ − lowᵢ ≥ 0 on S
    let l: Vec<Poly> = bbox
        .iter()
        .enumerate()
        .map(|(i, (lo, _))| Poly::var(ctx, i) - Poly::constant(ctx, lo.clone()))
        .collect();
    let mut total = Poly::zero(ctx);
    for p in l.iter().chain(a.polys().iter()) {
        total = &total + p;
    }
    let t_min = match lp_optimize(&sys, &total, Sense::Max).map_err(lp_error)? {
        LpOutcome::Optimal { value, .. } => value,
        LpOutcome::Unbounded => return Err(PipelineError::UnboundedPolyhedron),
        LpOutcome::Infeasible => return Err(PipelineError::EmptyPolyhedron),
    };
    let mut t = t_min + &instance.config.t_slack;
    if !t.is_positive() {
        t = Rational::one();
    }

    let lemma = main_lemma_traced(f, a, &l, &t, &instance.config, trace).map_err(|e| match e {
        PipelineError::CapExceeded { stage, detail, .. } => PipelineError::CapExceeded {
            stage,
            detail,
            counterexample: super::grid_counterexample(f, &sys, &bbox, instance.config.grid_limit),
        },
        other => other,
    })?;

    // Farkas witnesses over cone{1, a} for every lemma generator; aⱼ maps to itself.
    let formal = a.formal_context();
    let mut images = Vec::with_capacity(lemma.system.len());
    for g in lemma.system.generators() {
        let image = match a.index_of(&g.name) {
            Some(j) => Poly::var(&formal, j),
            None => {
                let w = farkas_decompose(&g.poly, &sys).map_err(lp_error)?;
                Poly::linear(&formal, &w.multipliers[1..], w.multipliers[0].clone())
            }
        };
        images.push(image);
    }
    let lemma_ring = lemma.system.formal_context();
    let mut product = Poly::zero(&lemma_ring);
    for term in &lemma.terms {
        let exps: Vec<u32> = lemma
            .system
            .names()
            .iter()
            .map(|n| term.exponent(n))
            .collect();
        product.add_scaled(
            &Poly::monomial(
                &lemma_ring,
                crate::poly::Monomial::new(exps),
                Rational::one(),
            ),
            &term.coeff,
        );
    }
    let expanded = product
        .compose(&formal, &images)
        .expect("images share the formal ring");

    let names = a.names();
    let terms = expanded
        .terms()
        .filter(|(_, c)| !c.is_zero())
        .map(|(m, c)| {
            CertTerm::scalar(
                ctx,
                c.clone(),
                names.iter().cloned().zip(m.exponents().iter().copied()),
            )
        })
        .collect();
    trace.record(STAGE, 1, &[("t", &t)], None);
    gate(
        Certificate::new(Flavor::Semiring, a.clone(), f.clone(), terms),
        STAGE,
    )
}
