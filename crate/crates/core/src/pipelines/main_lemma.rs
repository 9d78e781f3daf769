use num_traits::{One, Signed, Zero};

use super::{cone_certificate, gate, Certified, EscalationConfig, PipelineError, Trace};
use crate::cert::{CertTerm, Certificate, Flavor, GeneratorSystem, Provenance};
use crate::lp::invert;
use crate::poly::VariableContext;
use crate::polya::{polya_exponent_with, Exhaustion, PolyaError};
use crate::{Poly, Rational};

/// Semiring certificate of `f` over `(l₁, …, l_d, a₁, …, a_m, q)` with
/// `q = t − Σlᵢ − Σaⱼ`.
pub fn main_lemma_cert(
    f: &Poly,
    a: &GeneratorSystem,
    l: &[Poly],
    t: &Rational,
    config: &EscalationConfig,
) -> Result<Certified, PipelineError> {
    config.validate()?;
    let mut trace = Trace::default();
    let certificate = main_lemma_traced(f, a, l, t, config, &mut trace)?;
    Ok(Certified { certificate, trace })
}

/// The output system `(l…, a…, q)` with names that avoid `a`'s.
fn lemma_system(
    a: &GeneratorSystem,
    l: &[Poly],
    t: &Rational,
) -> Result<GeneratorSystem, PipelineError> {
    let ctx = a.context();
    let mut taken = a.clone();
    let mut l_names = Vec::with_capacity(l.len());
    for (i, li) in l.iter().enumerate() {
        let name = taken.fresh_name(&format!("l{}", i + 1));
        taken.push(name.clone(), li.clone(), Provenance::derived("coordinate"))?;
        l_names.push(name);
    }
    let q_name = taken.fresh_name("q");
    let mut q = Poly::constant(ctx, t.clone());
    for p in l.iter().chain(a.polys().iter()) {
        q = &q - p;
    }
    let mut sys = GeneratorSystem::new(ctx);
    for (name, li) in l_names.into_iter().zip(l) {
        sys.push(name, li.clone(), Provenance::derived("coordinate"))?;
    }
    for g in a.generators() {
        sys.push(g.name.clone(), g.poly.clone(), g.provenance.clone())?;
    }
    sys.push(q_name, q, Provenance::derived("simplex_slack"))?;
    Ok(sys)
}

pub(crate) fn main_lemma_traced(
    f: &Poly,
    a: &GeneratorSystem,
    l: &[Poly],
    t: &Rational,
    config: &EscalationConfig,
    trace: &mut Trace,
) -> Result<Certificate, PipelineError> {
    const STAGE: &str = "main_lemma";
    let ctx = a.context();
    let d = ctx.len();
    let m = a.len();
    if !t.is_positive() {
        return Err(PipelineError::InvalidParameter(format!(
            "t = {t} must be positive"
        )));
    }
    if l.len() != d || d == 0 {
        return Err(PipelineError::DegenerateCoordinates);
    }
    let mut matrix = Vec::with_capacity(d);
    let mut shift = Vec::with_capacity(d);
    for li in l {
        let (row, c0) = li
            .linear_parts()
            .ok_or_else(|| PipelineError::NotLinear(li.to_string()))?;
        matrix.push(row);
        shift.push(c0);
    }
    let inverse = invert(&matrix).ok_or(PipelineError::DegenerateCoordinates)?;
    let system = lemma_system(a, l, t)?;

    if config.short_circuit {
        if let Some(c) = cone_certificate(f, &system, Flavor::Semiring) {
            trace.record(STAGE, 0, &[("t", t)], Some("cone short-circuit".into()));
            return gate(c, STAGE);
        }
    }

    // Ring in L (the l-coordinates), Y (for a) and Z (for q).
    let names = (1..=d)
        .map(|i| format!("L{i}"))
        .chain((1..=m).map(|j| format!("Y{j}")))
        .chain(["Z".to_string()]);
    let ext = VariableContext::new(names).expect("distinct identifiers");
    // Xᵢ = Σₖ inverse[i][k]·(Lₖ − cₖ)
    let images: Vec<Poly> = inverse
        .iter()
        .map(|row| {
            let mut p = Poly::zero(&ext);
            for (k, w) in row.iter().enumerate() {
                if !w.is_zero() {
                    let lk = Poly::var(&ext, k) - Poly::constant(&ext, shift[k].clone());
                    p.add_scaled(&lk, w);
                }
            }
            p
        })
        .collect();
    let compose = |p: &Poly| {
        p.compose(&ext, &images)
            .expect("images share the extended context")
    };
    let f_new = compose(f);
    let mut penalty = Poly::zero(&ext);
    for (j, g) in a.polys().iter().enumerate() {
        let diff = Poly::var(&ext, d + j) - compose(g);
        penalty = penalty + diff.pow(2);
    }
    let sigma = Poly::sum_of_vars(&ext).scale(&(Rational::one() / t));
    let opts = config.polya_options();

    let mut last = String::new();
    for round in 0..config.max_rounds {
        let c = config.c_schedule.grow(round);
        let mut g = f_new.clone();
        g.add_scaled(&penalty, &c);
        if g.is_zero() {
            return Err(PipelineError::cap(
                STAGE,
                "f is zero on the extended simplex",
            ));
        }
        let g0 = g.homogenize(&sigma).expect("σ is linear homogeneous");
        match polya_exponent_with(&g0, &opts) {
            Ok(res) => {
                let scale = Rational::one() / num_traits::pow(t.clone(), res.exponent as usize);
                let terms = res
                    .expanded
                    .terms()
                    .map(|(mono, coeff)| {
                        let exps = mono
                            .exponents()
                            .iter()
                            .zip(system.generators())
                            .map(|(&k, g)| (g.name.clone(), k));
                        CertTerm::scalar(ctx, coeff * &scale, exps)
                    })
                    .collect();
                let cert = Certificate::new(Flavor::Semiring, system, f.clone(), terms);
                let n = res.exponent;
                trace.record(STAGE, round + 1, &[("C", &c), ("N", &n), ("t", t)], None);
                return gate(cert, STAGE);
            }
            Err(PolyaError::CapExceeded {
                reached, reason, ..
            }) => {
                last = match reason {
                    Exhaustion::Cap => {
                        format!("C = {c}: no Pólya exponent up to {}", config.polya_cap)
                    }
                    Exhaustion::GridCounterexample { value, .. } => {
                        format!("C = {c}: g₀ takes {value} on the simplex")
                    }
                    Exhaustion::TermLimit { terms } => {
                        format!("C = {c}: Pólya exponent {reached} needs {terms} terms")
                    }
                };
            }
            Err(e) => return Err(PipelineError::cap(STAGE, e.to_string())),
        }
    }
    Err(PipelineError::cap(
        STAGE,
        format!("{} rounds, last: {last}", config.max_rounds),
    ))
}
