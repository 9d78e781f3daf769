//! Certificate pipelines: the main lemma, Handelman, the ball lemmas,
//! domain transfer, and the Jacobi–Prestel, Schmüdgen and Putinar
//! constructions built on them.
//!
//! Every existential constant is found by deterministic escalation. Every
//! certificate leaves a pipeline only after [`verify`] accepts it.

mod ball;
mod handelman;
mod main_lemma;
mod schweighofer;
mod theorems;
mod transfer;

use std::collections::BTreeMap;
use std::fmt::Display;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::bounds::DEFAULT_GRID_LIMIT;
use crate::cert::{
    spot_check, verify, CertError, CertTerm, Certificate, Flavor, GeneratorSystem, Verdict,
};
use crate::lp::cone_decompose;
use crate::polya::DEFAULT_MAX_TERMS;
use crate::{Poly, Rational};

pub use ball::{box_bound_cert, t_bound, wormann_radius, BoxBound};
pub use handelman::handelman_cert;
pub use main_lemma::main_lemma_cert;
pub use schweighofer::schweighofer_cert;
pub use theorems::{jacobi_prestel_cert, putinar_cert, schmudgen_cert};
pub use transfer::{choose_gamma, domain_transfer, transfer_bounds, TransferParams};

/// Geometric schedule `start·ratio^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub start: Rational,
    pub ratio: Rational,
}

impl Schedule {
    pub fn new(start: Rational, ratio: Rational) -> Self {
        Schedule { start, ratio }
    }

    /// `start·ratio^k`.
    pub fn grow(&self, k: u32) -> Rational {
        &self.start * num_traits::pow(self.ratio.clone(), k as usize)
    }

    /// `start/ratio^k`.
    pub fn shrink(&self, k: u32) -> Rational {
        &self.start / num_traits::pow(self.ratio.clone(), k as usize)
    }
}

/// `(x1, ..., xd)` with exact rationals.
pub(crate) fn fmt_point(x: &[Rational]) -> String {
    let parts: Vec<String> = x.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

/// Escalation constants shared by all pipelines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EscalationConfig {
    pub polya_cap: u32,
    /// Main-lemma constant `C`, increasing.
    pub c_schedule: Schedule,
    /// Domain-transfer exponent `N`, increasing and rounded up.
    pub n_schedule: Schedule,
    /// Domain-transfer `ε`, decreasing.
    pub eps_schedule: Schedule,
    pub max_rounds: u32,
    /// Added to the least `t` with `q ≥ 0` in Handelman.
    pub t_slack: Rational,
    /// Certify targets in `cone{1, generators}` directly.
    pub short_circuit: bool,
    pub grid_limit: u64,
    pub max_terms: usize,
}

impl Default for EscalationConfig {
    fn default() -> Self {
        let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
        EscalationConfig {
            polya_cap: 60,
            c_schedule: Schedule::new(r(1, 16), r(2, 1)),
            n_schedule: Schedule::new(r(1, 1), r(3, 2)),
            eps_schedule: Schedule::new(r(1, 1), r(2, 1)),
            max_rounds: 12,
            t_slack: Rational::zero(),
            short_circuit: true,
            grid_limit: DEFAULT_GRID_LIMIT,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

impl EscalationConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::InvalidConfig(m.into()));
        for (name, s) in [
            ("c_schedule", &self.c_schedule),
            ("n_schedule", &self.n_schedule),
            ("eps_schedule", &self.eps_schedule),
        ] {
            if !s.start.is_positive() {
                return bad(&format!("{name}: start must be positive"));
            }
            if s.ratio <= Rational::one() {
                return bad(&format!("{name}: ratio must exceed 1"));
            }
        }
        if self.polya_cap == 0
            || self.max_rounds == 0
            || self.grid_limit == 0
            || self.max_terms == 0
        {
            return bad("caps must be at least 1");
        }
        if self.t_slack.is_negative() {
            return bad("t_slack must be nonnegative");
        }
        Ok(())
    }

    /// Domain-transfer exponent of round `k ≥ 1`.
    pub(crate) fn transfer_n(&self, k: u32) -> u32 {
        let v = self.n_schedule.grow(k - 1);
        let c = v.ceil().to_integer();
        u32::try_from(c).unwrap_or(u32::MAX).max(1)
    }

    pub fn polya_options(&self) -> crate::polya::PolyaOptions {
        crate::polya::PolyaOptions {
            cap: self.polya_cap,
            grid_denominator: None,
            grid_limit: self.grid_limit,
            max_terms: self.max_terms,
        }
    }
}

/// Generators `a`, target `f` and escalation settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    pub system: GeneratorSystem,
    pub target: Poly,
    pub config: EscalationConfig,
}

impl ProblemInstance {
    pub fn new(system: GeneratorSystem, target: Poly) -> Self {
        ProblemInstance {
            system,
            target,
            config: EscalationConfig::default(),
        }
    }

    pub fn with_config(mut self, config: EscalationConfig) -> Self {
        self.config = config;
        self
    }

    fn check(&self) -> Result<(), PipelineError> {
        self.config.validate()?;
        if !crate::poly::same_context(self.target.context(), self.system.context()) {
            return Err(PipelineError::ContextMismatch);
        }
        Ok(())
    }

    fn retarget(&self, system: GeneratorSystem, target: Poly) -> Self {
        ProblemInstance {
            system,
            target,
            config: self.config.clone(),
        }
    }
}

/// One pipeline stage: its constants and how many escalation rounds it used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageRecord {
    pub stage: String,
    pub rounds: u32,
    pub constants: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub stages: Vec<StageRecord>,
}

impl Trace {
    pub(crate) fn record(
        &mut self,
        stage: &str,
        rounds: u32,
        constants: &[(&str, &dyn Display)],
        note: Option<String>,
    ) {
        self.stages.push(StageRecord {
            stage: stage.into(),
            rounds,
            constants: constants
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            note,
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// A verified certificate and the trace of the run that built it.
#[derive(Debug, Clone)]
pub struct Certified {
    pub certificate: Certificate,
    pub trace: Trace,
}

/// A point where the target takes the nonpositive `value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub value: Rational,
    pub point: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("generator or constraint `{0}` is not linear")]
    NotLinear(String),
    #[error("the polyhedron is empty")]
    EmptyPolyhedron,
    #[error("the polyhedron is unbounded")]
    UnboundedPolyhedron,
    #[error("the linear polynomials do not form a coordinate system")]
    DegenerateCoordinates,
    #[error("escalation exhausted in {stage}: {detail}")]
    CapExceeded {
        stage: String,
        detail: String,
        /// A point where the target is not positive, when one was found.
        counterexample: Option<Box<Counterexample>>,
    },
    #[error("generator `{generator}` reaches {high} on the box, above 2γ = {bound}")]
    GammaTooSmall {
        generator: String,
        high: Box<Rational>,
        bound: Box<Rational>,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid witness certificate: {0}")]
    InvalidWitnessCert(String),
    #[error("invalid Stengle pair: {0}")]
    InvalidStenglePair(String),
    #[error("the general path needs a Stengle pair for g")]
    MissingStenglePair,
    #[error("invalid escalation config: {0}")]
    InvalidConfig(String),
    #[error("target and generators live in different variable contexts")]
    ContextMismatch,
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error("internal error: constructed certificate failed verification in {stage}: {reason}")]
    Unverified { stage: String, reason: String },
}

impl PipelineError {
    fn cap(stage: &str, detail: impl Into<String>) -> Self {
        PipelineError::CapExceeded {
            stage: stage.into(),
            detail: detail.into(),
            counterexample: None,
        }
    }
}

/// The verification gate every pipeline passes its result through.
pub(crate) fn gate(cert: Certificate, stage: &str) -> Result<Certificate, PipelineError> {
    if let Verdict::Invalid(r) = verify(&cert) {
        return Err(PipelineError::Unverified {
            stage: stage.into(),
            reason: r.to_string(),
        });
    }
    if !spot_check(&cert, 20) {
        return Err(PipelineError::Unverified {
            stage: stage.into(),
            reason: "numeric spot check".into(),
        });
    }
    Ok(cert)
}

/// `f = λ₀ + Σ λⱼ·gⱼ` with `λ ≥ 0`, as a one-generator-per-term certificate.
/// A positive multiple of a single generator is preferred over other splits.
pub(crate) fn cone_certificate(
    f: &Poly,
    system: &GeneratorSystem,
    flavor: Flavor,
) -> Option<Certificate> {
    let ctx = system.context();
    for g in system.generators() {
        let Some((m, c)) = g.poly.terms().next() else {
            continue;
        };
        let lam = f.coeff(m) / c;
        if lam.is_positive() && &g.poly.scale(&lam) == f {
            let term = CertTerm::scalar(ctx, lam, [(g.name.clone(), 1)]);
            return Some(Certificate::new(
                flavor,
                system.clone(),
                f.clone(),
                vec![term],
            ));
        }
    }
    let gens = system.polys();
    let w = cone_decompose(f, &gens)?;
    let mut terms = Vec::new();
    if !w.multipliers[0].is_zero() {
        terms.push(CertTerm::scalar(
            ctx,
            w.multipliers[0].clone(),
            std::iter::empty::<(String, u32)>(),
        ));
    }
    for (g, lam) in system.generators().iter().zip(&w.multipliers[1..]) {
        if !lam.is_zero() {
            terms.push(CertTerm::scalar(ctx, lam.clone(), [(g.name.clone(), 1)]));
        }
    }
    Some(Certificate::new(flavor, system.clone(), f.clone(), terms))
}

/// `cert` as a valid quadratic-module certificate over `system`. Every
/// generator it uses must name the same polynomial in `system`.
pub(crate) fn check_witness(
    cert: &Certificate,
    system: &GeneratorSystem,
    what: &str,
) -> Result<Certificate, PipelineError> {
    let invalid = |m: String| PipelineError::InvalidWitnessCert(format!("{what}: {m}"));
    let qm = cert
        .relabel(Flavor::QuadraticModule)
        .map_err(|e| invalid(e.to_string()))?;
    if !crate::poly::same_context(qm.context(), system.context()) {
        return Err(invalid("different variable context".into()));
    }
    if let Verdict::Invalid(r) = verify(&qm) {
        return Err(invalid(r.to_string()));
    }
    for name in qm.used_generators() {
        if system.get(&name).map(|g| &g.poly) != qm.system.get(&name).map(|g| &g.poly) {
            return Err(invalid(format!(
                "generator `{name}` is not an instance generator"
            )));
        }
    }
    Ok(Certificate::new(
        Flavor::QuadraticModule,
        system.clone(),
        qm.target,
        qm.terms,
    ))
}

/// Best-effort search for a lattice point of `S` inside `bbox` where `f ≤ 0`.
pub(crate) fn grid_counterexample(
    f: &Poly,
    sys: &crate::LinearSystem,
    bbox: &[(Rational, Rational)],
    limit: u64,
) -> Option<Box<Counterexample>> {
    let d = bbox.len();
    let mut steps = 16u64;
    while steps > 1 && (steps + 1).checked_pow(d as u32).is_none_or(|n| n > limit) {
        steps /= 2;
    }
    let s = Rational::from_integer(steps.into());
    let mut k = vec![0u64; d];
    let mut best: Option<Box<Counterexample>> = None;
    loop {
        let point: Vec<Rational> = bbox
            .iter()
            .zip(&k)
            .map(|((lo, hi), &ki)| lo + (hi - lo) * Rational::from_integer(ki.into()) / &s)
            .collect();
        if sys.contains(&point) {
            let v = f.evaluate(&point).expect("point matches context");
            if !v.is_positive() && best.as_ref().is_none_or(|b| v < b.value) {
                best = Some(Box::new(Counterexample { value: v, point }));
            }
        }
        let Some(j) = (0..d).find(|&j| k[j] < steps) else {
            break;
        };
        k[j] += 1;
        for kk in &mut k[..j] {
            *kk = 0;
        }
    }
    best
}
