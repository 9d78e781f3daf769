use num_traits::{One, Signed, Zero};

use super::PipelineError;
use crate::bounds::interval_eval;
use crate::cert::{CertTerm, Certificate, Flavor, GeneratorSystem};
use crate::{IntervalBox, Poly, Rational};

/// Constants of the domain-transfer polynomial `h(y) = y·((y−γ)/(γ+ε))^{2N}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferParams {
    pub gamma: Rational,
    pub eps: Rational,
    pub n: u32,
}

/// `(c(N), C(N))` with `c(N) = γ(γ/(γ+ε))^{2N}` and `C(N) = 2ε((γ+2ε)/(γ+ε))^{2N}`.
///
/// `0 ≤ h ≤ 2·c(N)` on `[0, 2γ]` and `−h ≥ C(N)` on `(−∞, −2ε]`. The sharper
/// `h ≤ c(N)` fails near `2γ`: with `γ = ε = N = 1`, `h(2) = ½ > ¼`.
pub fn transfer_bounds(gamma: &Rational, eps: &Rational, n: u32) -> (Rational, Rational) {
    let e = 2 * n as usize;
    let ge = gamma + eps;
    let c = gamma * num_traits::pow(gamma / &ge, e);
    let big = (eps + eps) * num_traits::pow((gamma + eps + eps) / &ge, e);
    (c, big)
}

/// Half the largest upper bound of any generator on `bx`, or 1 when no
/// generator can be positive there.
pub fn choose_gamma(a: &GeneratorSystem, bx: &IntervalBox) -> Result<Rational, PipelineError> {
    let mut best = Rational::zero();
    for g in a.generators() {
        let (_, hi) = interval_eval(&g.poly, bx)
            .map_err(|e| PipelineError::InvalidParameter(e.to_string()))?;
        if hi > best {
            best = hi;
        }
    }
    Ok(if best.is_positive() {
        best / Rational::from_integer(2.into())
    } else {
        Rational::one()
    })
}

/// `Σⱼ h(aⱼ)` as a quadratic-module certificate over `a`, one term
/// `(γ+ε)^{−2N}·((aⱼ−γ)^N)²·aⱼ` per generator. Requires `aⱼ ≤ 2γ` on `bx`.
pub fn domain_transfer(
    a: &GeneratorSystem,
    bx: &IntervalBox,
    params: &TransferParams,
) -> Result<Certificate, PipelineError> {
    let TransferParams { gamma, eps, n } = params;
    if !gamma.is_positive() || !eps.is_positive() {
        return Err(PipelineError::InvalidParameter(format!(
            "γ = {gamma} and ε = {eps} must be positive"
        )));
    }
    if *n == 0 {
        return Err(PipelineError::InvalidParameter(
            "N must be at least 1".into(),
        ));
    }
    let ctx = a.context();
    let two_gamma = gamma + gamma;
    let coeff = Rational::one() / num_traits::pow(gamma + eps, 2 * *n as usize);
    let shift = Poly::constant(ctx, gamma.clone());
    let mut cert = Certificate::empty(Flavor::QuadraticModule, a.clone());
    for g in a.generators() {
        let (_, hi) = interval_eval(&g.poly, bx)
            .map_err(|e| PipelineError::InvalidParameter(e.to_string()))?;
        if hi > two_gamma {
            return Err(PipelineError::GammaTooSmall {
                generator: g.name.clone(),
                high: Box::new(hi),
                bound: Box::new(two_gamma),
            });
        }
        let root = (&g.poly - &shift).pow(*n);
        cert.push(CertTerm::new(coeff.clone(), root, [(g.name.clone(), 1)]));
    }
    Ok(cert)
}
